"""Fourier coefficient tables for every modular form in play.

The weight-3 newforms for labels A..E are eta quotients; label F is a CM
form realized through the two reduced binary quadratic forms of discriminant
-24, with the non-principal sign pinned by the known q - 2q^2 + 3q^3 prefix.
The odd-weight binary theta family and the weight-2 Eisenstein series round
out the set.  Structural relations between the tables are verified here;
analytic consequences live in `lvalues`.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, isqrt

import mpmath as mp

from .ground import as_int, is_integral, mpq
from .numerics import GUARD_BITS, ApproxComplex, PrecisionUnreachable, to_mp, wrap_auto
from .qseries import QSeries, eta_quotient_expand, first_mismatch24, series_compose
from .reports import Report
from .sequences import franel_term, sporadic_term

E2_TERM_CAP = 10**6


class CMValidationFailed(Exception):
    """The CM table does not reproduce the required leading coefficients."""


class NonRealCoefficient(Exception):
    """Imaginary parts of a theta lattice sum failed to cancel."""


class CoefficientUnavailable(Exception):
    """A requested Fourier coefficient is beyond the generated table."""


# eta quotient data: list of (scale m, exponent e) for prod eta(m tau)^e
ETA_NEWFORMS = {
    "A": [(4, 5), (8, 5), (2, -2), (16, -2)],
    "B": [(4, 6)],
    "C": [(2, 3), (6, 3)],
    "D": [(4, 6)],
    "E": [(1, 2), (2, 1), (4, 1), (8, 2)],
}

WEIGHT4_ETA = [(2, 4), (4, 4)]

# weight and level per form id; binary theta forms carry level 16 metadata
WEIGHT_LEVEL = {
    "A": (3, 32),
    "B": (3, 16),
    "C": (3, 12),
    "D": (3, 16),
    "E": (3, 8),
    "F": (3, 24),
    "weight4": (4, 8),
}


@dataclass(frozen=True)
class CoeffTable:
    label: str
    weight: int
    level: int
    gamma: tuple  # gamma[n] for n >= 1; gamma[0] = 0 placeholder

    @property
    def n_max(self) -> int:
        return len(self.gamma) - 1

    def __getitem__(self, n: int) -> int:
        if n < 0 or n >= len(self.gamma):
            raise CoefficientUnavailable(f"{self.label}: coefficient {n} not generated")
        return self.gamma[n]

    def get(self, n: int, default: int = 0) -> int:
        """Coefficient with out-of-band indices (like n/2 for odd n) as default."""
        if 1 <= n < len(self.gamma):
            return self.gamma[n]
        if n < 1:
            return default
        raise CoefficientUnavailable(f"{self.label}: coefficient {n} not generated")


def _eta_table(label: str, factors, weight: int, level: int, n_max: int) -> CoeffTable:
    series = eta_quotient_expand(factors, n_max)
    if series.offset24 != 24:
        raise ValueError(f"{label}: eta quotient does not start at q^1")
    gamma = [0] * (n_max + 1)
    for e24, c in series.terms24():
        n = e24 // 24
        if n <= n_max:
            if not is_integral(c):
                raise ValueError(f"{label}: non-integer coefficient at {n}")
            gamma[n] = as_int(c)
    return CoeffTable(label, weight, level, tuple(gamma))


def newform_coeffs(label: str, n_max: int) -> CoeffTable:
    """Weight-3 newform table for a sporadic label."""
    if label in ETA_NEWFORMS:
        w, lev = WEIGHT_LEVEL[label]
        return _eta_table(label, ETA_NEWFORMS[label], w, lev, n_max)
    if label == "F":
        return cm_level24_coeffs(n_max)
    raise ValueError(f"unknown label {label!r}")


def weight4_coeffs(n_max: int) -> CoeffTable:
    w, lev = WEIGHT_LEVEL["weight4"]
    return _eta_table("weight4", WEIGHT4_ETA, w, lev, n_max)


def cm_level24_coeffs(n_max: int) -> CoeffTable:
    """CM newform of weight 3 and level 24 via binary quadratic forms.

    gamma(n) = (1/2) sum_{x^2+6y^2=n} (x^2-6y^2) - (1/2) sum_{2x^2+3y^2=n} (2x^2-3y^2);
    the minus sign on the non-principal class is the convention that makes
    the table start q - 2q^2 + 3q^3.
    """
    twice = [0] * (n_max + 1)
    bx = isqrt(n_max)
    for x in range(-bx, bx + 1):
        x2 = x * x
        by = isqrt(max(0, (n_max - x2) // 6))
        for y in range(-by, by + 1):
            n = x2 + 6 * y * y
            if 1 <= n <= n_max:
                twice[n] += x2 - 6 * y * y
    bx = isqrt(n_max // 2)
    for x in range(-bx, bx + 1):
        tx2 = 2 * x * x
        by = isqrt(max(0, (n_max - tx2) // 3))
        for y in range(-by, by + 1):
            n = tx2 + 3 * y * y
            if 1 <= n <= n_max:
                twice[n] -= 2 * x * x - 3 * y * y
    gamma = [0] * (n_max + 1)
    for n, v in enumerate(twice):
        if v % 2:
            raise CMValidationFailed(f"class sums not even at n={n}")
        gamma[n] = v // 2
    expected = [1, -2, 3]
    got = gamma[1 : min(n_max, 3) + 1]
    if got != expected[: len(got)]:
        raise CMValidationFailed(f"prefix {got} != {expected[:len(got)]}")
    return CoeffTable("F", 3, 24, tuple(gamma))


def binary_theta_coeffs(k: int, n_max: int) -> CoeffTable:
    """Odd-weight binary theta series table from the exact lattice sum."""
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be an odd integer >= 3")
    half = (k - 1) // 2
    quarters = [0] * (n_max + 1)
    im_parts = [0] * (n_max + 1)
    bound = isqrt(n_max)
    for a in range(-bound, bound + 1):
        a2 = a * a
        bb = isqrt(n_max - a2)
        for b in range(-bb, bb + 1):
            n = a2 + b * b
            if n < 1:
                continue
            sign = -1 if (b * half) % 2 else 1
            # (a - i b)^(k-1) by repeated exact complex-integer squaring
            re, im = a, -b
            pr, pi = 1, 0
            e = k - 1
            while e:
                if e & 1:
                    pr, pi = pr * re - pi * im, pr * im + pi * re
                e >>= 1
                if e:
                    re, im = re * re - im * im, 2 * re * im
            quarters[n] += sign * pr
            im_parts[n] += sign * pi
    gamma = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        if im_parts[n] != 0:
            raise NonRealCoefficient(f"imaginary part {im_parts[n]} at n={n}")
        if quarters[n] % 4:
            raise NonRealCoefficient(f"lattice sum at n={n} not divisible by 4")
        gamma[n] = quarters[n] // 4
    return CoeffTable(f"theta{k}", k, 16, tuple(gamma))


def chi_4(n: int) -> int:
    """Odd character mod 4 (0 on even n)."""
    if n % 2 == 0:
        return 0
    return 1 if n % 4 == 1 else -1


def verify_AE_coeff_relation(n_max: int) -> Report:
    """Twisted-coefficient relation between the A and E tables.

    For odd n the A coefficient, twisted by the mod-4 character, equals the
    E coefficient; for even n the E side combination has to vanish.
    """
    ta = newform_coeffs("A", n_max)
    te = newform_coeffs("E", n_max)
    bad = None
    for n in range(1, n_max + 1):
        lhs = chi_4(n) * ta[n]
        rhs = te[n] + 2 * (te[n // 2] if n % 2 == 0 else 0)
        if lhs != rhs:
            bad = n
            break
    return Report(
        claim="theta-twist-A-vs-E",
        params={"n_max": n_max},
        lhs="chi4(n) gamma_A(n)",
        rhs="gamma_E(n) + 2 gamma_E(n/2)",
        modulus_or_tolerance="exact",
        passed=bad is None,
        detail="" if bad is None else f"first failure at n={bad}",
    )


def verify_theta_eta(k: int, n_max: int) -> Report:
    """Binary theta table against its eta-product realization (k = 3 or 5)."""
    eta = {3: [(4, 6)], 5: [(1, 4), (2, 2), (4, 4)]}
    if k not in eta:
        raise ValueError("eta-product comparison is available for k in {3, 5}")
    theta = binary_theta_coeffs(k, n_max)
    eta_tab = _eta_table(f"eta{k}", eta[k], k, 16, n_max)
    bad = next(
        (n for n in range(1, n_max + 1) if theta[n] != eta_tab[n]),
        None,
    )
    return Report(
        claim=f"theta{k}-equals-eta-product",
        params={"n_max": n_max},
        lhs=f"theta series weight {k}",
        rhs="eta product",
        modulus_or_tolerance="exact",
        passed=bad is None,
        detail="" if bad is None else f"first mismatch at n={bad}",
    )


def multiplicativity_report(table: CoeffTable, bound: int = 100) -> Report:
    """Empirical Hecke multiplicativity on coprime indices (report only)."""
    from math import gcd

    failures = []
    for m in range(2, bound + 1):
        for n in range(m, bound + 1):
            if m * n > table.n_max:
                break
            if gcd(m, n) == 1 and table[m * n] != table[m] * table[n]:
                failures.append((m, n))
    return Report(
        claim="hecke-multiplicativity",
        params={"label": table.label, "bound": bound},
        lhs="gamma(mn)",
        rhs="gamma(m) gamma(n), gcd(m,n)=1",
        modulus_or_tolerance="exact",
        passed=not failures,
        detail="" if not failures else f"failures at {failures[:5]}",
    )


# -- Eisenstein weight 2 -------------------------------------------------------


def sigma1_table(n_max: int) -> list:
    sig = [0] * (n_max + 1)
    for d in range(1, n_max + 1):
        for nd in range(d, n_max + 1, d):
            sig[nd] += d
    return sig


def e2_qexp(order: int) -> QSeries:
    """Weight-2 Eisenstein series 1 - 24 sum sigma1(n) q^n, exact to `order`."""
    sig = sigma1_table(order)
    coeffs = [mpq(1)] + [mpq(-24 * sig[n]) for n in range(1, order + 1)]
    return QSeries.make(0, coeffs)


def e2_numeric(tau, prec: int = 192) -> ApproxComplex:
    """Lambert-series evaluation of the weight-2 Eisenstein series."""
    with mp.workprec(prec + GUARD_BITS):
        taum = mp.mpc(to_mp(tau))
        if taum.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        q = mp.exp(2j * mp.pi * taum)
        aq = abs(q)
        if aq >= 1:
            raise ValueError("|q| must be < 1")
        eps = mp.mpf(2) ** (-prec - 24)
        acc = mp.mpc(0)
        qn = mp.mpc(1)
        n = 1
        while True:
            qn *= q
            term = n * qn / (1 - qn)
            acc += term
            # remaining tail is below sum_{j>n} j |q|^j / (1-|q|)
            tail = (aq ** (n + 1)) * ((n + 1) * (1 - aq) + aq) / ((1 - aq) ** 2 * (1 - aq))
            if tail < eps:
                break
            n += 1
            if n > E2_TERM_CAP:
                raise PrecisionUnreachable(
                    f"|q| = {mp.nstr(aq, 8)} needs more than {E2_TERM_CAP} terms"
                )
        v = 1 - 24 * acc
        out = wrap_auto(v, prec)
        return out if isinstance(out, ApproxComplex) else ApproxComplex(out.value, out.radius)


F_PARAM_ETA = [(1, 12), (6, 12), (2, -12), (3, -12)]


def verify_F_parametrization(order: int, perturb: int = 0) -> Report:
    """Series identity behind the F evaluation: the generating function of
    central-binomial-weighted Franel numbers composed with an eta-quotient
    hauptmodul equals a weight-2 Eisenstein combination.

    `perturb` adds the given integer to one coefficient of the hauptmodul,
    for negative-control testing.
    """
    x = eta_quotient_expand(F_PARAM_ETA, order + 4)
    if perturb:
        coeffs = list(x.coeffs)
        if len(coeffs) > 3:
            coeffs[3] += mpq(perturb)
        x = QSeries.make(x.offset24, coeffs, x.prec24)
    one = QSeries.one(order + 4)
    w = x / ((one - x) * (one - x))
    stream = [comb(2 * n, n) * franel_term(n) for n in range(order + 4)]
    lhs = series_compose(stream, w)
    e2 = e2_qexp(order + 2)
    rhs = (
        e2.rescale(6) * 6 + e2.rescale(3) * 3 - e2.rescale(2) * 2 - e2
    ) * mpq(1, 6)
    bad = first_mismatch24(lhs, rhs, 24 * order)
    return Report(
        claim="franel-central-binomial-parametrization",
        params={"order": order},
        lhs="g(x/(1-x)^2)",
        rhs="weight-2 Eisenstein combination",
        modulus_or_tolerance=f"exact to q^{order}",
        passed=bad is None,
        detail="" if bad is None else f"first mismatch at q^({bad}/24)",
    )


# -- modular parametrizations of the sporadic sequences ------------------------

PARAMETRIZATIONS = {
    "beukers-apery": {
        "x": [(1, 12), (6, 12), (2, -12), (3, -12)],
        "y": [(2, 7), (3, 7), (1, -5), (6, -5)],
        "coeff": "apery",
        "rhs": [(WEIGHT4_ETA, 1, 1), (WEIGHT4_ETA, -9, 3)],
    },
    "verrill-C": {
        "x": [(1, 4), (6, 8), (2, -8), (3, -4)],
        "y": [(2, 6), (3, 1), (1, -3), (6, -2)],
        "coeff": "C",
        "rhs": [(ETA_NEWFORMS["C"], 1, 1)],
    },
    "verrill-E": {
        "x": [(1, 4), (4, 2), (8, 4), (2, -10)],
        "y": [(2, 10), (1, -4), (4, -4)],
        "coeff": "E",
        "rhs": [(ETA_NEWFORMS["E"], 1, 1), (ETA_NEWFORMS["E"], 2, 2)],
    },
}


def parametrization_series(name: str, order: int):
    """(x, y, coefficient function, rhs) expanded far enough for the check."""
    data = PARAMETRIZATIONS[name]
    margin = 2 * order + 8
    x = eta_quotient_expand(data["x"], margin)
    y = eta_quotient_expand(data["y"], margin)
    rhs = None
    for factors, mult, d in data["rhs"]:
        part = eta_quotient_expand(factors, margin).rescale(d) * mult
        rhs = part if rhs is None else rhs + part
    if data["coeff"] == "apery":
        from .sequences import apery_term

        coeff = apery_term
    else:
        label = data["coeff"]
        coeff = lambda n: sporadic_term(label, n)  # noqa: E731
    return x, y, coeff, rhs
