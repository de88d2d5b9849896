"""Arbitrary-precision numeric kernel.

Wraps mpmath behind a working-precision discipline: every public function
takes a target precision in bits, computes with guard bits on top, and
returns values carrying a conservative error radius.  Also houses the
difference-scheme series accelerator used by the interpolation evaluators
and small exact-hypergeometric utilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .ground import mpq
from .reports import Report

GUARD_BITS = 32


class PoleError(Exception):
    """Gamma-type pole at a nonpositive integer argument."""


class OutOfDomain(Exception):
    """Argument outside the convergence region of the requested series."""


class PoleAt(OutOfDomain):
    """The interpolation has a pole at this argument; only its residue exists."""


class BranchCutAmbiguous(Exception):
    """Evaluation on the branch cut needs an explicit side."""


class UnsupportedArgument(Exception):
    """The operation is only defined on a restricted argument set."""


class PrecisionUnreachable(Exception):
    """The truncation cap is hit before the requested precision is certified."""


# -- values with error radius ------------------------------------------------


@dataclass(frozen=True)
class ApproxReal:
    value: object  # mp.mpf
    radius: object  # mp.mpf, bound on |true - value|

    def __post_init__(self):
        object.__setattr__(self, "value", mp.mpf(self.value))
        object.__setattr__(self, "radius", abs(mp.mpf(self.radius)))

    def __add__(self, other):
        o = _coerce(other)
        return ApproxReal(self.value + o.value, self.radius + o.radius + _ulp(self.value + o.value))

    __radd__ = __add__

    def __neg__(self):
        return ApproxReal(-self.value, self.radius)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return (-self) + _coerce(other)

    def __mul__(self, other):
        o = _coerce(other)
        v = self.value * o.value
        rad = (
            abs(self.value) * o.radius
            + abs(o.value) * self.radius
            + self.radius * o.radius
            + _ulp(v)
        )
        return ApproxReal(v, rad)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if abs(o.value) <= o.radius:
            raise ZeroDivisionError("division by a value whose radius straddles zero")
        v = self.value / o.value
        rad = (self.radius + abs(v) * o.radius) / (abs(o.value) - o.radius) + _ulp(v)
        return ApproxReal(v, rad)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise TypeError("only nonnegative integer powers")
        out = ApproxReal(mp.mpf(1), mp.mpf(0))
        for _ in range(k):
            out = out * self
        return out

    def abs_diff(self, other) -> object:
        return abs(self.value - _coerce(other).value)

    def agrees(self, other, tol) -> bool:
        """Equality at tolerance: radii must fit inside tol as well."""
        o = _coerce(other)
        tol = mp.mpf(tol)
        return (self.radius + o.radius < tol) and (abs(self.value - o.value) < tol)

    def to_str(self, digits: int = 50) -> str:
        return f"{mp.nstr(self.value, digits, strip_zeros=False)} +/- {mp.nstr(self.radius, 3)}"


@dataclass(frozen=True)
class ApproxComplex:
    value: object  # mp.mpc
    radius: object  # mp.mpf, bound on |true - value|

    def __post_init__(self):
        object.__setattr__(self, "value", mp.mpc(self.value))
        object.__setattr__(self, "radius", abs(mp.mpf(self.radius)))

    @property
    def real(self) -> ApproxReal:
        return ApproxReal(self.value.real, self.radius)

    @property
    def imag(self) -> ApproxReal:
        return ApproxReal(self.value.imag, self.radius)

    def agrees(self, other, tol) -> bool:
        ov = mp.mpc(other.value if isinstance(other, (ApproxReal, ApproxComplex)) else other)
        orad = other.radius if isinstance(other, (ApproxReal, ApproxComplex)) else mp.mpf(0)
        tol = mp.mpf(tol)
        return (self.radius + orad < tol) and (abs(self.value - ov) < tol)

    def to_str(self, digits: int = 50) -> str:
        return f"{mp.nstr(self.value, digits)} +/- {mp.nstr(self.radius, 3)}"


def _coerce(x) -> ApproxReal:
    if isinstance(x, ApproxReal):
        return x
    return ApproxReal(mp.mpf(x), mp.mpf(0))


def _ulp(v) -> object:
    return mp.mpf(2) ** (-mp.mp.prec + 2) * (abs(v) + mp.mpf(2) ** (-mp.mp.prec))


def _wrap_real(v, prec: int, extra=0) -> ApproxReal:
    eps = mp.mpf(2) ** (-prec - 16)
    return ApproxReal(v, (abs(v) + 1) * eps + extra)


def _wrap_complex(v, prec: int, extra=0) -> ApproxComplex:
    eps = mp.mpf(2) ** (-prec - 16)
    return ApproxComplex(v, (abs(v) + 1) * eps + extra)


def wrap_auto(v, prec: int, extra=0):
    if isinstance(v, mp.mpc) and v.imag != 0:
        return _wrap_complex(v, prec, extra)
    v = v.real if isinstance(v, mp.mpc) else v
    return _wrap_real(v, prec, extra)


def to_mp(x):
    """Exact-ish conversion of int/Fraction/mpq/str/float to mpf or mpc."""
    if isinstance(x, (ApproxReal, ApproxComplex)):
        return x.value
    if isinstance(x, complex):
        return mp.mpc(x)
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return mp.mpf(int(x.numerator)) / int(x.denominator)
    return mp.mpf(x) if not isinstance(x, mp.mpc) else x


# -- gamma-family wrappers ----------------------------------------------------


def _is_nonpositive_int(z) -> bool:
    z = to_mp(z)
    if isinstance(z, mp.mpc):
        if z.imag != 0:
            return False
        z = z.real
    return z <= 0 and mp.isint(z)


def gamma(z, prec: int = 192):
    if _is_nonpositive_int(z):
        raise PoleError(f"gamma pole at {z}")
    with mp.workprec(prec + GUARD_BITS):
        v = mp.gamma(to_mp(z))
        return wrap_auto(v, prec)


def gen_binomial(x, k: int, prec: int = 192):
    """Generalized binomial via the finite product, total for every complex x."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    with mp.workprec(prec + GUARD_BITS):
        xm = to_mp(x)
        v = mp.mpf(1) if not isinstance(xm, mp.mpc) else mp.mpc(1)
        for j in range(k):
            v = v * (xm - j) / (j + 1)
        return wrap_auto(v, prec)


def hyp2f1(a, b, c, z, prec: int = 192, side: int | None = None):
    with mp.workprec(prec + GUARD_BITS):
        zm = to_mp(z)
        if (not isinstance(zm, mp.mpc) or zm.imag == 0) and mp.re(zm) > 1:
            if side not in (1, -1):
                raise BranchCutAmbiguous(
                    "z on (1, inf); pass side=+1 (from above) or side=-1 (from below)"
                )
            zm = mp.mpc(zm, side * mp.mpf(2) ** (-prec - 8))
        v = mp.hyp2f1(to_mp(a), to_mp(b), to_mp(c), zm)
        return wrap_auto(v, prec)


def hyp3f2(a1, a2, a3, b1, b2, z, prec: int = 192):
    with mp.workprec(prec + GUARD_BITS):
        v = mp.hyper([to_mp(a1), to_mp(a2), to_mp(a3)], [to_mp(b1), to_mp(b2)], to_mp(z))
        return wrap_auto(v, prec)


def theta_functions(tau, prec: int = 192):
    """(theta2, theta3, lambda) at tau in the upper half plane.

    Conventions: theta2 = sum over half-integers of q^(n^2/2),
    theta3 = sum over integers, lambda = (theta2/theta3)^4, q = e^(2 pi i tau).
    """
    with mp.workprec(prec + GUARD_BITS):
        taum = mp.mpc(to_mp(tau))
        if taum.imag <= 0:
            raise OutOfDomain("tau must have positive imaginary part")
        nome = mp.exp(1j * mp.pi * taum)
        t2 = mp.jtheta(2, 0, nome)
        t3 = mp.jtheta(3, 0, nome)
        lam = (t2 / t3) ** 4
        return (wrap_auto(t2, prec), wrap_auto(t3, prec), wrap_auto(lam, prec))


def clausen_check(s, x, prec: int = 192) -> Report:
    """Squared-2F1 identity for 3F2 at argument 4x(1-x), on 0 <= x < 1/2."""
    with mp.workprec(prec + GUARD_BITS):
        sm, xm = to_mp(s), to_mp(x)
        lhs = mp.hyper([mp.mpf(1) / 2, sm, 1 - sm], [1, 1], 4 * xm * (1 - xm))
        rhs = mp.hyp2f1(sm, 1 - sm, 1, xm) ** 2
        diff = abs(lhs - rhs)
    tol = mp.mpf(2) ** (-prec + 12)
    return Report(
        claim="clausen-square",
        params={"s": str(s), "x": str(x)},
        lhs=mp.nstr(lhs, 30),
        rhs=mp.nstr(rhs, 30),
        modulus_or_tolerance=f"|diff| < {mp.nstr(tol, 3)}",
        passed=diff < tol,
        precision_bits=prec,
        detail=f"abs diff {mp.nstr(diff, 3)}",
    )


# -- exact terminating hypergeometric sums ------------------------------------


def finite_hyper_exact(tops, bottoms, z) -> object:
    """Exact rational value of a terminating hypergeometric series.

    Some top parameter must be a nonpositive integer; bottoms must not
    terminate the denominator first.
    """
    tops = [mpq(t) for t in tops]
    bottoms = [mpq(b) for b in bottoms]
    z = mpq(z)
    stops = [int(-t) for t in tops if t.denominator == 1 and t <= 0]
    if not stops:
        raise ValueError("series does not terminate")
    k_max = min(stops)
    term = mpq(1)
    total = mpq(1)
    for k in range(k_max):
        num = mpq(1)
        for t in tops:
            num *= t + k
        den = mpq(k + 1)
        for b in bottoms:
            den *= b + k
        if den == 0:
            raise ZeroDivisionError("bottom parameter terminates before the top")
        term = term * num * z / den
        total += term
    return total


def watson_endpoint_value(p: int) -> object:
    """Exact value of the terminating balanced 3F2 used in the B-sequence proof."""
    tops = [mpq(1 - p, 6), mpq(3 - p, 6), mpq(5 - p, 6)]
    bottoms = [mpq(6 - p, 6), mpq(3 - p, 3)]
    return finite_hyper_exact(tops, bottoms, 1)


# -- series acceleration -------------------------------------------------------


@dataclass(frozen=True)
class AccelScheme:
    """Difference-scheme accelerator: m-th forward differences over partial
    sums taken at quadratically spaced truncation indices.

    `even_nodes` doubles the node base so every truncation index is even,
    which freezes the sign of alternating-tail remainders.
    """

    m: int = 40
    n0: int = 80
    even_nodes: bool = False
    partial_sum_cap: int = 10**6

    def node(self, n: int) -> int:
        return (2 * n) ** 2 if self.even_nodes else n * n

    def nodes(self) -> list:
        ns = [self.node(self.n0 + i) for i in range(self.m + 1)]
        if ns[-1] > self.partial_sum_cap:
            raise PrecisionUnreachable(
                f"acceleration nodes exceed the partial sum cap {self.partial_sum_cap}"
            )
        return ns


def default_scheme(prec: int, oscillating: bool) -> AccelScheme:
    digits = prec * 0.30103
    m = 24
    while (m + 1) * mp.log10(2 * m) < digits + 18 and m < 72:
        m += 2
    return AccelScheme(m=m, n0=2 * m, even_nodes=oscillating)


def partial_sums(term_iter, nodes) -> list:
    """Partial sums S(N) = sum of the first N terms at each requested N."""
    out = []
    acc = mp.mpf(0)
    k = 0
    for target in nodes:
        while k < target:
            acc = acc + next(term_iter)
            k += 1
        out.append(acc)
    return out


def _diff_weights_exact(m: int, n0: int) -> list:
    from math import comb

    return [(-1) ** (m - j) * comb(m, j) * (n0 + j) ** m for j in range(m + 1)]


def diff_extrapolate(svals, n0: int, alpha=None):
    """Limit estimate from m-th differences of n^mu * S(node(n)).

    With alpha None or (numerically) integral, mu = m and the weights are
    exact integers (the plain scheme).  Otherwise mu = alpha + 2*floor((m-1)/2)
    so the first batch of tail powers is eliminated exactly and the rest are
    damped by the m-th difference.
    """
    m = len(svals) - 1
    use_int = alpha is None
    if not use_int:
        am = to_mp(alpha)
        near = mp.mpc(am) - mp.nint(mp.re(mp.mpc(am)))
        use_int = abs(near) < mp.mpf("0.25")
    if use_int:
        w = _diff_weights_exact(m, n0)
        num = mp.fsum(wj * sj for wj, sj in zip(w, svals))
        den = mp.factorial(m)
        return num / den
    mu = to_mp(alpha) + 2 * ((m - 1) // 2)
    from math import comb

    num = mp.mpf(0)
    den = mp.mpf(0)
    for j in range(m + 1):
        wj = (-1) ** (m - j) * comb(m, j)
        pw = mp.power(mp.mpf(n0 + j), mu)
        num = num + wj * pw * svals[j]
        den = den + wj * pw
    return num / den


def amplification_bits(scheme: AccelScheme) -> int:
    """Bits of cancellation the difference weights can cost."""
    from math import comb

    total = sum(comb(scheme.m, j) * (scheme.n0 + j) ** scheme.m for j in range(scheme.m + 1))
    fact = 1
    for i in range(2, scheme.m + 1):
        fact *= i
    return max(0, (total // fact).bit_length() + 8)


def accelerated_limit(term_factory, scheme: AccelScheme, prec: int, alpha=None):
    """Accelerate a slowly convergent series to `prec` bits.

    `term_factory()` returns a fresh term iterator evaluated at the ambient
    mpmath precision.  The reported radius is the difference between the
    order-m and order-(m-1) estimates plus a rounding floor; agreement of
    consecutive orders is the scheme's consistency contract.
    """
    wp = prec + amplification_bits(scheme) + GUARD_BITS + 16
    with mp.workprec(wp):
        svals = partial_sums(term_factory(), scheme.nodes())
        est = diff_extrapolate(svals, scheme.n0, alpha)
        prev = diff_extrapolate(svals[:-1], scheme.n0, alpha)
        rad = 4 * abs(est - prev) + (abs(est) + 1) * mp.mpf(2) ** (-prec - 16)
        return wrap_auto(est, prec, extra=rad)


def richardson_limit(xs, ys):
    """Neville extrapolation of y(x) to x = 0 at ambient precision."""
    p = [y if isinstance(y, mp.mpc) else mp.mpf(y) for y in ys]
    x = [mp.mpf(v) for v in xs]
    n = len(p)
    for k in range(1, n):
        nxt = []
        for i in range(n - k):
            nxt.append((x[i + k] * p[i] - x[i] * p[i + 1]) / (x[i + k] - x[i]))
        p = nxt
    return p[0]
