"""Interpolated sequence evaluation at complex arguments.

Each label's series is streamed through an exact term-ratio recurrence and
summed with the difference-scheme accelerator from `numerics`; truncation
tails follow a known exponent ladder per label, which is what makes the
extrapolation certifiable.  Integer arguments collapse to exact finite sums.

Labels: "apery" is the weight-4 interpolation (entire, symmetric under
x -> -x-1); "A".."F" are the sporadic interpolations, convergent for
Re x > -1, with "E" carrying a pole at x = -1/2 and "C" handled separately
through its squared-2F1 chain.
"""

from __future__ import annotations

import mpmath as mp

from . import sequences
from .numerics import (
    GUARD_BITS,
    AccelScheme,
    ApproxComplex,
    ApproxReal,
    OutOfDomain,
    PoleAt,
    UnsupportedArgument,
    accelerated_limit,
    default_scheme,
    hyp2f1,
    to_mp,
    wrap_auto,
)

INTERP_LABELS = ("apery", "A", "B", "D", "E", "F")

# (first tail exponent as a function of x, alternating tail?)
_TAIL = {
    "apery": (lambda x: mp.mpf(1), False),
    "A": (lambda x: 3 * x + 3, True),
    "B": (lambda x: x + 1, False),
    "D": (lambda x: x + 1, False),
    "E": (lambda x: x + 2, True),
    "F": (lambda x: x + 1, False),
}


def _terms_apery(x):
    t = mp.mpf(1) if not isinstance(x, mp.mpc) else mp.mpc(1)
    k = 0
    while True:
        yield t
        r = (x - k) * (x + k + 1) / mp.mpf((k + 1) ** 2)
        t = t * r * r
        k += 1


def _terms_A(x):
    t = mp.mpf(1) if not isinstance(x, mp.mpc) else mp.mpc(1)
    k = 0
    while True:
        yield t
        t = t * ((x - k) / (k + 1)) ** 3
        k += 1


def _terms_B(x):
    t = mp.power(3, x)
    k = 0
    while True:
        yield t
        t = t * (-(x - 3 * k) * (x - 3 * k - 1) * (x - 3 * k - 2)) / (27 * mp.mpf(k + 1) ** 3)
        k += 1


def _terms_D(x):
    t = mp.mpf(1) if not isinstance(x, mp.mpc) else mp.mpc(1)
    k = 0
    while True:
        yield t
        t = t * (x - k) ** 2 * (x + k + 1) / mp.mpf((k + 1) ** 3)
        k += 1


def _terms_E(x):
    t = mp.binomial(2 * x, x)
    k = 0
    while True:
        yield t
        t = t * (x - k) ** 2 * (2 * k + 1) / ((k + 1) ** 2 * (2 * x - 2 * k - 1))
        k += 1


def _terms_F(x):
    # Franel numbers stream by forward recurrence; the dominant solution is
    # the one we follow, so floating forward recursion is stable.
    eight_x = mp.power(8, x)
    b = mp.mpf(1) if not isinstance(x, mp.mpc) else mp.mpc(1)  # binomial(x, k)
    u_prev, u = mp.mpf(0), mp.mpf(1)  # Franel k-1, k
    p8 = mp.mpf(1)
    k = 0
    sign = 1
    while True:
        yield sign * eight_x * p8 * b * u
        b = b * (x - k) / (k + 1)
        u_prev, u = u, ((7 * k * k + 7 * k + 2) * u + 8 * k * k * u_prev) / mp.mpf((k + 1) ** 2)
        p8 = p8 / 8
        sign = -sign
        k += 1


_TERMS = {
    "apery": _terms_apery,
    "A": _terms_A,
    "B": _terms_B,
    "D": _terms_D,
    "E": _terms_E,
    "F": _terms_F,
}


def _exact_value(label: str, n: int) -> int:
    if label == "apery":
        return sequences.apery_term(n)
    return sequences.sporadic_term(label, n)


def _as_exact_int(x):
    """Return x as a Python int when it is exactly integral, else None."""
    if isinstance(x, int):
        return x
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return int(x.numerator) if int(x.denominator) == 1 else None
    xm = to_mp(x)
    if isinstance(xm, mp.mpc):
        if xm.imag != 0:
            return None
        xm = xm.real
    return int(xm) if mp.isint(xm) else None


def _is_half_odd(x) -> bool:
    xm = to_mp(x)
    if isinstance(xm, mp.mpc):
        if xm.imag != 0:
            return False
        xm = xm.real
    return mp.isint(2 * xm) and not mp.isint(xm)


def interp_eval(label: str, x, prec: int = 192, scheme: AccelScheme | None = None):
    """Value of the interpolated sequence at x with certified error radius."""
    if label not in _TERMS:
        raise UnsupportedArgument(f"label {label!r}; C goes through interp_eval_C")
    n = _as_exact_int(x)
    if n is not None:
        if n >= 0:
            return ApproxReal(mp.mpf(_exact_value(label, n)), 0)
        if label == "apery":
            # entire interpolation with the reflection x -> -x-1
            return ApproxReal(mp.mpf(_exact_value(label, -n - 1)), 0)
        raise OutOfDomain(f"series for {label} diverges at integer x = {n} < 0")

    xm = to_mp(x)
    re_x = xm.real if isinstance(xm, mp.mpc) else xm
    if label != "apery" and not re_x > -1:
        raise OutOfDomain(f"series for {label} requires Re x > -1, got {x}")
    if label == "E" and _is_half_odd(x):
        # every term carries a generalized central binomial with a pole here
        raise PoleAt(f"x = {x} is a pole of the E interpolation; use residue_E at -1/2")

    head_exp, oscillating = _TAIL[label]
    if scheme is None:
        scheme = default_scheme(prec, oscillating)
    elif oscillating and not scheme.even_nodes:
        scheme = AccelScheme(scheme.m, scheme.n0, True, scheme.partial_sum_cap)
    with mp.workprec(prec + GUARD_BITS):
        alpha = 2 * head_exp(to_mp(x))
    term_fn = _TERMS[label]
    return accelerated_limit(lambda: term_fn(to_mp(x)), scheme, prec, alpha=alpha)


def direct_sum(label: str, x, n_terms: int, prec: int = 192):
    """Plain truncated sum; no acceleration, no tail correction.

    Kept for convergence-rate sanity checks against the accelerated path.
    """
    term_fn = _TERMS[label]
    with mp.workprec(prec + GUARD_BITS):
        acc = mp.mpf(0)
        it = term_fn(to_mp(x))
        for _ in range(n_terms):
            acc += next(it)
        return wrap_auto(acc, prec)


def interp_eval_C(x, prec: int = 192):
    """C-label interpolation on its supported argument set.

    Nonnegative integers give the exact finite sum.  At x = -1/2 the value
    is the real part of the squared hypergeometric chain evaluated at the
    unimodular point (1 - i sqrt(3))/2.
    """
    n = _as_exact_int(x)
    if n is not None and n >= 0:
        return ApproxReal(mp.mpf(sequences.sporadic_term("C", n)), 0)
    with mp.workprec(prec + GUARD_BITS):
        if mp.almosteq(to_mp(x), mp.mpf("-0.5"), abs_eps=1e-30):
            z = (1 - 1j * mp.sqrt(3)) / 2
            chain = hyp2f1(mp.mpf(1) / 2, mp.mpf(1) / 2, 1, z, prec + 16)
            sq = ApproxComplex(chain.value**2, 3 * abs(chain.value) * chain.radius)
            return sq.real
    raise UnsupportedArgument(
        "C interpolation is defined at nonnegative integers and x = -1/2 only"
    )


def residue_E(prec: int = 192) -> ApproxReal:
    """Residue of the E interpolation at x = -1/2."""
    with mp.workprec(prec + GUARD_BITS):
        h = mp.hyper([mp.mpf(1) / 2] * 3, [1, 1], -1)
        v = h / (2 * mp.pi)
        return wrap_auto(v, prec)


def residue_E_limit(prec: int = 128, eps0="1e-4", n_nodes: int = 12) -> ApproxReal:
    """Residue via the limit (x + 1/2) * C_E(x), Richardson in the offset.

    Independent of the closed hypergeometric route; used as a cross-check.
    """
    from .numerics import richardson_limit

    with mp.workprec(prec + GUARD_BITS):
        eps = mp.mpf(eps0)
        xs, ys = [], []
        for j in range(n_nodes):
            e = eps / 2**j
            val = interp_eval("E", mp.mpf("-0.5") + e, prec + 32)
            xs.append(e)
            ys.append(e * val.value)
        est = richardson_limit(xs, ys)
        prev = richardson_limit(xs[:-1], ys[:-1])
        return wrap_auto(est, prec, extra=8 * abs(est - prev))


# -- functional equations -------------------------------------------------------


def apery_operator_residual(x, prec: int = 192) -> ApproxReal:
    """Residual of the inhomogeneous second-difference equation for "apery"."""
    with mp.workprec(prec + GUARD_BITS):
        xm = to_mp(x)
        a0 = interp_eval("apery", xm, prec + 32)
        a1 = interp_eval("apery", xm + 1, prec + 32)
        a2 = interp_eval("apery", xm + 2, prec + 32)
        lhs = (
            (xm + 2) ** 3 * a2.value
            - (2 * xm + 3) * (17 * xm**2 + 51 * xm + 39) * a1.value
            + (xm + 1) ** 3 * a0.value
        )
        rhs = 8 / mp.pi**2 * (2 * xm + 3) * mp.sin(mp.pi * xm) ** 2
        rad = (
            abs(xm + 2) ** 3 * a2.radius
            + abs((2 * xm + 3) * (17 * xm**2 + 51 * xm + 39)) * a1.radius
            + abs(xm + 1) ** 3 * a0.radius
        )
        diff = lhs - rhs
        return ApproxReal(abs(diff) if not isinstance(diff, mp.mpc) else abs(diff), rad)


def d_operator_residual(x, prec: int = 192) -> ApproxReal:
    """Residual of the homogeneous second-difference equation for label D."""
    with mp.workprec(prec + GUARD_BITS):
        xm = to_mp(x)
        c0 = interp_eval("D", xm, prec + 32)
        c1 = interp_eval("D", xm + 1, prec + 32)
        c2 = interp_eval("D", xm + 2, prec + 32)
        lhs = (
            (xm + 2) ** 2 * c2.value
            - (11 * xm**2 + 33 * xm + 25) * c1.value
            - (xm + 1) ** 2 * c0.value
        )
        rad = (
            abs(xm + 2) ** 2 * c2.radius
            + abs(11 * xm**2 + 33 * xm + 25) * c1.radius
            + abs(xm + 1) ** 2 * c0.radius
        )
        return ApproxReal(abs(lhs), rad)


def functional_eq_checks(x, prec: int = 192, tol=None) -> list:
    """Reports for the shift-operator equations and the apery reflection."""
    from .reports import Report

    if tol is None:
        tol = mp.mpf(10) ** (-30)
    out = []
    r1 = apery_operator_residual(x, prec)
    out.append(
        Report(
            claim="apery-interp-functional-equation",
            params={"x": str(x)},
            lhs=r1.to_str(20),
            rhs="0",
            modulus_or_tolerance=f"residual < {mp.nstr(mp.mpf(tol), 3)}",
            passed=bool(r1.value < tol),
            precision_bits=prec,
        )
    )
    with mp.workprec(prec + GUARD_BITS):
        xm = to_mp(x)
        re_ok = (xm.real if isinstance(xm, mp.mpc) else xm) > -1
    if re_ok:
        r2 = d_operator_residual(x, prec)
        out.append(
            Report(
                claim="d-interp-recurrence",
                params={"x": str(x)},
                lhs=r2.to_str(20),
                rhs="0",
                modulus_or_tolerance=f"residual < {mp.nstr(mp.mpf(tol), 3)}",
                passed=bool(r2.value < tol),
                precision_bits=prec,
            )
        )
    with mp.workprec(prec + GUARD_BITS):
        xm = to_mp(x)
        a = interp_eval("apery", xm, prec)
        b = interp_eval("apery", -xm - 1, prec)
        diff = abs(a.value - b.value)
    out.append(
        Report(
            claim="apery-interp-reflection",
            params={"x": str(x)},
            lhs=a.to_str(30),
            rhs=b.to_str(30),
            modulus_or_tolerance=f"|diff| < {mp.nstr(mp.mpf(tol), 3)}",
            passed=bool(diff < tol and a.radius + b.radius < tol),
            precision_bits=prec,
        )
    )
    return out
