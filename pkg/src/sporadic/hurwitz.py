"""Exact rational machinery for the Eisenstein side of the odd-weight
L-value family: the r/s tables, the alpha multipliers, Hurwitz numbers, and
high-precision Eisenstein lattice values at the two CM points i and 2i.

All table arithmetic is exact; only the lattice evaluations and the
lemniscate constant are floating, and those come with certified truncation.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import mpmath as mp

from .ground import mpq
from .numerics import GUARD_BITS, ApproxReal, to_mp, wrap_auto
from .reports import Report


class ZeroDenominator(Exception):
    """The alpha multiplier needs a nonzero table entry."""


@dataclass(frozen=True)
class RSTables:
    r: dict  # n -> rational, n >= 2
    s: dict  # n -> rational, n >= 1
    n_max: int


def build_rs(n_max: int) -> RSTables:
    """r and s tables from their shared quadratic recurrence.

    Seeds: r2 = 1/5, r3 = 0 and s1 = 1/4, s2 = 11/80, s3 = 1/32; thereafter
    (2n+1)(n-3) t_n = 3 sum_{k=2}^{n-2} t_k t_{n-k}.
    """
    if n_max < 4:
        raise ValueError("n_max must be >= 4")
    r = {2: mpq(1, 5), 3: mpq(0)}
    s = {1: mpq(1, 4), 2: mpq(11, 80), 3: mpq(1, 32)}
    for table in (r, s):
        for n in range(4, n_max + 1):
            acc = mpq(0)
            for k in range(2, n - 1):
                acc += table[k] * table[n - k]
            table[n] = 3 * acc / ((2 * n + 1) * (n - 3))
    return RSTables(r, s, n_max)


def alpha(k: int, tables: RSTables | None = None) -> object:
    """Exact rational multiplier in the odd-weight L-value evaluation."""
    if k < 3 or k % 2 == 0:
        raise ValueError("k must be an odd integer >= 3")
    half = (k - 1) // 2
    if tables is None or tables.n_max < half:
        tables = build_rs(max(4, half))
    lead = mpq(2) ** ((k + 1) // 2) * (k - 2)
    if k % 4 == 1:
        if tables.r[half] == 0:
            raise ZeroDenominator(f"r_{half} vanishes")
        return lead * 2 / tables.r[half]
    if tables.s[half] == 0:
        raise ZeroDenominator(f"s_{half} vanishes")
    return lead / tables.s[half]


def hurwitz_numbers(l_max: int) -> dict:
    """Hurwitz numbers E_1..E_l_max from their quadratic recurrence."""
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    E = {1: mpq(1, 10)}
    for n in range(2, l_max + 1):
        acc = mpq(0)
        for k in range(1, n):
            acc += (4 * k - 1) * (4 * n - 4 * k - 1) * comb(4 * n, 4 * k) * E[k] * E[n - k]
        E[n] = 3 * acc / ((2 * n - 3) * (16 * n * n - 1))
    return E


def verify_hurwitz_r_relation(l_max: int) -> Report:
    """E_n = (4n)!/2^(4n) * r_(2n)/(4n-1), exactly, for n up to l_max."""
    E = hurwitz_numbers(l_max)
    rs = build_rs(2 * l_max)
    bad = None
    for n in range(1, l_max + 1):
        fact = mpq(1)
        for i in range(2, 4 * n + 1):
            fact *= i
        rhs = fact / mpq(2) ** (4 * n) * rs.r[2 * n] / (4 * n - 1)
        if E[n] != rhs:
            bad = n
            break
    return Report(
        claim="hurwitz-vs-r-table",
        params={"l_max": l_max},
        lhs="E_n",
        rhs="(4n)!/2^(4n) r_(2n)/(4n-1)",
        modulus_or_tolerance="exact",
        passed=bad is None,
        detail="" if bad is None else f"first failure at n={bad}",
    )


# -- Eisenstein values at CM points ---------------------------------------------

_TAU_POINTS = {"i": mp.mpc(0, 1), "2i": mp.mpc(0, 2)}


def eisenstein_value(ell: int, tau_label: str, prec: int = 192) -> ApproxReal:
    """Absolutely convergent lattice sum of exponent `ell` at tau = i or 2i.

    Evaluated through the exact Poisson resummation
    2 zeta(ell) + 2 (2 pi i)^ell / (ell-1)! * sum sigma_(ell-1)(d) q^d,
    whose exponential tail gives a certified truncation; the raw disk
    truncation of the double sum could not certify these tolerances.
    """
    if ell < 4 or ell % 2:
        raise ValueError("ell must be an even integer >= 4")
    if tau_label not in _TAU_POINTS:
        raise ValueError("tau must be 'i' or '2i'")
    with mp.workprec(prec + GUARD_BITS):
        tau = _TAU_POINTS[tau_label]
        q = mp.exp(2j * mp.pi * tau).real  # e^(-2 pi) or e^(-4 pi)
        pref = 2 * (2 * mp.pi) ** ell * (-1) ** (ell // 2) / mp.factorial(ell - 1)
        eps = mp.mpf(2) ** (-prec - 24)
        acc = mp.mpf(0)
        d = 1
        while True:
            sig = sum(j ** (ell - 1) for j in _divisors(d))
            acc += sig * q**d
            # for d >= ell the bound j^ell q^j decays at ratio <= e*q < 1/100
            tail = (d + 1) ** ell * q ** (d + 1) / (1 - 3 * q)
            if d >= ell and tail < eps:
                break
            d += 1
        v = 2 * mp.zeta(ell) + pref * acc
        return wrap_auto(v, prec)


def _divisors(n: int) -> list:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d * d != n:
                out.append(n // d)
        d += 1
    return out


def naive_lattice_sum(ell: int, tau, radius: int):
    """Raw truncated double lattice sum over |n|,|m| <= radius.

    Low-accuracy independent oracle; error is O(radius^(2-ell)).
    """
    with mp.workprec(80):
        taum = mp.mpc(to_mp(tau))
        acc = mp.mpc(0)
        for m in range(-radius, radius + 1):
            for n in range(-radius, radius + 1):
                if n == 0 and m == 0:
                    continue
                acc += (n + m * taum) ** (-ell)
        return acc


def exact_ratio_to_omega(n: int, tau_label: str, tables: RSTables | None = None):
    """The exact rational H_n(tau)/omega^(2n) for tau = i ('r') or 2i ('s')."""
    if tables is None or tables.n_max < n:
        tables = build_rs(max(4, n))
    if tau_label == "i":
        return tables.r[n]
    if tau_label == "2i":
        return tables.s[n]
    raise ValueError("tau must be 'i' or '2i'")


def lemniscate(prec: int = 192) -> ApproxReal:
    """Lemniscate constant via its gamma closed form."""
    with mp.workprec(prec + GUARD_BITS):
        v = mp.gamma(mp.mpf(1) / 4) ** 2 / (2 * mp.sqrt(2 * mp.pi))
        return wrap_auto(v, prec)


def lemniscate_quadrature(prec: int = 128) -> ApproxReal:
    """Same constant by direct quadrature of 2 int_0^1 dx/sqrt(1-x^4)."""
    with mp.workprec(prec + GUARD_BITS):
        v = 2 * mp.quad(lambda x: 1 / mp.sqrt(1 - x**4), [0, 1])
        return wrap_auto(v, prec)


def h_value(n: int, tau_label: str, prec: int = 192) -> ApproxReal:
    """H_n = (2n-1) G_(2n) at the CM point."""
    g = eisenstein_value(2 * n, tau_label, prec)
    return ApproxReal((2 * n - 1) * g.value, (2 * n - 1) * g.radius)


def verify_h_recurrence(tau_label: str, n_lo: int = 4, n_hi: int = 8, prec: int = 160) -> Report:
    """Numeric check of (2n+1)(n-3) H_n = 3 sum_{k=2}^{n-2} H_k H_(n-k)."""
    hs = {n: h_value(n, tau_label, prec) for n in range(2, n_hi + 1)}
    tol = mp.mpf(10) ** (-20)
    bad = None
    worst = mp.mpf(0)
    for n in range(n_lo, n_hi + 1):
        lhs = (2 * n + 1) * (n - 3) * hs[n].value
        rhs = 3 * mp.fsum(hs[k].value * hs[n - k].value for k in range(2, n - 1))
        scale = max(1, abs(lhs))
        worst = max(worst, abs(lhs - rhs) / scale)
        if abs(lhs - rhs) / scale > tol:
            bad = n
            break
    return Report(
        claim="h-series-recurrence",
        params={"tau": tau_label, "n_lo": n_lo, "n_hi": n_hi},
        lhs="(2n+1)(n-3) H_n",
        rhs="3 sum H_k H_(n-k)",
        modulus_or_tolerance=f"relative < {mp.nstr(tol, 3)}",
        passed=bad is None,
        precision_bits=prec,
        detail=f"worst relative deviation {mp.nstr(worst, 3)}",
    )
