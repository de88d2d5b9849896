"""Exact integer sequences: the six sporadic sequences, the Apery numbers,
and the cellular leading coefficients.

Each sequence has two independent realizations, a closed binomial sum and a
three-term recurrence.  The binomial sums are the definitions; the recurrence
parameters for most labels are recovered by exact linear fitting and then
cross-checked term by term, which is what the property suite leans on.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .ground import as_int, is_integral, mpq

LABELS = ("A", "B", "C", "D", "E", "F")


class NonIntegralTerm(Exception):
    """A recurrence produced a non-integer term (wrong parameters)."""

    def __init__(self, n: int, value):
        self.n = n
        self.value = value
        super().__init__(f"term u_{n} = {value} is not an integer")


class NoFit(Exception):
    """No consistent recurrence parameters exist for the supplied terms."""


class BadN(Exception):
    """Cellular index N must be an odd integer >= 5."""


def franel_term(n: int) -> int:
    return sum(comb(n, k) ** 3 for k in range(n + 1))


def sporadic_term(label: str, n: int) -> int:
    """n-th term of sporadic sequence A..F via its binomial sum."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if label == "A":
        return franel_term(n)
    if label == "B":
        # 3^(n-3k) has nonnegative exponent throughout since 3k <= n
        return sum(
            (-1) ** k * 3 ** (n - 3 * k) * comb(n, 3 * k) * comb(3 * k, k) * comb(2 * k, k)
            for k in range(n // 3 + 1)
        )
    if label == "C":
        return sum(comb(n, k) ** 2 * comb(2 * k, k) for k in range(n + 1))
    if label == "D":
        return sum(comb(n, k) ** 2 * comb(n + k, k) for k in range(n + 1))
    if label == "E":
        return sum(
            comb(n, k) * comb(2 * k, k) * comb(2 * (n - k), n - k) for k in range(n + 1)
        )
    if label == "F":
        return sum(
            (-1) ** k * 8 ** (n - k) * comb(n, k) * franel_term(k) for k in range(n + 1)
        )
    raise ValueError(f"unknown sporadic label {label!r}")


def apery_term(n: int) -> int:
    """Apery numbers: sum of C(n,k)^2 C(n+k,k)^2."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return sum(comb(n, k) ** 2 * comb(n + k, k) ** 2 for k in range(n + 1))


@lru_cache(maxsize=None)
def sporadic_table(label: str, n_max: int) -> tuple:
    return tuple(sporadic_term(label, n) for n in range(n_max + 1))


def cellular_leading(N: int, n: int) -> int:
    """Leading coefficient for odd N >= 5: the D sequence to the (N-3)/2 power."""
    if N % 2 == 0 or N < 5:
        raise BadN(f"N must be odd and >= 5, got {N}")
    return sporadic_term("D", n) ** ((N - 3) // 2)


def cellular_sigma8(n: int) -> int:
    """Quadruple sum over k1+k2 = k3+k4 of prod C(n,ki) C(n+ki,ki).

    Collapsing along the common diagonal s = k1+k2 turns it into a sum of
    squared convolution values.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    b = [comb(n, k) * comb(n + k, k) for k in range(n + 1)]
    total = 0
    for s in range(2 * n + 1):
        v = sum(
            b[k] * b[s - k] for k in range(max(0, s - n), min(n, s) + 1)
        )
        total += v * v
    return total


@dataclass(frozen=True)
class Recurrence2Spec:
    """(n+1)^2 u_{n+1} = (a n^2 + a n + b) u_n - c n^2 u_{n-1}, u_{-1}=0, u_0=1."""

    a: int
    b: int
    c: int


@dataclass(frozen=True)
class Recurrence3Spec:
    """(n+1)^3 u_{n+1} = (2n+1)(a n^2 + a n + b) u_n - n(c n^2 + d) u_{n-1}."""

    a: int
    b: int
    c: int
    d: int


def run_recurrence2(spec: Recurrence2Spec, n_max: int) -> list:
    """Exact rational recursion; every term is asserted integral."""
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    terms = [1]
    prev, cur = mpq(0), mpq(1)
    for n in range(n_max):
        nxt = ((spec.a * n * n + spec.a * n + spec.b) * cur - spec.c * n * n * prev) / mpq(
            (n + 1) ** 2
        )
        if not is_integral(nxt):
            raise NonIntegralTerm(n + 1, nxt)
        terms.append(as_int(nxt))
        prev, cur = cur, nxt
    return terms


def run_recurrence3(spec: Recurrence3Spec, n_max: int) -> list:
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    terms = [1]
    prev, cur = mpq(0), mpq(1)
    for n in range(n_max):
        rhs = (2 * n + 1) * (spec.a * n * n + spec.a * n + spec.b) * cur - n * (
            spec.c * n * n + spec.d
        ) * prev
        nxt = rhs / mpq((n + 1) ** 3)
        if not is_integral(nxt):
            raise NonIntegralTerm(n + 1, nxt)
        terms.append(as_int(nxt))
        prev, cur = cur, nxt
    return terms


def fit_recurrence2(terms) -> Recurrence2Spec:
    """Recover (a, b, c) from exact terms and verify the fit on all of them.

    Row n gives  a (n^2+n) u_n + b u_n - c n^2 u_{n-1} = (n+1)^2 u_{n+1},
    linear in (a, b, c); three rows determine the parameters, the rest must
    check out exactly.
    """
    if len(terms) < 6:
        raise NoFit("need at least 6 terms for an overdetermined fit")
    if terms[0] != 1:
        raise NoFit("terms[0] must be 1")

    def row(n):
        u_nm1 = 0 if n == 0 else terms[n - 1]
        return (
            [mpq((n * n + n) * terms[n]), mpq(terms[n]), mpq(-n * n * u_nm1)],
            mpq((n + 1) ** 2 * terms[n + 1]),
        )

    mat, rhs = [], []
    for n in range(3):
        r, v = row(n)
        mat.append(r)
        rhs.append(v)
    sol = _solve3(mat, rhs)
    if sol is None:
        raise NoFit("singular fitting system")
    a, b, c = sol
    if not all(is_integral(v) for v in (a, b, c)):
        raise NoFit(f"non-integer parameters ({a}, {b}, {c})")
    spec = Recurrence2Spec(as_int(a), as_int(b), as_int(c))
    check = run_recurrence2(spec, len(terms) - 1)
    if check != list(terms):
        raise NoFit(f"fit {spec} does not reproduce the supplied terms")
    return spec


def _solve3(mat, rhs):
    m = [mat[i][:] + [rhs[i]] for i in range(3)]
    for col in range(3):
        piv = next((r for r in range(col, 3) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(3):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][3] / m[i][i] for i in range(3)]


@lru_cache(maxsize=None)
def fitted_spec(label: str) -> Recurrence2Spec:
    """Recurrence parameters for a sporadic label, fitted from 24 exact terms."""
    return fit_recurrence2(sporadic_table(label, 23))


APERY_RECURRENCE3 = Recurrence3Spec(17, 5, 1, 0)
