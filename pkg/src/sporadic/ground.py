"""Ground arithmetic types for all exact computation.

Every exact integer/rational in the package goes through `mpz`/`mpq` from
this module.  When gmpy2 is importable (GMP-backed, roughly an order of
magnitude faster on the series convolutions and recurrence sweeps) it is
used; otherwise the stdlib `int`/`fractions.Fraction` pair is a drop-in
fallback.  Set SPORADIC_GROUND=python to force the fallback, e.g. for the
backend benchmark.

Both backends expose `.numerator`/`.denominator`, so callers stay agnostic.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction

_choice = os.environ.get("SPORADIC_GROUND", "").strip().lower()

if _choice not in ("", "gmpy2", "python"):
    raise RuntimeError(f"SPORADIC_GROUND must be 'gmpy2' or 'python', got {_choice!r}")

if _choice != "python":
    try:
        import gmpy2 as _g

        GROUND = "gmpy2"
        mpz = _g.mpz
        mpq = _g.mpq
        _isqrt = _g.isqrt
    except ImportError:
        if _choice == "gmpy2":
            raise
        GROUND = "python"
else:
    GROUND = "python"

if GROUND == "python":
    mpz = int
    mpq = Fraction
    _isqrt = math.isqrt

QZERO = mpq(0)
QONE = mpq(1)


def is_integral(q) -> bool:
    """True when the rational q has denominator 1."""
    return q.denominator == 1


def as_int(q) -> int:
    """Exact conversion of an integral rational to a plain int."""
    if q.denominator != 1:
        raise ValueError(f"not an integer: {q}")
    return int(q.numerator)


def exact_sqrt(q):
    """Exact square root of a nonnegative rational, or None if irrational."""
    num, den = int(q.numerator), int(q.denominator)
    if num < 0:
        return None
    rn, rd = _isqrt(num), _isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return mpq(int(rn), int(rd))
