"""Truncated formal q-series over exact rationals.

Exponents are tracked in units of q^(1/24): a series holds coefficients at
exponents (offset24 + 24*j)/24, so eta prefactors stay exact while the
coefficient array still advances in integer steps of q.  `prec24` is the
exclusive bound (in 1/24 units) below which coefficients are known; all
arithmetic propagates it so identities are only ever asserted on exponents
both sides actually know.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ground import QONE, QZERO, as_int, exact_sqrt, is_integral, mpq
from .reports import Report


class NotASquare(Exception):
    """Series square root does not exist over the rationals."""


class CompositionDiverges(Exception):
    """Inner series of a composition must have positive valuation."""


class InsufficientOrder(Exception):
    """Inputs are not expanded far enough for the requested check."""


@dataclass(frozen=True)
class QSeries:
    offset24: int
    coeffs: tuple
    prec24: int

    @staticmethod
    def make(offset24: int, coeffs, prec24: int | None = None) -> "QSeries":
        cs = tuple(mpq(c) for c in coeffs)
        if prec24 is None:
            prec24 = offset24 + 24 * len(cs)
        need = max(0, -((offset24 - prec24) // 24))  # ceil((prec24-offset24)/24)
        if len(cs) < need:
            cs = cs + (QZERO,) * (need - len(cs))
        elif len(cs) > need:
            cs = cs[:need]
        return QSeries(offset24, cs, prec24)

    @staticmethod
    def zero(prec24: int) -> "QSeries":
        return QSeries(0, (), prec24)

    @staticmethod
    def one(order: int) -> "QSeries":
        return QSeries.make(0, [QONE] + [QZERO] * (order - 1))

    # -- basic queries ----------------------------------------------------

    def coeff24(self, e24: int):
        """Coefficient at exponent e24/24; raises beyond the known range."""
        if e24 >= self.prec24:
            raise InsufficientOrder(f"exponent {e24}/24 beyond precision {self.prec24}/24")
        if e24 < self.offset24 or (e24 - self.offset24) % 24:
            return QZERO
        return self.coeffs[(e24 - self.offset24) // 24]

    def valuation24(self) -> int | None:
        for j, c in enumerate(self.coeffs):
            if c:
                return self.offset24 + 24 * j
        return None

    def is_zero(self) -> bool:
        return self.valuation24() is None

    def normalized(self) -> "QSeries":
        """Drop leading zero coefficients (offset moves up, precision kept)."""
        j = 0
        while j < len(self.coeffs) and not self.coeffs[j]:
            j += 1
        return QSeries(self.offset24 + 24 * j, self.coeffs[j:], self.prec24)

    def terms24(self):
        """Known (exponent24, coefficient) pairs with nonzero coefficient."""
        return [
            (self.offset24 + 24 * j, c) for j, c in enumerate(self.coeffs) if c
        ]

    # -- ring operations --------------------------------------------------

    def __neg__(self) -> "QSeries":
        return QSeries(self.offset24, tuple(-c for c in self.coeffs), self.prec24)

    def __add__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.make(0, [mpq(other)], self.prec24)
        if (self.offset24 - other.offset24) % 24:
            raise ValueError("incompatible exponent lattices in addition")
        off = min(self.offset24, other.offset24)
        prec = min(self.prec24, other.prec24)
        n = max(0, -((off - prec) // 24))
        out = []
        for j in range(n):
            e = off + 24 * j
            a = self.coeffs[(e - self.offset24) // 24] if e >= self.offset24 and (e - self.offset24) // 24 < len(self.coeffs) else QZERO
            b = other.coeffs[(e - other.offset24) // 24] if e >= other.offset24 and (e - other.offset24) // 24 < len(other.coeffs) else QZERO
            out.append(a + b)
        return QSeries.make(off, out, prec)

    __radd__ = __add__

    def __sub__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            other = QSeries.make(0, [mpq(other)], self.prec24)
        return self + (-other)

    def __rsub__(self, other) -> "QSeries":
        return (-self) + other

    def __mul__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            q = mpq(other)
            return QSeries(self.offset24, tuple(c * q for c in self.coeffs), self.prec24)
        a, b = self.normalized(), other.normalized()
        if a.is_zero() or b.is_zero():
            # a zero factor is exact, but precision still limits the product
            prec = min(a.prec24 + b.offset24, b.prec24 + a.offset24)
            return QSeries.zero(prec)
        off = a.offset24 + b.offset24
        prec = min(a.prec24 + b.offset24, b.prec24 + a.offset24)
        n = max(0, -((off - prec) // 24))
        out = [QZERO] * n
        for i, ca in enumerate(a.coeffs):
            if not ca:
                continue
            if i >= n:
                break
            top = min(len(b.coeffs), n - i)
            for j in range(top):
                cb = b.coeffs[j]
                if cb:
                    out[i + j] += ca * cb
        return QSeries.make(off, out, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "QSeries":
        if not isinstance(k, int):
            raise TypeError("series power must be an integer")
        if k < 0:
            return self.inverse() ** (-k)
        rel = max(0, -((self.offset24 - self.prec24) // 24))
        result = QSeries.make(0, [QONE] + [QZERO] * (rel - 1))
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def inverse(self) -> "QSeries":
        """Multiplicative inverse; leading coefficient must be nonzero."""
        s = self.normalized()
        if s.is_zero() or not s.coeffs[0]:
            raise ZeroDivisionError("series with zero leading coefficient")
        n = len(s.coeffs)
        lead = s.coeffs[0]
        inv = [QONE / lead]
        for j in range(1, n):
            acc = QZERO
            for i in range(1, j + 1):
                if i < len(s.coeffs) and s.coeffs[i]:
                    acc += s.coeffs[i] * inv[j - i]
            inv.append(-acc / lead)
        off = -s.offset24
        prec = s.prec24 - 2 * s.offset24
        return QSeries.make(off, inv, prec)

    def __truediv__(self, other) -> "QSeries":
        if not isinstance(other, QSeries):
            return self * (QONE / mpq(other))
        return self * other.inverse()

    # -- analytic-style operations ---------------------------------------

    def sqrt(self) -> "QSeries":
        """Square root with positive leading coefficient branch.

        Coefficient recursion from r^2 = s; requires even leading exponent
        and a rational-square leading coefficient.
        """
        s = self.normalized()
        if s.is_zero():
            raise NotASquare("square root of zero series is ambiguous at finite order")
        if s.offset24 % 2:
            raise NotASquare(f"odd leading exponent {s.offset24}/24")
        lead = exact_sqrt(s.coeffs[0])
        if lead is None:
            raise NotASquare(f"leading coefficient {s.coeffs[0]} is not a rational square")
        n = len(s.coeffs)
        r = [lead]
        for j in range(1, n):
            # coefficient of q^j in r^2 equals s_j
            acc = QZERO
            for i in range(1, j):
                acc += r[i] * r[j - i]
            sj = s.coeffs[j] if j < len(s.coeffs) else QZERO
            r.append((sj - acc) / (2 * lead))
        off = s.offset24 // 2
        return QSeries.make(off, r, s.prec24 - s.offset24 + off)

    def rescale(self, d: int) -> "QSeries":
        """Substitute q -> q^d (tau -> d*tau on eta quotients)."""
        if d < 1:
            raise ValueError("rescale factor must be >= 1")
        if d == 1:
            return self
        out = []
        for j, c in enumerate(self.coeffs):
            out.append(c)
            if j < len(self.coeffs) - 1:
                out.extend([QZERO] * (d - 1))
        return QSeries.make(self.offset24 * d, out, self.prec24 * d)

    def q_derivative(self) -> "QSeries":
        """The operator q d/dq: scales the q^(e/24) coefficient by e/24."""
        out = tuple(
            c * mpq(self.offset24 + 24 * j, 24) for j, c in enumerate(self.coeffs)
        )
        return QSeries(self.offset24, out, self.prec24)


# -- eta quotients ---------------------------------------------------------


def euler_product_coeffs(n_terms: int) -> list:
    """Coefficients of prod_{n>=1} (1 - q^n) via the pentagonal number theorem."""
    out = [0] * n_terms
    if n_terms:
        out[0] = 1
    g = 1
    while True:
        sign = -1 if g % 2 else 1
        done = True
        for e in (g * (3 * g - 1) // 2, g * (3 * g + 1) // 2):
            if e < n_terms:
                out[e] = sign
                done = False
        if done:
            break
        g += 1
    return out


def eta_quotient_expand(factors, order: int) -> QSeries:
    """Expand prod eta(m*tau)^e to `order` coefficients past the leading term.

    The total leading exponent is sum(m*e)/24, tracked exactly in offset24.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    offset24 = sum(m * e for m, e in factors)
    acc = QSeries.make(0, [QONE] + [QZERO] * (order - 1))
    for m, e in factors:
        n_terms = order // m + 1
        base = QSeries.make(0, euler_product_coeffs(n_terms)).rescale(m)
        base = QSeries.make(0, base.coeffs, 24 * order)
        acc = acc * (base ** e)
    return QSeries.make(offset24, acc.coeffs, offset24 + 24 * order)


# -- composition ------------------------------------------------------------


def series_compose(outer_coeffs, inner: QSeries) -> QSeries:
    """Sum outer[n] * inner^n by Horner's scheme on truncated series.

    Requires strictly positive valuation of the inner series.  The caller
    supplies enough outer coefficients to exhaust the truncation order
    (len(outer) * valuation >= precision), otherwise the tail is genuinely
    unknown and the result precision is capped accordingly.
    """
    inner = inner.normalized()
    val = inner.valuation24()
    if val is None or val < 1:
        raise CompositionDiverges("inner series must have positive valuation")
    if inner.offset24 % 24:
        raise CompositionDiverges("inner series must live on integer q powers")
    outer = [mpq(c) for c in outer_coeffs]
    # first unknown contribution: either inner's own truncation (valuation
    # prec24 already after normalization) or the first unused outer term
    prec24 = min(inner.prec24, len(outer) * val)
    rel = max(0, -(-prec24 // 24))
    acc = QSeries.make(0, [outer[-1]] + [QZERO] * (rel - 1), prec24)
    for c in reversed(outer[:-1]):
        acc = acc * inner + QSeries.make(0, [c] + [QZERO] * (rel - 1), prec24)
    return acc


# -- identity checking -------------------------------------------------------


def first_mismatch24(a: QSeries, b: QSeries, limit24: int | None = None):
    """First exponent24 where the two series disagree, or None.

    Only exponents known to both sides are compared.
    """
    bound = min(a.prec24, b.prec24)
    if limit24 is not None:
        bound = min(bound, limit24)
    seen = {}
    for e, c in a.terms24():
        if e < bound:
            seen[e] = c
    for e, c in b.terms24():
        if e >= bound:
            continue
        if seen.pop(e, QZERO) != c:
            return e
    for e in sorted(seen):
        if seen[e]:
            return e
    return None


def verify_parametrization_identity(
    x: QSeries, y: QSeries, coeff_stream, rhs: QSeries, order: int
) -> Report:
    """Check a modular parametrization pair against its weight-adding form.

    (i)  y = sum C(n) x^n up to q^order;
    (ii) with xt^2 = x(2 tau) and yt = xt * y(2 tau), the logarithmic-derivative
         combination yt * (q/xt) * dxt/dq equals `rhs` up to q^order.
    """
    limit24 = 24 * order
    if min(x.prec24, y.prec24, rhs.prec24) < limit24:
        raise InsufficientOrder(
            f"inputs known to {min(x.prec24, y.prec24, rhs.prec24)}/24 < {limit24}/24"
        )
    val = x.normalized().valuation24()
    if val is None or val < 1:
        raise CompositionDiverges("x must vanish at q=0")
    n_outer = limit24 // val + 2
    coeffs = [coeff_stream(n) for n in range(n_outer)]
    composed = series_compose(coeffs, x)
    if composed.prec24 < limit24:
        raise InsufficientOrder("composition precision fell below the requested order")
    bad_series = first_mismatch24(composed, y, limit24)

    xt = x.rescale(2).sqrt()
    yt = xt * y.rescale(2)
    lhs = yt * xt.q_derivative() / xt
    if min(lhs.prec24, rhs.prec24) < limit24:
        raise InsufficientOrder("derivative combination precision fell below the order")
    bad_comb = None if bad_series is not None else first_mismatch24(lhs, rhs, limit24)

    detail = ""
    if bad_series is not None:
        detail = f"series part: first mismatch at q^({bad_series}/24)"
    elif bad_comb is not None:
        detail = f"derivative combination: first mismatch at q^({bad_comb}/24)"
    return Report(
        claim="modular-parametrization",
        params={"order": order},
        lhs="y = sum C(n) x^n  and  yt (q/xt) dxt/dq",
        rhs="y  and  sum a_d f(d tau)",
        modulus_or_tolerance=f"exact to q^{order}",
        passed=bad_series is None and bad_comb is None,
        detail=detail,
    )


def dump_tsv(series: QSeries, fh) -> None:
    """Write (exponent24, numerator, denominator) lines for external checks."""
    for e, c in series.terms24():
        fh.write(f"{e}\t{c.numerator}\t{c.denominator}\n")
