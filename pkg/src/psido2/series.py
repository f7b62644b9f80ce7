"""Truncated power series in x1, x2 with exact rational coefficients.

A series stores its coefficients together with a guaranteed total-degree
precision ``prec``: every monomial of total degree below ``prec`` is correct,
nothing of degree ``>= prec`` is stored.  ``prec = math.inf`` marks an exact
polynomial.
"""
from __future__ import annotations

import functools
import math
from fractions import Fraction
from typing import Dict, Iterable, Tuple

from .errors import FormatError, PreconditionError

INF = math.inf
Mono = Tuple[int, int]


def rat(v) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to a Fraction (no floats)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise FormatError(f"not a rational: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"not a rational: {v!r}") from exc
    raise FormatError(f"not a rational: {v!r}")


def rat_str(c: Fraction) -> str:
    return str(c)


def prec_to_json(p):
    return None if p == INF else int(p)


def prec_from_json(p):
    if p is None:
        return INF
    if isinstance(p, bool) or not isinstance(p, int):
        raise FormatError(f"bad precision {p!r}")
    return p


@functools.lru_cache(maxsize=None)
def falling(n: int, m: int) -> int:
    """n (n-1) ... (n-m+1); valid for negative n."""
    out = 1
    for r in range(m):
        out *= n - r
    return out


@functools.lru_cache(maxsize=None)
def gbinom(n: int, k: int) -> Fraction:
    """Generalized binomial C_n^k = n(n-1)...(n-k+1)/k! for any integer n."""
    if k < 0:
        return Fraction(0)
    return Fraction(falling(n, k), math.factorial(k))


class AtLeast:
    """Order marker for a series that is zero to its precision."""

    __slots__ = ("floor",)

    def __init__(self, floor):
        self.floor = floor

    def __eq__(self, other):
        return isinstance(other, AtLeast) and other.floor == self.floor

    def __hash__(self):
        return hash(("AtLeast", self.floor))

    def __repr__(self):
        return f"AtLeast({self.floor})"


@functools.total_ordering
class GammaDeg:
    """Exponent pair under the anti-lexicographic order (d2 compared first)."""

    __slots__ = ("d1", "d2")

    def __init__(self, d1: int, d2: int):
        self.d1 = d1
        self.d2 = d2

    def key(self):
        return (self.d2, self.d1)

    def __lt__(self, other):
        return self.key() < other.key()

    def __eq__(self, other):
        if isinstance(other, tuple):
            return (self.d1, self.d2) == other
        return isinstance(other, GammaDeg) and self.key() == other.key()

    def __hash__(self):
        return hash((self.d1, self.d2))

    def __add__(self, other):
        return GammaDeg(self.d1 + other.d1, self.d2 + other.d2)

    def __iter__(self):
        yield self.d1
        yield self.d2

    def __repr__(self):
        return f"GammaDeg({self.d1}, {self.d2})"


class XSeries:
    __slots__ = ("terms", "prec")

    def __init__(self, terms: Dict[Mono, object] | None = None, prec=INF):
        if prec != INF:
            if isinstance(prec, bool) or int(prec) != prec:
                raise PreconditionError(f"bad precision {prec!r}")
            prec = int(prec)
            if prec < 0:
                raise PreconditionError("precision must be >= 0")
        clean = {}
        if terms:
            for (i, j), c in terms.items():
                if i < 0 or j < 0:
                    raise PreconditionError("negative exponent in XSeries")
                if i + j >= prec:
                    continue
                c = rat(c)
                if c:
                    clean[(i, j)] = c
        self.terms = clean
        self.prec = prec

    @classmethod
    def _raw(cls, terms, prec):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.prec = prec
        return obj

    @classmethod
    def const(cls, c, prec=INF):
        return cls({(0, 0): c}, prec)

    @classmethod
    def zero(cls, prec=INF):
        return cls._raw({}, prec)

    @classmethod
    def monomial(cls, i, j, c=1, prec=INF):
        return cls({(i, j): c}, prec)

    @classmethod
    def x1(cls, prec=INF):
        return cls.monomial(1, 0, 1, prec)

    @classmethod
    def x2(cls, prec=INF):
        return cls.monomial(0, 1, 1, prec)

    # basic queries -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return self.prec == INF

    def constant_term(self) -> Fraction:
        return self.terms.get((0, 0), Fraction(0))

    def is_constant(self) -> bool:
        return all(k == (0, 0) for k in self.terms)

    def ord_M(self):
        if not self.terms:
            return AtLeast(self.prec)
        return min(i + j for i, j in self.terms)

    def ord_gamma(self) -> GammaDeg:
        if not self.terms:
            raise PreconditionError("zero series has no Γ-order")
        i, j = min(self.terms, key=lambda m: (m[1], m[0]))
        return GammaDeg(i, j)

    def degree(self) -> int:
        """Maximal total degree of a stored term (-1 for zero)."""
        return max((i + j for i, j in self.terms), default=-1)

    def truncate(self, n) -> "XSeries":
        p = min(self.prec, n)
        if p == self.prec:
            return self
        return XSeries._raw({m: c for m, c in self.terms.items() if m[0] + m[1] < p}, p)

    def with_prec(self, n) -> "XSeries":
        """Claim precision n; only valid when n <= prec or the series is exact."""
        if n > self.prec:
            raise PreconditionError("cannot raise the precision of a truncated series")
        return self.truncate(n)

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, XSeries):
            other = XSeries.const(other)
        p = min(self.prec, other.prec)
        out = {m: c for m, c in self.terms.items() if m[0] + m[1] < p}
        for m, c in other.terms.items():
            if m[0] + m[1] >= p:
                continue
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return XSeries._raw(out, p)

    __radd__ = __add__

    def __neg__(self):
        return XSeries._raw({m: -c for m, c in self.terms.items()}, self.prec)

    def __sub__(self, other):
        if not isinstance(other, XSeries):
            other = XSeries.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "XSeries":
        c = rat(c)
        if not c:
            return XSeries.zero(self.prec)
        return XSeries._raw({m: c * v for m, v in self.terms.items()}, self.prec)

    def __mul__(self, other):
        if isinstance(other, XSeries):
            return xs_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            return invert_unit(self) ** (-n)
        out = XSeries.const(1, self.prec)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, XSeries):
            return NotImplemented
        return self.prec == other.prec and self.terms == other.terms

    def __hash__(self):
        return hash((self.prec, tuple(sorted(self.terms.items()))))

    def agrees(self, other: "XSeries") -> bool:
        """Equality on the common guaranteed region."""
        p = min(self.prec, other.prec)
        return self.truncate(p).terms == other.truncate(p).terms

    def __repr__(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for (i, j), c in sorted(self.terms.items(), key=lambda t: (t[0][0] + t[0][1], t[0][1])):
                mono = "".join(
                    f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in ((1, i), (2, j)) if e
                )
                parts.append(f"{c}" + (f"*{mono}" if mono else "") if c != 1 or not mono else mono)
            body = " + ".join(parts)
        tail = "" if self.prec == INF else f" + O({self.prec})"
        return f"XSeries({body}{tail})"

    # serialization -----------------------------------------------------
    def to_json(self):
        return {
            "prec": prec_to_json(self.prec),
            "terms": [[i, j, rat_str(c)] for (i, j), c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "terms" not in obj:
            raise FormatError("series literal needs 'terms'")
        prec = prec_from_json(obj.get("prec"))
        terms = {}
        for t in obj["terms"]:
            if not isinstance(t, list) or len(t) != 3:
                raise FormatError(f"bad series term {t!r}")
            i, j, c = t
            if not isinstance(i, int) or not isinstance(j, int):
                raise FormatError(f"bad exponent in {t!r}")
            terms[(i, j)] = terms.get((i, j), 0) + rat(c)
        return cls(terms, prec)


def xs_mul(a: XSeries, b: XSeries) -> XSeries:
    """Cauchy product truncated to min(a.prec, b.prec)."""
    p = min(a.prec, b.prec)
    out: Dict[Mono, Fraction] = {}
    bt = list(b.terms.items())
    for (i1, j1), c1 in a.terms.items():
        d1 = i1 + j1
        if d1 >= p:
            continue
        for (i2, j2), c2 in bt:
            if d1 + i2 + j2 >= p:
                continue
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + c1 * c2
    return XSeries._raw({m: c for m, c in out.items() if c}, p)


def d_dx(a: XSeries, axis: int) -> XSeries:
    if axis not in (1, 2):
        raise PreconditionError("axis must be 1 or 2")
    out = {}
    for (i, j), c in a.terms.items():
        if axis == 1 and i:
            out[(i - 1, j)] = c * i
        elif axis == 2 and j:
            out[(i, j - 1)] = c * j
    return XSeries._raw(out, max(a.prec - 1, 0))


def antideriv(a: XSeries, axis: int) -> XSeries:
    """Antiderivative with zero constant of integration."""
    if axis not in (1, 2):
        raise PreconditionError("axis must be 1 or 2")
    out = {}
    for (i, j), c in a.terms.items():
        if axis == 1:
            out[(i + 1, j)] = c / (i + 1)
        else:
            out[(i, j + 1)] = c / (j + 1)
    return XSeries._raw(out, a.prec + 1)


def invert_unit(a: XSeries, prec=None) -> XSeries:
    """Multiplicative inverse; ``prec`` is required for exact non-constant input."""
    c0 = a.constant_term()
    if not c0:
        raise PreconditionError("not a unit")
    p = a.prec if prec is None else min(a.prec, prec)
    if p == INF:
        if a.is_constant():
            return XSeries.const(1 / c0)
        raise PreconditionError("inverse of a non-constant exact series needs a target precision")
    # b = 1/c0 * sum (-r)^n where a = c0 (1 + r)
    r = (a.scale(1 / c0) - 1).truncate(p)
    out = XSeries.const(1, p)
    power = XSeries.const(1, p)
    for _ in range(int(p)):
        power = -(power * r)
        if power.is_zero():
            break
        out = out + power
    return out.scale(1 / c0)


def exp_series(a: XSeries, prec=None) -> XSeries:
    """exp(a) for a with no constant term."""
    if a.constant_term():
        raise PreconditionError("exponent must have positive M-order")
    p = a.prec if prec is None else min(a.prec, prec)
    if a.is_zero():
        return XSeries.const(1, p)
    if p == INF:
        raise PreconditionError("exponential of an exact non-zero series needs a target precision")
    a = a.truncate(p)
    out = XSeries.const(1, p)
    term = XSeries.const(1, p)
    for n in range(1, int(p) + 1):
        term = (term * a).scale(Fraction(1, n))
        if term.is_zero():
            break
        out = out + term
    return out


def _poly_mul(a, b):
    out = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            k = (i1 + i2, j1 + j2)
            out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def linear_substitute(a: XSeries, m, shift=None) -> XSeries:
    """Substitute x_i = sum_j m[j][i] * y_j (+ shift[i]) and re-expand in y.

    The affine ``shift`` is only accepted for exact polynomial input, since a
    shifted truncated series cannot be re-expanded at the origin.
    """
    m = [[rat(v) for v in row] for row in m]
    if len(m) != 2 or any(len(r) != 2 for r in m):
        raise FormatError("matrix must be 2x2")
    if m[0][0] * m[1][1] - m[0][1] * m[1][0] == 0:
        raise PreconditionError("singular coordinate change")
    shift = [rat(v) for v in (shift or (0, 0))]
    if any(shift) and a.prec != INF:
        raise PreconditionError("affine shift needs an exact polynomial series")
    lin = []
    for i in range(2):
        poly = {}
        for j, mono in ((0, (1, 0)), (1, (0, 1))):
            if m[j][i]:
                poly[mono] = m[j][i]
        if shift[i]:
            poly[(0, 0)] = shift[i]
        lin.append(poly)
    pow_cache = [{0: {(0, 0): Fraction(1)}}, {0: {(0, 0): Fraction(1)}}]

    def power(idx, e):
        cache = pow_cache[idx]
        if e not in cache:
            cache[e] = _poly_mul(power(idx, e - 1), lin[idx])
        return cache[e]

    out: Dict[Mono, Fraction] = {}
    for (i, j), c in a.terms.items():
        for mono, v in _poly_mul(power(0, i), power(1, j)).items():
            out[mono] = out.get(mono, 0) + c * v
    return XSeries(out, a.prec)


def geometric_x2(power: int, prec) -> XSeries:
    """(1 - x2)^(-power) to the given precision (used by the worked examples)."""
    base = invert_unit(XSeries({(0, 0): 1, (0, 1): -1}, prec))
    return base ** power


def as_series(v, prec=INF) -> XSeries:
    if isinstance(v, XSeries):
        return v
    return XSeries.const(v, prec)


def series_iter_sorted(a: XSeries) -> Iterable[Tuple[Mono, Fraction]]:
    return sorted(a.terms.items())
