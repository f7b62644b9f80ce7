"""Operators in the completed rings D̂₁ and Ê₊ = D̂₁((∂₂⁻¹)).

``D1Op`` is a (possibly completed) series Σ a_q ∂₁^q with one common
x-precision.  ``EPlusOp`` is Σ_s p_s ∂₂^s with one ``D1Op`` per slot; each
slot keeps its own precision and every slot below ``window_lo`` is unknown.
A slot that is absent inside the window is an exact zero.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, Optional

from .errors import FormatError, PreconditionError
from .series import (
    INF,
    GammaDeg,
    XSeries,
    antideriv,
    d_dx,
    falling,
    gbinom,
    invert_unit,
    linear_substitute,
    prec_from_json,
    prec_to_json,
    rat,
)
from .verdict import Tri

NEG_INF = -math.inf


def _as_xs(c, prec=INF) -> XSeries:
    if isinstance(c, XSeries):
        return c
    return XSeries.const(c, prec)


class D1Op:
    """Σ_q a_q(x) ∂₁^q with common x-precision ``prec``."""

    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs: Optional[Dict[int, object]] = None, prec=INF):
        items = []
        for q, c in (coeffs or {}).items():
            if q < 0:
                raise PreconditionError("negative ∂₁ power inside D̂₁")
            c = _as_xs(c)
            prec = min(prec, c.prec)
            items.append((q, c))
        self.prec = prec
        self.coeffs = {}
        for q, c in items:
            c = c.truncate(prec)
            if not c.is_zero():
                self.coeffs[q] = c

    @classmethod
    def _raw(cls, coeffs, prec):
        obj = cls.__new__(cls)
        obj.coeffs = coeffs
        obj.prec = prec
        return obj

    @classmethod
    def const(cls, c, prec=INF):
        return cls({0: _as_xs(c, prec)}, prec)

    @classmethod
    def zero(cls, prec=INF):
        return cls._raw({}, prec)

    def is_zero(self):
        return not self.coeffs

    def max_q(self):
        return max(self.coeffs, default=-1)

    def truncate(self, n):
        p = min(self.prec, n)
        if p == self.prec:
            return self
        out = {}
        for q, c in self.coeffs.items():
            c = c.truncate(p)
            if not c.is_zero():
                out[q] = c
        return D1Op._raw(out, p)

    def __add__(self, other):
        if not isinstance(other, D1Op):
            other = D1Op.const(other)
        p = min(self.prec, other.prec)
        out = {}
        for q in set(self.coeffs) | set(other.coeffs):
            c = self.coeffs.get(q, XSeries.zero(p)) + other.coeffs.get(q, XSeries.zero(p))
            c = c.truncate(p)
            if not c.is_zero():
                out[q] = c
        return D1Op._raw(out, p)

    __radd__ = __add__

    def __neg__(self):
        return D1Op._raw({q: -c for q, c in self.coeffs.items()}, self.prec)

    def __sub__(self, other):
        if not isinstance(other, D1Op):
            other = D1Op.const(other)
        return self + (-other)

    def scale(self, c):
        c = rat(c)
        if not c:
            return D1Op.zero(self.prec)
        return D1Op._raw({q: v.scale(c) for q, v in self.coeffs.items()}, self.prec)

    def mul_series(self, f: XSeries) -> "D1Op":
        """f · self (left multiplication by a function)."""
        p = min(self.prec, f.prec)
        return D1Op({q: f * c for q, c in self.coeffs.items()}, p)

    def __mul__(self, other):
        if isinstance(other, D1Op):
            return d1_mul(self, other)
        if isinstance(other, XSeries):
            return d1_mul(self, D1Op.const(other, other.prec))
        return self.scale(other)

    def coeff_map(self, fn, prec) -> "D1Op":
        out = {}
        for q, c in self.coeffs.items():
            v = fn(c)
            if not v.is_zero():
                out[q] = v
        return D1Op._raw(out, prec)

    def dx(self, axis: int) -> "D1Op":
        """Coefficient-wise ∂/∂x_axis (this is the inner derivation [∂_axis, ·])."""
        p = max(self.prec - 1, 0)
        return D1Op({q: d_dx(c, axis) for q, c in self.coeffs.items()}, p)

    def integrate(self, axis: int) -> "D1Op":
        return D1Op({q: antideriv(c, axis) for q, c in self.coeffs.items()}, self.prec + 1)

    def is_x1_free(self) -> bool:
        return all(i == 0 for c in self.coeffs.values() for (i, _j) in c.terms)

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self.coeffs.values())

    def __eq__(self, other):
        if not isinstance(other, D1Op):
            return NotImplemented
        return self.prec == other.prec and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.prec, tuple(sorted(self.coeffs.items()))))

    def agrees(self, other: "D1Op", prec=None) -> bool:
        p = min(self.prec, other.prec)
        if prec is not None:
            p = min(p, prec)
        a, b = self.truncate(p), other.truncate(p)
        return a.coeffs == b.coeffs

    def __repr__(self):
        if not self.coeffs:
            body = "0"
        else:
            body = " + ".join(f"{c!r}·∂₁^{q}" for q, c in sorted(self.coeffs.items()))
        tail = "" if self.prec == INF else f" [prec {self.prec}]"
        return f"D1Op({body}){tail}"

    def to_json(self):
        return [{"q": q, "series": c.to_json()} for q, c in sorted(self.coeffs.items())]


def d1_mul(a: D1Op, b: D1Op) -> D1Op:
    """Leibniz product Σ_k Σ_l C(k,l) a_k ∂₁^l(b_m) ∂₁^{k-l+m}."""
    prec = a.prec
    for k, ak in a.coeffs.items():
        prec = min(prec, b.prec - max(0, k - ak.ord_M()))
    if prec < 0:
        prec = 0
    out: Dict[int, Dict] = {}
    bterms = [(m, list(bm.terms.items())) for m, bm in b.coeffs.items()]
    for k, ak in a.coeffs.items():
        aterms = [(i, j, c) for (i, j), c in ak.terms.items() if i + j < prec]
        if not aterms:
            continue
        for m, bt in bterms:
            for (i2, j2), c2 in bt:
                for l in range(0, min(k, i2) + 1):
                    w = math.comb(k, l) * falling(i2, l) * c2
                    bi, bdeg = i2 - l, i2 - l + j2
                    if bdeg >= prec:
                        continue
                    slot = out.setdefault(k - l + m, {})
                    for i1, j1, c1 in aterms:
                        if i1 + j1 + bdeg >= prec:
                            continue
                        key = (i1 + bi, j1 + j2)
                        slot[key] = slot.get(key, 0) + c1 * w
    coeffs = {}
    for q, terms in out.items():
        terms = {kk: v for kk, v in terms.items() if v}
        if terms:
            coeffs[q] = XSeries._raw(terms, prec)
    return D1Op._raw(coeffs, prec)


class EPlusOp:
    """Σ_s p_s ∂₂^s with per-slot precision and a window floor."""

    __slots__ = ("slots", "window_lo")

    def __init__(self, slots: Optional[Dict[int, D1Op]] = None, window_lo=NEG_INF):
        self.window_lo = window_lo
        clean = {}
        for s, d in (slots or {}).items():
            if s < window_lo:
                continue
            if not isinstance(d, D1Op):
                d = D1Op.const(d)
            if d.is_zero() and d.prec == INF:
                continue
            clean[s] = d
        self.slots = clean

    # constructors -------------------------------------------------------
    @classmethod
    def one(cls):
        return cls({0: D1Op.const(1)})

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def scalar(cls, c):
        return cls({0: D1Op.const(c)})

    @classmethod
    def mult(cls, f: XSeries):
        """Multiplication operator by a function."""
        return cls({0: D1Op.const(f, f.prec)})

    @classmethod
    def monomial(cls, q: int, s: int, c=1):
        """c · ∂₁^q ∂₂^s (c a rational or an XSeries)."""
        c = _as_xs(c)
        return cls({s: D1Op({q: c}, c.prec)})

    @classmethod
    def from_terms(cls, terms: Dict, window_lo=NEG_INF):
        """Build from {(q, s): coefficient}."""
        slots: Dict[int, Dict[int, XSeries]] = {}
        for (q, s), c in terms.items():
            c = _as_xs(c)
            cur = slots.setdefault(s, {})
            cur[q] = cur[q] + c if q in cur else c
        out = {}
        for s, cs in slots.items():
            p = min((c.prec for c in cs.values()), default=INF)
            out[s] = D1Op(cs, p)
        return cls(out, window_lo)

    @classmethod
    def from_d1(cls, d: D1Op):
        return cls({0: d})

    # queries ----------------------------------------------------------------
    def hi(self):
        return max(self.slots, default=None)

    def lo_stored(self):
        return min(self.slots, default=None)

    def slot(self, s) -> Optional[D1Op]:
        """Slot s, or None when it lies below the window (unknown)."""
        if s < self.window_lo:
            return None
        return self.slots.get(s, D1Op.zero())

    def slot_prec(self, s):
        if s < self.window_lo:
            return NEG_INF
        d = self.slots.get(s)
        return INF if d is None else d.prec

    def is_exact(self):
        return self.window_lo == NEG_INF and all(d.prec == INF for d in self.slots.values())

    def is_zero(self):
        return all(d.is_zero() for d in self.slots.values())

    def nonzero_slots(self):
        return sorted(s for s, d in self.slots.items() if not d.is_zero())

    def min_prec(self):
        return min((d.prec for d in self.slots.values()), default=INF)

    def iter_terms(self):
        """Yield (s, q, XSeries) for every stored coefficient."""
        for s in sorted(self.slots):
            for q, c in sorted(self.slots[s].coeffs.items()):
                yield s, q, c

    # structural transforms ----------------------------------------------
    def truncate_window(self, lo) -> "EPlusOp":
        lo = max(lo, self.window_lo)
        return EPlusOp({s: d for s, d in self.slots.items() if s >= lo}, lo)

    def truncate_prec(self, n) -> "EPlusOp":
        return EPlusOp({s: d.truncate(n) for s, d in self.slots.items()}, self.window_lo)

    def with_uniform_prec(self, n) -> "EPlusOp":
        """Give every known slot (including absent exact zeros) precision n.

        Only meaningful for an exact operator truncated to a finite window.
        """
        out = {}
        hi = self.hi()
        if hi is None:
            return self
        lo = self.window_lo if self.window_lo != NEG_INF else self.lo_stored()
        for s in range(int(lo), hi + 1):
            out[s] = self.slots.get(s, D1Op.zero()).truncate(n)
            if out[s].prec == INF:
                out[s] = D1Op._raw(dict(out[s].coeffs), n)
        return EPlusOp(out, self.window_lo)

    def shift(self, k) -> "EPlusOp":
        """Multiply on the right by ∂₂^k (exact, constant coefficients)."""
        return self * EPlusOp.monomial(0, k)

    def negative_part(self) -> "EPlusOp":
        return EPlusOp({s: d for s, d in self.slots.items() if s < 0}, self.window_lo)

    def nonnegative_part(self) -> "EPlusOp":
        return EPlusOp({s: d for s, d in self.slots.items() if s >= 0}, NEG_INF)

    def map_slots(self, fn) -> "EPlusOp":
        return EPlusOp({s: fn(d) for s, d in self.slots.items()}, self.window_lo)

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        other = as_op(other)
        lo = max(self.window_lo, other.window_lo)
        out = {}
        for s in set(self.slots) | set(other.slots):
            if s < lo:
                continue
            a = self.slots.get(s)
            b = other.slots.get(s)
            if a is None:
                out[s] = b
            elif b is None:
                out[s] = a
            else:
                out[s] = a + b
        return EPlusOp(out, lo)

    __radd__ = __add__

    def __neg__(self):
        return EPlusOp({s: -d for s, d in self.slots.items()}, self.window_lo)

    def __sub__(self, other):
        return self + (-as_op(other))

    def __rsub__(self, other):
        return as_op(other) - self

    def scale(self, c):
        return EPlusOp({s: d.scale(c) for s, d in self.slots.items()}, self.window_lo)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return eplus_mul(self, as_op(other))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return eplus_mul(as_op(other), self)

    def __pow__(self, n: int):
        if n < 0:
            raise PreconditionError("use invert_monic for negative powers")
        out = EPlusOp.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, EPlusOp):
            return NotImplemented
        return self.window_lo == other.window_lo and self.slots == other.slots

    def __hash__(self):
        return hash((self.window_lo, tuple(sorted(self.slots.items()))))

    def agrees(self, other: "EPlusOp") -> bool:
        return not discrepancies(self, other)

    def __repr__(self):
        parts = []
        for s in sorted(self.slots, reverse=True):
            d = self.slots[s]
            parts.append(f"[∂₂^{s}] {d!r}")
        lo = "" if self.window_lo == NEG_INF else f", window_lo={self.window_lo}"
        return "EPlusOp(" + "; ".join(parts) + lo + ")"

    # serialization -----------------------------------------------------
    def to_json(self):
        return {
            "window_lo": None if self.window_lo == NEG_INF else int(self.window_lo),
            "slots": [
                {"s": s, "prec": prec_to_json(d.prec), "d1": d.to_json()}
                for s, d in sorted(self.slots.items())
            ],
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "slots" not in obj:
            raise FormatError("operator literal needs 'slots'")
        lo = obj.get("window_lo")
        if lo is None:
            lo = NEG_INF
        elif isinstance(lo, bool) or not isinstance(lo, int):
            raise FormatError(f"bad window_lo {lo!r}")
        slots = {}
        for ent in obj["slots"]:
            try:
                s = ent["s"]
                prec = prec_from_json(ent.get("prec"))
                d1 = ent["d1"]
            except (KeyError, TypeError) as exc:
                raise FormatError(f"bad slot entry {ent!r}") from exc
            if not isinstance(s, int) or isinstance(s, bool):
                raise FormatError(f"bad slot index {s!r}")
            coeffs = {}
            for c in d1:
                try:
                    q = c["q"]
                    ser = XSeries.from_json(c["series"])
                except (KeyError, TypeError) as exc:
                    raise FormatError(f"bad d1 entry {c!r}") from exc
                if ser.prec < prec:
                    raise FormatError("coefficient precision below its slot precision")
                coeffs[q] = ser.truncate(prec)
            if s in slots:
                raise FormatError(f"duplicate slot {s}")
            slots[s] = D1Op(coeffs, prec)
            if prec != INF:
                slots[s] = D1Op._raw(slots[s].coeffs, prec)
        return cls(slots, lo)


def as_op(x) -> EPlusOp:
    if isinstance(x, EPlusOp):
        return x
    if isinstance(x, D1Op):
        return EPlusOp.from_d1(x)
    if isinstance(x, XSeries):
        return EPlusOp.mult(x)
    return EPlusOp.scalar(x)


def discrepancies(a: EPlusOp, b: EPlusOp):
    """List (slot, q, monomial) where a and b differ on their common guaranteed region."""
    lo = max(a.window_lo, b.window_lo)
    out = []
    for s in set(a.slots) | set(b.slots):
        if s < lo:
            continue
        da, db = a.slot(s), b.slot(s)
        p = min(da.prec, db.prec)
        ta, tb = da.truncate(p), db.truncate(p)
        for q in set(ta.coeffs) | set(tb.coeffs):
            ca = ta.coeffs.get(q, XSeries.zero(p))
            cb = tb.coeffs.get(q, XSeries.zero(p))
            if ca.terms != cb.terms:
                diff = ca - cb
                out.append((s, q, min(diff.terms)))
    return sorted(out)


def _d2_power(d: D1Op, k: int, cache: dict, key) -> D1Op:
    ck = (key, k)
    if ck in cache:
        return cache[ck]
    if k == 0:
        v = d
    else:
        v = _d2_power(d, k - 1, cache, key).dx(2)
    cache[ck] = v
    return v


def _max_x2_degree(d: D1Op) -> int:
    return max((j for c in d.coeffs.values() for (_i, j) in c.terms), default=-1)


def eplus_mul(a: EPlusOp, b: EPlusOp, floor=None) -> EPlusOp:
    """Product Σ C_i^k a_i · d^k(b_j) ∂₂^{i+j-k} with d = ∂/∂x₂ coefficient-wise.

    ``floor`` is an optional target window: slots below it are not computed.
    """
    if not a.slots or not b.slots:
        ha = a.hi() if a.slots else a.window_lo
        hb = b.hi() if b.slots else b.window_lo
        bounds = [v for v in (a.window_lo + hb, ha + b.window_lo) if v != NEG_INF]
        if floor is not None:
            bounds.append(floor)
        return EPlusOp({}, max(bounds) if bounds else NEG_INF)
    hi_a, hi_b = a.hi(), b.hi()
    bounds = []
    if a.window_lo != NEG_INF:
        bounds.append(a.window_lo + hi_b)
    if b.window_lo != NEG_INF:
        bounds.append(hi_a + b.window_lo)
    if floor is not None:
        bounds.append(floor)
    lo_out = max(bounds) if bounds else NEG_INF
    min_i = a.lo_stored()
    min_j = b.lo_stored()
    if lo_out == NEG_INF:
        if min_i < 0:
            if all(d.prec == INF for d in b.slots.values()):
                K = max(_max_x2_degree(d) for d in b.slots.values())
                t_stop = min_i + min_j - max(K, 0)
            else:
                t_stop = None  # the precision of the deepest slots ends the loop
        else:
            t_stop = min_j
    else:
        t_stop = lo_out
    a_items = sorted(a.slots.items())
    b_items = sorted(b.slots.items())
    cache: dict = {}
    out = {}
    window = lo_out
    t = hi_a + hi_b
    while True:
        if t_stop is not None and t < t_stop:
            break
        acc: Dict[int, Dict] = {}
        prec = INF
        touched = False
        for i, ai in a_items:
            for j, bj in b_items:
                k = i + j - t
                if k < 0 or (i >= 0 and k > i):
                    continue
                c = gbinom(i, k)
                if not c:
                    continue
                dbj = _d2_power(bj, k, cache, j)
                if dbj.is_zero() and dbj.prec == INF:
                    continue
                prod = d1_mul(ai, dbj)
                touched = True
                prec = min(prec, prod.prec)
                for q, ser in prod.coeffs.items():
                    slot = acc.setdefault(q, {})
                    for m, v in ser.terms.items():
                        slot[m] = slot.get(m, 0) + c * v
        if touched and prec <= 0:
            window = t + 1
            break
        if touched:
            coeffs = {}
            for q, terms in acc.items():
                terms = {m: v for m, v in terms.items() if v and m[0] + m[1] < prec}
                if terms:
                    coeffs[q] = XSeries._raw(terms, prec)
            d = D1Op._raw(coeffs, prec)
            if coeffs or prec != INF:
                out[t] = d
        t -= 1
        if t_stop is None and t < min_i + min_j - 10 ** 6:  # pragma: no cover - safety net
            raise PreconditionError("product did not terminate")
    return EPlusOp(out, window)


def commutator(a: EPlusOp, b: EPlusOp, floor=None) -> EPlusOp:
    return eplus_mul(a, b, floor) - eplus_mul(b, a, floor)


def gamma_order(p: EPlusOp) -> GammaDeg:
    nz = p.nonzero_slots()
    if not nz:
        raise PreconditionError("zero operator has no Γ-order")
    l = nz[-1]
    return GammaDeg(p.slots[l].max_q(), l)


def highest_term(p: EPlusOp):
    """(Γ-order, leading coefficient series constant term, leading coefficient series)."""
    g = gamma_order(p)
    c = p.slots[g.d2].coeffs[g.d1]
    return g, c.constant_term(), c


def is_monic(p: EPlusOp) -> bool:
    g, _c, ser = highest_term(p)
    return ser.terms == {(0, 0): Fraction(1)}


def d2_power_inverse(l: int) -> EPlusOp:
    return EPlusOp.monomial(0, -l)


def invert_monic(p: EPlusOp, floor=None) -> EPlusOp:
    """Inverse in Ê₊ of an operator whose highest term is c·∂₂^l, c a unit series."""
    g = gamma_order(p)
    top = p.slots[g.d2]
    if g.d1 != 0:
        raise PreconditionError("not invertible within Ê₊")
    c = top.coeffs[0]
    if not c.constant_term():
        raise PreconditionError("not invertible within Ê₊")
    l = g.d2
    if floor is None:
        if p.window_lo != NEG_INF:
            floor = p.window_lo - 2 * l
    rest = p - EPlusOp({l: D1Op.const(c, top.prec)})
    rest = EPlusOp({s: d for s, d in rest.slots.items() if s != l or not d.is_zero()}, rest.window_lo)
    if c.is_constant():
        h_inv = EPlusOp.monomial(0, -l, 1 / c.constant_term())
        if top.prec != INF:
            h_inv = EPlusOp({-l: D1Op.const(XSeries.const(1 / c.constant_term(), top.prec), top.prec)})
    else:
        if floor is None:
            raise PreconditionError("target window required for an infinite inverse")
        cinv = invert_unit(c, top.prec if top.prec != INF else None)
        h_inv = eplus_mul(EPlusOp.monomial(0, -l), EPlusOp.mult(cinv), floor)
    if rest.window_lo == NEG_INF and all(d.is_zero() and d.prec == INF for d in rest.slots.values()):
        out = h_inv
        return out if floor is None else out.truncate_window(floor)
    if floor is None:
        raise PreconditionError("target window required for an infinite inverse")
    nfloor = floor + l
    n_op = eplus_mul(h_inv, rest, nfloor)
    total = EPlusOp.one()
    power = EPlusOp.one()
    for _ in range(int(-nfloor) + 2):
        power = eplus_mul(power, -n_op, nfloor)
        # a power that is only zero to precision still bounds the precision of the sum
        total = total + power
        if not power.slots:
            break
    total = total.truncate_window(nfloor) if total.window_lo < nfloor else total
    return eplus_mul(total, h_inv, floor)


def op_exp(a: D1Op, prec=None) -> D1Op:
    """Normal-ordered exponential :exp(a): = Σ :a^n:/n!.

    Coefficients are multiplied as functions with every ∂₁ moved to the right,
    so this equals the composition exponential whenever ∂₁ does not act on the
    coefficients of a (for instance when a is x₁-free).
    """
    for c in a.coeffs.values():
        if c.constant_term():
            raise PreconditionError("exponential does not converge in D̂₁")
    p = a.prec if prec is None else min(a.prec, prec)
    if a.is_zero():
        return D1Op.const(XSeries.const(1, p), p)
    if p == INF:
        raise PreconditionError("exponential of an exact non-zero operator needs a target precision")

    def comm_mul(x, y):
        out = {}
        for q1, c1 in x.items():
            for q2, c2 in y.items():
                v = c1 * c2
                if v.is_zero():
                    continue
                out[q1 + q2] = out[q1 + q2] + v if q1 + q2 in out else v
        return {q: v for q, v in out.items() if not v.is_zero()}

    base = {q: c.truncate(p) for q, c in a.coeffs.items()}
    total = {0: XSeries.const(1, p)}
    term = {0: XSeries.const(1, p)}
    for n in range(1, int(p) + 1):
        term = {q: v.scale(Fraction(1, n)) for q, v in comm_mul(term, base).items()}
        if not term:
            break
        for q, v in term.items():
            total[q] = total[q] + v if q in total else v
    return D1Op(total, p)


def conjugate(s: EPlusOp, x: EPlusOp, s_inv: Optional[EPlusOp] = None, floor=None) -> EPlusOp:
    """s · x · s⁻¹."""
    if s_inv is None:
        s_inv = invert_monic(s, floor)
    return eplus_mul(eplus_mul(s, x, floor), s_inv, floor)


# --- D̂ and PDO membership -----------------------------------------------

def is_in_Dhat(p: EPlusOp) -> bool:
    return all(d.is_zero() for s, d in p.slots.items() if s < 0)


def _tail_signature(d: D1Op) -> Tri:
    """Classify a truncated D̂₁ element as differential operator or completed tail."""
    if d.prec == INF:
        return Tri.TRUE
    verdict = Tri.TRUE
    for q, c in d.coeffs.items():
        o = c.ord_M()
        if o >= d.prec - 1 and q >= 1:
            if q >= o:
                return Tri.FALSE
            verdict = Tri.INCONCLUSIVE
    return verdict


def is_pdo(p: EPlusOp) -> Tri:
    """Whether p agrees at its truncation with an element of k[[x]][∂₁,∂₂].

    FALSE when a negative ∂₂ slot is nonzero, or when a completed ∂₁-tail is
    visible right up to the precision boundary (a coefficient a_q with
    ord_M(a_q) = prec-1 and q >= ord_M(a_q), the signature of the
    normal-ordered exponentials).  INCONCLUSIVE when a coefficient touches the
    precision boundary without that signature.
    """
    if not is_in_Dhat(p):
        return Tri.FALSE
    verdict = Tri.TRUE
    for s, d in p.slots.items():
        v = _tail_signature(d)
        if v is Tri.FALSE:
            return Tri.FALSE
        if v is Tri.INCONCLUSIVE:
            verdict = Tri.INCONCLUSIVE
    return verdict


# --- symbols ------------------------------------------------------------------

class SymbolPoly:
    """Polynomial in ξ₁, ξ₂ whose coefficients are x-series."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for e, c in (terms or {}).items():
            c = _as_xs(c)
            if not c.is_zero():
                clean[e] = c
        self.terms = clean

    def degree(self):
        return max((a + b for a, b in self.terms), default=None)

    def is_homogeneous(self):
        return len({a + b for a, b in self.terms}) <= 1

    def is_constant(self):
        return all(c.is_constant() for c in self.terms.values())

    def rational_terms(self):
        return {e: c.constant_term() for e, c in self.terms.items()}

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return SymbolPoly(out)

    def __neg__(self):
        return SymbolPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                e = (a1 + a2, b1 + b2)
                v = c1 * c2
                out[e] = out[e] + v if e in out else v
        return SymbolPoly(out)

    def d_xi(self, v: int):
        out = {}
        for (a, b), c in self.terms.items():
            if v == 1 and a:
                out[(a - 1, b)] = c.scale(a)
            elif v == 2 and b:
                out[(a, b - 1)] = c.scale(b)
        return SymbolPoly(out)

    def d_x(self, v: int):
        return SymbolPoly({e: d_dx(c, v) for e, c in self.terms.items()})

    def agrees(self, other) -> bool:
        for e in set(self.terms) | set(other.terms):
            a = self.terms.get(e, XSeries.zero())
            b = other.terms.get(e, XSeries.zero())
            if not a.agrees(b):
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, SymbolPoly) and self.terms == other.terms

    def __repr__(self):
        parts = [f"{c!r}·ξ₁^{a}ξ₂^{b}" for (a, b), c in sorted(self.terms.items())]
        return "SymbolPoly(" + " + ".join(parts or ["0"]) + ")"

    def to_json(self):
        return [{"e1": a, "e2": b, "series": c.to_json()} for (a, b), c in sorted(self.terms.items())]


def _require_pdo(p: EPlusOp):
    v = is_pdo(p)
    if v is not Tri.TRUE:
        raise PreconditionError(f"not a differential operator (is_pdo = {v.value})")


def total_order(p: EPlusOp) -> int:
    return max((q + s for s, q, _c in p.iter_terms()), default=-1)


def full_symbol(p: EPlusOp, degree=None) -> SymbolPoly:
    """Homogeneous degree-``degree`` part of p's symbol (default: total order)."""
    _require_pdo(p)
    m = total_order(p) if degree is None else degree
    return SymbolPoly({(q, s): c for s, q, c in p.iter_terms() if q + s == m})


def principal_symbol(p: EPlusOp) -> SymbolPoly:
    sym = full_symbol(p)
    if not sym.is_constant():
        raise PreconditionError("principal symbol has non-constant coefficients")
    return sym


def check_constant_symbol(p: EPlusOp) -> bool:
    return full_symbol(p).is_constant()


def poisson_bracket(f: SymbolPoly, g: SymbolPoly) -> SymbolPoly:
    out = SymbolPoly()
    for v in (1, 2):
        out = out + f.d_xi(v) * g.d_x(v) - g.d_xi(v) * f.d_x(v)
    return out


# --- linear change of coordinates -----------------------------------------

def _mat(m):
    m = [[rat(v) for v in row] for row in m]
    if len(m) != 2 or any(len(r) != 2 for r in m):
        raise FormatError("matrix must be 2x2")
    det = m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if det == 0:
        raise PreconditionError("singular coordinate change")
    inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
    return m, inv


def _lin_power(a, b, e):
    """(a ξ₁ + b ξ₂)^e as {(u, v): coefficient}."""
    out = {}
    for u in range(e + 1):
        c = math.comb(e, u) * a ** u * b ** (e - u)
        if c:
            out[(u, e - u)] = Fraction(c)
    return out


def linear_change(p: EPlusOp, m, shift=None) -> EPlusOp:
    """Rewrite p in new coordinates y = M x - shift.

    ``m`` is the Jacobian M[i][j] = ∂_j(y_i), so that ∂_j = Σ_i M[i][j] ∂'_i.
    Coefficient functions are re-expanded with x = M⁻¹ (y + shift).
    """
    _require_pdo(p)
    M, Minv = _mat(m)
    shift = [rat(v) for v in (shift or (0, 0))]
    if p.window_lo != NEG_INF and p.window_lo > 0:
        raise PreconditionError("operator window must include slot 0")
    _verify_coordinate_relations(M, Minv, shift)
    # x_i = Σ_j Minv[i][j] (y_j + shift_j); as rows: x_i = Σ_j sub[j][i] y_j + sh_i
    sub = [[Minv[i][j] for i in range(2)] for j in range(2)]
    sh = [sum(Minv[i][j] * shift[j] for j in range(2)) for i in range(2)]
    acc: Dict = {}
    for s, q, c in p.iter_terms():
        c2 = linear_substitute(c, sub, sh)
        d1 = _lin_power(M[0][0], M[1][0], q)  # ∂₁ = M11 ∂₁' + M21 ∂₂'
        d2 = _lin_power(M[0][1], M[1][1], s)  # ∂₂ = M12 ∂₁' + M22 ∂₂'
        for (u1, v1), w1 in d1.items():
            for (u2, v2), w2 in d2.items():
                key = (u1 + u2, v1 + v2)
                term = c2.scale(w1 * w2)
                acc[key] = acc[key] + term if key in acc else term
    # keep the precision of every input slot even when the image is zero
    out = EPlusOp.from_terms(acc)
    floor_prec = p.min_prec()
    if floor_prec != INF:
        out = out.map_slots(lambda d: d.truncate(floor_prec))
    lo = p.window_lo if p.window_lo != NEG_INF else NEG_INF
    return EPlusOp(out.slots, lo)


def _verify_coordinate_relations(M, Minv, shift):
    """Check [∂'_i, y_k] = δ_ik for the images written in the old coordinates."""
    for i in range(2):
        # ∂'_i = Σ_j ∂_j Minv[j][i]
        dprime = EPlusOp.from_terms({(1, 0): Minv[0][i], (0, 1): Minv[1][i]})
        for k in range(2):
            yk = XSeries({(1, 0): M[k][0], (0, 1): M[k][1], (0, 0): -shift[k]})
            comm = commutator(dprime, EPlusOp.mult(yk))
            want = EPlusOp.scalar(1 if i == k else 0)
            if discrepancies(comm, want):
                raise PreconditionError("coordinate change breaks the commutation relations")


# --- convenience symbols ----------------------------------------------------

def D1() -> EPlusOp:
    return EPlusOp.monomial(1, 0)


def D2(power: int = 1) -> EPlusOp:
    return EPlusOp.monomial(0, power)


def X(series: XSeries) -> EPlusOp:
    return EPlusOp.mult(series)


def ops_sum(items: Iterable[EPlusOp]) -> EPlusOp:
    out = EPlusOp.zero()
    for it in items:
        out = out + it
    return out
