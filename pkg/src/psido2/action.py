"""The right module V = k((z₁))((z₂)) and subspaces of k[z₁⁻¹]((z₂)).

A ``ZSeries`` stores monomials z₁^{-i} z₂^{j} (i >= 0) keyed by (i, j).
Every term with j >= ``tail_prec`` is unknown; the z₁ direction is kept
exactly, so ``i_bound`` is only an informational maximum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Tuple

from .errors import FormatError, PreconditionError
from .operators import NEG_INF, EPlusOp
from .series import INF, falling, prec_from_json, prec_to_json, rat, rat_str
from .verdict import Tri


def lt_key(m):
    """Anti-lex key of z₁^{-i} z₂^{j}: Γ-exponent (-i, j), second coordinate first."""
    i, j = m
    return (j, -i)


class ZSeries:
    __slots__ = ("terms", "tail_prec")

    def __init__(self, terms: Optional[Dict[Tuple[int, int], object]] = None, tail_prec=INF):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0:
                raise PreconditionError("positive z₁ powers lie outside k[z₁⁻¹]((z₂))")
            if j >= tail_prec:
                continue
            c = rat(c)
            if c:
                clean[(i, j)] = c
        self.terms = clean
        self.tail_prec = tail_prec

    @classmethod
    def _raw(cls, terms, tail):
        obj = cls.__new__(cls)
        obj.terms = terms
        obj.tail_prec = tail
        return obj

    @classmethod
    def monomial(cls, i, j, c=1):
        return cls({(i, j): c})

    @property
    def i_bound(self):
        return max((i for i, _ in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def lowest_term(self):
        if not self.terms:
            return None
        m = min(self.terms, key=lt_key)
        return m, self.terms[m]

    def truncate(self, tail):
        t = min(self.tail_prec, tail)
        if t == self.tail_prec:
            return self
        return ZSeries._raw({m: c for m, c in self.terms.items() if m[1] < t}, t)

    def w0_part(self):
        """Terms with non-positive z₂ exponent."""
        return {m: c for m, c in self.terms.items() if m[1] <= 0}

    def positive_part(self):
        return ZSeries._raw({m: c for m, c in self.terms.items() if m[1] > 0}, self.tail_prec)

    def shifted(self, di, dj, c=1):
        """c · z₁^{-di} z₂^{dj} · self."""
        c = rat(c)
        if not c:
            return ZSeries._raw({}, self.tail_prec + dj)
        return ZSeries._raw({(i + di, j + dj): v * c for (i, j), v in self.terms.items()}, self.tail_prec + dj)

    def __add__(self, other):
        t = min(self.tail_prec, other.tail_prec)
        out = {m: c for m, c in self.terms.items() if m[1] < t}
        for m, c in other.terms.items():
            if m[1] >= t:
                continue
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return ZSeries._raw(out, t)

    def __neg__(self):
        return ZSeries._raw({m: -c for m, c in self.terms.items()}, self.tail_prec)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = rat(c)
        if not c:
            return ZSeries._raw({}, self.tail_prec)
        return ZSeries._raw({m: v * c for m, v in self.terms.items()}, self.tail_prec)

    def __mul__(self, other):
        """Product in k[z₁⁻¹]((z₂)) (multiplication by constant-coefficient symbols)."""
        if not isinstance(other, ZSeries):
            return self.scale(other)
        ja = min((j for _, j in self.terms), default=None)
        jb = min((j for _, j in other.terms), default=None)
        tails = []
        if self.tail_prec != INF:
            tails.append(self.tail_prec + (jb if jb is not None else other.tail_prec))
        if other.tail_prec != INF:
            tails.append(other.tail_prec + (ja if ja is not None else self.tail_prec))
        t = min(tails) if tails else INF
        out = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                if k[1] >= t:
                    continue
                out[k] = out.get(k, 0) + c1 * c2
        return ZSeries._raw({m: c for m, c in out.items() if c}, t)

    def __eq__(self, other):
        return isinstance(other, ZSeries) and self.tail_prec == other.tail_prec and self.terms == other.terms

    def __hash__(self):
        return hash((self.tail_prec, tuple(sorted(self.terms.items()))))

    def agrees(self, other) -> bool:
        t = min(self.tail_prec, other.tail_prec)
        return self.truncate(t).terms == other.truncate(t).terms

    def __repr__(self):
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda t: lt_key(t[0])):
            mono = "".join(s for s in ((f"z1^-{i}" if i else ""), (f"z2^{j}" if j else "")) if s)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        tail = "" if self.tail_prec == INF else f" + O(z2^{self.tail_prec})"
        return "ZSeries(" + (" + ".join(parts) or "0") + tail + ")"

    def to_json(self):
        return {
            "tail_prec": prec_to_json(self.tail_prec),
            "i_bound": self.i_bound,
            "terms": [[i, j, rat_str(c)] for (i, j), c in sorted(self.terms.items(), key=lambda t: (t[0][1], t[0][0]))],
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "terms" not in obj:
            raise FormatError("z-series literal needs 'terms'")
        tail = obj.get("tail_prec")
        tail = INF if tail is None else tail
        if tail != INF and (isinstance(tail, bool) or not isinstance(tail, int)):
            raise FormatError(f"bad tail_prec {tail!r}")
        terms = {}
        for t in obj["terms"]:
            if not isinstance(t, list) or len(t) != 3 or not all(isinstance(v, int) for v in t[:2]):
                raise FormatError(f"bad z-series term {t!r}")
            terms[(t[0], t[1])] = terms.get((t[0], t[1]), 0) + rat(t[2])
        return cls(terms, tail)


def z_to_op(v: ZSeries) -> EPlusOp:
    """Transliterate z₁^{-i} z₂^{j} ↦ ∂₁^i ∂₂^{-j} (constant coefficients)."""
    if v.tail_prec != INF:
        window = -v.tail_prec + 1
    else:
        window = NEG_INF
    return EPlusOp.from_terms({(i, -j): c for (i, j), c in v.terms.items()}, window)


def reduce_to_V(p: EPlusOp) -> ZSeries:
    """P(0): evaluate coefficients at x = 0 and map ∂₁^a ∂₂^b ↦ z₁^{-a} z₂^{-b}."""
    tail = INF
    if p.window_lo != NEG_INF:
        tail = 1 - p.window_lo
    terms = {}
    for s, d in p.slots.items():
        if d.prec <= 0:
            tail = min(tail, -s)
            continue
        for q, c in d.coeffs.items():
            c0 = c.constant_term()
            if c0:
                terms[(q, -s)] = c0
    return ZSeries(terms, tail)


def right_act(v: ZSeries, p: EPlusOp) -> ZSeries:
    """v · p: lift z₁^{-k}z₂^{j} to ∂₁^k∂₂^{-j}, compose with p, reduce mod (x₁, x₂).

    A monomial ∂₁^k∂₂^l times a coefficient x₁^α x₂^β ∂₁^q ∂₂^s contributes
    falling(k, α) falling(l, β) z₁^{-(k-α+q)} z₂^{-(l-β+s)}.
    """
    if not p.slots:
        tail = INF
        if p.window_lo != NEG_INF and v.terms:
            tail = min(j for _, j in v.terms) - p.window_lo + 1
        return ZSeries({}, tail)
    hi = p.hi()
    tail = INF
    if v.tail_prec != INF:
        tail = v.tail_prec - hi
    if p.window_lo != NEG_INF:
        js = [j for _, j in v.terms]
        if v.tail_prec != INF:
            js.append(v.tail_prec)
        if js:
            tail = min(tail, min(js) - p.window_lo + 1)
    for s, d in p.slots.items():
        if d.prec == INF:
            continue
        N = d.prec
        for (k, j) in v.terms:
            l = -j
            bmin = max(0, N - k)
            if l >= 0 and bmin > l:
                continue
            tail = min(tail, j + bmin - s)
    out: Dict[Tuple[int, int], Fraction] = {}
    for (k, j), cv in v.terms.items():
        l = -j
        for s, d in p.slots.items():
            for q, ser in d.coeffs.items():
                for (a, b), c in ser.terms.items():
                    if a > k or (l >= 0 and b > l):
                        continue
                    jj = j + b - s
                    if jj >= tail:
                        continue
                    w = falling(k, a) * falling(l, b)
                    if not w:
                        continue
                    key = (k - a + q, jj)
                    out[key] = out.get(key, 0) + cv * c * w
    return ZSeries._raw({m: c for m, c in out.items() if c}, tail)


# --- row reduction ------------------------------------------------------

class _Reducer:
    """Incremental Gaussian elimination pivoting on lowest terms."""

    def __init__(self):
        self.pivots: Dict[Tuple[int, int], ZSeries] = {}
        self.undetermined: List[ZSeries] = []

    def add(self, g: ZSeries):
        g = ZSeries._raw(dict(g.terms), g.tail_prec)
        while True:
            lt = g.lowest_term()
            if lt is None:
                if g.tail_prec != INF:
                    self.undetermined.append(g)
                return None
            m, c = lt
            piv = self.pivots.get(m)
            if piv is None:
                g = g.scale(1 / c)
                self.pivots[m] = g
                return m
            g = g - piv.scale(c)


def support(vs: Iterable[ZSeries]):
    """Lowest-term monomials (i, j) of the row-reduced span."""
    r = _Reducer()
    for v in vs:
        r.add(v)
    return set(r.pivots)


@dataclass
class SubspaceW:
    basis: Dict[Tuple[int, int], ZSeries]
    bounds: Tuple[int, int]

    @classmethod
    def W0(cls, bounds):
        I, J = bounds
        return cls({(i, j): ZSeries.monomial(i, -j) for i in range(I + 1) for j in range(J + 1)}, (I, J))

    def element(self, i, j) -> Optional[ZSeries]:
        return self.basis.get((i, j))

    def check_shape(self):
        """Assert each w_{i,j} = z₁^{-i}z₂^{-j} + (strictly positive z₂ powers)."""
        for (i, j), w in self.basis.items():
            w0 = w.w0_part()
            if w0 != {(i, -j): 1}:
                raise PreconditionError(f"basis element w_{i},{j} is not canonical")
            if w.tail_prec <= 0:
                raise PreconditionError(f"basis element w_{i},{j} is not determined to z₂⁰")

    def agrees(self, other: "SubspaceW") -> bool:
        keys = set(self.basis) & set(other.basis)
        return all(self.basis[k].agrees(other.basis[k]) for k in keys)

    def membership(self, v: ZSeries):
        """(Tri, witness) for v ∈ span(basis) on the known region."""
        if v.tail_prec <= 0:
            return Tri.INCONCLUSIVE, "z₂⁰ part of the image is below precision"
        acc = v
        for (a, j), c in v.w0_part().items():
            w = self.basis.get((a, -j))
            if w is None:
                return Tri.INCONCLUSIVE, f"needs w_{a},{-j} beyond bounds"
            acc = acc - w.scale(c)
        if acc.terms:
            m = min(acc.terms, key=lt_key)
            return Tri.FALSE, {"monomial": list(m), "coefficient": rat_str(acc.terms[m])}
        return Tri.TRUE, None

    def to_json(self):
        return {
            "bounds": list(self.bounds),
            "basis": [{"i": i, "j": j, "series": w.to_json()} for (i, j), w in sorted(self.basis.items())],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            I, J = obj["bounds"]
            basis = {}
            for ent in obj["basis"]:
                basis[(ent["i"], ent["j"])] = ZSeries.from_json(ent["series"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad subspace literal: {exc}") from exc
        return cls(basis, (I, J))


def echelon_basis(generators: Iterable[ZSeries], bounds) -> SubspaceW:
    """The canonical basis w_{i,j} = z₁^{-i}z₂^{-j} + (positive z₂ powers)."""
    I, J = bounds
    r = _Reducer()
    for g in generators:
        r.add(g)
    missing = [(i, j) for j in range(J + 1) for i in range(I + 1) if (i, -j) not in r.pivots]
    if missing:
        raise PreconditionError(
            "support defect: missing " + ", ".join(f"z₁^-{i}z₂^-{j}" for i, j in missing)
        )
    basis = {}
    for j in range(J + 1):
        for i in range(I + 1):
            row = r.pivots[(i, -j)]
            basis[(i, j)] = _full_reduce(row, (i, -j), r.pivots)
    return SubspaceW(basis, (I, J))


def _full_reduce(row: ZSeries, lead, pivots) -> ZSeries:
    done = set()
    while True:
        cands = [m for m in row.terms if m[1] <= 0 and m != lead and m not in done]
        if row.tail_prec <= 0:
            raise PreconditionError("insufficient z₂ precision to canonicalize a basis row")
        if not cands:
            return row
        m = min(cands, key=lt_key)
        piv = pivots.get(m)
        if piv is None:
            raise PreconditionError(f"support defect: missing z₁^-{m[0]}z₂^{m[1]} needed for reduction")
        row = row - piv.scale(row.terms[m])
        done.add(m)


@dataclass
class StabilizerResult:
    status: Tri
    witness: Optional[dict] = None
    checked: int = 0
    skipped: List[Tuple[int, int]] = field(default_factory=list)

    def to_json(self):
        return {
            "status": self.status.value,
            "witness": self.witness,
            "checked": self.checked,
            "skipped": [list(k) for k in self.skipped],
        }


def stabilizes(w: SubspaceW, p: EPlusOp) -> StabilizerResult:
    """Whether W·p ⊂ W, decided on every basis row whose image is fully resolvable."""
    checked = 0
    skipped = []
    for (i, j) in sorted(w.basis, key=lambda k: (k[1], k[0])):
        img = right_act(w.basis[(i, j)], p)
        if img.tail_prec <= 0:
            skipped.append((i, j))
            continue
        status, wit = w.membership(img)
        if status is Tri.FALSE:
            return StabilizerResult(Tri.FALSE, {"row": [i, j], **wit}, checked + 1, skipped)
        if status is Tri.INCONCLUSIVE:
            skipped.append((i, j))
            continue
        checked += 1
    if checked == 0:
        return StabilizerResult(Tri.INCONCLUSIVE, None, 0, skipped)
    return StabilizerResult(Tri.TRUE, None, checked, skipped)


def e_minus_witness(p: EPlusOp):
    """For p with nonzero negative part, the proof's witness z^{-ord}·p ∉ W₀.

    Returns ((α, β), image) where (α, β) is the anti-lex minimal x-exponent
    over the coefficients of the negative slots.
    """
    best = None
    for s, d in p.slots.items():
        if s >= 0:
            continue
        for c in d.coeffs.values():
            g = c.ord_gamma()
            if best is None or g < best:
                best = g
    if best is None:
        raise PreconditionError("operator has no negative part")
    a, b = best.d1, best.d2
    img = right_act(ZSeries.monomial(a, -b), p)
    return (a, b), img
