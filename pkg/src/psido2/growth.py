"""Growth conditions A_α, strong B_α, super-strong C_α and the AA_f family.

For an anchor (k, l) the bound on the coefficient of ∂₁^q ∂₂^j is
q - α(l - j) - k.  Verdicts are relative to the stored truncation: "holds"
means no stored coefficient violates the condition, "fails" carries a concrete
witness, "inconclusive" means some coefficient known only to be zero up to its
precision could still break the bound.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .errors import PreconditionError
from .operators import NEG_INF, D1Op, EPlusOp, gamma_order
from .series import INF, AtLeast, rat

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass
class GrowthCert:
    alpha: Fraction
    anchor: Tuple[int, int]
    kind: str
    verdict: str
    witness: Optional[Tuple[int, int, object]] = None
    scope: dict = field(default_factory=dict)

    @property
    def holds(self):
        return self.verdict == HOLDS

    def to_json(self):
        w = None
        if self.witness is not None:
            i, j, o = self.witness
            w = {"i": i, "j": j, "ord_M": o if not isinstance(o, AtLeast) else f">={o.floor}"}
        return {
            "alpha": str(self.alpha),
            "anchor": list(self.anchor),
            "kind": self.kind,
            "verdict": self.verdict,
            "witness": w,
            "scope": self.scope,
        }


def _scope(p: EPlusOp):
    return {
        "window_lo": None if p.window_lo == NEG_INF else int(p.window_lo),
        "min_slot_prec": None if p.min_prec() == INF else int(p.min_prec()),
    }


def _bound(q, j, alpha, anchor):
    k, l = anchor
    return q - alpha * (l - j) - k


def check_A(p: EPlusOp, alpha, anchor) -> GrowthCert:
    alpha = rat(alpha)
    anchor = tuple(anchor)
    qmax = max((q for _s, q, _c in p.iter_terms()), default=0)
    undecided = None
    for s, d in sorted(p.slots.items(), reverse=True):
        for q in range(qmax + 1):
            need = _bound(q, s, alpha, anchor)
            if need <= 0:
                continue
            c = d.coeffs.get(q)
            if c is None:
                if d.prec < need and undecided is None:
                    undecided = (q, s, AtLeast(d.prec))
                continue
            o = c.ord_M()
            if o < need:
                return GrowthCert(alpha, anchor, "A", FAILS, (q, s, o), _scope(p))
    for s, d in p.slots.items():
        for q, c in d.coeffs.items():
            if q > qmax:
                o = c.ord_M()
                if o < _bound(q, s, alpha, anchor):
                    return GrowthCert(alpha, anchor, "A", FAILS, (q, s, o), _scope(p))
    if undecided is not None:
        return GrowthCert(alpha, anchor, "A", INCONCLUSIVE, undecided, _scope(p))
    return GrowthCert(alpha, anchor, "A", HOLDS, None, _scope(p))


def check_strong(p: EPlusOp, alpha, anchor) -> GrowthCert:
    """B_α: every coefficient beyond the cone q > α(l-j)+k vanishes."""
    alpha = rat(alpha)
    anchor = tuple(anchor)
    for s, q, c in p.iter_terms():
        if _bound(q, s, alpha, anchor) > 0:
            return GrowthCert(alpha, anchor, "strong", FAILS, (q, s, c.ord_M()), _scope(p))
    return GrowthCert(alpha, anchor, "strong", HOLDS, None, _scope(p))


def check_super_strong(p: EPlusOp, alpha, anchor) -> GrowthCert:
    """C_α: B_α plus a constant coefficient on the cone boundary q = α(l-j)+k."""
    b = check_strong(p, alpha, anchor)
    if b.verdict != HOLDS:
        return GrowthCert(b.alpha, b.anchor, "super_strong", b.verdict, b.witness, b.scope)
    alpha, anchor = b.alpha, b.anchor
    for s, q, c in p.iter_terms():
        if _bound(q, s, alpha, anchor) == 0 and not c.is_constant():
            return GrowthCert(alpha, anchor, "super_strong", FAILS, (q, s, c.ord_M()), _scope(p))
    return GrowthCert(alpha, anchor, "super_strong", HOLDS, None, _scope(p))


def ford(p: EPlusOp, alpha) -> Fraction:
    alpha = rat(alpha)
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    g = gamma_order(p)
    return Fraction(g.d1) / alpha + g.d2


def in_Pi_alpha(p: EPlusOp, alpha) -> GrowthCert:
    """Find an anchor with minimal l + k/α certifying A_α.

    Anchors with equal l + k/α are equivalent, so the reported one puts l at
    the top nonzero ∂₂ slot and k = ceil(α(F - l)) for the full order
    F = max over nonzero coefficients of q/α + j - ord_M/α.
    """
    alpha = rat(alpha)
    if alpha <= 0:
        raise PreconditionError("alpha must be positive")
    best = None
    top = None
    for s, q, c in p.iter_terms():
        v = Fraction(q) / alpha + s - Fraction(c.ord_M()) / alpha
        if best is None or v > best:
            best = v
        top = s if top is None else max(top, s)
    if best is None:
        return GrowthCert(alpha, (0, 0), "A", HOLDS, None, _scope(p))
    l = top
    k = math.ceil(alpha * (best - l))
    cert = check_A(p, alpha, (k, l))
    cert.scope["full_order"] = str(best)
    return cert


# --- the one-variable AA_f family -----------------------------------------

def check_AA(d: D1Op, f) -> Optional[Tuple[int, object]]:
    """ord_M(a_q) >= q - f for all q; returns the first violating (q, ord) or None."""
    f = rat(f)
    for q, c in sorted(d.coeffs.items()):
        if c.ord_M() < q - f:
            return (q, c.ord_M())
    return None


def check_BB(d: D1Op, f) -> Optional[Tuple[int, object]]:
    f = rat(f)
    for q, c in sorted(d.coeffs.items()):
        if q > f:
            return (q, c.ord_M())
    return None


def check_CC(d: D1Op, f) -> Optional[Tuple[int, object]]:
    bad = check_BB(d, f)
    if bad is not None:
        return bad
    f = rat(f)
    if f.denominator == 1 and int(f) in d.coeffs and not d.coeffs[int(f)].is_constant():
        return (int(f), d.coeffs[int(f)].ord_M())
    return None


def slotwise_AA(p: EPlusOp, alpha, anchor):
    """Remark-style reduction: slot s must satisfy AA_{α(l-s)+k}."""
    alpha = rat(alpha)
    k, l = anchor
    return {s: check_AA(d, alpha * (l - s) + k) for s, d in p.slots.items()}
