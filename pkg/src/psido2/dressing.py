"""Roots, normalization and dressing of quasi-elliptic commuting pairs.

Conventions: P has Γ-order (0, k) and Q has Γ-order (1, l).  L₂ is the k-th
root of P and L₁ = Q · L₂^{-l}.  ``dress`` returns S = 1 + S⁻ with
S⁻¹ ∂₁ S = L₁ and S⁻¹ (∂₂ + u₀) S = L₂.  The full pipeline conjugates every
generator X to S_total X S_total⁻¹, which has constant coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional

from .action import SubspaceW, ZSeries, reduce_to_V, stabilizes, z_to_op
from .errors import PreconditionError
from .operators import (
    NEG_INF,
    D1Op,
    EPlusOp,
    commutator,
    d1_mul,
    discrepancies,
    eplus_mul,
    gamma_order,
    highest_term,
    invert_monic,
    op_exp,
    X,
)
from .sato import w_from_s
from .series import INF, XSeries, antideriv, exp_series, invert_unit
from .verdict import Tri

DEFAULT_WINDOW = -8


def _floor_from(*ops, shift=0, window=None):
    if window is not None:
        return window
    los = [o.window_lo for o in ops if o.window_lo != NEG_INF]
    if los:
        return max(los) + shift
    return DEFAULT_WINDOW


def _require_gamma(p: EPlusOp, want, name):
    g = gamma_order(p)
    if (g.d1, g.d2) != tuple(want):
        raise PreconditionError(f"{name} must have Γ-order {tuple(want)}, got {(g.d1, g.d2)}")
    _g, _c, ser = highest_term(p)
    if ser.terms != {(0, 0): 1}:
        raise PreconditionError(f"{name} is not monic")


def _is_zero_d1(d: Optional[D1Op]) -> bool:
    return d is None or d.is_zero()


def op_power(p: EPlusOp, n: int, floor=None) -> EPlusOp:
    """p^n; intermediate powers keep enough slots for the final floor."""
    out = EPlusOp.one()
    hi = max(p.hi() or 0, 0)
    for m in range(1, n + 1):
        f = None if floor is None else floor - (n - m) * hi
        out = eplus_mul(out, p, f)
    return out


def kth_root(p: EPlusOp, k: int, window=None) -> EPlusOp:
    """L₂ = ∂₂ + u₀ + u₋₁∂₂⁻¹ + ... with L₂^k = p, by the discrepancy recursion."""
    if k < 1:
        raise PreconditionError("root index must be positive")
    _require_gamma(p, (0, k), "P")
    floor = _floor_from(p, shift=-(k - 1), window=window)
    top = p.slot(k - 1)
    if top is None:
        raise PreconditionError("P is truncated above its ∂₂^(k-1) slot")
    slots = {1: D1Op.const(1), 0: top.scale(Fraction(1, k))}
    lo = floor
    n = 1
    while -n >= floor:
        t = k - 1 - n
        target = p.slot(t)
        if target is None:
            lo = -n + 1
            break
        L = EPlusOp(slots)
        Lk = op_power(L, k, floor=t)
        have = Lk.slot(t)
        if have is None:
            lo = -n + 1
            break
        d = target - have
        if d.prec <= 0:
            lo = -n + 1
            break
        slots[-n] = d.scale(Fraction(1, k))
        if slots[-n].is_zero() and slots[-n].prec == INF:
            del slots[-n]
        n += 1
    return EPlusOp(slots, lo)


def l1_from_q(q: EPlusOp, l2: EPlusOp, l: int, window=None) -> EPlusOp:
    """L₁ = Q · L₂^{-l}."""
    g = gamma_order(q)
    if (g.d1, g.d2) != (1, l):
        raise PreconditionError(f"Q must have Γ-order (1, {l}), got {(g.d1, g.d2)}")
    if q.slots[l].coeffs[1].terms != {(0, 0): 1}:
        raise PreconditionError("Q is not monic")
    _require_gamma(l2, (0, 1), "L₂")
    floor = _floor_from(q, l2, shift=-max(l, 0) - 2, window=window)
    if l > 0:
        base = invert_monic(l2, floor - 2 * l)
        power = op_power(base, l, floor - l)
    else:
        power = op_power(l2, -l, floor - l)
    return eplus_mul(q, power, floor)


def _series_prec(*ops):
    ps = [o.min_prec() for o in ops]
    p = min(ps)
    return None if p == INF else p


def _conj_by_function(f: XSeries, finv: XSeries, p: EPlusOp) -> EPlusOp:
    """f⁻¹ · p · f."""
    return eplus_mul(eplus_mul(X(finv), p), X(f))


def almost_normalize(p: EPlusOp, q: EPlusOp, prec=None):
    """(f, f⁻¹ p f, f⁻¹ q f) with Q's top coefficient ∂₁ and ∂₁-free p_{k-1} free term removed."""
    gp = gamma_order(p)
    _require_gamma(p, (0, gp.d2), "P")
    k = gp.d2
    gq = gamma_order(q)
    if gq.d1 != 1:
        raise PreconditionError(f"Q must have Γ-order (1, l), got {(gq.d1, gq.d2)}")
    l = gq.d2
    top = q.slots[l]
    if top.coeffs.get(1) is None or top.coeffs[1].terms != {(0, 0): 1}:
        raise PreconditionError("Q is not monic")
    if any(qq >= 2 for qq in top.coeffs):
        raise PreconditionError("Q's leading coefficient needs the general S = f + S⁻ form")
    pr = prec if prec is not None else _series_prec(p, q)
    g = top.coeffs.get(0, XSeries.zero(top.prec))
    if pr is None and not g.is_zero():
        raise PreconditionError("a target precision is required")
    if g.is_zero():
        f1 = XSeries.const(1, INF if pr is None else pr)
    else:
        f1 = exp_series(-antideriv(g, 1), pr)
    f1inv = invert_unit(f1, pr) if not f1.is_constant() else XSeries.const(1, f1.prec)
    p1 = _conj_by_function(f1, f1inv, p) if not f1.is_constant() else p
    q1 = _conj_by_function(f1, f1inv, q) if not f1.is_constant() else q
    pk1 = p1.slot(k - 1)
    if pk1 is None:
        raise PreconditionError("P is truncated above its ∂₂^(k-1) slot")
    if not pk1.dx(1).is_zero():
        raise PreconditionError("operators do not commute (∂₁ p_{k-1} ≠ 0)")
    c0 = pk1.coeffs.get(0, XSeries.zero(pk1.prec))
    if c0.is_zero():
        return f1, p1, q1
    f2 = exp_series(-antideriv(c0, 2).scale(Fraction(1, k)), pr)
    f2inv = invert_unit(f2, pr)
    p2 = _conj_by_function(f2, f2inv, p1)
    q2 = _conj_by_function(f2, f2inv, q1)
    return f1 * f2, p2, q2


@dataclass
class Normalization:
    s: EPlusOp
    s_inv: EPlusOp
    p: EPlusOp
    q: EPlusOp


def normalize_full(p: EPlusOp, q: EPlusOp, prec=None) -> Normalization:
    f, p1, q1 = almost_normalize(p, q, prec)
    k = gamma_order(p).d2
    pk1 = p1.slot(k - 1)
    finv = invert_unit(f, f.prec) if not f.is_constant() else XSeries.const(1 / f.constant_term(), f.prec)
    if pk1.is_zero():
        s = X(f)
        return Normalization(s, X(finv), p1, q1)
    a = (-pk1.integrate(2)).scale(Fraction(1, k))
    s2 = op_exp(a)
    s2inv = op_exp(-a)  # a is x₁-free, so the normal-ordered exponential is a true one
    S2, S2inv = EPlusOp.from_d1(s2), EPlusOp.from_d1(s2inv)
    p2 = eplus_mul(eplus_mul(S2inv, p1), S2)
    q2 = eplus_mul(eplus_mul(S2inv, q1), S2)
    rest = p2.slot(k - 1)
    if rest is not None and not rest.is_zero():
        raise PreconditionError("normalization failed to clear the ∂₂^(k-1) slot")
    return Normalization(eplus_mul(X(f), S2), eplus_mul(S2inv, X(finv)), p2, q2)


def normalize(p: EPlusOp, q: EPlusOp, prec=None):
    """(S, S⁻¹ p S, S⁻¹ q S) with the ∂₂^(k-1) coefficient of P removed."""
    n = normalize_full(p, q, prec)
    return n.s, n.p, n.q


def _comm_d1(a: D1Op, b: D1Op) -> D1Op:
    return d1_mul(a, b) - d1_mul(b, a)


def dress(l1: EPlusOp, l2: EPlusOp, window=None, return_inverse=False):
    """S = 1 + S⁻ with S⁻¹ ∂₁ S = L₁ and S⁻¹ (∂₂ + u₀) S = L₂."""
    top1 = l1.slots.get(0)
    if top1 is None or {q: c.terms for q, c in top1.coeffs.items()} != {1: {(0, 0): 1}}:
        raise PreconditionError("L₁ must be ∂₁ + (negative ∂₂ powers)")
    if any(s > 0 and not d.is_zero() for s, d in l1.slots.items()):
        raise PreconditionError("L₁ has positive ∂₂ powers")
    _require_gamma(l2, (0, 1), "L₂")
    u0 = l2.slot(0)
    if not u0.dx(1).is_zero():
        raise PreconditionError("L₂ is not almost normalized (∂₁ u₀ ≠ 0)")
    floor = _floor_from(l1, l2, window=window)
    L1, L2 = l1, l2
    T = EPlusOp.one()
    k = 1
    reached = 0
    while -k >= floor:
        v, u = L1.slot(-k), L2.slot(-k)
        if v is None or u is None:
            break
        compat = v.dx(2) - u.dx(1) + _comm_d1(u0, v)
        if not compat.is_zero():
            raise PreconditionError(f"operators do not commute at stage {k}")
        h = v.integrate(1)
        inner = v.dx(2).integrate(1) - u + _comm_d1(u0, h)
        sk = -h + inner.integrate(2)
        p = min(v.prec, u.prec)
        sk = sk.truncate(p)
        Sk = EPlusOp({0: D1Op.const(1), -k: sk})
        Sk_inv = invert_monic(Sk, floor)
        L1 = eplus_mul(eplus_mul(Sk_inv, L1, floor), Sk, floor)
        L2 = eplus_mul(eplus_mul(Sk_inv, L2, floor), Sk, floor)
        T = eplus_mul(T, Sk, floor)
        reached = -k
        k += 1
    T = T.truncate_window(reached)
    S = invert_monic(T, reached)
    if return_inverse:
        return S, T
    return S


def constant_coefficients(p: EPlusOp) -> bool:
    return all(d.is_constant() for d in p.slots.values())


@dataclass
class SchurResult:
    s_total: EPlusOp
    s_total_inv: EPlusOp
    a: List[ZSeries]
    w: SubspaceW
    conjugates: List[EPlusOp]
    report: List[dict] = field(default_factory=list)
    dressing: Optional[EPlusOp] = None


def schur_from_ring(gens: List[EPlusOp], p_index: int, q_index: int, bounds, window=None) -> SchurResult:
    report = []
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            c = commutator(gens[i], gens[j])
            if not c.is_zero():
                raise PreconditionError(f"generators {i} and {j} do not commute")
    report.append({"name": "generators commute", "status": "pass"})
    P, Q = gens[p_index], gens[q_index]
    gp, gq = gamma_order(P), gamma_order(Q)
    if gp.d1 != 0 or gq.d1 != 1:
        raise PreconditionError("designated P, Q are not quasi-elliptic (Γ-orders (0,k), (1,l))")
    k, l = gp.d2, gq.d2
    norm = normalize_full(P, Q)
    L2 = kth_root(norm.p, k, window)
    L1 = l1_from_q(norm.q, L2, l, window)
    floor = max(L1.window_lo, L2.window_lo)
    S_d, S_d_inv = dress(L1, L2, floor, return_inverse=True)
    floor = S_d.window_lo
    s_total = eplus_mul(S_d, norm.s_inv, floor)
    s_total_inv = eplus_mul(norm.s, S_d_inv, floor)
    conjugates, A = [], []
    for idx, g in enumerate(gens):
        c = eplus_mul(eplus_mul(s_total, g, floor), s_total_inv, floor + gamma_order(g).d2)
        c = EPlusOp({s: d for s, d in c.slots.items() if d.prec > 0}, c.window_lo)
        if not constant_coefficients(c):
            raise PreconditionError(f"conjugate of generator {idx} has non-constant coefficients")
        conjugates.append(c)
        A.append(reduce_to_V(c))
    report.append({"name": "conjugates have constant coefficients", "status": "pass"})
    W = w_from_s(S_d_inv, bounds)
    for idx, a in enumerate(A):
        res = stabilizes(W, z_to_op(a))
        if res.status is Tri.FALSE:
            raise PreconditionError(f"A element {idx} does not stabilize W: {res.witness}")
        report.append({"name": f"A[{idx}] stabilizes W", "status": "pass" if res.status is Tri.TRUE else "inconclusive",
                       "checked_rows": res.checked})
    return SchurResult(s_total, s_total_inv, A, W, conjugates, report, S_d)


# --- equivalence predicates --------------------------------------------------

def conjugate_by(ops: List[EPlusOp], t: EPlusOp, floor=None) -> List[EPlusOp]:
    """T X T⁻¹ for each X."""
    if floor is None:
        floor = t.window_lo if t.window_lo != NEG_INF else DEFAULT_WINDOW
    t_inv = invert_monic(t, floor)
    return [eplus_mul(eplus_mul(t, x, floor), t_inv, floor + max(gamma_order(x).d2, 0)) for x in ops]


def is_admissible_operator(t: EPlusOp, floor=None, alpha=None) -> Tri:
    """Order-zero invertible T whose conjugates of ∂₁ and ∂₂ have constant coefficients.

    With ``alpha`` the operator must also satisfy A_α at anchor (0, 0).
    Inconclusive when the growth check cannot decide at this precision.
    """
    from .growth import FAILS, INCONCLUSIVE, check_A

    g = gamma_order(t)
    if (g.d1, g.d2) != (0, 0):
        return Tri.FALSE
    try:
        conj = conjugate_by([EPlusOp.monomial(1, 0), EPlusOp.monomial(0, 1)], t, floor)
    except PreconditionError:
        return Tri.FALSE
    for c in conj:
        c = EPlusOp({s: d for s, d in c.slots.items() if d.prec > 0}, c.window_lo)
        if not constant_coefficients(c):
            return Tri.FALSE
    if alpha is not None:
        v = check_A(t, alpha, (0, 0)).verdict
        if v == FAILS:
            return Tri.FALSE
        if v == INCONCLUSIVE:
            return Tri.INCONCLUSIVE
    return Tri.TRUE
