"""Dressing operators from subspaces and back: W = W₀·S with S = 1 + S⁻.

The reconstruction works slice by slice.  Write σ_{α,β} for the z-series
collecting the Taylor coefficients of x₁^α x₂^β in S (∂₁^q ∂₂^{-m} ↦
z₁^{-q} z₂^{m}).  Then

    z₁^{-k} z₂^{-l} · S = Σ_{α<=k, β<=l} falling(k,α) falling(l,β) z₁^{-(k-α)} z₂^{-(l-β)} σ_{α,β},

so each new slice σ_{k,l} is the only unknown once the lower ones are known.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Tuple

from .action import SubspaceW, ZSeries, lt_key, right_act
from .errors import PreconditionError
from .growth import FAILS, GrowthCert, check_A
from .operators import NEG_INF, D1Op, EPlusOp
from .series import INF, XSeries, falling, rat


def _check_unipotent(s: EPlusOp):
    if any(k > 0 and not d.is_zero() for k, d in s.slots.items()):
        raise PreconditionError("S must have no positive ∂₂ slots")
    top = s.slots.get(0)
    if top is None or {q: c.terms for q, c in top.coeffs.items()} != {0: {(0, 0): 1}}:
        raise PreconditionError("S must have the form 1 + S⁻")


def w_from_s(s: EPlusOp, bounds) -> SubspaceW:
    """Canonical basis of W₀·S for indices i <= I, j <= J."""
    _check_unipotent(s)
    I, J = bounds
    memo: Dict[Tuple[int, int], ZSeries] = {}

    def w(k, l):
        key = (k, l)
        if key in memo:
            return memo[key]
        e = right_act(ZSeries.monomial(k, -l), s)
        if e.tail_prec <= 0:
            need = -l
            raise PreconditionError(
                f"insufficient window for w_{k},{l}: need slots of S down to {need} "
                f"with x-precision above {k + l} (have window {s.window_lo})"
            )
        acc = e
        for (a, j), c in sorted(e.w0_part().items(), key=lambda t: lt_key(t[0])):
            if (a, j) == (k, -l):
                if c != 1:
                    raise PreconditionError("S is not unipotent")
                continue
            acc = acc - w(a, -j).scale(c)
        memo[key] = acc
        return acc

    basis = {(i, j): w(i, j) for j in range(J + 1) for i in range(I + 1)}
    return SubspaceW(basis, (I, J))


def _slices(wsp: SubspaceW):
    I, J = wsp.bounds
    sig: Dict[Tuple[int, int], ZSeries] = {}
    for l in range(J + 1):
        for k in range(I + 1):
            if (k, l) == (0, 0):
                w00 = wsp.basis.get((0, 0))
                if w00 is None:
                    raise PreconditionError("support defect: missing w_0,0")
                sig[(0, 0)] = w00
                continue
            T = ZSeries({}, INF)
            for b in range(l + 1):
                for a in range(k + 1):
                    if (a, b) == (k, l):
                        continue
                    c = falling(k, a) * falling(l, b)
                    T = T + sig[(a, b)].shifted(k - a, -(l - b), c)
            tail = T.tail_prec
            E = ZSeries({}, INF)
            if tail > 0:
                for (a, j), c in T.w0_part().items():
                    wb = wsp.basis.get((a, -j))
                    if wb is None:
                        tail = min(tail, j)
                        continue
                    E = E + wb.scale(c)
            diff = (E - T).truncate(tail)
            if tail > 0 and diff.w0_part():
                raise PreconditionError("slice inconsistency: subspace is not of the form W₀·S")
            sig[(k, l)] = diff.scale(Fraction(1, math.factorial(k) * math.factorial(l)))
    return sig


def reconstruct_s(wsp: SubspaceW, floor=None) -> EPlusOp:
    """The unique S = 1 + S⁻ with W₀·S = W on the region the bounds determine."""
    for (i, j), v in wsp.basis.items():
        if v.w0_part() != {(i, -j): 1}:
            raise PreconditionError(f"basis element w_{i},{j} is not canonical")
    I, J = wsp.bounds
    sig = _slices(wsp)
    cap = min(I, J) + 1
    if floor is None:
        floor = -(J + 1)
    slots = {0: D1Op.const(1)}
    window = floor
    m = 1
    while -m >= floor:
        N = cap
        for (k, l), sg in sig.items():
            if sg.tail_prec <= m:
                N = min(N, k + l)
        if N <= 0:
            window = -m + 1
            break
        coeffs: Dict[int, Dict] = {}
        for (k, l), sg in sig.items():
            if k + l >= N:
                continue
            for (q, jj), c in sg.terms.items():
                if jj == m:
                    coeffs.setdefault(q, {})[(k, l)] = c
        slots[-m] = D1Op({q: XSeries(t, N) for q, t in coeffs.items()}, N)
        m += 1
    return EPlusOp(slots, window)


def reconstruct_s_certified(wsp: SubspaceW, alpha):
    """reconstruct_s plus an A_α certificate, after checking every basis row."""
    alpha = rat(alpha)
    for (i, j), v in sorted(wsp.basis.items()):
        for (a, b) in v.terms:
            if a > i + alpha * (j + b):
                raise PreconditionError(
                    f"basis element w_{i},{j} violates A_{alpha} at z₁^-{a}z₂^{b}"
                )
    s = reconstruct_s(wsp)
    cert = check_A(s, alpha, (0, 0))
    if cert.verdict == FAILS:
        raise PreconditionError(f"reconstructed S fails A_{alpha} at {cert.witness}")
    return s, cert
