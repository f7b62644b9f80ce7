"""Acceptance criteria 1-9.  All checks are exact rational identities at the stated truncations.

Each test records its verdict; the terminal summary prints one PASS/FAIL line
per criterion.
"""
import random
import time
from fractions import Fraction

from conftest import ACCEPTANCE
from psido2.action import SubspaceW, ZSeries, echelon_basis, e_minus_witness, stabilizes, z_to_op
from psido2.dressing import constant_coefficients, dress, kth_root, op_power, schur_from_ring
from psido2.growth import HOLDS, check_A, check_AA
from psido2.operators import (
    D1,
    D2,
    D1Op,
    EPlusOp,
    commutator,
    d1_mul,
    discrepancies,
    eplus_mul,
    full_symbol,
    invert_monic,
    poisson_bracket,
    total_order,
)
from psido2.sato import reconstruct_s, w_from_s
from psido2.schur import UTSeries, nu, psi1, psi1_inv, toric_w, validate_schur_pair
from psido2.series import INF, XSeries
from psido2.verdict import Tri
from psido2.workbench import (
    TORIC_RING,
    cusp_operators,
    eigenvalue_check,
    example_calogero_symbols,
    toric_operators,
    toric_w_z,
)

from helpers import rand_certified, rand_l2, rand_s, rand_xseries


def record(n, ok, detail=""):
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


# --- runners shared with the precision-soundness rerun ----------------------

def run_cusp(prec, window):
    P, Q = cusp_operators(prec)
    c = commutator(P, Q, window)
    r = eplus_mul(Q, Q, window) - eplus_mul(eplus_mul(P, P, window), P, window)
    return c, r


def run_toric(prec, window):
    P, Q, P3 = toric_operators(prec)
    return [commutator(a, b, window) for a, b in ((P, Q), (P, P3), (Q, P3))], (P, Q, P3)


def run_sato(seed, prec, bounds, lo, n):
    rng = random.Random(seed)
    outs = []
    for _ in range(n):
        s = rand_s(rng, lo, prec)
        outs.append((s, reconstruct_s(w_from_s(s, bounds))))
    return outs


def run_roots(seed, prec, lo, n_per_k):
    rng = random.Random(seed)
    outs = []
    for k in (2, 3, 5):
        for _ in range(n_per_k):
            l2 = rand_l2(rng, lo, prec)
            p = op_power(l2, k, lo + k - 1)
            outs.append((k, l2, kth_root(p, k, lo)))
    return outs


def run_dress(seed, prec, lo, n):
    rng = random.Random(seed)
    outs = []
    for _ in range(n):
        s0 = rand_s(rng, lo, prec)
        s0inv = invert_monic(s0, lo)
        l1 = eplus_mul(eplus_mul(s0inv, D1(), lo), s0, lo)
        l2 = eplus_mul(eplus_mul(s0inv, D2(), lo), s0, lo + 1)
        s = dress(l1, l2, lo + 1)
        outs.append((s0inv, s))
    return outs


# --- criteria ---------------------------------------------------------------

def test_criterion_1_cusp_identities():
    t = time.perf_counter()
    c, r = run_cusp(12, -8)
    # inputs at 16 push every output coefficient's guaranteed precision to at least 12
    c16, r16 = run_cusp(16, -8)
    elapsed = time.perf_counter() - t
    ok = c.is_zero() and r.is_zero() and c16.is_zero() and r16.is_zero()
    ok = ok and c16.min_prec() >= 12 and r16.min_prec() >= 12 and elapsed < 10
    record(1, ok, f"[P,Q]=0, Q^2-P^3=0 (inputs prec 12 and 16, output prec {c16.min_prec()}/{r16.min_prec()}), "
                  f"{elapsed:.2f}s")


def test_criterion_2_toric_identities():
    comms, ops = run_toric(10, -6)
    certs = [check_A(o, 1, (a, b)) for o, (a, b) in zip(ops, [(0, 2), (1, 1), (0, 3)])]
    ok = all(c.is_zero() for c in comms) and all(c.verdict == HOLDS for c in certs)
    record(2, ok, f"3 commutators zero, A_1 verdicts {[c.verdict for c in certs]}")


def test_criterion_3_sato_roundtrip():
    outs = run_sato(3, 8, (4, 4), -5, 100)
    bad = sum(1 for s, back in outs if discrepancies(back, s))
    # uniqueness: a rescaled, shuffled presentation gives the identical S; a mixed one agrees
    rng = random.Random(33)
    uniq = 0
    for _ in range(20):
        s = rand_s(rng, -5, 8)
        w = w_from_s(s, (4, 4))
        rows = [v.scale(rng.choice([-2, 3, Fraction(1, 2)])) for v in w.basis.values()]
        rng.shuffle(rows)
        if reconstruct_s(echelon_basis(rows, (4, 4))) != reconstruct_s(w):
            uniq += 1
        mixed = [v + w.basis[(0, 0)].scale(rng.randint(-2, 2)) if k != (0, 0) else v for k, v in w.basis.items()]
        if discrepancies(reconstruct_s(echelon_basis(mixed, (4, 4))), reconstruct_s(w)):
            uniq += 1
    record(3, bad == 0 and uniq == 0, f"100 roundtrips, {bad} discrepant; 20 re-presentations, {uniq} differ")


def test_criterion_4_roots_and_dressing():
    roots = run_roots(4, 8, -4, 17)
    bad_r = sum(1 for _k, l2, r in roots if discrepancies(r, l2))
    dr = run_dress(44, 8, -4, 50)
    bad_d = 0
    for s0inv, s in dr:
        dev = eplus_mul(s, s0inv, s.window_lo)
        dev = EPlusOp({k: d for k, d in dev.slots.items() if d.prec > 0}, dev.window_lo)
        if not constant_coefficients(dev):
            bad_d += 1
    record(4, bad_r == 0 and bad_d == 0 and len(roots) >= 50,
           f"{len(roots)} roots (k=2,3,5), {bad_r} wrong; {len(dr)} dressings, {bad_d} non-constant deviations")


def test_criterion_5_condition_closure():
    rng = random.Random(5)
    n_pairs = fail = 0
    for _ in range(200):
        alpha = rng.choice([Fraction(1), Fraction(3, 2), Fraction(2)])
        a1 = (rng.randint(0, 2), rng.randint(0, 2))
        a2 = (rng.randint(0, 2), rng.randint(0, 2))
        p, q = rand_certified(rng, alpha, a1), rand_certified(rng, alpha, a2)
        n_pairs += 1
        if not check_A(eplus_mul(p, q), alpha, (a1[0] + a2[0], a1[1] + a2[1])).holds:
            fail += 1
        # one-variable family: AA anchors add under composition
        f, g = rng.randint(0, 2), rng.randint(0, 2)
        a = rand_certified(rng, 1, (f, 0), lo=0).slot(0)
        b = rand_certified(rng, 1, (g, 0), lo=0).slot(0)
        if check_AA(d1_mul(a, b), f + g) is not None:
            fail += 1
    inv_fail = 0
    for _ in range(50):
        s = rand_certified(rng, 1, (0, 0), lo=-3)
        s.slots[0] = D1Op.const(1)
        if not check_A(invert_monic(s, -3), 1, (0, 0)).holds:
            inv_fail += 1
    false_holds = 0
    n_viol = 0
    for _ in range(60):
        anchor = (rng.randint(0, 1), rng.randint(0, 1))
        p = rand_certified(rng, 1, anchor, lo=-1)
        s = rng.randint(-1, anchor[1])
        qq = anchor[0] + (anchor[1] - s) + rng.randint(1, 2)
        need = qq - (anchor[1] - s) - anchor[0]
        bad = p + EPlusOp.from_terms({(qq, s): XSeries.monomial(0, need - 1)})
        n_viol += 1
        if check_A(bad, 1, anchor).verdict == HOLDS:
            false_holds += 1
    record(5, fail == 0 and inv_fail == 0 and false_holds == 0,
           f"{n_pairs} product pairs + {n_pairs} AA pairs, {fail} failures; 50 inverses, {inv_fail} failures; "
           f"{n_viol} violators, {false_holds} false holds")


def test_criterion_6_toric_pipeline():
    P, Q, P3 = toric_operators(10)
    res = schur_from_ring([P, Q, P3], 0, 1, (4, 4), window=-6)
    images = [psi1(a) for a in res.a]
    vals = [tuple(nu(a)) for a in images]
    w_ut = [psi1(v) for v in res.w.basis.values()]
    # rows of W carry z₂-tails from the window; (2, 3) is the largest region they determine
    data = validate_schur_pair(images, w_ut, {"bounds": (2, 3), "word_length": 3})
    eig = [eigenvalue_check(g, res.s_total) for g in (P, Q, P3)]
    eig_ok = all(e.agrees(a) for e, a in zip(eig, res.a))
    ok = data.valid and data.rank_r == 1 and vals == [(0, -2), (1, -2), (0, -3)] and eig_ok
    record(6, ok, f"nu={vals}, valid={data.valid}, rank={data.rank_r}, eigenvalues match={eig_ok}")


def test_criterion_7_stabilizers_and_prop_2_1():
    W = toric_w_z((6, 6))
    stab = [stabilizes(W, z_to_op(psi1_inv(UTSeries.monomial(a, b)))).status for a, b in TORIC_RING]
    rng = random.Random(7)
    w0 = SubspaceW.W0((4, 4))
    good = bad_detected = 0
    for _ in range(20):
        slots = {}
        for s in range(0, 3):
            co = {q: rand_xseries(rng, INF, 2, 3) for q in range(2)}
            slots[s] = D1Op({q: c for q, c in co.items() if not c.is_zero()})
        p = EPlusOp(slots)
        if stabilizes(w0, p).status is Tri.TRUE:
            good += 1
        contaminated = p + EPlusOp({-1: D1Op({0: XSeries.const(1) + XSeries({(1, 0): rng.randint(-2, 2)})})})
        if stabilizes(w0, contaminated).status is Tri.FALSE and e_minus_witness(contaminated) is not None:
            bad_detected += 1
    ok = all(s is Tri.TRUE for s in stab) and good == 20 and bad_detected == 20
    record(7, ok, f"toric stabilizers at (6,6): {[str(s) for s in stab]}; PDOs kept W0 {good}/20; "
                  f"contaminated detected {bad_detected}/20")


def test_criterion_8_precision_soundness():
    disc = 0
    lo = run_cusp(12, -8)
    hi = run_cusp(13, -9)
    disc += sum(len(discrepancies(a, b)) for a, b in zip(lo, hi))
    tlo, _ = run_toric(10, -6)
    thi, _ = run_toric(11, -7)
    disc += sum(len(discrepancies(a, b)) for a, b in zip(tlo, thi))
    # sato: same seeds, the low run sees truncated copies of the high inputs
    rng = random.Random(8)
    # the next level for the roundtrip is bounds (5, 5), which needs x-precision 10 and window -6
    for _ in range(30):
        s = rand_s(rng, -6, 10)
        hi_out = reconstruct_s(w_from_s(s, (5, 5)))
        low = s.truncate_prec(8).truncate_window(-5)
        low.slots[0] = D1Op.const(1)  # the unit part is exact at every level
        lo_out = reconstruct_s(w_from_s(low, (4, 4)))
        disc += len(discrepancies(lo_out, hi_out))
    for k in (2, 3, 5):
        for _ in range(6):
            l2 = rand_l2(rng, -5, 9)
            p = op_power(l2, k, -5 + k - 1)
            hi_r = kth_root(p, k, -5)
            lo_r = kth_root(p.truncate_prec(8).truncate_window(-4 + k - 1), k, -4)
            disc += len(discrepancies(lo_r, hi_r))
    for _ in range(10):
        s0 = rand_s(rng, -5, 9)
        s0inv = invert_monic(s0, -5)
        l1 = eplus_mul(eplus_mul(s0inv, D1(), -5), s0, -5)
        l2 = eplus_mul(eplus_mul(s0inv, D2(), -5), s0, -4)
        hi_s = dress(l1, l2, -4)
        lo_s = dress(l1.truncate_prec(8).truncate_window(-3), l2.truncate_prec(8).truncate_window(-3), -3)
        disc += len(discrepancies(lo_s, hi_s))
    record(8, disc == 0, f"criteria 1-4 rerun one level higher: {disc} discrepancies")


def _rand_pdo(rng):
    terms = {}
    for _ in range(rng.randint(1, 4)):
        q = rng.randint(0, 3)
        s = rng.randint(0, 3 - q)
        terms[(q, s)] = rand_xseries(rng, INF, 3, 2)
    return EPlusOp.from_terms(terms)


def test_criterion_9_symbol_layer():
    rng = random.Random(9)
    bad = 0
    for _ in range(50):
        p, q = _rand_pdo(rng), _rand_pdo(rng)
        if p.is_zero() or q.is_zero():
            p, q = p + D2(), q + D1()
        m, n = total_order(p), total_order(q)
        lhs = full_symbol(commutator(p, q), m + n - 1)
        rhs = poisson_bracket(full_symbol(p), full_symbol(q))
        if not lhs.agrees(rhs):
            bad += 1
    _l1, _l2, report = example_calogero_symbols()
    cal_ok = all(c["status"] == "pass" for c in report)
    record(9, bad == 0 and cal_ok, f"50 Poisson pairs, {bad} mismatches; coordinate change checks pass={cal_ok}")
