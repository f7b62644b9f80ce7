from fractions import Fraction
import json
import random

import pytest

from psido2.action import (
    SubspaceW,
    ZSeries,
    e_minus_witness,
    echelon_basis,
    reduce_to_V,
    right_act,
    stabilizes,
    support,
    z_to_op,
)
from psido2.errors import PreconditionError
from psido2.operators import D1, D2, X, D1Op, EPlusOp, d2_power_inverse, eplus_mul, op_exp
from psido2.series import XSeries
from psido2.verdict import Tri

from helpers import rand_s, rand_xseries

X1, X2 = XSeries.x1(), XSeries.x2()
Z = ZSeries.monomial


def test_reduce_to_V_examples():
    assert reduce_to_V(X(X1) * D1() + D2(2)) == Z(0, -2)
    assert reduce_to_V(X(XSeries.const(1) + X2)) == Z(0, 0)
    e = EPlusOp.from_d1(op_exp(D1Op({1: -X1}), 6))
    assert reduce_to_V(e).agrees(Z(0, 0))


def test_right_act_examples():
    assert right_act(Z(1, 0), X(X1) * D2()) == Z(0, -1)
    v = ZSeries({(0, -1): 2, (1, 0): 1, (0, 3): Fraction(1, 2)}, 5)
    assert right_act(v, EPlusOp.one()).agrees(v)


def _rand_op(rng, lo, hi, prec):
    slots = {}
    for s in range(lo, hi + 1):
        co = {q: rand_xseries(rng, prec, 2, 3) for q in range(2)}
        slots[s] = D1Op._raw({q: c for q, c in co.items() if not c.is_zero()}, prec)
    return EPlusOp(slots, lo)


def _rand_v(rng):
    terms = {(rng.randint(0, 2), rng.randint(-2, 2)): rng.randint(-2, 2) for _ in range(3)}
    return ZSeries(terms)


def test_right_act_matches_lift_and_reduce():
    """Independent oracle: lift v to a constant-coefficient operator, multiply, set x = 0."""
    rng = random.Random(1)
    for _ in range(25):
        v = ZSeries({(rng.randint(0, 3), -rng.randint(0, 3)): rng.randint(-3, 3) for _ in range(3)})
        p = _rand_op(rng, -2, 1, 8)
        want = reduce_to_V(eplus_mul(z_to_op(v), p))
        got = right_act(v, p)
        assert got.agrees(want)


def test_module_axiom():
    rng = random.Random(2)
    for _ in range(25):
        v = _rand_v(rng)
        p, q = _rand_op(rng, -2, 1, 8), _rand_op(rng, -2, 1, 8)
        assert right_act(right_act(v, p), q).agrees(right_act(v, eplus_mul(p, q)))


def test_support_examples():
    assert support([ZSeries({(0, 0): 1, (0, 1): 1}), Z(1, 0)]) == {(0, 0), (1, 0)}
    assert support([ZSeries({(0, -1): 1, (0, 0): 1}), Z(0, -1)]) == {(0, -1), (0, 0)}
    assert support([]) == set()


def test_echelon_basis_examples():
    w0 = echelon_basis([Z(i, -j) for i in range(3) for j in range(3)], (2, 2))
    assert all(w0.basis[(i, j)] == Z(i, -j) for i in range(3) for j in range(3))
    cusp = [ZSeries({(0, 0): 1, (0, 1): 1})] + [Z(0, -j) for j in range(1, 5)]
    b = echelon_basis(cusp, (0, 4))
    assert b.basis[(0, 0)] == ZSeries({(0, 0): 1, (0, 1): 1})
    assert all(b.basis[(0, j)] == Z(0, -j) for j in range(1, 5))
    b.check_shape()
    # idempotent
    again = echelon_basis(list(b.basis.values()), (0, 4))
    assert again.basis == b.basis
    with pytest.raises(PreconditionError, match="support defect"):
        echelon_basis([Z(0, 0), Z(0, -2)], (0, 2))


def test_echelon_basis_is_unique():
    rng = random.Random(4)
    s = rand_s(rng, -4, 8)
    gens = [right_act(Z(i, -j), s) for i in range(3) for j in range(3)]
    a = echelon_basis(gens, (2, 2))
    mixed = [g + gens[(k + 1) % len(gens)].scale(rng.randint(-2, 2)) for k, g in enumerate(gens)]
    b = echelon_basis(mixed[::-1], (2, 2))
    assert a.agrees(b)


def test_stabilizes_examples():
    w0 = SubspaceW.W0((3, 3))
    assert stabilizes(w0, D1() * D2()).status is Tri.TRUE
    res = stabilizes(w0, d2_power_inverse(1))
    assert res.status is Tri.FALSE
    e = EPlusOp.from_d1(op_exp(D1Op({1: -X1}), 8))
    assert stabilizes(w0, e).status is Tri.TRUE


def test_stabilizes_reports_inconclusive_when_bounds_too_small():
    w0 = SubspaceW.W0((0, 0))
    assert stabilizes(w0, D2(2)).status is Tri.INCONCLUSIVE


def test_prop_2_1_sampled():
    """Differential operators keep W₀; an added negative part is always detected."""
    rng = random.Random(8)
    w0 = SubspaceW.W0((4, 4))
    for _ in range(10):
        p = EPlusOp(_rand_op(rng, 0, 2, 8).slots)  # exact: no unknown negative slots
        assert stabilizes(w0, p).status is Tri.TRUE
        bad = p + EPlusOp({-1: D1Op({0: rand_xseries(rng, 8, 2, 3) + XSeries.const(1, 8)}, 8)})
        assert stabilizes(w0, bad).status is Tri.FALSE
        (a, b), img = e_minus_witness(bad)
        assert img.positive_part().terms


def test_json_roundtrip():
    w = echelon_basis([ZSeries({(0, 0): 1, (0, 2): Fraction(1, 3)}, 6), Z(0, -1), Z(1, 0), Z(1, -1)], (1, 1))
    back = SubspaceW.from_json(json.loads(json.dumps(w.to_json())))
    assert back.basis == w.basis and back.bounds == w.bounds
