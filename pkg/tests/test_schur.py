from fractions import Fraction
import json

import pytest
from hypothesis import given, settings, strategies as st

from psido2.action import ZSeries
from psido2.errors import PreconditionError
from psido2.schur import (
    UTSeries,
    Valuation2,
    filtration_dims,
    invariants_NA,
    invert,
    nu,
    psi1,
    psi1_inv,
    recoordinatize,
    ring_closure,
    toric_w,
    validate_schur_pair,
    w0_image,
)
from psido2.verdict import Tri

M = UTSeries.monomial
Z = ZSeries.monomial
TORIC = [M(0, -2), M(0, -3), M(1, -2)]


def test_psi1_examples():
    assert psi1(Z(1, -1)) == M(1, -2)
    assert psi1(Z(0, 1)) == M(0, 1)
    assert psi1(Z(2, 3)) == M(2, 1)
    assert psi1_inv(M(1, -2)) == Z(1, -1)


def test_psi1_inv_rejects_cone_violations():
    with pytest.raises(PreconditionError):
        psi1_inv(UTSeries({(-1, 0): 1}))


def test_nu_examples():
    assert nu(UTSeries({(2, 3): 1, (5, 3): 1, (0, 4): 1})) == Valuation2(2, 3)
    assert nu(UTSeries.one()) == Valuation2(0, 0)
    assert nu(M(1, -2)) == Valuation2(1, -2)
    with pytest.raises(PreconditionError):
        nu(UTSeries({}, 3))


def test_ring_closure_examples():
    assert ring_closure([M(0, -1)], 3) == [M(0, -3), M(0, -2), M(0, -1)]
    got = ring_closure([M(0, -2), M(0, -3)], 2)
    assert {nu(a).nu_t for a in got} == {-2, -3, -4, -5, -6}
    assert M(2, -4) in ring_closure([M(0, -2), M(1, -2)], 2)


def test_invariants_examples():
    inv = invariants_NA(ring_closure(TORIC, 3))
    assert (inv.n_a, inv.tilde_n_a, inv.admissible, inv.strongly_admissible) == (1, 1, True, True)
    inv = invariants_NA(ring_closure([M(0, -2)], 3))
    assert inv.n_a == 2 and not inv.admissible
    inv = invariants_NA(ring_closure([M(0, -4), M(0, -6), M(1, -2)], 3))
    assert (inv.n_a, inv.tilde_n_a, inv.admissible) == (2, 2, True)
    assert inv.to_json()["caveat"]


def test_invariants_monotone_in_cutoff():
    for gens in (TORIC, [M(0, -4), M(0, -6), M(1, -2), M(0, -9)], [M(0, -6), M(1, -4), M(0, -10)]):
        prev = None
        for cut in range(1, 5):
            inv = invariants_NA(ring_closure(gens, cut), cut)
            if prev is not None:
                assert prev.n_a % inv.n_a == 0 and prev.tilde_n_a % inv.tilde_n_a == 0
                assert inv.n_a <= prev.n_a and inv.tilde_n_a <= prev.tilde_n_a
            prev = inv


def test_filtration_dims():
    sp = [M(0, 0), M(0, -1), M(1, -1)]
    assert filtration_dims(sp, -1, 1).dim == 3
    assert filtration_dims(sp, 0, 1).dim == 1
    with pytest.raises(PreconditionError):
        filtration_dims(sp, 1, 1)


def test_filtration_dims_toric():
    # u^i t^{-m} with 0 <= i <= m: m + 1 elements of t-order -m, plus 1 + t at order 0
    w = toric_w((6, 6))
    for m in range(1, 5):
        assert filtration_dims(w, -m, -m + 1).dim == m + 1
    assert filtration_dims(w, 0, 1).dim == 1
    trunc = [UTSeries({(0, 0): 1}, 1)]
    assert filtration_dims(trunc, 0, 3).status is Tri.INCONCLUSIVE


def test_recoordinatize_identity_case():
    r = recoordinatize(ring_closure(TORIC, 3), 1)
    assert r.t_prime == M(0, 1) and r.u_prime == M(1, 0)
    v = UTSeries({(1, -4): 2, (0, -3): 1, (2, -5): 3})
    assert r.expand(r.rewrite(v)) == v


def test_recoordinatize_na_two():
    r = recoordinatize(ring_closure([M(0, -4), M(0, -6), M(1, -2)], 3), 2)
    assert nu(r.t_prime) == Valuation2(0, 2)
    assert nu(r.u_prime) == Valuation2(1, 0)
    v = UTSeries({(1, -4): 2, (0, -6): 1, (2, -8): 3})
    assert r.expand(r.rewrite(v)) == v
    with pytest.raises(PreconditionError):
        recoordinatize(ring_closure([M(0, -2)], 3), 2)


def test_recoordinatize_non_monomial():
    gens = [UTSeries({(0, -2): 1, (1, -1): 1}), M(0, -3), M(1, -2)]
    r = recoordinatize(ring_closure(gens, 3), 1)
    v = gens[0] * gens[1]
    back = r.expand(r.rewrite(v))
    assert back.agrees(v)


def test_validate_toric_pair():
    d = validate_schur_pair(TORIC, toric_w((6, 6)), {"bounds": (6, 6), "word_length": 3})
    assert d.valid and d.rank_r == 1 and d.n_a == 1 and d.tilde_n_a == 1
    assert any(c.get("surrogate") for c in d.report)
    json.dumps(d.to_json())


def test_validate_trivial_pair():
    d = validate_schur_pair([M(0, -1), M(1, -1)], w0_image((4, 4)), {"bounds": (4, 4)})
    assert d.valid and d.rank_r == 1


def test_validate_reports_support_violation():
    d = validate_schur_pair(TORIC, toric_w((4, 4)) + [M(0, 1)], {"bounds": (4, 4)})
    assert not d.valid
    assert d.report[0]["status"] == "fail" and "support" in d.report[0]["clause"]


def test_validate_reports_non_stabilizing_generator():
    d = validate_schur_pair(TORIC + [M(0, -1)], toric_w((4, 4)), {"bounds": (4, 4)})
    assert not d.valid
    bad = [c for c in d.report if c["status"] == "fail"]
    assert bad and "A·W" in bad[0]["clause"]


def test_validate_reports_non_admissible_ring():
    d = validate_schur_pair([M(0, -2), M(0, -3)], w0_image((3, 3)), {"bounds": (3, 3)})
    assert not d.valid


def test_invert_and_json():
    g = UTSeries({(0, 0): 1, (1, 0): 1, (0, 1): 2})
    assert (g * invert(g, 5, 5)).agrees(UTSeries.one())
    assert invert(M(0, -3)) == M(0, 3)
    with pytest.raises(PreconditionError, match="not a unit"):
        invert(M(2, -3))
    with pytest.raises(PreconditionError):
        invert(g)
    h = UTSeries({(1, -2): Fraction(3, 4)}, 5, 7)
    assert UTSeries.from_json(json.loads(json.dumps(h.to_json()))) == h


# --- properties -----------------------------------------------------------

uts = st.builds(
    lambda ts: UTSeries({(a, b): c for a, b, c in ts}),
    st.lists(st.tuples(st.integers(0, 3), st.integers(-4, 4), st.integers(1, 5)), min_size=1, max_size=4),
)


@settings(max_examples=80, deadline=None)
@given(uts, uts)
def test_nu_is_additive(a, b):
    assert nu(a * b) == nu(a) + nu(b)


cone = st.builds(
    lambda ts: ZSeries({(i, j): c for i, j, c in ts}),
    st.lists(st.tuples(st.integers(0, 3), st.integers(-3, 3), st.integers(1, 5)), min_size=1, max_size=4),
)


@settings(max_examples=80, deadline=None)
@given(cone, cone)
def test_psi1_is_multiplicative_and_invertible(v, w):
    assert psi1(v * w) == psi1(v) * psi1(w)
    assert psi1_inv(psi1(v)) == v


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 4), st.integers(0, 4))
def test_psi1_transports_W0_support(i, j):
    assert nu(psi1(Z(i, -j))) == Valuation2(i, -j - i)
