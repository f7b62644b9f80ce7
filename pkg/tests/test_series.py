from fractions import Fraction
import json
import math

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from psido2.errors import FormatError, PreconditionError
from psido2.series import (
    INF,
    AtLeast,
    GammaDeg,
    XSeries,
    antideriv,
    d_dx,
    exp_series,
    invert_unit,
    linear_substitute,
    rat,
    xs_mul,
)

from helpers import polys, to_sympy, x1s, x2s

X1, X2 = XSeries.x1(), XSeries.x2()


def test_rat_rejects_floats():
    with pytest.raises(FormatError):
        rat(0.5)
    assert rat("3/6") == Fraction(1, 2)


def test_mul_examples():
    a = (XSeries.const(1) + X1).with_prec(5)
    b = (XSeries.const(1) - X1).with_prec(5)
    assert xs_mul(a, b) == XSeries({(0, 0): 1, (2, 0): -1}, 5)
    c = XSeries({(0, 0): 1, (0, 1): 1, (0, 2): 1}, 3)
    d = XSeries({(0, 0): 1, (0, 1): -1}, 3)
    assert xs_mul(c, d) == XSeries({(0, 0): 1}, 3)


def test_orders():
    assert XSeries({(2, 1): 1, (4, 0): 1}).ord_M() == 3
    assert (XSeries.const(1) + X1).ord_M() == 0
    assert XSeries.zero(6).ord_M() == AtLeast(6)
    assert XSeries({(3, 0): 1, (0, 1): 1}).ord_gamma() == GammaDeg(3, 0)
    assert XSeries({(1, 1): 1, (0, 2): 1}).ord_gamma() == GammaDeg(1, 1)
    assert XSeries({(0, 5): 1}).ord_gamma() == GammaDeg(0, 5)
    with pytest.raises(PreconditionError, match="zero series has no Γ-order"):
        XSeries.zero(3).ord_gamma()


def test_gamma_order_is_antilex():
    assert GammaDeg(5, 0) < GammaDeg(0, 1)
    assert GammaDeg(0, 1) < GammaDeg(1, 1)


def test_derivatives_and_integrals():
    assert d_dx(XSeries({(2, 1): 1}), 1) == XSeries({(1, 1): 2})
    assert d_dx(XSeries.const(7), 1).is_zero()
    e = exp_series(X2.with_prec(8))
    de = d_dx(e, 2)
    assert de.prec == 7
    for j in range(7):
        assert de.terms[(0, j)] == Fraction(1, math.factorial(j))
    assert antideriv(XSeries.const(1), 1) == X1
    assert antideriv(XSeries({(1, 1): 2}), 1) == XSeries({(2, 1): 1})


def test_invert_unit_examples():
    g = invert_unit((XSeries.const(1) - X2).with_prec(4))
    assert g == XSeries({(0, k): 1 for k in range(4)}, 4)
    assert invert_unit(XSeries.const(2)) == XSeries.const(Fraction(1, 2))
    a = (XSeries.const(1) + X1 + X2).with_prec(7)
    assert (a * invert_unit(a)).agrees(XSeries.const(1))
    with pytest.raises(PreconditionError, match="not a unit"):
        invert_unit(X1.with_prec(3))


def test_exp_series_examples():
    assert exp_series(XSeries.zero(5)) == XSeries.const(1, 5)
    assert exp_series(X1.with_prec(4)) == XSeries({(0, 0): 1, (1, 0): 1, (2, 0): Fraction(1, 2), (3, 0): Fraction(1, 6)}, 4)
    with pytest.raises(PreconditionError, match="positive M-order"):
        exp_series(XSeries.const(1, 4))


def test_linear_substitute_examples():
    a = XSeries({(2, 1): 3, (0, 1): -1})
    assert linear_substitute(a, [[1, 0], [0, 1]]) == a
    assert linear_substitute(X1, [[0, 1], [1, 0]]) == X2
    # x₁ - x₂ with x₁ = x₁' + x₂' + c, x₂ = x₂'
    c = Fraction(3, 2)
    assert linear_substitute(X1 - X2, [[1, 0], [1, 1]], [c, 0]) == X1 + XSeries.const(c)
    with pytest.raises(PreconditionError):
        linear_substitute(X1, [[1, 1], [1, 1]])


def test_json_roundtrip_and_errors():
    a = XSeries({(1, 2): Fraction(-3, 4), (0, 0): 2}, 6)
    assert XSeries.from_json(json.loads(json.dumps(a.to_json()))) == a
    assert XSeries.from_json({"prec": None, "terms": []}).prec == INF
    with pytest.raises(FormatError):
        XSeries.from_json({"prec": 3, "terms": [[0, 0, 0.5]]})


# --- properties -----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys(), st.integers(1, 7))
def test_ring_axioms(a, b, c, n):
    a, b, c = a.with_prec(n), b.with_prec(n), c.with_prec(n)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_product_matches_sympy(a, b):
    assert sp.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), st.sampled_from([1, 2]))
def test_leibniz(a, b, axis):
    lhs = d_dx(a * b, axis)
    rhs = d_dx(a, axis) * b + a * d_dx(b, axis)
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_valuations_add(a, b):
    if a.is_zero() or b.is_zero():
        return
    assert (a * b).ord_M() == a.ord_M() + b.ord_M()
    assert (a * b).ord_gamma() == a.ord_gamma() + b.ord_gamma()


@settings(max_examples=60, deadline=None)
@given(polys(), st.sampled_from([1, 2]))
def test_antideriv_fundamental_theorem(a, axis):
    assert d_dx(antideriv(a, axis), axis) == a
    free = XSeries({m: c for m, c in a.terms.items() if m[axis - 1] == 0})
    assert antideriv(d_dx(a, axis), axis) == a - free


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), st.integers(2, 6))
def test_exp_is_a_homomorphism(a, b, n):
    a = XSeries({m: c for m, c in a.terms.items() if m != (0, 0)}, n)
    b = XSeries({m: c for m, c in b.terms.items() if m != (0, 0)}, n)
    assert exp_series(a + b) == exp_series(a) * exp_series(b)
    assert (exp_series(a) * exp_series(-a)).agrees(XSeries.const(1))


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), st.integers(1, 6))
def test_truncation_is_sound(a, b, n):
    """Products of truncations agree with the exact product below the claimed precision."""
    exact = a * b
    low = a.with_prec(n) * b.with_prec(n)
    assert low.agrees(exact)


@settings(max_examples=30, deadline=None)
@given(polys(), st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2))
def test_linear_substitute_matches_sympy(a, p, q, r, s):
    if p * s - q * r == 0:
        return
    y1, y2 = sp.symbols("y1 y2")
    got = linear_substitute(a, [[p, q], [r, s]])
    want = to_sympy(a).subs({x1s: p * y1 + r * y2, x2s: q * y1 + s * y2}, simultaneous=True)
    assert sp.expand(to_sympy(got).subs({x1s: y1, x2s: y2}, simultaneous=True) - want) == 0
