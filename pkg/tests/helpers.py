"""Random generators and independent oracles shared by the test modules."""
from fractions import Fraction
import random

import sympy as sp
from hypothesis import strategies as st

from psido2.operators import D1Op, EPlusOp
from psido2.series import XSeries

x1s, x2s = sp.symbols("x1 x2")

small_rat = st.builds(Fraction, st.integers(-4, 4), st.integers(1, 3))


@st.composite
def polys(draw, max_deg=3, max_terms=4):
    """Exact polynomial XSeries."""
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        i = draw(st.integers(0, max_deg))
        j = draw(st.integers(0, max_deg - i))
        terms[(i, j)] = draw(small_rat)
    return XSeries(terms)


@st.composite
def d1ops(draw, max_q=2, max_deg=2):
    return D1Op({q: draw(polys(max_deg, 3)) for q in range(draw(st.integers(0, max_q)) + 1)})


@st.composite
def pdos(draw, max_total=3, max_deg=2):
    """Finite partial differential operators with polynomial coefficients."""
    terms = {}
    for _ in range(draw(st.integers(1, 4))):
        q = draw(st.integers(0, max_total))
        s = draw(st.integers(0, max_total - q))
        terms[(q, s)] = draw(polys(max_deg, 3))
    return EPlusOp.from_terms(terms)


def to_sympy(a: XSeries):
    return sum((sp.Rational(c.numerator, c.denominator) * x1s ** i * x2s ** j for (i, j), c in a.terms.items()),
               sp.Integer(0))


def apply_pdo(p: EPlusOp, f):
    """Apply a finite operator with exact coefficients to a sympy expression."""
    out = sp.Integer(0)
    for s, q, c in p.iter_terms():
        assert s >= 0
        out += to_sympy(c) * sp.diff(f, x1s, q, x2s, s) if (q or s) else to_sympy(c) * f
    return sp.expand(out)


def rand_xseries(rng: random.Random, prec, n_terms=3, max_deg=4):
    t = {}
    for _ in range(rng.randint(0, n_terms)):
        a = rng.randint(0, max_deg)
        b = rng.randint(0, max_deg)
        t[(a, b)] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return XSeries(t, prec)


def rand_s(rng: random.Random, lo=-5, prec=8, max_q=2):
    """S = 1 + S⁻ with bounded coefficients, window lo and uniform x-precision."""
    slots = {0: D1Op.const(1)}
    for m in range(1, -lo + 1):
        co = {q: rand_xseries(rng, prec) for q in range(min(m, max_q) + 1)}
        slots[-m] = D1Op._raw({q: c for q, c in co.items() if not c.is_zero()}, prec)
    return EPlusOp(slots, lo)


def rand_l2(rng: random.Random, lo=-4, prec=8):
    """Monic ∂₂ + u₀ + u₋₁∂₂⁻¹ + ... ."""
    slots = {1: D1Op.const(1)}
    for s in range(0, lo - 1, -1):
        co = {q: rand_xseries(rng, prec) for q in range(0, 2)}
        slots[s] = D1Op._raw({q: c for q, c in co.items() if not c.is_zero()}, prec)
    return EPlusOp(slots, lo)


def _rand_poly(rng, n_terms=2, max_deg=2):
    t = {}
    for _ in range(rng.randint(1, n_terms)):
        t[(rng.randint(0, max_deg), rng.randint(0, max_deg))] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return XSeries(t)


def rand_certified(rng: random.Random, alpha, anchor, lo=-2, qmax=3):
    """Exact-coefficient operator satisfying A_α for ``anchor``, slots lo..l.

    Each coefficient is a random polynomial times a monomial whose degree
    meets the growth bound q - α(l - s) - k.
    """
    import math as _m
    k, l = anchor
    slots = {}
    for s in range(lo, l + 1):
        co = {}
        for q in range(qmax + 1):
            if rng.random() < 0.4:
                continue
            need = max(0, _m.ceil(q - alpha * (l - s) - k))
            a = rng.randint(0, need)
            base = _rand_poly(rng)
            co[q] = base * XSeries.monomial(a, need - a)
        slots[s] = D1Op(co)
    return EPlusOp(slots, lo)
