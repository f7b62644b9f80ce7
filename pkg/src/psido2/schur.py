"""Schur pairs in k[[u]]((t)): the ψ₁ transform, rank-2 valuations and invariants.

``UTSeries`` keys (a, b) mean u^a t^b with a >= 0.  Precision is a box:
terms with b >= tail_prec or a >= u_prec are unknown.  Series coming from
``psi1`` are exact in u because the z₁ direction of a ``ZSeries`` is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Callable, Dict, List, Optional, Tuple

from .action import SubspaceW, ZSeries, echelon_basis, lt_key, stabilizes, z_to_op
from .errors import FormatError, PreconditionError
from .series import INF, prec_from_json, prec_to_json, rat, rat_str
from .verdict import Tri


class UTSeries:
    __slots__ = ("terms", "tail_prec", "u_prec")

    def __init__(self, terms=None, tail_prec=INF, u_prec=INF):
        clean = {}
        for (a, b), c in (terms or {}).items():
            if a < 0:
                raise PreconditionError("negative u powers lie outside k[[u]]((t))")
            if b >= tail_prec or a >= u_prec:
                continue
            c = rat(c)
            if c:
                clean[(a, b)] = clean.get((a, b), 0) + c
        self.terms = {m: c for m, c in clean.items() if c}
        self.tail_prec = tail_prec
        self.u_prec = u_prec

    @classmethod
    def monomial(cls, a, b, c=1):
        return cls({(a, b): c})

    @classmethod
    def one(cls):
        return cls({(0, 0): 1})

    def is_zero(self):
        return not self.terms

    def is_exact(self):
        return self.tail_prec == INF and self.u_prec == INF

    def t_order(self):
        return min((b for _, b in self.terms), default=self.tail_prec)

    def u_order(self):
        return min((a for a, _ in self.terms), default=self.u_prec)

    def truncate(self, tail=INF, u_prec=INF):
        t, u = min(self.tail_prec, tail), min(self.u_prec, u_prec)
        return UTSeries({m: c for m, c in self.terms.items()}, t, u)

    def __add__(self, other):
        t, u = min(self.tail_prec, other.tail_prec), min(self.u_prec, other.u_prec)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return UTSeries(out, t, u)

    def __neg__(self):
        return UTSeries({m: -c for m, c in self.terms.items()}, self.tail_prec, self.u_prec)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = rat(c)
        return UTSeries({m: v * c for m, v in self.terms.items()}, self.tail_prec, self.u_prec)

    def shifted(self, da, db, c=1):
        """c · u^da t^db · self."""
        c = rat(c)
        return UTSeries({(a + da, b + db): v * c for (a, b), v in self.terms.items()},
                        self.tail_prec + db, self.u_prec + da)

    def __mul__(self, other):
        if not isinstance(other, UTSeries):
            return self.scale(other)
        tails, us = [], []
        if self.tail_prec != INF:
            tails.append(self.tail_prec + other.t_order())
        if other.tail_prec != INF:
            tails.append(other.tail_prec + self.t_order())
        if self.u_prec != INF:
            us.append(self.u_prec + other.u_order())
        if other.u_prec != INF:
            us.append(other.u_prec + self.u_order())
        t = min(tails) if tails else INF
        u = min(us) if us else INF
        out = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                m = (a1 + a2, b1 + b2)
                if m[1] < t and m[0] < u:
                    out[m] = out.get(m, 0) + c1 * c2
        return UTSeries(out, t, u)

    def __pow__(self, n: int):
        if n < 0:
            return invert(self) ** (-n)
        out = UTSeries.one()
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return (isinstance(other, UTSeries) and self.terms == other.terms
                and self.tail_prec == other.tail_prec and self.u_prec == other.u_prec)

    def __hash__(self):
        return hash((tuple(sorted(self.terms.items())), self.tail_prec, self.u_prec))

    def agrees(self, other) -> bool:
        t, u = min(self.tail_prec, other.tail_prec), min(self.u_prec, other.u_prec)
        return self.truncate(t, u).terms == other.truncate(t, u).terms

    def __repr__(self):
        parts = []
        for (a, b), c in sorted(self.terms.items(), key=lambda m: (m[0][1], m[0][0])):
            mono = "".join(s for s in ((f"u^{a}" if a else ""), (f"t^{b}" if b else "")) if s)
            parts.append(f"{c}" + (f"*{mono}" if mono else ""))
        extra = []
        if self.tail_prec != INF:
            extra.append(f"O(t^{self.tail_prec})")
        if self.u_prec != INF:
            extra.append(f"O(u^{self.u_prec})")
        return "UTSeries(" + " + ".join(parts + extra or ["0"]) + ")"

    def to_json(self):
        return {
            "tail_prec": prec_to_json(self.tail_prec),
            "u_prec": prec_to_json(self.u_prec),
            "terms": [[a, b, rat_str(c)] for (a, b), c in sorted(self.terms.items(), key=lambda m: (m[0][1], m[0][0]))],
        }

    @classmethod
    def from_json(cls, obj):
        if not isinstance(obj, dict) or "terms" not in obj:
            raise FormatError("u,t-series literal needs 'terms'")
        terms = {}
        for t in obj["terms"]:
            if not isinstance(t, list) or len(t) != 3 or not all(isinstance(v, int) and not isinstance(v, bool) for v in t[:2]):
                raise FormatError(f"bad u,t-series term {t!r}")
            terms[(t[0], t[1])] = terms.get((t[0], t[1]), 0) + rat(t[2])
        return cls(terms, prec_from_json(obj.get("tail_prec")), prec_from_json(obj.get("u_prec")))


def invert(a: UTSeries, u_cap=None, t_cap=None) -> UTSeries:
    """Inverse of an element whose leading t-coefficient is a unit of k[[u]].

    An exact input whose inverse is an infinite series needs both caps.
    """
    if a.is_zero():
        raise PreconditionError("zero has no inverse")
    v = nu(a)
    if v.nu_u != 0:
        raise PreconditionError("leading t-coefficient is not a unit of k[[u]]")
    b0 = v.nu_t
    g = a.shifted(0, -b0)  # t-order 0
    G: Dict[int, Dict[int, Fraction]] = {}
    for (x, y), c in g.terms.items():
        G.setdefault(y, {})[x] = c
    T = g.tail_prec if t_cap is None else min(g.tail_prec, t_cap)
    U = g.u_prec if u_cap is None else min(g.u_prec, u_cap)
    if set(G) == {0} and set(G[0]) == {0}:
        return UTSeries({(0, -b0): 1 / G[0][0]}, a.tail_prec - 2 * b0, a.u_prec)
    if T == INF or U == INF:
        raise PreconditionError("inverse is an infinite series: give u and t caps")

    def useries_inv(f):
        out = {0: 1 / f[0]}
        for n in range(1, int(U)):
            s = sum(f.get(k, 0) * out[n - k] for k in range(1, n + 1))
            out[n] = -s / f[0]
        return out

    def umul(f, h):
        out = {}
        for i, x in f.items():
            for j, y in h.items():
                if i + j < U:
                    out[i + j] = out.get(i + j, 0) + x * y
        return out

    g0inv = useries_inv(G[0])
    H: Dict[int, Dict[int, Fraction]] = {0: g0inv}
    for n in range(1, int(T)):
        acc: Dict[int, Fraction] = {}
        for k in range(1, n + 1):
            if k in G:
                for i, x in umul(G[k], H[n - k]).items():
                    acc[i] = acc.get(i, 0) + x
        H[n] = {i: -x for i, x in umul(acc, g0inv).items()}
    terms = {(i, n - b0): c for n, row in H.items() for i, c in row.items()}
    return UTSeries(terms, T - b0, U)


@dataclass(frozen=True, order=True)
class Valuation2:
    nu_u: int
    nu_t: int

    def __add__(self, other):
        return Valuation2(self.nu_u + other.nu_u, self.nu_t + other.nu_t)

    def key(self):
        return (self.nu_t, self.nu_u)

    def __iter__(self):
        yield self.nu_u
        yield self.nu_t


def nu(a: UTSeries) -> Valuation2:
    """(u-order of the leading t-coefficient, t-order)."""
    if a.is_zero():
        raise PreconditionError("ν of a series that is zero to precision")
    bt = min(b for _, b in a.terms)
    au = min(x for x, b in a.terms if b == bt)
    return Valuation2(au, bt)


def leading(a: UTSeries):
    v = nu(a)
    return v, a.terms[(v.nu_u, v.nu_t)]


# --- the ψ₁ transform -----------------------------------------------------

def psi1(v: ZSeries) -> UTSeries:
    """z₁^{-i} z₂^{j} ↦ u^i t^{j-i}."""
    terms = {(i, j - i): c for (i, j), c in v.terms.items()}
    tail = INF
    if v.tail_prec != INF:
        tail = v.tail_prec - max((i for i, _ in v.terms), default=0)
    return UTSeries(terms, tail)


def psi1_inv(w: UTSeries) -> ZSeries:
    """u^a t^b ↦ z₁^{-a} z₂^{a+b}.

    A finite u-precision U leaves every z₂ power from U + ν_t upward unknown,
    assuming the hidden u-tail starts no lower in t than the stored terms.
    """
    tail = w.tail_prec
    if w.u_prec != INF:
        tail = min(tail, w.u_prec + w.t_order())
    return ZSeries({(a, a + b): c for (a, b), c in w.terms.items()}, tail)


# --- closures and invariants ---------------------------------------------

def _nu_echelon(elems: List[UTSeries]) -> List[UTSeries]:
    """Reduce to a spanning set with pairwise distinct ν and leading coefficient 1."""
    pivots: Dict[Valuation2, UTSeries] = {}
    for g in elems:
        while not g.is_zero():
            v, c = leading(g)
            p = pivots.get(v)
            if p is None:
                pivots[v] = g.scale(1 / c)
                break
            g = g - p.scale(c)
    return [pivots[v] for v in sorted(pivots, key=Valuation2.key)]


def ring_closure(gens: List[UTSeries], degree_cutoff: int) -> List[UTSeries]:
    """Products of the generators of word length 1..cutoff, in ν-echelon form."""
    words: List[UTSeries] = []
    layer = {(): UTSeries.one()}
    for n in range(1, degree_cutoff + 1):
        new = {}
        for word in combinations_with_replacement(range(len(gens)), n):
            prev = layer.get(word[:-1])
            if prev is None:
                continue
            new[word] = prev * gens[word[-1]]
        words.extend(new.values())
        layer = new
    return _nu_echelon(words)


@dataclass
class Invariants:
    n_a: int
    tilde_n_a: int
    admissible: bool
    strongly_admissible: bool
    cutoff: Optional[int] = None
    u_witness: Optional[Valuation2] = None

    def to_json(self):
        return {
            "N_A": self.n_a,
            "tilde_N_A": self.tilde_n_a,
            "admissible": self.admissible,
            "strongly_admissible": self.strongly_admissible,
            "u_witness": None if self.u_witness is None else list(self.u_witness),
            "caveat": "values at cutoff; larger cutoffs can only lower the gcds",
            "sign_convention": "gcds of |nu_t|",
        }


def invariants_NA(closure: List[UTSeries], cutoff=None) -> Invariants:
    if not closure:
        raise PreconditionError("empty closure")
    vals = [nu(a) for a in closure if not a.is_zero()]
    n_a = 0
    tilde = 0
    witness = None
    for v in vals:
        tilde = math.gcd(tilde, abs(v.nu_t))
        if v.nu_u == 0:
            n_a = math.gcd(n_a, abs(v.nu_t))
        elif v.nu_u == 1 and witness is None:
            witness = v
    adm = witness is not None
    return Invariants(n_a, tilde, adm, adm and n_a == tilde, cutoff, witness)


@dataclass
class FiltrationDim:
    dim: int
    status: Tri
    note: str = ""


def filtration_dims(space: List[UTSeries], i: int, j: int) -> FiltrationDim:
    """dim (W ∩ t^i k((u))[[t]]) / (W ∩ t^j k((u))[[t]]) for W spanned by ``space``."""
    if not i < j:
        raise PreconditionError("need i < j")
    ech = _nu_echelon(space)
    dim = sum(1 for a in ech if i <= nu(a).nu_t < j)
    # an element reduced to zero only to precision below t^j could still count
    for a in space:
        if a.tail_prec < j:
            return FiltrationDim(dim, Tri.INCONCLUSIVE, f"an input is only known below t^{a.tail_prec}")
    return FiltrationDim(dim, Tri.TRUE)


# --- re-coordinatization --------------------------------------------------

def _ext_gcd_combination(values: List[int]) -> List[int]:
    """Integer c with Σ c_i v_i = gcd(values) (up to sign fixed by the caller)."""
    g, coeffs = 0, [0] * len(values)
    for idx, v in enumerate(values):
        # combine current gcd g (with coeffs) and v
        if g == 0:
            g, coeffs = v, [0] * len(values)
            coeffs[idx] = 1
            continue
        x, y, d = _egcd(g, v)
        coeffs = [c * x for c in coeffs]
        coeffs[idx] += y
        g = d
    return coeffs


def _egcd(a, b):
    """(x, y, d) with a x + b y = d = gcd(a, b) up to sign."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return x0, y0, a


def _monic(a: UTSeries) -> UTSeries:
    _v, c = leading(a)
    return a.scale(1 / c)


@dataclass
class Recoordinatization:
    t_prime: UTSeries
    u_prime: UTSeries
    n_a: int
    rewrite: Callable[[UTSeries], UTSeries]
    u_cap: int = 8
    t_cap: int = 8

    def t_power(self, l: int) -> UTSeries:
        if l >= 0:
            return self.t_prime ** l
        return invert(self.t_prime, self.u_cap, self.t_cap) ** (-l)

    def expand(self, series: UTSeries) -> UTSeries:
        """Substitute u′, t′ back into a series written in (u′, t′)."""
        out = UTSeries({}, series.tail_prec, series.u_prec)
        for (k, l), c in series.terms.items():
            out = out + (self.u_prime ** k * self.t_power(l)).scale(c)
        return out


def recoordinatize(closure: List[UTSeries], n_a: int, u_cap=8, t_cap=8) -> Recoordinatization:
    """Monic t′ with ν = (0, N_A) and u′ with ν = (1, 0) generating the closure's field."""
    inv = invariants_NA(closure)
    if not inv.strongly_admissible:
        raise PreconditionError("closure is not strongly admissible")
    if inv.n_a != n_a:
        raise PreconditionError(f"N_A at this cutoff is {inv.n_a}, not {n_a}")
    pure = [a for a in closure if nu(a).nu_u == 0 and nu(a).nu_t != 0]
    vals = [nu(a).nu_t for a in pure]
    coeffs = _ext_gcd_combination(vals)
    total = sum(c * v for c, v in zip(coeffs, vals))
    if total < 0:
        coeffs = [-c for c in coeffs]
    t_prime = UTSeries.one()
    for a, c in zip(pure, coeffs):
        if c:
            base = a if c > 0 else invert(a, u_cap, t_cap)
            t_prime = t_prime * base ** abs(c)
    t_prime = _monic(t_prime)
    wit = max((a for a in closure if nu(a).nu_u == 1), key=lambda a: nu(a).nu_t)
    e = nu(wit).nu_t
    if e % n_a:
        raise PreconditionError("admissibility witness has t-order not divisible by N_A")
    rc = Recoordinatization(t_prime, t_prime, n_a, None, u_cap, t_cap)
    u_prime = _monic(wit * rc.t_power(-e // n_a) if e else wit)
    rc.u_prime = u_prime

    def rewrite(v: UTSeries) -> UTSeries:
        """Greedy lowest-term subtraction; the result is exact below t′^tail."""
        out: Dict[Tuple[int, int], Fraction] = {}
        cur = v
        tail = INF
        while not cur.is_zero():
            p, q = nu(cur)
            if q % n_a:
                raise PreconditionError(f"t-order {q} is not a multiple of N_A = {n_a}")
            if p >= u_cap or q >= t_cap * n_a:
                tail = q // n_a
                break
            c = cur.terms[(p, q)]
            out[(p, q // n_a)] = out.get((p, q // n_a), 0) + c
            cur = cur - (u_prime ** p * rc.t_power(q // n_a)).scale(c)
        if cur.is_zero() and cur.tail_prec != INF:
            tail = cur.tail_prec // n_a
        return UTSeries(out, tail)

    rc.rewrite = rewrite
    return rc


# --- Schur pair validation -----------------------------------------------

@dataclass
class SchurPairData:
    a_gens: List[UTSeries]
    w_basis: List[UTSeries]
    rank_r: int
    n_a: int
    tilde_n_a: int
    cutoffs: dict
    valid: bool = True
    report: List[dict] = field(default_factory=list)

    def to_json(self):
        return {
            "valid": self.valid,
            "rank": self.rank_r,
            "N_A": self.n_a,
            "tilde_N_A": self.tilde_n_a,
            "cutoffs": self.cutoffs,
            "checks": self.report,
        }


def _support_check(w_z: List[ZSeries], bounds):
    try:
        sub = echelon_basis(w_z, bounds)
    except PreconditionError as exc:
        # too little z₂ precision leaves the support undecided rather than wrong
        status = "inconclusive" if "precision" in str(exc) else "fail"
        return None, {"name": "support equals the admissible cone", "clause": "Schur pair item 1 (support)",
                      "status": status, "witness": str(exc)}
    # lowest terms with positive z₂ power lie outside the cone
    from .action import support
    extra = sorted(m for m in support(w_z) if m[1] > 0)
    if extra:
        a, j = extra[0]
        return None, {"name": "support equals the admissible cone", "clause": "Schur pair item 1 (support)",
                      "status": "fail", "witness": f"extra lowest term u^{a}t^{j - a}"}
    return sub, {"name": "support equals the admissible cone", "status": "pass"}


def validate_schur_pair(a_gens: List[UTSeries], w_basis: List[UTSeries], cutoffs=None) -> SchurPairData:
    """Support, stabilizer, admissibility and rank checks on truncated data.

    ``cutoffs`` holds the z-bounds (I, J) for the echelon basis of W and the
    word length for the ring closure.  Transcendence degree 2 is replaced by
    a checkable surrogate: elements with ν = (0, nonzero) and ν = (1, *).
    """
    cutoffs = dict(cutoffs or {})
    bounds = tuple(cutoffs.setdefault("bounds", (4, 4)))
    word = cutoffs.setdefault("word_length", 3)
    cutoffs["bounds"] = list(bounds)
    report: List[dict] = []
    valid = True
    for a in a_gens:
        if any(x < 0 for x, _ in a.terms):
            raise PreconditionError("generator outside k[[u]]((t))")
    w_z = [psi1_inv(w) for w in w_basis]
    sub, entry = _support_check(w_z, bounds)
    report.append(entry)
    if sub is None:
        valid = False
    if sub is not None:
        for idx, a in enumerate(a_gens):
            az = psi1_inv(a)  # a truncated generator acts through a windowed operator
            res = stabilizes(sub, z_to_op(az))
            status = {Tri.TRUE: "pass", Tri.FALSE: "fail", Tri.INCONCLUSIVE: "inconclusive"}[res.status]
            ent = {"name": f"generator {idx} stabilizes W", "status": status, "checked_rows": res.checked}
            if res.status is Tri.FALSE:
                ent["clause"] = "Schur pair definition (A·W ⊂ W)"
                ent["witness"] = res.witness
                valid = False
            elif res.status is Tri.INCONCLUSIVE:
                valid = False
            report.append(ent)
    closure = ring_closure(a_gens, word)
    inv = invariants_NA(closure, word)
    ent = {"name": "strongly admissible", "status": "pass" if inv.strongly_admissible else "fail",
           "N_A": inv.n_a, "tilde_N_A": inv.tilde_n_a, "caveat": "at cutoff"}
    if not inv.strongly_admissible:
        ent["clause"] = "Schur pair item 2 (strong admissibility)"
        valid = False
    report.append(ent)
    has0 = any(nu(a).nu_u == 0 and nu(a).nu_t != 0 for a in closure)
    has1 = inv.admissible
    ent = {"name": "transcendence degree 2 (surrogate: independent ν-directions)",
           "status": "pass" if has0 and has1 else "fail", "surrogate": True}
    if not (has0 and has1):
        ent["clause"] = "Schur pair item 2 (trdeg)"
        valid = False
    report.append(ent)
    return SchurPairData(list(a_gens), list(w_basis), inv.n_a, inv.n_a, inv.tilde_n_a, cutoffs, valid, report)


def toric_w(bounds) -> List[UTSeries]:
    """Spanning set of ⟨1 + t, t^{-i}u^j : i >= 1, 0 <= j <= i⟩ within z-bounds."""
    I, J = bounds
    out = [UTSeries({(0, 0): 1, (0, 1): 1})]
    for i in range(I + 1):
        for j in range(J + 1):
            if (i, j) != (0, 0):
                out.append(psi1(ZSeries.monomial(i, -j)))
    return out


def w0_image(bounds) -> List[UTSeries]:
    I, J = bounds
    return [psi1(ZSeries.monomial(i, -j)) for i in range(I + 1) for j in range(J + 1)]
