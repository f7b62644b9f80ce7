"""The cusp pair: two commuting ordinary operators in x₂ and the subspace they dress to.

    python3 demos/cusp.py [prec]
"""
import sys

from psido2 import D1, commutator, eplus_mul, schur_from_ring
from psido2.workbench import cusp_operators


def main(prec=12):
    P, Q = cusp_operators(prec)
    print("P  =", P)
    print("Q  =", Q)
    c = commutator(P, Q)
    r = eplus_mul(Q, Q) - eplus_mul(eplus_mul(P, P), P)
    print(f"[P,Q] vanishes: {c.is_zero()} (guaranteed to degree {c.min_prec()})")
    print(f"Q^2 - P^3 vanishes: {r.is_zero()} (guaranteed to degree {r.min_prec()})")

    # ∂₁ is added so that the ring is quasi-elliptic in two variables
    res = schur_from_ring([P, D1(), Q], 0, 1, (2, 4), window=-6)
    print("\nconstant-coefficient images of P, ∂₁, Q:")
    for name, a in zip(("P", "d1", "Q"), res.a):
        print(f"  {name:3s} -> {a}")
    print("\nfirst rows of W (z₁-free part):")
    for j in range(4):
        print(f"  w_0,{j} =", res.w.basis[(0, j)])
    for entry in res.report:
        print(" ", entry["name"], "->", entry["status"])


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 12)
