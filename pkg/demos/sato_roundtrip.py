"""From a dressing operator S = 1 + S⁻ to the subspace W₀·S and back.

    python3 demos/sato_roundtrip.py [seed]
"""
import random
import sys
from fractions import Fraction

from psido2 import D1Op, EPlusOp, XSeries, discrepancies, reconstruct_s, w_from_s


def random_s(rng, lo=-4, prec=8):
    slots = {0: D1Op.const(1)}
    for m in range(1, -lo + 1):
        co = {}
        for q in range(min(m, 2) + 1):
            terms = {(rng.randint(0, 3), rng.randint(0, 3)): Fraction(rng.randint(-3, 3), rng.randint(1, 2))
                     for _ in range(2)}
            co[q] = XSeries(terms, prec)
        slots[-m] = D1Op(co, prec)
    return EPlusOp(slots, lo)


def main(seed=0):
    rng = random.Random(seed)
    s = random_s(rng)
    print("S =", s)
    w = w_from_s(s, (3, 3))
    print("\ncanonical rows of W = W0 S:")
    for (i, j), v in sorted(w.basis.items())[:6]:
        print(f"  w_{i},{j} = {v}")
    back = reconstruct_s(w)
    print("\nreconstructed S =", back)
    print("slot precisions:", {k: d.prec for k, d in sorted(back.slots.items())})
    print("discrepancies against the original:", discrepancies(back, s) or "none")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 0)
