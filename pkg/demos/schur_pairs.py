"""Valuations and admissibility invariants of rings inside k[[u]]((t)).

    python3 demos/schur_pairs.py
"""
from psido2 import UTSeries, invariants_NA, recoordinatize, ring_closure, validate_schur_pair
from psido2.schur import toric_w, w0_image

M = UTSeries.monomial


def show(name, gens, cutoff=3):
    inv = invariants_NA(ring_closure(gens, cutoff), cutoff)
    print(f"{name:28s} N_A={inv.n_a} Ñ_A={inv.tilde_n_a} admissible={inv.admissible} "
          f"strongly={inv.strongly_admissible}")


def main():
    show("k[t^-2, t^-3, u t^-2]", [M(0, -2), M(0, -3), M(1, -2)])
    show("k[t^-2]", [M(0, -2)])
    show("k[t^-4, t^-6, u t^-2]", [M(0, -4), M(0, -6), M(1, -2)])

    r = recoordinatize(ring_closure([M(0, -4), M(0, -6), M(1, -2)], 3), 2)
    print("\nnew coordinates: t' =", r.t_prime, " u' =", r.u_prime)
    v = UTSeries({(0, -6): 1, (1, -4): 2})
    print("v =", v, "  in (u', t'):", r.rewrite(v))

    d = validate_schur_pair([M(0, -2), M(0, -3), M(1, -2)], toric_w((6, 6)), {"bounds": (6, 6)})
    print("\ntoric pair:", "valid" if d.valid else "invalid", "rank", d.rank_r)
    d = validate_schur_pair([M(0, -1), M(1, -1)], w0_image((4, 4)), {"bounds": (4, 4)})
    print("trivial pair:", "valid" if d.valid else "invalid", "rank", d.rank_r)
    d = validate_schur_pair([M(0, -2), M(0, -3), M(1, -2), M(0, -1)], toric_w((4, 4)), {"bounds": (4, 4)})
    failed = [c["name"] for c in d.report if c["status"] == "fail"]
    print("toric W with t^-1 added to A:", "valid" if d.valid else f"invalid, failed check: {failed[0]}")


if __name__ == "__main__":
    main()
