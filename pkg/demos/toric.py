"""Three commuting operators built from the normal-ordered exponential :exp(-x₁∂₁):.

Runs the full pipeline: normalize, take the square root of P, dress, read off
the ring of constant-coefficient images, move it to k[[u]]((t)) and validate
the resulting Schur pair.

    python3 demos/toric.py
"""
from psido2 import psi1, nu, schur_from_ring, validate_schur_pair
from psido2.growth import check_A
from psido2.workbench import eigenvalue_check, example_toric, toric_operators


def main():
    P, Q, P3, report = example_toric(10, -6, (6, 6))
    for entry in report:
        print(f"{entry['name']:40s} {entry['status']}")

    res = schur_from_ring([P, Q, P3], 0, 1, (4, 4), window=-6)
    images = [psi1(a) for a in res.a]
    print("\nring images in k[[u]]((t)):")
    for name, img in zip(("P", "Q", "P'"), images):
        print(f"  {name:2s} -> {img}   nu = {tuple(nu(img))}")

    print("\neigenvalues on the Baker-Akhiezer function:")
    for name, g in zip(("P", "Q", "P'"), (P, Q, P3)):
        print(f"  {name:2s}: {eigenvalue_check(g, res.s_total)}")

    w = [psi1(v) for v in res.w.basis.values()]
    data = validate_schur_pair(images, w, {"bounds": (2, 3)})
    print(f"\nSchur pair valid: {data.valid}, rank {data.rank_r}, N_A = {data.n_a}, Ñ_A = {data.tilde_n_a}")
    print("A_1 certificate of the dressing operator:", check_A(res.s_total, 1, (0, 0)).verdict)


if __name__ == "__main__":
    main()
