"""Exact Coulomb levels, checked against the numerical solver, and the
coupling-constant factorization for a few power laws."""

import numpy as np

from strongcoupling import PowerLawPotential, QuantumNumbers
from strongcoupling.coulomb import coulomb_coefficients, coulomb_state
from strongcoupling.oracle import coulomb_profile, solve_bound_state
from strongcoupling.scaling import check_radius_mapping, g_factor_exponent, verify_factorization


def coulomb_table(n_max=4):
    print("N  L  eps (exact)        eps (numerical)     coefficients a_L..a_{N-1}")
    for N in range(1, n_max + 1):
        for L in range(N):
            eps = coulomb_state(N, L).energy.reduced(0.0)
            num = solve_bound_state(coulomb_profile(), L, N - L - 1).eigenvalue
            coeffs = " ".join(f"{a:+.4f}" for a in coulomb_coefficients(N, L))
            print(f"{N}  {L}  {eps:<18.15f} {num:<19.15f} {coeffs}")


def factorization(g_list=(1.0, 2.0, 5.0)):
    qn = QuantumNumbers(1, 0)
    for label, pot in [
        ("coulomb", PowerLawPotential.coulomb()),
        ("linear", PowerLawPotential.linear()),
        ("quadratic", PowerLawPotential(2, 2)),
    ]:
        rep = verify_factorization(pot, qn, g_list)
        mapping = check_radius_mapping(pot, qn, g_list[0], g_list[-1])
        print(f"{label:9s} E ~ g^{g_factor_exponent(pot)}: E/g^p = {np.round(rep.reduced, 10)}"
              f"  spread {rep.spread:.1e}  virial {max(rep.virial_deviations):.1e}"
              f"  mapped |dR| {mapping.max_abs_diff:.1e}")


if __name__ == "__main__":
    coulomb_table()
    print()
    factorization()
