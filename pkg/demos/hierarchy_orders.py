"""Order-by-order energies for an anharmonic well, and how the truncated
solution improves with the coupling."""

import numpy as np

from strongcoupling import PowerLawPotential
from strongcoupling.hierarchy import solve_hierarchy
from strongcoupling.oracle import RadialPotential, power_law_profile, solve_bound_state

BETA = 0.1


def well(x):
    return 0.5 * x**2 * (1 + BETA * x**2)


def main():
    grid = np.linspace(0.0, 2.0, 21)
    res = solve_hierarchy(well, 3, grid, max_order=4)
    print("E_i:", "  ".join(f"{e:+.10f}" for e in res.energies))

    for g in (10.0, 100.0):
        # V = g^2 well(r) in the solver's units
        prof = RadialPotential(lambda r, g=g: g * g * well(r), label=f"anharmonic g={g:g}")
        exact = solve_bound_state(prof, 0, 0).eigenvalue
        parts = [res.energy(g, k) for k in range(res.max_order + 1)]
        errs = "  ".join(f"{abs(p - exact):.1e}" for p in parts)
        print(f"g={g:5g}: numerical {exact:.10f}; |partial sum - numerical| by order: {errs}")

    x = np.linspace(0.1, 1.0, 10)
    for K in range(res.max_order + 1):
        r = np.max(np.abs(res.schrodinger_residual(50.0, well, x, K)))
        print(f"order {K}: max Schrodinger residual at g=50: {r:.2e}")

    # pure oscillator: every correction vanishes
    h = solve_hierarchy(lambda x: 0.5 * x**2, 3, grid, max_order=2)
    ref = solve_bound_state(power_law_profile(PowerLawPotential.harmonic(g=3.0)), 0, 0).eigenvalue
    print(f"oscillator g=3: hierarchy {h.energy(3.0):.12f}, numerical {ref:.12f}")


if __name__ == "__main__":
    main()
