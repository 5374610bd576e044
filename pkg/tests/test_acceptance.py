"""Acceptance criteria, one test each.

Every test measures its own runtime, appends a PASS/FAIL line to the
terminal summary and prints it, then asserts. Tolerances are the stated
ones; nothing here is tuned to make a criterion pass.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

import conftest
from strongcoupling.core import PowerLawPotential, QuantumNumbers, ScreenedPotential
from strongcoupling.coulomb import (
    coefficient_ratios,
    coulomb_energy,
    coulomb_order_equations,
    coulomb_state,
    coulomb_wavefunction,
)
from strongcoupling.hierarchy import solve_hierarchy
from strongcoupling.oracle import (
    coulomb_profile,
    cross_validate,
    expectation_value,
    power_law_profile,
    solve_bound_state,
    yukawa_profile,
)
from strongcoupling.scaling import check_radius_mapping, g_factor_exponent, verify_factorization
from strongcoupling.yukawa import (
    YukawaExcitedState,
    YukawaGroundState,
    comparison_table,
    excited_energy_series,
    ground_energy_series,
    yukawa_excited_energy,
    yukawa_ground_energy,
    yukawa_ground_S,
)

pytestmark = pytest.mark.acceptance

# states whose eigenvalues enter criteria 2-7; reused by criterion 9
COULOMB_STATES = [(N, L) for N in range(1, 5) for L in range(N)]
HARMONIC_G = (1.0, 2.0, 5.0)
YUKAWA_1S = (0.05, 0.1, 0.2, 1 / 3)
YUKAWA_2S = (0.005, 0.01, 0.02, 1 / 30)
YUKAWA_2P = (0.005, 0.01, 0.02, 1 / 30, 0.05)
SCALING_POTENTIALS = [(2, -1), (2, 1), (2, 2)]
SCALING_G = (1.0, 2.0, 5.0)
DEGENERACY_LAMBDAS = tuple(np.linspace(0.005, 0.02, 7))


def report(number, title, ok, detail, elapsed, limit=None):
    timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit else "")
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  [{detail}; {timing}]"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_coulomb_exactness():
    t0 = time.perf_counter()
    worst_energy = 0.0
    worst_residual = 0.0
    for g, m in [(1.0, 1.0), (0.7, 2.5), (3.0, 0.1)]:
        for N in range(1, 7):
            exact = -(Fraction(g) ** 4) * Fraction(m) / (2 * N * N)
            E = coulomb_energy(N, g, m)
            worst_energy = max(worst_energy, abs(Fraction(E) - exact) / abs(exact))
            for L in range(N):
                res = coulomb_order_equations(N, L, m=m)
                worst_residual = max(worst_residual, res.max_abs())
    elapsed = time.perf_counter() - t0
    ok = worst_energy <= 2 * np.finfo(float).eps and worst_residual < 1e-14 and elapsed < 1.0
    report(1, "Coulomb exactness N<=6", ok,
           f"max rel energy err {float(worst_energy):.1e}, max order residual {worst_residual:.1e}", elapsed, 1)


def test_criterion_2_coulomb_vs_oracle():
    t0 = time.perf_counter()
    worst_dev, worst_ode = 0.0, 0.0
    rho = np.linspace(1e-3, 80, 4000)
    for N, L in COULOMB_STATES:
        st = coulomb_state(N, L)
        eps = float(st.energy.reduced(0.0))
        oracle = solve_bound_state(coulomb_profile(), L, N - L - 1).eigenvalue
        worst_dev = max(worst_dev, abs(eps - oracle) / abs(oracle))
        f = coulomb_wavefunction(st)
        peak = np.max(np.abs(f.reduced(rho)))
        worst_ode = max(worst_ode, np.max(np.abs(f.ode_residual(rho))) / peak)
    elapsed = time.perf_counter() - t0
    ok = worst_dev < 1e-6 and worst_ode < 1e-10 and elapsed < 30
    report(2, "Coulomb analytic vs oracle N<=4", ok,
           f"max rel dev {worst_dev:.1e}, max ODE residual/peak {worst_ode:.1e}", elapsed, 30)


def test_criterion_3_harmonic_hierarchy():
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 3.0, 31)
    worst_1d = S1 = E1 = 0.0
    for m in (1.0, 2.0):
        res = solve_hierarchy(lambda x, m=m: m**3 * x**2, 1, grid, max_order=1, m=m)
        worst_1d = max(worst_1d, abs(res.orders[0].E - m / math.sqrt(2)) / m)
        S1 = max(S1, np.max(np.abs(res.S_samples(1))))
        E1 = max(E1, abs(res.orders[1].E))
    res3 = solve_hierarchy(lambda x: 0.5 * x**2, 3, grid, max_order=2)
    worst_3d = 0.0
    for g in HARMONIC_G:
        oracle = solve_bound_state(power_law_profile(PowerLawPotential.harmonic(g=g)), 0, 0).eigenvalue
        worst_3d = max(worst_3d, abs(res3.energy(g) - oracle) / oracle, abs(1.5 * g - oracle) / oracle)
    elapsed = time.perf_counter() - t0
    ok = worst_1d < 1e-12 and S1 < 1e-10 and E1 < 1e-10 and worst_3d < 1e-6 and elapsed < 10
    report(3, "harmonic hierarchy 1D and 3D", ok,
           f"1D E0 rel err {worst_1d:.1e}, |S1| {S1:.1e}, |E1| {E1:.1e}, 3D rel dev {worst_3d:.1e}", elapsed, 10)


def _deviations(lams, state):
    rows = comparison_table(list(lams), [state])
    return {r.lam: r.deviation for r in rows}


def test_criterion_4_yukawa_1s_band():
    t0 = time.perf_counter()
    dev = _deviations(YUKAWA_1S, "1s")
    elapsed = time.perf_counter() - t0
    worst = max(dev.values())
    ok = worst < 0.025 and elapsed < 60
    detail = ", ".join(f"lam={lam:.4g}: {d:.2%}" for lam, d in dev.items())
    report(4, "Yukawa 1s order-3 deviation < 2.5%", ok, detail, elapsed, 60)


def test_criterion_5_yukawa_excited_bands():
    t0 = time.perf_counter()
    dev_2s = _deviations(YUKAWA_2S, "2s")
    dev_2p = _deviations(YUKAWA_2P, "2p")
    elapsed = time.perf_counter() - t0
    failing = [f"2s lam={lam:.4g}" for lam, d in dev_2s.items() if not d < 0.05]
    failing += [f"2p lam={lam:.4g}" for lam, d in dev_2p.items() if not d < 0.05]
    ok = not failing and elapsed < 120
    detail = "2s " + ", ".join(f"{lam:.4g}: {d:.2%}" for lam, d in dev_2s.items())
    detail += "; 2p " + ", ".join(f"{lam:.4g}: {d:.2%}" for lam, d in dev_2p.items())
    if failing:
        detail += "; over 5%: " + ", ".join(failing)
    report(5, "Yukawa 2s/2p first-order deviation < 5%", ok, detail, elapsed, 120)


def test_criterion_6_scaling_law():
    t0 = time.perf_counter()
    worst_spread, worst_map = 0.0, 0.0
    qn = QuantumNumbers(1, 0)
    for k, n in SCALING_POTENTIALS:
        pot = PowerLawPotential(k, n)
        rep = verify_factorization(pot, qn, SCALING_G)
        assert rep.exponent == Fraction(2 * k, n + 2) == g_factor_exponent(pot)
        worst_spread = max(worst_spread, rep.spread)
        for g1, g2 in zip(SCALING_G, SCALING_G[1:]):
            worst_map = max(worst_map, check_radius_mapping(pot, qn, g1, g2).max_abs_diff)
    elapsed = time.perf_counter() - t0
    ok = worst_spread < 1e-5 and worst_map < 1e-8
    report(6, "coupling factorization and radius mapping", ok,
           f"max spread {worst_spread:.1e}, max mapped |dR| {worst_map:.1e}", elapsed)


def test_criterion_7_degeneracy():
    t0 = time.perf_counter()
    coulomb_exact = all(
        len({coulomb_state(N, L).energy.coefficients for L in range(N)}) == 1 for N in range(1, 7)
    )
    splitting = excited_energy_series(1).coefficients[1] - excited_energy_series(0).coefficients[1]
    worst_split = max(
        abs((yukawa_excited_energy(lam, 1) - yukawa_excited_energy(lam, 0)) - 2 * lam / 8)
        for lam in DEGENERACY_LAMBDAS + YUKAWA_2P
    )
    gaps = []
    for lam in DEGENERACY_LAMBDAS:
        e2s = solve_bound_state(yukawa_profile(lam), 0, 1).eigenvalue
        e2p = solve_bound_state(yukawa_profile(lam), 1, 0).eigenvalue
        gaps.append(e2p - e2s)
    elapsed = time.perf_counter() - t0
    ok = coulomb_exact and splitting == 2 / 8 and worst_split < 1e-15 and min(gaps) > 0
    report(7, "Coulomb L-degeneracy and Yukawa 2s/2p splitting", ok,
           f"Coulomb L-independent {coulomb_exact}, first-order coefficient gap {splitting:g}, "
           f"max |split - lam/4| {worst_split:.1e}, min oracle E(2p)-E(2s) {min(gaps):.2e}", elapsed)


def test_criterion_8_lambda_zero_limit():
    t0 = time.perf_counter()
    pot = ScreenedPotential(1.0, 0.0)
    rho = np.linspace(0.0, 40.0, 401)
    checks = {}
    checks["ground energy"] = all(yukawa_ground_energy(pot, k) == coulomb_energy(1) for k in range(4))
    checks["excited energy"] = all(yukawa_excited_energy(pot, L, k) == coulomb_energy(2) for L in (0, 1) for k in (0, 1))
    checks["series at 0"] = (
        ground_energy_series().reduced(0.0) == float(Fraction(-1, 2))
        and all(excited_energy_series(L).reduced(0.0) == float(Fraction(-1, 8)) for L in (0, 1))
    )
    coul1 = coulomb_wavefunction(coulomb_state(1, 0), pot)
    checks["ground S"] = np.array_equal(yukawa_ground_S(pot, rho), coul1.S(rho))
    checks["ground R"] = np.array_equal(YukawaGroundState(pot).wavefunction()(rho), coul1(rho))
    for L in (0, 1):
        st = YukawaExcitedState(pot, L)
        ratios = [float(a) for a in coefficient_ratios(2, L)]
        shape = np.polynomial.Polynomial([0.0] * L + ratios)(rho)
        P = st.P_shape(rho)
        lead = P[1] / rho[1] if L else P[0]  # leading coefficient, a power of two
        checks[f"2{'sp'[L]} shape"] = np.array_equal(P / lead, shape)
        checks[f"2{'sp'[L]} S"] = np.array_equal(st.S_reduced(rho), coulomb_state(2, L).b0 * rho)
    rows = comparison_table([0.0], ["1s", "2s", "2p"])
    checks["table"] = all(r.analytic == r.coulomb for r in rows)
    elapsed = time.perf_counter() - t0
    bad = [k for k, v in checks.items() if not v]
    report(8, "lambda = 0 bitwise Coulomb limit", not bad,
           f"{len(checks) - len(bad)}/{len(checks)} quantities identical" + (f", differing: {bad}" if bad else ""),
           elapsed)


def _criterion_9_cases():
    for N, L in COULOMB_STATES:
        yield f"coulomb N={N} L={L}", coulomb_profile(), L, N - L - 1, -1
    for g in HARMONIC_G:
        yield f"harmonic g={g:g}", power_law_profile(PowerLawPotential.harmonic(g=g)), 0, 0, 2
    for lam in YUKAWA_1S:
        yield f"1s lam={lam:.4g}", yukawa_profile(lam), 0, 0, None
    for lam in YUKAWA_2S:
        yield f"2s lam={lam:.4g}", yukawa_profile(lam), 0, 1, None
    for lam in sorted(set(YUKAWA_2P) | set(DEGENERACY_LAMBDAS)):
        yield f"2p lam={lam:.4g}", yukawa_profile(lam), 1, 0, None
    for lam in DEGENERACY_LAMBDAS:
        yield f"2s lam={lam:.4g}", yukawa_profile(lam), 0, 1, None
    for k, n in SCALING_POTENTIALS:
        for g in SCALING_G:
            yield f"k={k} n={n} g={g:g}", power_law_profile(PowerLawPotential(k, n, g=g)), 0, 0, n


def test_criterion_9_oracle_self_consistency():
    t0 = time.perf_counter()
    worst_route, worst_virial, count = 0.0, 0.0, 0
    where_route = where_virial = ""
    for label, prof, L, n_r, n in _criterion_9_cases():
        cc = cross_validate(prof, L, n_r)
        count += 1
        if cc.rel_diff > worst_route:
            worst_route, where_route = cc.rel_diff, label
        if n is not None:
            st = cc.shooting
            ratio = expectation_value(st, prof) / st.eigenvalue
            dev = abs(ratio - 2 / (n + 2)) / (2 / (n + 2))
            if dev > worst_virial:
                worst_virial, where_virial = dev, label
    elapsed = time.perf_counter() - t0
    ok = worst_route < 1e-7 and worst_virial < 1e-5
    report(9, "shooting vs matrix and virial ratio", ok,
           f"{count} eigenvalues, max route rel diff {worst_route:.1e} ({where_route}), "
           f"max virial dev {worst_virial:.1e} ({where_virial})", elapsed)
