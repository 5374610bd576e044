import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strongcoupling.hierarchy import (
    RegularityError,
    solve_hierarchy,
    solve_order0,
    solve_order1,
    solve_order_k,
)
from strongcoupling.oracle import RadialPotential, cross_validate

GRID = np.linspace(0.0, 2.0, 41)


def osc1d(m=1.0):
    return lambda x: m**3 * x**2


def osc3d(m=1.0):
    return lambda r: 0.5 * m**3 * r**2


def anharmonic(beta, c=1.0):
    return lambda x: c * x**2 * (1 + beta * x**2)


class TestOrder0:
    @pytest.mark.parametrize("m", [1.0, 1.7])
    def test_1d_oscillator(self, m):
        S0 = solve_order0(osc1d(m), 1, GRID, m=m)
        np.testing.assert_allclose(S0, m**2 * GRID**2 / math.sqrt(2), rtol=1e-13, atol=1e-15)
        assert S0[0] == 0.0 and np.all(np.diff(S0) > 0)

    def test_zero_potential(self):
        assert np.all(solve_order0(lambda x: 0 * x, 1, GRID) == 0.0)

    def test_3d_oscillator(self):
        np.testing.assert_allclose(solve_order0(osc3d(), 3, GRID), GRID**2 / 2, rtol=1e-13, atol=1e-15)

    @pytest.mark.parametrize(
        "v,msg",
        [
            (lambda x: x**2 - 0.5 * x, "nonnegative"),
            (lambda x: x**2 + 1.0, "v\\(0\\) = 0"),
            (lambda x: 1.0 / x, "singular"),
        ],
    )
    def test_rejections(self, v, msg):
        with pytest.raises(ValueError, match=msg):
            solve_hierarchy(v, 1, GRID)

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            solve_order0(osc1d(), 1, np.array([0.0, 1.0, 0.5]))
        with pytest.raises(ValueError):
            solve_hierarchy(osc1d(), 2, GRID)


class TestOrder1:
    def test_1d_oscillator(self):
        E0, S1 = solve_order1(osc1d(), 1, GRID)
        assert E0 == pytest.approx(1 / math.sqrt(2), rel=1e-14)
        assert np.abs(S1).max() < 1e-10

    @pytest.mark.parametrize("m", [1.0, 2.5])
    def test_3d_oscillator(self, m):
        E0, S1 = solve_order1(osc3d(m), 3, GRID, m=m)
        assert E0 == pytest.approx(1.5 * m, rel=1e-13)
        assert np.abs(S1).max() < 1e-10

    def test_quartic_minimum_is_not_regular(self):
        with pytest.raises(RegularityError, match="regularity condition unattainable"):
            solve_order1(lambda x: x**4, 1, GRID)

    def test_kink_is_not_regular(self):
        with pytest.raises(RegularityError):
            solve_hierarchy(lambda x: np.abs(x) ** 3, 3, GRID)


class TestHigherOrders:
    @pytest.mark.parametrize("dim,v", [(1, osc1d()), (3, osc3d())])
    def test_harmonic_orders_vanish(self, dim, v):
        res = solve_hierarchy(v, dim, GRID, max_order=4)
        for i in range(1, 5):
            assert abs(res.orders[i].E) < 1e-10
            assert np.abs(res.S_samples(i)).max() < 1e-10
        assert max(res.regularity_residuals) < 1e-12

    def test_order_k_entry_point(self):
        res = solve_hierarchy(osc1d(), 1, GRID, max_order=2)
        E1, S2 = solve_order_k(res, 2)
        assert abs(E1) < 1e-10 and np.abs(S2).max() < 1e-10
        with pytest.raises(ValueError):
            solve_order_k(res, 5)

    @pytest.mark.parametrize("dim,moment", [(1, 3 / 8), (3, 15 / 8)])
    def test_first_correction_matches_perturbation_theory(self, dim, moment):
        # v = x^2 (1 + beta x^2): omega = sqrt(2) g, E1 = beta <x^4> g^2
        beta = 0.3
        res = solve_hierarchy(anharmonic(beta), dim, np.linspace(0, 1, 21), max_order=1)
        assert res.orders[0].E == pytest.approx(dim / math.sqrt(2), rel=1e-12)
        assert res.orders[1].E == pytest.approx(moment * beta, rel=1e-9)

    def test_residual_decay(self):
        v = anharmonic(0.5)
        res = solve_hierarchy(v, 3, np.linspace(0, 1, 101), max_order=3)
        rates = []
        for K in range(4):
            r10 = np.abs(res.schrodinger_residual(10.0, v, order=K)).max()
            r100 = np.abs(res.schrodinger_residual(100.0, v, order=K)).max()
            rates.append(math.log10(r10 / r100))
        # one extra power of 1/g per order, starting from g^1 at K = 0
        np.testing.assert_allclose(rates, [-1, 0, 1, 2], atol=0.02)

    def test_S_nonnegative_and_increasing(self):
        res = solve_hierarchy(anharmonic(0.5), 3, np.linspace(0, 1, 51), max_order=2)
        S0 = res.S_samples(0)
        assert S0[0] == 0.0 and np.all(np.diff(S0) > 0)
        assert all(o.S(0.0) == pytest.approx(0.0, abs=1e-15) for o in res.orders)

    @settings(max_examples=15)
    @given(beta=st.floats(0.0, 1.0), c=st.floats(0.2, 3.0))
    def test_regular_for_smooth_wells(self, beta, c):
        res = solve_hierarchy(anharmonic(beta, c), 3, np.linspace(0, 1, 11), max_order=3)
        assert all(math.isfinite(E) for E in res.energies)
        assert max(res.regularity_residuals) < 1e-8
        assert res.orders[0].E == pytest.approx(3 * math.sqrt(c / 2), rel=1e-12)


@pytest.mark.slow
class TestAgainstOracle:
    def test_3d_oscillator_energy(self):
        res = solve_hierarchy(osc3d(), 3, GRID, max_order=2)
        for g in (1.0, 3.0):
            cc = cross_validate(RadialPotential(lambda x, g=g: g * g * osc3d()(x), np.inf, f"osc g={g}"), 0, 0)
            assert res.energy(g) == pytest.approx(cc.eigenvalue, rel=1e-6)

    def test_leading_order_limit_and_partial_sums(self):
        beta = 0.2
        v = anharmonic(beta, 0.5)
        res = solve_hierarchy(v, 3, np.linspace(0, 1, 11), max_order=4)
        lead = []
        for g in (10.0, 100.0):
            E = cross_validate(RadialPotential(lambda x, g=g: g * g * v(x), np.inf, f"anh g={g}"), 0, 0).eigenvalue
            lead.append(abs(E / g - res.orders[0].E))
            if g == 100.0:
                errs = [abs(res.energy(g, K) - E) for K in range(5)]
                assert all(b < a for a, b in zip(errs, errs[1:]))
                assert errs[-1] < 1e-7
        assert lead[1] < lead[0] / 5
