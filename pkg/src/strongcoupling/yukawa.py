"""Low-lying Yukawa states from the screened-Coulomb expansion.

Everything is controlled by ``lam = alpha / (g**2 m)``. In reduced units
(``rho = g**2 m r``, ``eps_hat = E / (g**4 m)``):

ground state (third order in ``lam``)::

    eps_hat = -1/2 + lam - 3/4 lam**2 + 1/2 lam**3
    S(rho)  = rho + lam * int_0^rho [(1 - exp(-lam t)) / (lam t) - 1] dt

``N = 2``, ``L = 0, 1`` (first order)::

    eps_hat = -(1/8) [1 - lam (L**2 + L + 6)]
    P(rho)  = a0 [(1 - L) - (1 - exp(-lam rho)) / (2 lam)]
    S(rho)  = rho/2 + lam * int_0^rho [(1 - 2e^{-x})/x + e^{-x}/(1 - e^{-x}) - (L**2+L+6)/4] dt,  x = lam t
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.integrate import quad

from .core import AnalyticState, EnergySeries, GridState, ScreenedPotential
from .coulomb import coulomb_energy, coulomb_state, coulomb_wavefunction
from .oracle import NoBoundStateError, SolverConfig, solve_bound_state, yukawa_profile

__all__ = [
    "GROUND_COEFFICIENTS",
    "SeriesOrderError",
    "yukawa_ground_energy",
    "yukawa_ground_S",
    "ground_S_correction",
    "ScreenedRadialFunction",
    "analytic_energy",
    "yukawa_excited_energy",
    "yukawa_excited_wavefunction",
    "ground_S_integrand",
    "excited_S_integrand",
    "YukawaGroundState",
    "YukawaExcitedState",
    "ComparisonRow",
    "comparison_table",
    "STATES",
]

GROUND_COEFFICIENTS = (-0.5, 1.0, -0.75, 0.5)

# (N, L) per spectroscopic label
STATES = {"1s": (1, 0), "2s": (2, 0), "2p": (2, 1)}

_SMALL = 1e-3
# B_{2k} / (2k)! for k = 1..6
_BERNOULLI_TERMS = (1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160, -691 / 1307674368000)


class SeriesOrderError(ValueError):
    pass


# -- integrands ------------------------------------------------------------


def _one_minus_exp_over_x(x):
    """``(1 - exp(-x)) / x``, exact at small ``x``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < _SMALL
    xs = x[small]
    out[small] = 1 - xs / 2 + xs**2 / 6 - xs**3 / 24 + xs**4 / 120
    xl = x[~small]
    out[~small] = -np.expm1(-xl) / xl
    return out


def _bose_minus_pole(x):
    """``1/(e**x - 1) - 1/x``; the two poles cancel analytically."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    # the direct difference loses ~1/x digits, so use the Bernoulli series
    # (radius 2 pi) up to x = 1/2 where the truncation error is below 1e-15
    small = np.abs(x) < 0.5
    xs = x[small]
    out[small] = -0.5 + xs * np.polynomial.polynomial.polyval(xs * xs, _BERNOULLI_TERMS)
    xl = x[~small]
    out[~small] = 1 / np.expm1(xl) - 1 / xl
    return out


def ground_S_integrand(x):
    """``(1 - e^{-x})/x - 1``; bounded, vanishes at ``x = 0``."""
    return _one_minus_exp_over_x(x) - 1.0


def excited_S_integrand(x, L: int):
    """``(1 - 2e^{-x})/x + e^{-x}/(1 - e^{-x}) - (L**2+L+6)/4``.

    Rewritten as ``2(1 - e^{-x})/x + [1/(e^x - 1) - 1/x] - c`` so the
    ``-1/x`` and ``+1/x`` singular pieces never meet in floating point.
    The ``x -> 0`` limit is ``3/2 - (L**2+L+6)/4``.
    """
    return 2 * _one_minus_exp_over_x(x) + _bose_minus_pole(x) - (L * L + L + 6) / 4


def _cumulative(f, rho):
    """``int_0^rho f(t) dt`` for each entry of ``rho`` by piecewise adaptive quadrature."""
    rho = np.asarray(rho, dtype=float)
    flat = rho.ravel()
    order = np.argsort(flat)
    out = np.empty_like(flat)
    acc, prev = 0.0, 0.0
    g = lambda t: float(f(np.array([t]))[0])  # noqa: E731
    for i in order:
        x = flat[i]
        if x < 0:
            raise ValueError("radius must be non-negative")
        if x > prev:
            acc += quad(g, prev, x, epsabs=0.0, epsrel=1e-12, limit=200)[0]
            prev = x
        out[i] = acc
    return out.reshape(rho.shape) if rho.ndim else float(out[0])


# -- energies --------------------------------------------------------------


def _lam(pot: ScreenedPotential | float) -> float:
    return pot.lam if isinstance(pot, ScreenedPotential) else float(pot)


def _gm(pot):
    if isinstance(pot, ScreenedPotential):
        return pot.g, pot.m
    return 1.0, 1.0


def ground_energy_series(order: int = 3) -> EnergySeries:
    if not 0 <= order <= 3:
        raise SeriesOrderError("series known only to third order")
    return EnergySeries(Fraction(4), GROUND_COEFFICIENTS[: order + 1])


def yukawa_ground_energy(pot: ScreenedPotential | float, order: int = 3) -> float:
    """Ground energy ``g**4 m * (-1/2 + lam - 3/4 lam**2 + 1/2 lam**3)`` truncated at ``order``.

    A bare float is taken as ``lam`` and gives the reduced energy.
    """
    lam = _lam(pot)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    g, m = _gm(pot)
    return ground_energy_series(order)(lam, g, m)


def excited_energy_series(L: int, order: int = 1) -> EnergySeries:
    if L not in (0, 1):
        raise ValueError("N=2 series defined for L=0,1 only")
    if not 0 <= order <= 1:
        raise SeriesOrderError("excited-state series known only to first order")
    coeffs = (-1 / 8, (L * L + L + 6) / 8)
    return EnergySeries(Fraction(4), coeffs[: order + 1])


def yukawa_excited_energy(pot: ScreenedPotential | float, L: int, order: int = 1) -> float:
    """``-(g**4 m / 8) [1 - lam (L**2 + L + 6)]`` truncated at ``order``."""
    lam = _lam(pot)
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    g, m = _gm(pot)
    return excited_energy_series(L, order)(lam, g, m)


# -- wavefunctions ---------------------------------------------------------


def yukawa_ground_S(pot: ScreenedPotential, r, order: int = 1):
    """``S = g**2 m (r + lam I(r))`` with ``I(r) = int_0^r [(1 - e^{-alpha r'})/(alpha r') - 1] dr'``."""
    if order not in (0, 1):
        raise SeriesOrderError("S is known to first order in lambda")
    rho = pot.g**2 * pot.m * np.asarray(r, dtype=float)
    if order == 0 or pot.alpha == 0:
        return rho if rho.ndim else float(rho)
    lam = pot.lam
    return rho + lam * _cumulative(lambda t: ground_S_integrand(lam * t), rho)


def ground_S_correction(pot: ScreenedPotential, r):
    """``I(r)`` in physical length units."""
    if pot.alpha == 0:
        return np.zeros_like(np.asarray(r, dtype=float))
    a = pot.alpha
    return _cumulative(lambda t: ground_S_integrand(a * t), r)


@dataclass(frozen=True)
class YukawaGroundState:
    pot: ScreenedPotential
    energy: EnergySeries = field(default_factory=ground_energy_series)

    def S_correction(self, r):
        return ground_S_correction(self.pot, r)

    def S(self, r):
        return yukawa_ground_S(self.pot, r)

    def energy_value(self, order: int = 3) -> float:
        return yukawa_ground_energy(self.pot, order)

    def wavefunction(self) -> "ScreenedRadialFunction":
        return ScreenedRadialFunction(self.pot, prefactor=None, exponent=self._reduced_S)

    def _reduced_S(self, rho):
        lam = self.pot.lam
        if lam == 0:
            return np.asarray(rho, dtype=float)
        return rho + lam * _cumulative(lambda t: ground_S_integrand(lam * t), rho)


class ScreenedRadialFunction:
    """``R = P(rho) exp(-S(rho))`` normalised with ``rho**2 drho`` in reduced units.

    At ``lam = 0`` evaluation is delegated to the exact Coulomb evaluator.
    """

    def __init__(self, pot: ScreenedPotential, prefactor, exponent, coulomb=(1, 0)):
        self.pot = pot
        self._P = prefactor
        self._S = exponent
        self._coulomb = None
        if pot.lam == 0:
            self._coulomb = coulomb_wavefunction(coulomb_state(*coulomb), pot)
            self.norm = self._coulomb.state.norm
            return
        self.norm = 1.0
        self.norm = 1.0 / math.sqrt(self._norm_integral())

    def _raw(self, rho):
        rho = np.asarray(rho, dtype=float)
        P = 1.0 if self._P is None else self._P(rho)
        return P * np.exp(-self._S(rho))

    def _norm_integral(self):
        f = lambda t: float(self._raw(np.array([t]))[0] ** 2 * t * t)  # noqa: E731
        total, edge = 0.0, 0.0
        for upper in (5.0, 20.0, 60.0, 200.0, np.inf):
            total += quad(f, edge, upper, epsabs=0.0, epsrel=1e-11, limit=400)[0]
            edge = upper
        return total

    def reduced(self, rho):
        if self._coulomb is not None:
            return self._coulomb.reduced(rho)
        return self.norm * self._raw(rho)

    def __call__(self, r):
        s = self.pot.g**2 * self.pot.m
        return s**1.5 * self.reduced(s * np.asarray(r, dtype=float))


@dataclass(frozen=True)
class YukawaExcitedState:
    """``N = 2`` state with the intermediate profiles exposed for inspection."""

    pot: ScreenedPotential
    L: int

    def __post_init__(self):
        if self.L not in (0, 1):
            raise ValueError("N=2 series defined for L=0,1 only")

    @property
    def energy(self) -> EnergySeries:
        return excited_energy_series(self.L)

    # leading and next-to-leading pieces, physical units
    @property
    def E0(self) -> float:
        return -self.pot.m / 8

    @property
    def dS0_dr(self) -> float:
        return self.pot.m / 2

    @property
    def E1(self) -> float:
        return (6 + self.L * (self.L + 1)) * self.pot.alpha / 8

    @property
    def b0_val(self) -> float:
        return 1.0 - self.L

    def b1(self, r):
        """``-(m / 2 alpha)(1 - e^{-alpha r})``; tends to ``-m r / 2`` as ``alpha -> 0``."""
        r = np.asarray(r, dtype=float)
        if self.pot.alpha == 0:
            return -self.pot.m * r / 2
        return -self.pot.m / (2 * self.pot.alpha) * -np.expm1(-self.pot.alpha * r)

    def P_shape(self, rho):
        """``(1 - L) - (1 - e^{-lam rho}) / (2 lam)`` (``a0 = 1``)."""
        rho = np.asarray(rho, dtype=float)
        lam = self.pot.lam
        return self.b0_val - 0.5 * rho * _one_minus_exp_over_x(lam * rho)

    def S_reduced(self, rho):
        lam, L = self.pot.lam, self.L
        rho = np.asarray(rho, dtype=float)
        return 0.5 * rho + lam * _cumulative(lambda t: excited_S_integrand(lam * t, L), rho)

    def node(self) -> float | None:
        """Reduced radius of the ``L = 0`` node, ``-ln(1 - 2 lam) / lam``."""
        lam = self.pot.lam
        if self.L != 0 or lam >= 0.5:
            return None
        return -math.log1p(-2 * lam) / lam

    def energy_value(self, order: int = 1) -> float:
        return yukawa_excited_energy(self.pot, self.L, order)


def yukawa_excited_wavefunction(pot: ScreenedPotential, L: int) -> ScreenedRadialFunction:
    """Normalised ``R = P e^{-S}``; ``a0`` has the sign that makes ``R > 0`` near the origin."""
    if L not in (0, 1):
        raise ValueError("N=2 series defined for L=0,1 only")
    if pot.lam == 0:
        raise ValueError("lambda = 0: use the exact Coulomb N=2 state")
    st = YukawaExcitedState(pot, L)
    sign = 1.0 if L == 0 else -1.0
    return ScreenedRadialFunction(pot, lambda rho: sign * st.P_shape(rho), st.S_reduced)


# -- comparison with the numerical solver ----------------------------------


@dataclass(frozen=True)
class ComparisonRow:
    lam: float
    state: str
    analytic: float
    oracle: float | None
    coulomb: float
    deviation: float | None
    coulomb_deviation: float | None
    note: str = ""


def analytic_energy(state: str, lam: float) -> float:
    N, L = STATES[state]
    if N == 1:
        return yukawa_ground_energy(lam, 3)
    return yukawa_excited_energy(lam, L, 1)


def comparison_table(
    lambda_list: Sequence[float],
    states: Sequence[str] = ("1s", "2s", "2p"),
    cfg: SolverConfig | None = None,
    oracle=solve_bound_state,
) -> list[ComparisonRow]:
    """Reduced energies (units of ``g**4 m``) per ``(lam, state)``, ordered by input.

    Deviations are ``|x - oracle| / |oracle|``. A missing bound state leaves
    the oracle columns empty and is noted in the row.
    """
    for s in states:
        if s not in STATES:
            raise ValueError(f"unknown state {s!r}; choose from {sorted(STATES)}")
    rows = []
    for lam in lambda_list:
        for s in states:
            N, L = STATES[s]
            a = analytic_energy(s, lam)
            c = coulomb_energy(N)
            try:
                gs: GridState = oracle(yukawa_profile(lam), L, N - L - 1, cfg)
            except NoBoundStateError:
                rows.append(ComparisonRow(lam, s, a, None, c, None, None, "no bound state"))
                continue
            o = gs.eigenvalue
            rows.append(ComparisonRow(lam, s, a, o, c, abs(a - o) / abs(o), abs(c - o) / abs(o)))
    return rows
