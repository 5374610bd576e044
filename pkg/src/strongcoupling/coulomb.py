"""Exact Coulomb bound states from the order-by-order algebraic system.

Substituting ``R = P(rho) exp(-b0 rho)`` with ``P = sum_k a_k rho**k`` into the
reduced radial equation and matching powers of ``g`` gives

* ``b0**2 + 2 eps = 0``
* ``1 - b0 N = 0``
* ``(k(k+1) - L(L+1)) a_k + (2/N)(N-k) a_{k-1} = 0`` for ``0 < k < N``
* ``L(L+1) a_0 = 0``

so ``eps = -1/(2 N**2)``, ``b0 = 1/N`` and the ``a_k`` follow by recursion from
``a_L``. Coefficients are generated as exact rationals relative to ``a_L``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import AnalyticState, EnergySeries, QuantumNumbers

__all__ = [
    "NoCoulombStateError",
    "coulomb_energy",
    "coulomb_reduced_energy",
    "coefficient_ratios",
    "coulomb_coefficients",
    "coulomb_state",
    "coulomb_wavefunction",
    "coulomb_order_equations",
    "OrderResiduals",
    "RadialFunction",
]


class NoCoulombStateError(ValueError):
    pass


def _check_N(N):
    if int(N) != N or N < 1:
        raise ValueError(f"N must be an integer >= 1 (got {N!r})")


def coulomb_reduced_energy(N: int) -> Fraction:
    _check_N(N)
    return Fraction(-1, 2 * N * N)


def coulomb_energy(N: int, g: float = 1.0, m: float = 1.0) -> float:
    """``E_N = -g**4 m / (2 N**2)``."""
    _check_N(N)
    return -(g**4) * m / (2 * N * N)


def coefficient_ratios(N: int, L: int) -> list[Fraction]:
    """``a_L .. a_{N-1}`` in units of ``a_L`` (exact)."""
    _check_N(N)
    if L < 0:
        raise ValueError("L must be non-negative")
    if L >= N:
        raise NoCoulombStateError(
            f"no bound state for N={N}, L={L}: a_0..a_{N - 1} forced to zero"
        )
    ratios = [Fraction(1)]
    for k in range(L + 1, N):
        # k > L >= 0 keeps the denominator nonzero
        ratios.append(Fraction(2, N) * Fraction(N - k, L * (L + 1) - k * (k + 1)) * ratios[-1])
    return ratios


def _norm_integral(ratios, L, N) -> Fraction:
    # int_0^inf rho^(j+k+2) exp(-2 rho / N) drho = (j+k+2)! (N/2)^(j+k+3)
    total = Fraction(0)
    half_n = Fraction(N, 2)
    for i, ai in enumerate(ratios):
        for j, aj in enumerate(ratios):
            p = 2 * L + i + j + 2
            total += ai * aj * math.factorial(p) * half_n ** (p + 1)
    return total


def coulomb_coefficients(N: int, L: int) -> tuple[float, ...]:
    """Normalised ``a_L .. a_{N-1}`` with ``a_L > 0``.

    Normalisation is ``int R**2 rho**2 drho = 1`` in the reduced radius.
    """
    ratios = coefficient_ratios(N, L)
    a_L = 1.0 / math.sqrt(_norm_integral(ratios, L, N))
    return tuple(float(r) * a_L for r in ratios)


def coulomb_state(N: int, L: int, M: int = 0) -> AnalyticState:
    qn = QuantumNumbers(N, L, M)
    poly = coulomb_coefficients(N, L)
    energy = EnergySeries(g_power=Fraction(4), coefficients=(float(coulomb_reduced_energy(N)),))
    return AnalyticState(qn=qn, b0=1.0 / N, poly=poly, energy=energy, norm=poly[0])


@dataclass(frozen=True)
class RadialFunction:
    """``R(r) = sum_k a_k (g**2 m r)**k exp(-b0 g**2 m r)``, unit-normalised in ``r``.

    Call with physical radii; ``reduced`` works in ``rho = g**2 m r`` and is
    normalised with ``rho**2 drho``.
    """

    state: AnalyticState
    g: float = 1.0
    m: float = 1.0

    @property
    def _scale(self):
        return self.g**2 * self.m

    def _poly(self):
        # numpy polynomial in ascending order
        return np.polynomial.Polynomial(self.state.full_coefficients)

    def reduced(self, rho, derivative: int = 0):
        rho = np.asarray(rho, dtype=float)
        b = self.state.b0
        P = self._poly()
        e = np.exp(-b * rho)
        if derivative == 0:
            return P(rho) * e
        if derivative == 1:
            return (P.deriv()(rho) - b * P(rho)) * e
        if derivative == 2:
            return (P.deriv(2)(rho) - 2 * b * P.deriv()(rho) + b * b * P(rho)) * e
        raise ValueError("derivative must be 0, 1 or 2")

    def __call__(self, r):
        s = self._scale
        return s**1.5 * self.reduced(s * np.asarray(r, dtype=float))

    def S(self, r):
        """Exponent of the decaying factor, ``b0 g**2 m r``."""
        return self.state.b0 * self._scale * np.asarray(r, dtype=float)

    def ode_residual(self, rho):
        """Residual of ``R'' + 2R'/rho + 2(eps + 1/rho)R - L(L+1)R/rho**2`` in reduced units."""
        rho = np.asarray(rho, dtype=float)
        L = self.state.qn.L
        eps = self.state.energy.reduced(0.0)
        R0, R1, R2 = (self.reduced(rho, d) for d in range(3))
        return R2 + 2 * R1 / rho + 2 * (eps + 1 / rho) * R0 - L * (L + 1) * R0 / rho**2


def coulomb_wavefunction(state: AnalyticState, pot=None) -> RadialFunction:
    """Radial evaluator for ``state``; ``pot`` supplies ``g`` and ``m`` (defaults 1)."""
    g = getattr(pot, "g", 1.0)
    m = getattr(pot, "m", 1.0)
    return RadialFunction(state, g, m)


@dataclass(frozen=True)
class OrderResiduals:
    energy: float  # b0**2 m + 2 eps
    slope: float  # 1 - b0 N
    recursion: tuple[float, ...]  # one per 0 < k < N
    origin: float  # L(L+1) a_0

    def max_abs(self) -> float:
        return max([abs(self.energy), abs(self.slope), abs(self.origin), *map(abs, self.recursion)])


def coulomb_order_equations(
    N: int,
    L: int,
    *,
    coefficients=None,
    b0: float | None = None,
    eps: float | None = None,
    m: float = 1.0,
) -> OrderResiduals:
    """Residuals of the four lines of the order-by-order system.

    ``eps`` here is ``E/g**4`` (so carries ``m``). Defaults come from the
    constructed state; pass overrides to probe corrupted inputs. The
    recursion line is scaled by ``1/max|a_k|``.
    """
    state = coulomb_state(N, L)
    a = np.asarray(state.full_coefficients if coefficients is None else coefficients, dtype=float)
    if a.size != N:
        raise ValueError("coefficients must hold a_0 .. a_{N-1}")
    b0 = state.b0 if b0 is None else b0
    eps = m * float(coulomb_reduced_energy(N)) if eps is None else eps
    scale = np.max(np.abs(a))
    rec = tuple(
        ((k * (k + 1) - L * (L + 1)) * a[k] + (2.0 / N) * (N - k) * a[k - 1]) / scale
        for k in range(1, N)
    )
    return OrderResiduals(
        energy=b0 * b0 * m + 2 * eps,
        slope=1 - b0 * N,
        recursion=rec,
        origin=L * (L + 1) * a[0] / scale,
    )
