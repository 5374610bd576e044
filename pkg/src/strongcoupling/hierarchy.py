"""Order-by-order solution of the strong-coupling hierarchy for ground states.

With ``psi = exp(-S)``, ``S = sum_i g**(1-i) S_i``, ``E = sum_i g**(1-i) E_i``
and ``V = g**2 v``, matching powers of ``g`` gives::

    S0'**2                 = 2 m v
    S0' S1'                = lap(S0)/2 - m E0
    S0' Sk'                = (lap(S_{k-1}) - sum_{i+j=k; i,j>=1} Si' Sj') / 2 - m E_{k-1}

``S0'`` vanishes at the minimum, so ``Sk'`` stays finite there only if the
right-hand side vanishes too; that fixes ``E_{k-1}``.

Profiles are taken as even in ``x`` (a radial profile, or a symmetric 1D
well), so every ``S_k'`` is odd and every right-hand side even. Derivatives
are held as Chebyshev series on ``[-X, X]`` with that parity imposed; the
removable ``0/0`` at the origin becomes polynomial division by ``x`` at the
centre of the interval, which is numerically stable.

Convention: ``S >= 0`` grows outward, so ``psi`` decays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial import Chebyshev

__all__ = [
    "RegularityError",
    "HierarchyOrder",
    "HierarchyResult",
    "solve_order0",
    "solve_order1",
    "solve_order_k",
    "solve_hierarchy",
]

_CHOP = 1e-15
_REG_TOL = 1e-8


class RegularityError(ValueError):
    pass


def _fit(f: Callable, X: float, parity: int, max_deg: int = 1024) -> Chebyshev:
    """Chebyshev interpolant of ``f`` on ``[-X, X]`` with parity ``0`` (even) or ``1`` (odd).

    The degree is doubled until the tail is negligible.
    """
    deg = 32
    while True:
        c = _parity(Chebyshev.interpolate(f, deg, domain=[-X, X]), parity)
        coef = np.abs(c.coef)
        scale = coef.max()
        if scale == 0:
            return Chebyshev([0.0], domain=[-X, X])
        if coef[-4:].max() <= 1e-13 * scale or deg >= max_deg:
            break
        deg *= 2
    if coef[-4:].max() > 1e-8 * scale:
        raise RegularityError("regularity condition unattainable: profile is not smooth at the minimum")
    return _chop(c)


def _parity(c: Chebyshev, parity: int) -> Chebyshev:
    coef = c.coef.copy()
    coef[1 - parity :: 2] = 0.0
    return Chebyshev(coef, domain=c.domain)


def _chop(c: Chebyshev) -> Chebyshev:
    coef = c.coef
    scale = np.abs(coef).max() if coef.size else 0.0
    if scale == 0:
        return Chebyshev([0.0], domain=c.domain)
    keep = np.nonzero(np.abs(coef) > _CHOP * scale)[0]
    return Chebyshev(coef[: keep[-1] + 1], domain=c.domain)


def _over_x(c: Chebyshev) -> Chebyshev:
    """``c / x`` for ``c`` odd (or even with ``c(0) = 0``)."""
    x = Chebyshev.identity(domain=c.domain)
    q, _ = divmod(c, x)
    return _chop(q)


def _laplacian(dS: Chebyshev, dim: int) -> Chebyshev:
    """Radial Laplacian from an odd ``S'``."""
    if dim == 1:
        return dS.deriv()
    return _chop(dS.deriv() + (dim - 1) * _over_x(dS))


def _scale(c: Chebyshev) -> float:
    return float(np.abs(c.coef).sum()) or 1.0


def _sample_S(S: Chebyshev, x) -> np.ndarray:
    # S_i(0) = 0 by construction; keep it exact rather than ~1e-16
    x = np.asarray(x, dtype=float)
    return np.where(x == 0.0, 0.0, S(x))


def _samples(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0) or grid[0] < 0:
        raise ValueError("grid must be a strictly increasing array of radii >= 0")
    return grid


@dataclass(frozen=True)
class HierarchyOrder:
    index: int
    dS: Chebyshev  # S_i'
    S: Chebyshev  # S_i with S_i(0) = 0
    E: float  # E_i (units of m)


@dataclass(frozen=True)
class _Base:
    """Leading-order data shared by all higher orders."""

    dS0: Chebyshev
    q: Chebyshev  # S0' / x, nonzero on [0, X]
    dim: int
    m: float


def _check_potential(v: Callable, X: float, m: float):
    probe = np.linspace(0.0, X, 4097)
    with np.errstate(all="ignore"):
        vals = np.asarray(v(probe), dtype=float)
    if not np.isfinite(vals[0]):
        raise ValueError("potential is singular at the origin; use the coulomb or yukawa solvers")
    if not np.all(np.isfinite(vals)):
        raise ValueError("potential must be finite on the grid")
    scale = np.abs(vals).max() or 1.0
    if vals.min() < -1e-14 * scale:
        raise ValueError("hierarchy requires nonnegative potential")
    if abs(vals[0]) > 1e-14 * scale:
        raise ValueError("hierarchy requires v(0) = 0 at the potential minimum")
    if not m > 0:
        raise ValueError("m must be positive")


def _slope0(v, m):
    # odd extension of sqrt(2 m v)
    def f(x):
        return np.sign(x) * np.sqrt(np.maximum(2 * m * np.asarray(v(np.abs(x)), dtype=float), 0.0))

    return f


def _order0(v: Callable, X: float, dim: int, m: float) -> _Base:
    if dim not in (1, 3):
        raise ValueError("dim must be 1 or 3")
    _check_potential(v, X, m)
    # v / x**2 must settle to a positive constant at the minimum
    h = np.array([1e-4, 1e-3]) * X
    curv = np.asarray(v(h), dtype=float) / h**2
    if not (curv[1] > 0 and 0.5 < curv[0] / curv[1] < 2.0):
        raise RegularityError(
            "regularity condition unattainable: minimum is not quadratic (harmonic-like potential required)"
        )
    dS0 = _fit(_slope0(v, m), X, 1)
    q = _over_x(dS0)
    probe = np.linspace(0.0, X, 4097)
    qv = q(probe)
    if qv.min() <= _REG_TOL * max(np.abs(qv).max(), 1e-300) or abs(q(0.0)) <= _REG_TOL * _scale(q):
        raise RegularityError(
            "regularity condition unattainable: S0' must vanish linearly only at the origin "
            "(harmonic-like minimum required)"
        )
    return _Base(dS0, q, dim, m)


def solve_order0(v: Callable, dim: int, grid, m: float = 1.0) -> np.ndarray:
    """``S0 = int_0^r sqrt(2 m v)`` sampled on ``grid``."""
    grid = _samples(grid)
    _check_potential(v, grid[-1], m)
    dS0 = _fit(_slope0(v, m), grid[-1], 1)
    return _sample_S(dS0.integ(lbnd=0.0), grid)


def _next_order(base: _Base, dS: list[Chebyshev], k: int) -> tuple[float, Chebyshev, float]:
    """``(E_{k-1}, S_k', residual)`` given ``dS = [S_0', ..., S_{k-1}']``."""
    rhs = 0.5 * _laplacian(dS[k - 1], base.dim)
    for i in range(1, k):
        rhs = rhs - 0.5 * dS[i] * dS[k - i]
    rhs = _chop(_parity(rhs, 0))
    E_prev = float(rhs(0.0)) / base.m
    num = rhs - base.m * E_prev
    num_over_x = _over_x(num)
    q = base.q
    X = float(q.domain[1])
    dSk = _fit(lambda x: num_over_x(x) / q(x), X, 1)
    # how well S0' Sk' = rhs - m E_{k-1} holds, origin included
    probe = np.linspace(0.0, X, 2049)
    scale = max(np.abs(rhs(probe)).max(), abs(base.m * E_prev), 1e-300)
    eq = np.abs(base.dS0(probe) * dSk(probe) - num(probe)).max() / scale
    return E_prev, dSk, float(eq)


def solve_order1(S0_or_v, dim: int, grid, m: float = 1.0):
    """``(E0, S1 samples)``. ``S0_or_v`` is the potential profile ``v``."""
    grid = _samples(grid)
    base = _order0(S0_or_v, grid[-1], dim, m)
    E0, dS1, res = _next_order(base, [base.dS0], 1)
    if res > _REG_TOL:
        raise RegularityError(f"regularity condition unattainable (residual {res:.2e})")
    return E0, _sample_S(dS1.integ(lbnd=0.0), grid)


def solve_order_k(result: "HierarchyResult", k: int):
    """``(E_{k-1}, S_k samples)`` from a result holding orders ``0..k-1``."""
    if not 1 <= k <= len(result.orders):
        raise ValueError(f"need orders 0..{k - 1} (have {len(result.orders)})")
    base = result._base
    E, dSk, res = _next_order(base, [o.dS for o in result.orders[:k]], k)
    if res > _REG_TOL:
        raise RegularityError(f"regularity condition unattainable (residual {res:.2e})")
    return E, _sample_S(dSk.integ(lbnd=0.0), result.grid)


@dataclass(frozen=True, eq=False)
class HierarchyResult:
    """Orders ``0..max_order`` of ``S`` and ``E``.

    ``orders[i].E`` is ``E_i``; it is fixed by the regularity of ``S_{i+1}``,
    which is solved but not stored. ``regularity_residuals[i]`` belongs to
    the step that produced ``E_i`` and ``S_{i+1}'``.
    """

    grid: np.ndarray
    dim: int
    m: float
    orders: tuple[HierarchyOrder, ...]
    regularity_residuals: tuple[float, ...]
    _base: _Base

    @property
    def max_order(self) -> int:
        return len(self.orders) - 1

    @property
    def energies(self) -> tuple[float, ...]:
        return tuple(o.E for o in self.orders)

    def S_samples(self, i: int) -> np.ndarray:
        return _sample_S(self.orders[i].S, self.grid)

    def energy(self, g: float, order: int | None = None) -> float:
        K = self.max_order if order is None else order
        return float(sum(g ** (1 - i) * self.orders[i].E for i in range(K + 1)))

    def _dS_total(self, g, K):
        total = 0.0 * self.orders[0].dS
        for i in range(K + 1):
            total = total + g ** (1 - i) * self.orders[i].dS
        return total

    def S(self, g: float, x=None, order: int | None = None):
        K = self.max_order if order is None else order
        x = self.grid if x is None else np.asarray(x, dtype=float)
        return sum(g ** (1 - i) * _sample_S(self.orders[i].S, x) for i in range(K + 1))

    def schrodinger_residual(self, g: float, v: Callable, x=None, order: int | None = None) -> np.ndarray:
        """``(H - E) psi / psi`` for the truncated ``S`` and ``E``, on ``x > 0``."""
        K = self.max_order if order is None else order
        x = self.grid[self.grid > 0] if x is None else np.asarray(x, dtype=float)
        dS = self._dS_total(g, K)
        lap = dS.deriv()(x) + (self.dim - 1) * dS(x) / x
        return -(dS(x) ** 2 - lap) / (2 * self.m) + g * g * np.asarray(v(x)) - self.energy(g, K)


def solve_hierarchy(v: Callable, dim: int, grid, max_order: int = 2, m: float = 1.0) -> HierarchyResult:
    """Solve orders ``0..max_order`` for the ground state of ``V = g**2 v``.

    ``v`` must be non-negative, vanish at the origin and be quadratic there.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    grid = _samples(grid)
    base = _order0(v, grid[-1], dim, m)
    dS = [base.dS0]
    energies, residuals = [], []
    for k in range(1, max_order + 2):
        E, dSk, res = _next_order(base, dS, k)
        if res > _REG_TOL:
            raise RegularityError(f"regularity condition unattainable at order {k} (residual {res:.2e})")
        energies.append(E)
        residuals.append(res)
        dS.append(dSk)
    orders = tuple(
        HierarchyOrder(i, dS[i], _chop(dS[i].integ(lbnd=0.0)), energies[i]) for i in range(max_order + 1)
    )
    grid = grid.copy()
    grid.setflags(write=False)
    return HierarchyResult(grid, dim, m, orders, tuple(residuals), base)
