"""Domain types shared by the solvers.

Natural units (hbar = c = 1) throughout. Coulomb-like problems are handled in
reduced variables ``rho = g**2 * m * r`` and ``eps_hat = E / (g**4 * m)``;
power-law problems in ``x = m * r`` and ``E / m``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

__all__ = [
    "PowerLawPotential",
    "ScreenedPotential",
    "QuantumNumbers",
    "EnergySeries",
    "AnalyticState",
    "GridState",
    "reduce_coulomb_like",
    "restore_radius",
    "restore_energy",
    "reduce_energy",
    "to_dict",
    "from_dict",
]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value).limit_denominator(10**6)
    return Fraction(value)


@dataclass(frozen=True)
class PowerLawPotential:
    """``V(r) = sign * scale * g**k * m * (m r)**n``.

    ``scale`` defaults to 1; the textbook oscillator ``g**2 m**3 r**2 / 2`` is
    ``scale=1/2``. ``k`` is kept as a ``Fraction`` so that the g-factor
    exponent ``2k/(n+2)`` is exact.
    """

    k: Fraction
    n: int
    g: float = 1.0
    m: float = 1.0
    sign: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "k", _as_fraction(self.k))
        if int(self.n) != self.n:
            raise ValueError("n must be an integer")
        object.__setattr__(self, "n", int(self.n))
        if self.n < -1:
            raise ValueError("n must satisfy n >= -1 (n = -2 has no g-factor)")
        if not self.g > 0 or not self.m > 0:
            raise ValueError("g and m must be positive")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        expected = 1 if self.n > 0 else -1 if self.n < 0 else None
        if self.sign is None:
            if expected is None:
                raise ValueError("sign must be given explicitly for n = 0")
            object.__setattr__(self, "sign", expected)
        elif self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        elif expected is not None and self.sign != expected:
            raise ValueError(f"sign must be {expected:+d} for n = {self.n}")

    @classmethod
    def coulomb(cls, g=1.0, m=1.0):
        return cls(k=Fraction(2), n=-1, g=g, m=m)

    @classmethod
    def linear(cls, g=1.0, m=1.0):
        return cls(k=Fraction(2), n=1, g=g, m=m)

    @classmethod
    def harmonic(cls, g=1.0, m=1.0, scale=0.5):
        return cls(k=Fraction(2), n=2, g=g, m=m, scale=scale)

    def with_coupling(self, g: float) -> "PowerLawPotential":
        return dataclasses.replace(self, g=g)

    @property
    def coefficient(self) -> float:
        """Prefactor of ``x**n`` in ``V/m`` with ``x = m r``."""
        return self.sign * self.scale * self.g ** float(self.k)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return self.m * self.coefficient * (self.m * r) ** self.n

    def reduced(self, x):
        """``V/m`` as a function of ``x = m r``."""
        x = np.asarray(x, dtype=float)
        return self.coefficient * x ** self.n


@dataclass(frozen=True)
class ScreenedPotential:
    """Yukawa potential ``V(r) = -g**2 exp(-alpha r) / r``."""

    g: float
    alpha: float
    m: float = 1.0

    def __post_init__(self):
        if not self.g > 0 or not self.m > 0:
            raise ValueError("g and m must be positive")
        if not self.alpha >= 0:
            raise ValueError("alpha must be non-negative")

    @classmethod
    def from_lambda(cls, lam: float, g=1.0, m=1.0) -> "ScreenedPotential":
        return cls(g=g, alpha=lam * g * g * m, m=m)

    @property
    def lam(self) -> float:
        return self.alpha / (self.g**2 * self.m)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        return -self.g**2 * np.exp(-self.alpha * r) / r

    def reduced(self, rho):
        """``V / (g**4 m)`` as a function of ``rho = g**2 m r``."""
        rho = np.asarray(rho, dtype=float)
        if self.alpha == 0:
            return -1.0 / rho
        return -np.exp(-self.lam * rho) / rho

    def as_coulomb(self) -> PowerLawPotential:
        if self.alpha != 0:
            raise ValueError("only the unscreened potential is Coulomb")
        return PowerLawPotential.coulomb(g=self.g, m=self.m)


@dataclass(frozen=True)
class QuantumNumbers:
    N: int
    L: int
    M: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if not 0 <= self.L <= self.N - 1:
            raise ValueError(f"L must satisfy 0 <= L <= N-1 (got N={self.N}, L={self.L})")
        if abs(self.M) > self.L:
            raise ValueError("|M| must not exceed L")

    @property
    def radial_nodes(self) -> int:
        return self.N - self.L - 1

    @property
    def label(self) -> str:
        return f"{self.N}{'spdfghik'[self.L] if self.L < 8 else f'[L={self.L}]'}"


@dataclass(frozen=True)
class EnergySeries:
    """``E = g**g_power * m * sum_j c_j * lam**j``."""

    g_power: Fraction
    coefficients: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "g_power", _as_fraction(self.g_power))
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        if not self.coefficients:
            raise ValueError("at least one coefficient is required")

    @property
    def truncation_order(self) -> int:
        return len(self.coefficients) - 1

    def truncated(self, order: int) -> "EnergySeries":
        if not 0 <= order <= self.truncation_order:
            raise ValueError(f"order must lie in 0..{self.truncation_order}")
        return EnergySeries(self.g_power, self.coefficients[: order + 1])

    def reduced(self, lam: float = 0.0) -> float:
        # Horner; lam = 0 returns c0 exactly
        acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * lam + c
        return acc

    def __call__(self, lam: float = 0.0, g: float = 1.0, m: float = 1.0) -> float:
        return g ** float(self.g_power) * m * self.reduced(lam)


@dataclass(frozen=True)
class AnalyticState:
    """Closed-form radial state ``R = P(rho) exp(-b0 rho)``.

    ``poly`` holds ``a_L .. a_{N-1}`` normalised so that
    ``int R**2 rho**2 drho = 1`` in reduced units; ``norm`` is ``a_L``.
    """

    qn: QuantumNumbers
    b0: float
    poly: tuple[float, ...]
    energy: EnergySeries
    norm: float

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(float(a) for a in self.poly))
        if len(self.poly) != self.qn.N - self.qn.L:
            raise ValueError("poly must hold exactly N - L coefficients")
        if self.poly[0] == 0:
            raise ValueError("leading coefficient a_L must be nonzero")
        if not self.b0 > 0:
            raise ValueError("b0 must be positive")

    @property
    def full_coefficients(self) -> np.ndarray:
        """``a_0 .. a_{N-1}`` with zeros below ``L``."""
        return np.concatenate([np.zeros(self.qn.L), self.poly])


@dataclass(frozen=True, eq=False)
class GridState:
    grid: np.ndarray
    u: np.ndarray
    eigenvalue: float
    L: int
    nodes: int
    method: str = ""

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if grid.shape != u.shape or grid.ndim != 1:
            raise ValueError("grid and u must be 1-D arrays of equal length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        grid.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "u", u)

    @property
    def R(self) -> np.ndarray:
        """Radial function ``u / rho``; the origin value is extrapolated."""
        out = np.empty_like(self.u)
        out[1:] = self.u[1:] / self.grid[1:]
        if self.grid[0] > 0:
            out[0] = self.u[0] / self.grid[0]
        elif self.L == 0 and self.grid.size >= 4:
            # R(0) = u'(0): slope of the cubic through the first four samples
            out[0] = np.polynomial.Polynomial.fit(self.grid[:4], self.u[:4], 3).deriv()(0.0)
        else:
            out[0] = 0.0
        return out


def reduce_coulomb_like(pot: ScreenedPotential, r):
    """Return ``(rho, lam)`` with ``rho = g**2 m r`` and ``lam = alpha/(g**2 m)``."""
    rho = pot.g**2 * pot.m * np.asarray(r, dtype=float)
    return (float(rho) if rho.ndim == 0 else rho), pot.lam


def restore_radius(pot: ScreenedPotential, rho):
    return rho / (pot.g**2 * pot.m)


def reduce_energy(pot: ScreenedPotential, E):
    return E / (pot.g**4 * pot.m)


def restore_energy(pot: ScreenedPotential, eps_hat):
    return pot.g**4 * pot.m * eps_hat


# -- serialisation ---------------------------------------------------------

_TYPES = {
    cls.__name__: cls
    for cls in (PowerLawPotential, ScreenedPotential, QuantumNumbers, EnergySeries, AnalyticState, GridState)
}


def to_dict(obj) -> Any:
    """JSON-compatible representation; field names match the dataclass fields."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {"type": type(obj).__name__}
        for f in dataclasses.fields(obj):
            out[f.name] = to_dict(getattr(obj, f.name))
        return out
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return [to_dict(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_dict(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_dict(v) for k, v in obj.items()}
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def from_dict(data: dict):
    """Inverse of :func:`to_dict` for the types defined here."""
    data = dict(data)
    cls = _TYPES[data.pop("type")]
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        if isinstance(value, dict) and "type" in value:
            value = from_dict(value)
        elif f.name in ("k", "g_power"):
            value = Fraction(value)
        elif isinstance(value, list):
            value = tuple(value) if cls is not GridState else np.asarray(value, dtype=float)
        kwargs[f.name] = value
    return cls(**kwargs)
