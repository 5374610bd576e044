"""Numerical radial eigen-solver.

Solves ``-u''/2 + [V(rho) + L(L+1)/(2 rho**2)] u = eps u`` with ``u(0) = 0`` and
``u(rho_max) = 0`` by two independent routes:

* ``"matrix"``: three-point finite differences on a uniform grid, with the
  eigenvalue Richardson-extrapolated over successive grid halvings;
* ``"shooting"``: adaptive DOP853 integration outward from a Frobenius start
  and inward from the wall, bracketed by node counting and closed on the
  Wronskian at the outermost turning point.

The box size is chosen automatically (unless given) from a coarse solve on a
geometric grid, so the same routine handles Bohr-radius scales from 1e-3 to
1e3 without hints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.integrate import simpson, solve_ivp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .core import GridState, PowerLawPotential

__all__ = [
    "OracleError",
    "NoBoundStateError",
    "ConvergenceError",
    "RadialPotential",
    "coulomb_profile",
    "yukawa_profile",
    "power_law_profile",
    "SolverConfig",
    "solve_bound_state",
    "cross_validate",
    "CrossCheck",
    "fit_domain",
    "expectation_value",
    "integrate",
    "node_count",
]


class OracleError(RuntimeError):
    pass


class NoBoundStateError(OracleError):
    pass


class ConvergenceError(OracleError):
    pass


@dataclass(frozen=True)
class RadialPotential:
    """Potential profile in the solver's units plus its continuum threshold."""

    func: Callable[[np.ndarray], np.ndarray]
    threshold: float = math.inf
    label: str = ""

    def __call__(self, rho):
        return self.func(np.asarray(rho, dtype=float))


def coulomb_profile() -> RadialPotential:
    return RadialPotential(lambda rho: -1.0 / rho, 0.0, "coulomb")


def yukawa_profile(lam: float) -> RadialPotential:
    if lam == 0:
        return coulomb_profile()
    return RadialPotential(lambda rho: -np.exp(-lam * rho) / rho, 0.0, f"yukawa(lambda={lam!r})")


def power_law_profile(pot: PowerLawPotential) -> RadialPotential:
    """``V/m`` in ``x = m r`` (eigenvalues come out as ``E/m``)."""
    threshold = math.inf if pot.n > 0 else 0.0
    return RadialPotential(pot.reduced, threshold, f"power(k={pot.k}, n={pot.n}, g={pot.g!r})")


@dataclass(frozen=True)
class SolverConfig:
    rho_max: float | None = None
    n_points: int = 2048
    eig_tol: float = 1e-9
    max_iter: int = 200
    rho_start: float = 10.0
    rho_cap: float = 2.0e4
    tail_cut: float = 1e-13
    tail_tol: float = 1e-10

    def __post_init__(self):
        if self.n_points < 1000:
            raise ValueError("n_points must be >= 1000")
        if not 0 < self.eig_tol <= 1e-8:
            raise ValueError("eig_tol must lie in (0, 1e-8]")
        if self.rho_max is not None and not self.rho_max > 0:
            raise ValueError("rho_max must be positive")


def node_count(u, rel_tol: float = 1e-9) -> int:
    """Strict sign changes of ``u``, ignoring samples below ``rel_tol * max|u|``."""
    u = np.asarray(u, dtype=float)
    if u.size < 3:
        return 0
    inner = u[1:-1]
    scale = np.max(np.abs(u))
    if scale == 0:
        return 0
    s = np.sign(inner[np.abs(inner) > rel_tol * scale])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _effective(potential: RadialPotential, L: int):
    cent = 0.5 * L * (L + 1)

    def W(rho):
        rho = np.asarray(rho, dtype=float)
        return potential(rho) + cent / (rho * rho)

    return W


# -- domain selection ------------------------------------------------------


def _coarse_state(potential, L, n_r, R, n=3000):
    """Nonuniform FD eigenpair on ``[0, R]``; used for box sizing only."""
    # smoothly graded mesh, spacing grows by exp(8/n) per cell from ~1e-6 R;
    # steeper grading inflates the matrix norm and drowns the level in rounding
    t = np.linspace(0.0, 1.0, n + 2)
    x = R * np.expm1(8.0 * t) / np.expm1(8.0)
    h = np.diff(x)
    inner = x[1:-1]
    w = 0.5 * (h[:-1] + h[1:])
    diag = 0.5 * (1.0 / h[:-1] + 1.0 / h[1:]) / w + _effective(potential, L)(inner)
    off = -0.5 / h[1:-1] / np.sqrt(w[:-1] * w[1:])
    if n_r >= inner.size:
        raise OracleError("requested state exceeds the coarse grid")
    eps, vec = eigh_tridiagonal(diag, off, select="i", select_range=(n_r, n_r))
    return float(eps[0]), inner, vec[:, 0] / np.sqrt(w)


def _wkb_extent(W, eps, rho_from, cap, target):
    """Radius beyond the outer turning point where the WKB tail has decayed by ``exp(-target)``."""
    rho = np.geomspace(rho_from, cap, 20000)
    w = W(rho)
    allowed = np.nonzero(w < eps)[0]
    if allowed.size == 0:
        return None
    start = allowed[-1]
    kappa = np.sqrt(np.maximum(2.0 * (w[start:] - eps), 0.0))
    phase = np.concatenate([[0.0], np.cumsum(0.5 * (kappa[1:] + kappa[:-1]) * np.diff(rho[start:]))])
    beyond = np.nonzero(phase > target)[0]
    if beyond.size == 0:
        return math.inf
    return float(rho[start + beyond[0]])


def fit_domain(potential: RadialPotential, L: int, n_r: int, cfg: SolverConfig | None = None):
    """Return ``(rho_max, coarse_eps)`` enclosing the target state down to ``tail_cut``.

    The coarse eigenvalue sets the outer turning point; the box edge is placed
    where the WKB tail amplitude beyond it has dropped to ``tail_cut``.
    """
    cfg = cfg or SolverConfig()
    W = _effective(potential, L)
    target = math.log(1.0 / cfg.tail_cut)
    R = cfg.rho_max or cfg.rho_start
    for _ in range(80):
        eps, _, _ = _coarse_state(potential, L, n_r, R)
        if cfg.rho_max is not None:
            return R, eps
        if eps >= potential.threshold:
            if R >= cfg.rho_cap:
                raise NoBoundStateError(
                    f"no bound state with L={L}, {n_r} nodes below threshold {potential.threshold}"
                )
            R = min(4.0 * R, cfg.rho_cap)
            continue
        need = _wkb_extent(W, eps, 1e-7 * R, 4.0 * cfg.rho_cap, target)
        if need is None or need > cfg.rho_cap:
            if math.isfinite(potential.threshold):
                raise NoBoundStateError(
                    f"no bound state with L={L}, {n_r} nodes: level {eps:.3e} is not "
                    f"localised within rho_cap={cfg.rho_cap}"
                )
            raise ConvergenceError(f"state extends beyond rho_cap={cfg.rho_cap}")
        if need > R:
            # box squeezed the state; its level is too high, so enlarge and redo
            R = min(1.5 * need, cfg.rho_cap)
            continue
        if need < 0.25 * R:
            # level may be under-resolved on a much larger box; redo once on a matched one
            R = 1.5 * need
            continue
        return need, eps
    raise ConvergenceError("domain fitting did not settle")


def _tail_ok(u, grid, cfg):
    R = grid[-1]
    tail = np.abs(u[grid >= 0.95 * R])
    return tail.size == 0 or tail.max() <= cfg.tail_tol * np.max(np.abs(u))


# -- matrix route ----------------------------------------------------------


def _fd_eigen(W, R, m, n_r, vectors=False):
    h = R / m
    rho = h * np.arange(1, m)
    diag = 1.0 / h**2 + W(rho)
    off = np.full(m - 2, -0.5 / h**2)
    if vectors:
        e, v = eigh_tridiagonal(diag, off, select="i", select_range=(n_r, n_r))
        return float(e[0]), rho, v[:, 0]
    e = eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(n_r, n_r))
    return float(e[0])


def _richardson(values):
    # eigenvalue error expands in even powers of h
    table = list(values)
    for j in range(1, len(values)):
        f = 4.0**j
        table = [(f * table[i + 1] - table[i]) / (f - 1.0) for i in range(len(table) - 1)]
    return table[0]


def _solve_matrix(potential, L, n_r, cfg, R):
    W = _effective(potential, L)
    # levels m/2 .. 4m; finer ladders lose more to eigensolver rounding (~eps/h**2)
    m = cfg.n_points // 2
    for _ in range(3):
        levels = [_fd_eigen(W, R, m * 2**j, n_r) for j in range(4)]
        coarse = _richardson(levels[:3])
        fine = _richardson(levels[1:])
        if abs(fine - coarse) < 4.0 * cfg.eig_tol * max(abs(fine), 1e-300):
            break
        m *= 2
    else:
        raise ConvergenceError(
            f"Richardson check failed: {coarse!r} vs {fine!r} at finest spacing {R / (8 * m)}"
        )
    _, rho, v = _fd_eigen(W, R, 2 * m, n_r, vectors=True)
    grid = np.concatenate([[0.0], rho, [R]])
    u = np.concatenate([[0.0], v, [0.0]])
    return fine, grid, u


# -- shooting route --------------------------------------------------------


class _Shooter:
    def __init__(self, potential, L, R, rtol):
        self.potential = potential
        self.L = L
        self.R = R
        self.rtol = rtol
        self.W = _effective(potential, L)
        self.rho0 = 1e-8 * R
        q = float(self.rho0 * potential(self.rho0))
        self.c1 = q / (L + 1)

    def start(self):
        r0, L, c = self.rho0, self.L, self.c1
        u = r0 ** (L + 1) * (1.0 + c * r0)
        du = r0**L * ((L + 1) + (L + 2) * c * r0)
        return [u, du]

    def _rhs(self, eps):
        W = self.W

        def f(rho, y):
            return [y[1], 2.0 * (float(W(rho)) - eps) * y[0]]

        return f

    def outward(self, eps, stop, dense=False, rtol=None):
        def blowup(rho, y):
            return abs(y[0]) - 1e200

        blowup.terminal = True
        return solve_ivp(
            self._rhs(eps),
            (self.rho0, stop),
            self.start(),
            method="DOP853",
            rtol=rtol or self.rtol,
            atol=1e-300,
            max_step=self.R / 64,
            first_step=0.1 * self.rho0,
            events=blowup,
            dense_output=dense,
        )

    def inward(self, eps, stop, dense=False):
        return solve_ivp(
            self._rhs(eps),
            (self.R, stop),
            [0.0, -1.0],
            method="DOP853",
            rtol=self.rtol,
            atol=1e-300,
            max_step=self.R / 64,
            first_step=1e-4 * self.R,
            dense_output=dense,
        )

    def nodes(self, eps):
        sol = self.outward(eps, self.R, rtol=max(self.rtol, 1e-9))
        return node_count(np.concatenate([sol.y[0], [0.0]]), rel_tol=0.0)

    def turning_point(self, eps):
        rho = np.geomspace(self.rho0, self.R, 4000)
        allowed = np.nonzero(self.W(rho) < eps)[0]
        if allowed.size == 0:
            return 0.5 * self.R
        return float(np.clip(rho[allowed[-1]], 100 * self.rho0, 0.9 * self.R))

    def mismatch(self, eps, rho_m):
        out = self.outward(eps, rho_m)
        inn = self.inward(eps, rho_m)
        if out.status != 0:
            # solution overflowed before reaching rho_m: far below the level
            return -1.0
        no = math.hypot(out.y[0, -1], out.y[1, -1])
        ni = math.hypot(inn.y[0, -1], inn.y[1, -1])
        uo, do = out.y[0, -1] / no, out.y[1, -1] / no
        ui, di = inn.y[0, -1] / ni, inn.y[1, -1] / ni
        return do * ui - uo * di


def _solve_shooting(potential, L, n_r, cfg, R, guess):
    sh = _Shooter(potential, L, R, rtol=1e-12)
    thr = potential.threshold
    step = 0.05 * abs(guess) + 1e-6
    lo, hi = guess - step, guess + step
    if hi >= thr:
        hi = thr - 1e-14 * max(1.0, abs(thr))
    it = 0
    n_lo = sh.nodes(lo)
    while n_lo > n_r:
        lo -= step
        step *= 2
        n_lo = sh.nodes(lo)
        it += 1
        if it > cfg.max_iter:
            raise ConvergenceError("could not bracket the level from below")
    step = 0.05 * abs(guess) + 1e-6
    n_hi = sh.nodes(hi)
    while n_hi <= n_r:
        if hi >= thr - 1e-12 * max(1.0, abs(thr)):
            raise NoBoundStateError(f"no bound state found in bracket below threshold {thr}")
        hi = min(hi + step, thr - 1e-14 * max(1.0, abs(thr)))
        step *= 2
        n_hi = sh.nodes(hi)
        it += 1
        if it > cfg.max_iter:
            raise ConvergenceError("could not bracket the level from above")
    while not (n_lo == n_r and n_hi == n_r + 1):
        mid = 0.5 * (lo + hi)
        n_mid = sh.nodes(mid)
        if n_mid <= n_r:
            lo, n_lo = mid, n_mid
        else:
            hi, n_hi = mid, n_mid
        it += 1
        if it > cfg.max_iter:
            raise ConvergenceError("node-count bisection did not isolate the level")

    rho_m = sh.turning_point(0.5 * (lo + hi))
    f = lambda e: sh.mismatch(e, rho_m)  # noqa: E731
    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi > 0:
        raise ConvergenceError("matching function does not change sign across the bracket")
    xtol = 0.01 * cfg.eig_tol * max(abs(lo), abs(hi), 1e-300)
    eps = brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=cfg.max_iter)

    out = sh.outward(eps, rho_m, dense=True)
    inn = sh.inward(eps, rho_m, dense=True)
    grid = np.linspace(0.0, R, cfg.n_points + 1)
    u = np.empty_like(grid)
    left = grid <= rho_m
    small = grid < sh.rho0
    u[small] = grid[small] ** (L + 1) * (1.0 + sh.c1 * grid[small])
    sel = left & ~small
    u[sel] = out.sol(grid[sel])[0]
    uo, do = out.y[0, -1], out.y[1, -1]
    ui, di = inn.y[0, -1], inn.y[1, -1]
    scale = uo / ui if abs(ui) >= 0.1 * math.hypot(ui, di) else do / di
    u[~left] = scale * inn.sol(grid[~left])[0]
    u[-1] = 0.0
    return float(eps), grid, u


# -- public API ------------------------------------------------------------


def integrate(y, x) -> float:
    """Grid quadrature: Boole's rule (Simpson plus one Richardson step) on
    uniform grids with ``4k + 1`` points, plain Simpson otherwise."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    n = x.size
    d = np.diff(x)
    if n >= 5 and (n - 1) % 4 == 0 and np.ptp(d) <= 1e-9 * d.mean():
        fine = simpson(y, x=x)
        coarse = simpson(y[::2], x=x[::2])
        return float((16.0 * fine - coarse) / 15.0)
    return float(simpson(y, x=x))


def _normalised(grid, u):
    norm = math.sqrt(integrate(u * u, grid))
    return u / norm


def solve_bound_state(
    potential: RadialPotential,
    L: int,
    n_r: int,
    cfg: SolverConfig | None = None,
    *,
    method: str = "shooting",
) -> GridState:
    """Bound state with angular momentum ``L`` and ``n_r`` radial nodes.

    Raises :class:`NoBoundStateError` when the level does not exist below the
    continuum threshold and :class:`ConvergenceError` when either route fails
    to meet ``cfg.eig_tol``.
    """
    if L < 0 or n_r < 0:
        raise ValueError("L and n_r must be non-negative")
    if method not in ("shooting", "matrix"):
        raise ValueError(f"unknown method {method!r}")
    cfg = cfg or SolverConfig()
    R, guess = fit_domain(potential, L, n_r, cfg)
    for attempt in range(2):
        if method == "matrix":
            eps, grid, u = _solve_matrix(potential, L, n_r, cfg, R)
        else:
            eps, grid, u = _solve_shooting(potential, L, n_r, cfg, R, guess)
        if _tail_ok(u, grid, cfg) or attempt == 1:
            break
        R *= 1.5
    if eps >= potential.threshold:
        raise NoBoundStateError(f"level {eps!r} is not below threshold {potential.threshold}")
    u = _normalised(grid, u)
    # sign convention: positive first lobe
    if u[np.argmax(np.abs(u) > 1e-6 * np.max(np.abs(u)))] < 0:
        u = -u
    nodes = node_count(u)
    if nodes != n_r:
        raise ConvergenceError(f"{method} solution has {nodes} nodes, expected {n_r}")
    return GridState(grid=grid, u=u, eigenvalue=eps, L=L, nodes=nodes, method=method)


@dataclass(frozen=True)
class CrossCheck:
    shooting: GridState
    matrix: GridState
    rho_max: float

    @property
    def eigenvalue(self) -> float:
        return self.shooting.eigenvalue

    @property
    def rel_diff(self) -> float:
        a, b = self.shooting.eigenvalue, self.matrix.eigenvalue
        return abs(a - b) / max(abs(a), abs(b))


def cross_validate(potential, L, n_r, cfg: SolverConfig | None = None) -> CrossCheck:
    """Run both routes on one shared box."""
    cfg = cfg or SolverConfig()
    if cfg.rho_max is None:
        R, _ = fit_domain(potential, L, n_r, cfg)
        cfg = replace(cfg, rho_max=R)
    shoot = solve_bound_state(potential, L, n_r, cfg, method="shooting")
    mat = solve_bound_state(potential, L, n_r, cfg, method="matrix")
    return CrossCheck(shoot, mat, cfg.rho_max)


def expectation_value(state: GridState, observable) -> float:
    """``int u**2 f(rho) drho`` on the state's grid.

    ``observable`` is a callable or a constant. Profiles more singular than
    ``1/rho**2`` at the origin are rejected.
    """
    grid = state.grid
    if callable(observable):
        probe = np.array([1e-8, 1e-6])
        with np.errstate(all="ignore"):
            vals = np.abs(np.asarray(observable(probe), dtype=float)) * probe**2
        if np.all(np.isfinite(vals)) and vals[1] > 0 and vals[0] > 1.5 * vals[1]:
            raise ValueError("observable is more singular than 1/rho**2 at the origin")
        f = np.zeros_like(grid)
        pos = grid > 0
        f[pos] = observable(grid[pos])
    else:
        f = np.full_like(grid, float(observable))
    return integrate(state.u**2 * f, grid)
