"""Fields ``u_n(r, theta)`` solving the differential-difference equation

    u_rr + u_r / r + u_thth / r^2 = u_{n+2} + 2 u_n + u_{n-2},   u_{-n} = u_n,

built from index data ``g`` as

    u_n(r, theta) = int_R exp(theta tau) |K_{(n + i tau)/2}(r)|^2 g(tau) dtau.

The tau integral uses one fixed trapezoid rule for every grid point.  An
adaptive rule would pick different nodes at neighbouring points and the
finite-difference residual would then measure quadrature noise instead of
the equation.  For entire, fast-decaying integrands the trapezoid rule is
spectrally accurate anyway.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import PreconditionError
from .functions import RealFunction
from .inversion import EpsilonSchedule, invert_adjoint
from .kernel import phi
from .quadrature import QuadConfig
from .specfun import bessel_k

__all__ = [
    "PdeConfig",
    "FieldGrid",
    "IvpResult",
    "u_field",
    "pde_residual",
    "residual_convergence",
    "decay_bound_check",
    "solve_ivp",
]


@dataclass(frozen=True)
class PdeConfig:
    """Grid and data for a field evaluation.

    ``theta_grid`` may extend to ``2 pi`` for :func:`u_field`;
    :func:`solve_ivp` accepts only ``[0, pi/2)``.
    """

    n: int
    r_grid: tuple
    theta_grid: tuple
    beta: float = 0.0
    tau_step: float = 0.05

    def __post_init__(self):
        r = np.asarray(self.r_grid, float)
        th = np.asarray(self.theta_grid, float)
        object.__setattr__(self, "r_grid", tuple(r.tolist()))
        object.__setattr__(self, "theta_grid", tuple(th.tolist()))
        if r.size == 0 or th.size == 0:
            raise PreconditionError("grids must be nonempty")
        if np.any(r <= 0):
            raise PreconditionError("r_grid must be positive")
        if np.any(np.diff(r) <= 0) or np.any(np.diff(th) <= 0):
            raise PreconditionError("grids must be increasing")
        if np.any(th < 0) or np.any(th > 2 * np.pi):
            raise PreconditionError("theta_grid must lie in [0, 2 pi]")
        if not 0 <= self.beta < np.pi / 2:
            raise PreconditionError("beta must lie in [0, pi/2)")
        if not self.tau_step > 0:
            raise PreconditionError("tau_step must be positive")

    @property
    def order(self) -> int:
        return abs(int(self.n))


@dataclass
class FieldGrid:
    """Values on ``r_grid x theta_grid`` (rows are r)."""

    values: np.ndarray
    err_ests: np.ndarray
    r_grid: np.ndarray
    theta_grid: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, float)
        self.err_ests = np.asarray(self.err_ests, float)
        self.r_grid = np.asarray(self.r_grid, float)
        self.theta_grid = np.asarray(self.theta_grid, float)
        shape = (self.r_grid.size, self.theta_grid.size)
        if self.values.shape != shape or self.err_ests.shape != shape:
            raise ValueError("field dimensions do not match the grids")

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _tau_cut(g: RealFunction, theta_max: float, tol: float) -> float:
    probe = np.linspace(0.0, 80.0, 8001)
    w = np.maximum(np.abs(g(probe)), np.abs(g(-probe))) * np.exp((theta_max - np.pi / 2) * probe)
    top = np.max(w)
    if top == 0:
        return 1.0
    big = np.flatnonzero(w > tol * top)
    if big[-1] == probe.size - 1:
        raise PreconditionError("exp(theta tau) g(tau) does not decay on the probe range")
    return float(probe[big[-1]] + 1.0)


def _integrability_probe(g: RealFunction, beta: float):
    """``g in L1(R; exp((2 pi - beta)|tau|) dtau)``: the weighted datum must
    have died out by the end of the probe range."""
    probe = np.linspace(0.0, 80.0, 8001)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        lw = np.log(np.maximum(np.abs(g(probe)), np.abs(g(-probe)))) + (2 * np.pi - beta) * probe
    lw = np.where(np.isfinite(lw), lw, -np.inf)
    if np.all(lw == -np.inf):
        return
    if lw[-1] > np.max(lw) + np.log(1e-12):
        raise PreconditionError("g fails the exponential integrability probe")


def _tau_rule(g: RealFunction, cfg: PdeConfig, thetas: np.ndarray, quad: QuadConfig):
    T = _tau_cut(g, float(np.max(thetas)), quad.tail_cut_tol)
    _integrability_probe(g, cfg.beta)
    m = int(np.ceil(T / cfg.tau_step))
    taus = np.linspace(-m * cfg.tau_step, m * cfg.tau_step, 2 * m + 1)
    return taus, cfg.tau_step


def _field(order: int, g_vals, taus, h, rs, thetas):
    """Trapezoid sums for one order; returns values and a half-rule error estimate."""
    Phi = phi(float(order), taus[None, :], rs[:, None])  # (R, N)
    W = np.exp(thetas[None, :] * taus[:, None]) * g_vals[:, None]  # (N, Th)
    full = h * Phi @ W
    # every other node: step 2h, same truncation
    coarse = 2 * h * Phi[:, ::2] @ W[::2, :]
    rounding = 4 * np.finfo(float).eps * (h * Phi @ np.abs(W))
    return full, np.abs(full - coarse) + rounding


def u_field(g: RealFunction, cfg: PdeConfig, quad: QuadConfig = QuadConfig(tail_cut_tol=1e-17),
            order: Optional[int] = None) -> FieldGrid:
    """``u_n`` on the grid of ``cfg`` (``order`` overrides ``cfg.n``)."""
    n = cfg.order if order is None else abs(int(order))
    rs = np.asarray(cfg.r_grid, float)
    th = np.asarray(cfg.theta_grid, float)
    taus, h = _tau_rule(g, cfg, th, quad)
    gv = np.asarray(g(taus), float)
    vals, err = _field(n, gv, taus, h, rs, th)
    return FieldGrid(vals, err, rs, th, meta={"n": n, "tau_cut": float(taus[-1]), "tau_step": h})


def _uniform_step(grid: np.ndarray) -> float:
    d = np.diff(grid)
    if d.size == 0 or np.max(np.abs(d - d[0])) > 1e-9 * max(1.0, abs(d[0])):
        raise PreconditionError("residual needs uniformly spaced grids with at least 3 points")
    return float(d[0])


def pde_residual(g: RealFunction, cfg: PdeConfig, quad: QuadConfig = QuadConfig(tail_cut_tol=1e-17),
                 warn_above: float = 1e-3) -> FieldGrid:
    """Finite-difference residual of the equation at the interior grid points.

    Second-order central differences in both variables.  Warns when the
    leading ``h^2`` truncation term, estimated from fourth differences,
    exceeds ``warn_above``.
    """
    rs = np.asarray(cfg.r_grid, float)
    th = np.asarray(cfg.theta_grid, float)
    if rs.size < 3 or th.size < 3:
        raise PreconditionError("residual needs at least 3 points in each direction")
    hr, ht = _uniform_step(rs), _uniform_step(th)
    n = cfg.order
    taus, h = _tau_rule(g, cfg, th, quad)
    gv = np.asarray(g(taus), float)
    u, eu = _field(n, gv, taus, h, rs, th)
    up, _ = _field(n + 2, gv, taus, h, rs, th)
    dn, _ = _field(abs(n - 2), gv, taus, h, rs, th)
    ri = rs[1:-1, None]
    c = u[1:-1, 1:-1]
    u_rr = (u[2:, 1:-1] - 2 * c + u[:-2, 1:-1]) / hr ** 2
    u_r = (u[2:, 1:-1] - u[:-2, 1:-1]) / (2 * hr)
    u_tt = (u[1:-1, 2:] - 2 * c + u[1:-1, :-2]) / ht ** 2
    res = u_rr + u_r / ri + u_tt / ri ** 2 - (up[1:-1, 1:-1] + 2 * c + dn[1:-1, 1:-1])
    # quadrature noise amplified by the difference quotients
    noise = np.full_like(res, 4 * np.max(eu) * (1 / hr ** 2 + 1 / hr + 1 / (ht ** 2 * rs[0] ** 2)))
    model = _truncation_model(u, hr, ht, rs)
    if model is not None and model > warn_above:
        warnings.warn(f"grid too coarse: estimated h^2 truncation {model:.2g} exceeds {warn_above:g}",
                      RuntimeWarning)
    return FieldGrid(res, noise, rs[1:-1], th[1:-1], meta={"n": n, "h_r": hr, "h_theta": ht,
                                                           "truncation_model": model})


def _truncation_model(u, hr, ht, rs):
    if u.shape[0] < 5 or u.shape[1] < 5:
        return None
    d4r = np.max(np.abs(np.diff(u, 4, axis=0))) / hr ** 4
    d4t = np.max(np.abs(np.diff(u, 4, axis=1))) / ht ** 4
    return float(hr ** 2 / 12 * d4r + ht ** 2 / 12 * d4t / rs[0] ** 2)


def residual_convergence(g: RealFunction, n: int, r_range=(0.8, 1.2), theta_range=(0.0, 0.4),
                         h: float = 0.02, quad: QuadConfig = QuadConfig(tail_cut_tol=1e-17)):
    """Max residual at step ``h`` and ``h/2`` on the same points, and their ratio.

    Second-order differences give a ratio near 4.
    """
    out = []
    pts = None
    for step in (h, h / 2):
        nr = int(round((r_range[1] - r_range[0]) / step)) + 1
        nt = int(round((theta_range[1] - theta_range[0]) / step)) + 1
        cfg = PdeConfig(n, np.linspace(*r_range, nr), np.linspace(*theta_range, nt))
        res = pde_residual(g, cfg, quad, warn_above=np.inf)
        if pts is None:
            pts = (res.r_grid, res.theta_grid)
            out.append(np.max(np.abs(res.values)))
        else:
            # compare on the coarse interior points only
            ri = np.searchsorted(res.r_grid, pts[0] - 1e-12)
            ti = np.searchsorted(res.theta_grid, pts[1] - 1e-12)
            out.append(np.max(np.abs(res.values[np.ix_(ri, ti)])))
    return float(out[0]), float(out[1]), float(out[0] / out[1])


def decay_bound_check(n: int, tau: float, x: float, beta: float):
    """``(|K_{(n + i tau)/2}(x)|, exp(-beta |tau|/2) K_{n/2}(x cos beta))``."""
    if not 0 <= beta < np.pi / 2:
        raise PreconditionError("beta must lie in [0, pi/2)")
    if not x > 0:
        raise PreconditionError("x must be positive")
    lhs = float(np.abs(bessel_k((n + 1j * tau) / 2, x)))
    rhs = float(np.exp(-beta * abs(tau) / 2) * bessel_k(n / 2, x * np.cos(beta)).real)
    return lhs, rhs


@dataclass
class IvpResult:
    """Field from recovered index data, with the initial-condition defect."""

    field: FieldGrid
    defect: float
    g_nodes: np.ndarray
    g_values: np.ndarray
    initial: np.ndarray


def solve_ivp(G_n, n: int, cfg: PdeConfig, sched: EpsilonSchedule = EpsilonSchedule(),
              quad: QuadConfig = QuadConfig(tail_cut_tol=1e-17), tau_max: float = 6.0,
              tau_count: int = 61) -> IvpResult:
    """Field with ``u_n(r, 0) = G_n(r)``.

    ``g`` is recovered from ``G_n`` by adjoint inversion with ``alpha = n`` at
    ``tau_count`` nodes in ``(0, tau_max]``, interpolated as an even function,
    and taken as zero beyond ``tau_max``.  Integer ``n > 1`` goes through the
    same inversion code as real ``alpha``.
    """
    th = np.asarray(cfg.theta_grid, float)
    if np.any(th >= np.pi / 2):
        raise PreconditionError("initial-value problem needs theta in [0, pi/2)")
    order = abs(int(n))
    nodes = np.linspace(tau_max / tau_count, tau_max, tau_count)
    inv = invert_adjoint(G_n, order, nodes, sched)
    vals = np.array([r.value for r in inv])
    mirror_t = np.concatenate([-nodes[::-1], nodes])
    mirror_v = np.concatenate([vals[::-1], vals])
    interp = PchipInterpolator(mirror_t, mirror_v, extrapolate=False)

    def g_fn(t):
        t = np.asarray(t, float)
        out = np.nan_to_num(interp(np.clip(t, -tau_max, tau_max)))
        return np.where(np.abs(t) > tau_max, 0.0, out)

    g = RealFunction(g_fn, "real_line", extent=tau_max, even=True, name="recovered")
    field_ = u_field(g, cfg, quad, order=order)
    initial = np.asarray(G_n(np.asarray(cfg.r_grid, float)), float)
    j0 = np.flatnonzero(th == 0.0)
    if j0.size:
        defect = float(np.max(np.abs(field_.values[:, j0[0]] - initial)))
    else:
        at0 = u_field(g, PdeConfig(order, cfg.r_grid, (0.0,)), quad, order=order)
        defect = float(np.max(np.abs(at0.values[:, 0] - initial)))
    field_.meta["defect"] = defect
    return IvpResult(field_, defect, nodes, vals, initial)
