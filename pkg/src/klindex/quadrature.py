"""Adaptive Gauss-Kronrod quadrature, vectorised over many integrands.

The integrand is called with a 1-D array of nodes and must return either an
array of the same length (one integral) or an array of shape ``(n, m)``
(``m`` integrals sharing one subdivision tree).  Values may be complex.

Unbounded ranges are truncated using a caller-supplied exponential decay
rate; the neglected tail is estimated from the integrand at the cut and
added to the error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConvergenceError, IntegrandError

__all__ = [
    "QuadConfig",
    "QuadResult",
    "integrate_finite",
    "integrate_semi_infinite",
    "integrate_real_line",
    "integrate_contour_vertical",
]

_EPS = np.finfo(float).eps

_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600071321291, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

# Full 21-point node set on [-1, 1] with matching weights.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_W_K = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_W_G = np.zeros(21)
_W_G[1:10:2] = _WG
_W_G[11:20:2] = _WG[::-1]


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and limits for the adaptive integrators."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 4000
    tail_cut_tol: float = 1e-15
    initial_truncation: Optional[float] = None

    def __post_init__(self):
        if not (self.rel_tol > 0 or self.abs_tol > 0):
            raise ValueError("at least one of rel_tol, abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")

    def with_(self, **kw) -> "QuadConfig":
        return replace(self, **kw)


@dataclass
class QuadResult:
    """Integral value(s) with error estimate and convergence flag.

    For vector integrands ``value``, ``err_est`` and ``converged`` are arrays.
    """

    value: object
    err_est: object
    evaluations: int
    converged: object
    truncation: Optional[float] = None
    subdivisions: int = 0
    notes: list = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return bool(np.all(self.converged))

    def require(self) -> "QuadResult":
        """Raise :class:`ConvergenceError` unless converged."""
        if not self.all_converged:
            raise ConvergenceError(
                f"quadrature did not converge (err_est={np.max(self.err_est):.3g})"
            )
        return self


def _evaluate(f, lo, hi):
    """Apply the 21-point rules on intervals ``[lo, hi]`` (1-D arrays)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(x.ravel()))
    raw_ndim = vals.ndim
    k = lo.size
    if vals.ndim == 1:
        vals = vals.reshape(k, 21, 1)
    else:
        vals = vals.reshape(k, 21, -1)
    if not np.all(np.isfinite(vals)):
        bad = x.reshape(k, 21)[~np.all(np.isfinite(vals), axis=2)]
        raise IntegrandError(f"integrand not finite at x={bad[:3]}")
    hk = half[:, None]
    res_k = np.einsum("j,kjm->km", _W_K, vals) * hk
    res_g = np.einsum("j,kjm->km", _W_G, vals) * hk
    resabs = np.einsum("j,kjm->km", _W_K, np.abs(vals)) * np.abs(hk)
    mean = res_k / np.where(hk == 0, 1.0, hk) * 0.5
    resasc = np.einsum("j,kjm->km", _W_K, np.abs(vals - mean[:, None, :])) * np.abs(hk)
    err = np.abs(res_k - res_g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / np.where(resasc > 0, resasc, 1.0)) ** 1.5)
    err = np.where((resasc > 0) & (err > 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(err, floor)
    return res_k, err, floor, vals.shape[2], raw_ndim


def _adaptive(f, points: Sequence[float], rel_tol, abs_tol, max_subdivisions):
    pts = np.asarray(points, dtype=float)
    lo = pts[:-1].copy()
    hi = pts[1:].copy()
    res, err, floor, m, raw_ndim = _evaluate(f, lo, hi)
    vector = raw_ndim == 2
    evals = 21 * lo.size
    total_len = pts[-1] - pts[0]
    atol = np.broadcast_to(np.asarray(abs_tol, dtype=float), (m,))
    n_init = lo.size
    converged = False
    while True:
        total = res.sum(axis=0)
        total_err = err.sum(axis=0)
        tol = np.maximum(atol, rel_tol * np.abs(total))
        if np.all(total_err <= tol):
            converged = True
            break
        if lo.size - n_init >= max_subdivisions:
            break
        width = (hi - lo) / total_len
        # Refine every interval that breaks a proportional share of the budget,
        # unless it is already at the rounding floor.
        share = err > tol[None, :] * width[:, None]
        at_floor = err <= 1.01 * floor
        tiny = (hi - lo) <= 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        pick = np.any(share & ~at_floor, axis=1) & ~tiny
        if not np.any(pick):
            break
        budget = max_subdivisions - (lo.size - n_init)
        idx = np.flatnonzero(pick)
        if idx.size > budget:
            worst = np.max(err[idx] / np.maximum(tol[None, :], 1e-300), axis=1)
            idx = idx[np.argsort(worst)[::-1][:max(budget, 1)]]
        mid = 0.5 * (lo[idx] + hi[idx])
        new_lo = np.concatenate([lo[idx], mid])
        new_hi = np.concatenate([mid, hi[idx]])
        r2, e2, f2, _, _ = _evaluate(f, new_lo, new_hi)
        evals += 21 * new_lo.size
        keep = np.ones(lo.size, dtype=bool)
        keep[idx] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        res = np.concatenate([res[keep], r2])
        err = np.concatenate([err[keep], e2])
        floor = np.concatenate([floor[keep], f2])
    total = res.sum(axis=0)
    total_err = err.sum(axis=0)
    tol = np.maximum(atol, rel_tol * np.abs(total))
    conv = total_err <= tol if not converged else np.ones(m, dtype=bool)
    return total, total_err, conv, evals, lo.size - n_init, vector


def _package(total, total_err, conv, evals, subdiv, vector, truncation=None):
    if vector:
        return QuadResult(total, total_err, evals, conv, truncation, subdiv)
    return QuadResult(total[0], float(total_err[0]), evals, bool(conv[0]), truncation, subdiv)


def integrate_finite(f: Callable, a: float, b: float, cfg: QuadConfig = QuadConfig(),
                     abs_tol=None, points: Optional[Sequence[float]] = None) -> QuadResult:
    """Integrate ``f`` over ``[a, b]``.

    ``points`` are extra breakpoints (discontinuities, peaks).  ``abs_tol``
    overrides ``cfg.abs_tol`` and may be an array, one entry per component.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("integrate_finite needs finite limits")
    if a == b:
        probe = np.asarray(f(np.array([a])))
        zero = np.zeros(probe.shape[1:], dtype=probe.dtype) if probe.ndim == 2 else 0.0
        return QuadResult(zero, 0.0 * np.abs(zero), 1, np.ones(np.shape(zero), bool)
                          if np.ndim(zero) else True)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    pts = [a]
    if points is not None:
        pts += sorted(p for p in points if a < p < b)
    pts.append(b)
    atol = cfg.abs_tol if abs_tol is None else abs_tol
    out = _adaptive(f, pts, cfg.rel_tol, atol, cfg.max_subdivisions)
    res = _package(*out)
    res.value = sign * res.value
    return res


def _tail_bound(f, t, rate):
    v = np.abs(np.asarray(f(np.array([t]))))
    v = v[0] if v.ndim == 2 else v
    return v / rate


def integrate_semi_infinite(f: Callable, a: float, cfg: QuadConfig = QuadConfig(),
                            decay_hint: Optional[float] = None, abs_tol=None,
                            points: Optional[Sequence[float]] = None) -> QuadResult:
    """Integrate ``f`` over ``[a, inf)``.

    ``decay_hint`` is a rate ``lam`` with ``|f(x)| <~ C exp(-lam x)``.  The
    range is cut at ``a + log(1/tail_cut_tol)/lam`` unless
    ``cfg.initial_truncation`` gives the cut explicitly.  Without either, the
    map ``x = a + t/(1-t)`` is used instead.
    """
    if cfg.initial_truncation is not None:
        cut = float(cfg.initial_truncation)
        rate = decay_hint
    elif decay_hint is not None:
        if decay_hint <= 0:
            raise ValueError("decay_hint must be positive")
        cut = a + np.log(1.0 / cfg.tail_cut_tol) / decay_hint
        rate = decay_hint
    else:
        def g(t):
            s = 1.0 - t
            return _scale_rows(f(a + t / s), 1.0 / (s * s))
        res = integrate_finite(g, 0.0, 1.0, cfg, abs_tol=abs_tol)
        return res
    span = cut - a
    pts = [a] + [a + span * q for q in (1 / 64, 1 / 16, 1 / 4)] + [cut]
    if points is not None:
        pts += [p for p in points if a < p < cut]
    pts = sorted(set(pts))
    atol = cfg.abs_tol if abs_tol is None else abs_tol
    total, err, conv, evals, subdiv, vector = _adaptive(f, pts, cfg.rel_tol, atol, cfg.max_subdivisions)
    if rate is not None:
        tail = _tail_bound(f, cut, rate)
        err = err + tail
        tol = np.maximum(np.broadcast_to(np.asarray(atol, float), err.shape), cfg.rel_tol * np.abs(total))
        conv = conv & (err <= tol)
    return _package(total, err, conv, evals + 1, subdiv, vector, truncation=cut)


def _scale_rows(vals, w):
    vals = np.asarray(vals)
    if vals.ndim == 2:
        return vals * w[:, None]
    return vals * w


def integrate_real_line(f: Callable, cfg: QuadConfig = QuadConfig(), decay_hint: Optional[float] = None,
                        abs_tol=None, center: float = 0.0,
                        points: Optional[Sequence[float]] = None) -> QuadResult:
    """Integrate ``f`` over the real line; ``decay_hint`` as for the half line."""
    if cfg.initial_truncation is not None:
        cut = float(cfg.initial_truncation)
    elif decay_hint is not None:
        if decay_hint <= 0:
            raise ValueError("decay_hint must be positive")
        cut = np.log(1.0 / cfg.tail_cut_tol) / decay_hint
    else:
        def g(t):
            s = 1.0 - t * t
            return _scale_rows(f(center + t / s), (1.0 + t * t) / (s * s))
        return integrate_finite(g, -1.0, 1.0, cfg, abs_tol=abs_tol, points=[0.0])
    lo, hi = center - cut, center + cut
    pts = [lo, center - cut / 4, center, center + cut / 4, hi]
    if points is not None:
        pts += [p for p in points if lo < p < hi]
    pts = sorted(set(pts))
    atol = cfg.abs_tol if abs_tol is None else abs_tol
    total, err, conv, evals, subdiv, vector = _adaptive(f, pts, cfg.rel_tol, atol, cfg.max_subdivisions)
    if decay_hint is not None:
        err = err + _tail_bound(f, hi, decay_hint) + _tail_bound(f, lo, decay_hint)
        tol = np.maximum(np.broadcast_to(np.asarray(atol, float), err.shape), cfg.rel_tol * np.abs(total))
        conv = conv & (err <= tol)
    return _package(total, err, conv, evals + 2, subdiv, vector, truncation=cut)


def integrate_contour_vertical(f: Callable, mu: float, cfg: QuadConfig = QuadConfig(),
                               decay_hint: Optional[float] = np.pi / 2, abs_tol=None) -> QuadResult:
    """Contour integral of ``f(s)`` along ``Re s = mu``, upwards.

    Returns ``int f(s) ds = i int f(mu + i y) dy``; any ``1/(2 pi i)``
    normalisation is left to the caller.
    """
    def g(y):
        return f(mu + 1j * y)
    res = integrate_real_line(g, cfg, decay_hint=decay_hint, abs_tol=abs_tol)
    res.value = 1j * res.value
    return res
