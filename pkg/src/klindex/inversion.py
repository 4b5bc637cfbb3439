"""Inversion of the forward transform and of its adjoint.

Forward inversion integrates a kernel against ``F_alpha(tau)`` over the
index.  The kernel grows like ``exp(pi tau / 2)`` and ``F_alpha`` decays at
the same exponential rate, so both are carried in scaled form:

    kernel~(tau) = kernel(tau) exp(-pi |tau| / 2)
    F~(tau)      = F(tau) exp(+pi |tau| / 2)

Whether the integral converges then depends on the algebraic decay of
``F~``, which is what the moment conditions on ``f`` control.

Adjoint inversion is an epsilon-regularised limit.  For ``alpha > 0``
``G_alpha(t) ~ c t^(-alpha)`` at the origin, which makes the regularised
integral diverge once ``epsilon < alpha``; it is continued analytically in
``epsilon`` by subtracting the singular term and integrating it in closed
form (a Hadamard finite part).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConvergenceError, PreconditionError, TailModelError
from .functions import RealFunction, moment_matched_test_function as _mm
from .quadrature import QuadConfig, integrate_finite, integrate_real_line, integrate_semi_infinite, \
    integrate_contour_vertical
from .specfun import SeriesResult, _is_nonpositive_integer, _loggamma_complex, beta, gamma, hyp_pfq, \
    loggamma, recip_gamma

__all__ = [
    "InverseKernelValue",
    "EpsilonSchedule",
    "TailModel",
    "SampledFunction",
    "AdjointInversion",
    "inv_kernel",
    "inv_kernel_alpha0",
    "inv_kernel_alpha1",
    "invert_forward",
    "invert_forward_alpha0",
    "invert_forward_alpha1",
    "sample_forward",
    "epsilon_kernel",
    "epsilon_kernel_contour",
    "adjoint_bracket",
    "adjoint_bracket_alpha0",
    "invert_adjoint",
    "invert_adjoint_alpha1_limit",
    "lemma3_check",
    "moment_matched_test_function",
]

CANCELLATION_LIMIT = 1e8
_HALF_PI = np.pi / 2


def _log_rgamma(z):
    """log(1/Gamma(z)); ``-inf`` at the poles."""
    z = np.asarray(z, dtype=complex)
    out = np.full(z.shape, -np.inf + 0j)
    ok = ~_is_nonpositive_integer(z)
    if np.any(ok):
        out[ok] = -_loggamma_complex(z[ok])
    return out


def _i_scaled(nu, x):
    """``I_nu(x) exp(-pi |Im nu| / 2)``; stays finite for large ``|Im nu|``."""
    nu = np.asarray(nu, dtype=complex)
    x = np.asarray(x, dtype=float)
    logpre = nu * np.log(x / 2.0) + _log_rgamma(nu + 1.0) - _HALF_PI * np.abs(nu.imag)
    ser = hyp_pfq([], [nu + 1.0], x * x / 4.0)
    return np.exp(logpre) * ser.value


# ---------------------------------------------------------------------------
# Forward inversion kernels
# ---------------------------------------------------------------------------

@dataclass
class InverseKernelValue:
    """Real inversion-kernel value with its conditioning.

    ``value`` is the kernel at ``+tau`` and ``-tau`` averaged, i.e. the
    real part of the hypergeometric term minus the cosh correction.
    ``scaled`` is the same times ``exp(-pi |tau| / 2)``.
    """

    value: np.ndarray
    cancellation_ratio: np.ndarray
    err_est: np.ndarray
    scaled: np.ndarray = None


def _check_alpha_open(alpha):
    if not 0 < alpha < 1:
        raise PreconditionError("this inversion formula needs 0 < alpha < 1")


def _kernel_general_scaled(alpha, tau, x):
    """Scaled bracket for ``0 < alpha <= 1``: (value, cancellation, err)."""
    tau = np.asarray(tau, dtype=float)
    x = np.asarray(x, dtype=float)
    it = 1j * np.abs(tau)
    logpre = ((it - 1.0) * np.log(x / 2.0) + _log_rgamma((it - alpha) / 2) + _log_rgamma((it + alpha) / 2)
              - _HALF_PI * np.abs(tau))
    ser = hyp_pfq([it / 2, (1 + it) / 2], [1 + it, (it - alpha) / 2, (it + alpha) / 2], x * x)
    pre = np.exp(logpre)
    t1 = pre * ser.value
    corr = (1.0 + np.exp(-np.pi * np.abs(tau))) / x * float(recip_gamma(alpha / 2) * recip_gamma(-alpha / 2))
    val = t1.real - corr
    mag = np.abs(t1) + np.abs(corr)
    # the final subtraction can cancel exactly (tau = 0), so only the series
    # conditioning gates; the subtraction shows up in err
    cancel = np.asarray(ser.cancellation_ratio, float)
    err = np.abs(pre) * ser.abs_err_est + 4e-16 * mag
    return val, cancel, err


def inv_kernel(alpha: float, tau, x) -> InverseKernelValue:
    """Bracket of the forward inversion formula for ``0 < alpha < 1``.

    The integrand of the inversion is ``value * F_alpha(tau) / pi`` over the
    whole line.  Warns when the cancellation ratio exceeds 1e8.
    """
    _check_alpha_open(alpha)
    tau, x = np.broadcast_arrays(np.asarray(tau, float), np.asarray(x, float))
    if np.any(x <= 0):
        raise PreconditionError("inv_kernel needs x > 0")
    val_s, cancel, err_s = _kernel_general_scaled(alpha, tau, x)
    grow = np.exp(_HALF_PI * np.abs(tau))
    if np.any(cancel > CANCELLATION_LIMIT):
        warnings.warn("inversion kernel lost more than 8 digits to cancellation", RuntimeWarning)
    return InverseKernelValue(val_s * grow, cancel, err_s * grow, val_s)


def inv_kernel_complex(alpha: float, tau, x):
    """The hypergeometric term of the kernel (complex, before taking real parts)."""
    tau = np.asarray(tau, float)
    it = 1j * tau
    x = np.asarray(x, float)
    pre = np.exp((it - 1.0) * np.log(x / 2.0) + _log_rgamma((it - alpha) / 2) + _log_rgamma((it + alpha) / 2))
    ser = hyp_pfq([it / 2, (1 + it) / 2], [1 + it, (it - alpha) / 2, (it + alpha) / 2], x * x)
    return pre * ser.value


def _kernel_alpha0_scaled(tau, x):
    """``-tau Im[d/dx I_{i tau/2}(x)^2]`` scaled by ``exp(-pi |tau|/2)``."""
    tau = np.abs(np.asarray(tau, dtype=float))
    nu = 1j * tau / 2
    i0 = _i_scaled(nu, x)
    i1 = _i_scaled(nu + 1.0, x)
    d = 2.0 * i0 * (i1 + nu / x * i0)
    val = -tau * d.imag
    mag = tau * np.abs(d)
    return val, np.ones_like(val), 1e-15 * mag


def inv_kernel_alpha0(tau, x) -> InverseKernelValue:
    """Kernel of the ``alpha = 0`` inversion; integrate ``value * F_0 / pi`` over the line."""
    tau, x = np.broadcast_arrays(np.asarray(tau, float), np.asarray(x, float))
    v, c, e = _kernel_alpha0_scaled(tau, x)
    grow = np.exp(_HALF_PI * np.abs(tau))
    return InverseKernelValue(v * grow, c, e * grow, v)


def _kernel_alpha1_scaled(tau, x):
    """``Re[nu I_nu^2 + (nu+1) I_{nu+1}^2] + cosh(pi tau/2)/(pi x)``, ``nu = (i tau - 1)/2``, scaled."""
    tau = np.abs(np.asarray(tau, dtype=float))
    nu = (1j * tau - 1.0) / 2
    a = _i_scaled(nu, x)
    b = _i_scaled(nu + 1.0, x)
    t1 = nu * a * a + (nu + 1.0) * b * b
    corr = (1.0 + np.exp(-np.pi * tau)) / (2 * np.pi * x)
    val = t1.real + corr
    mag = np.abs(nu) * np.abs(a) ** 2 + np.abs(nu + 1) * np.abs(b) ** 2 + corr
    return val, np.ones_like(val), 1e-15 * mag


def inv_kernel_alpha1(tau, x) -> InverseKernelValue:
    """Kernel of the ``alpha = 1`` inversion; integrate ``value * F_1 / pi`` over the line."""
    tau, x = np.broadcast_arrays(np.asarray(tau, float), np.asarray(x, float))
    v, c, e = _kernel_alpha1_scaled(tau, x)
    grow = np.exp(_HALF_PI * np.abs(tau))
    return InverseKernelValue(v * grow, c, e * grow, v)


# ---------------------------------------------------------------------------
# Sampled transforms with a tail model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailModel:
    """``F(tau) ~ C |tau|^(-p) exp(-pi |tau| / 2)`` beyond ``tau0``."""

    C: float
    p: float
    tau0: float

    def scaled(self, tau):
        return self.C * np.abs(tau) ** (-self.p)


def fit_tail(tau, scaled_values, min_power: float = 2.0) -> TailModel:
    """Fit the tail model on the last octave of a sampled transform.

    Raises :class:`TailModelError` if the octave changes sign or the fitted
    algebraic decay is not faster than ``|tau|^(-min_power)``.
    """
    tau = np.asarray(tau, float)
    v = np.asarray(scaled_values, float)
    top = tau[-1]
    sel = tau >= top / 2
    if top <= 0 or np.count_nonzero(sel) < 3:
        raise TailModelError("need at least three samples in the last octave")
    vs = v[sel]
    if np.all(vs == 0):
        return TailModel(0.0, np.inf, float(top))
    if not (np.all(vs > 0) or np.all(vs < 0)):
        raise TailModelError("transform changes sign in its last octave; extend the grid")
    slope, icpt = np.polyfit(np.log(tau[sel]), np.log(np.abs(vs)), 1)
    p = -slope
    if p <= min_power:
        raise TailModelError(
            f"fitted tail decays like |tau|^-{p:.3g} times exp(-pi|tau|/2); need a power above {min_power}"
        )
    # anchor the model at the last sample so the sampled part and tail join
    C = float(vs[-1] * top ** p)
    return TailModel(C, float(p), float(top))


class SampledFunction:
    """An even transform ``F(tau)`` known on a grid of ``tau >= 0``.

    Monotone cubic interpolation is applied to ``F(tau) exp(pi tau / 2)``;
    beyond the grid the tail model takes over (``"exponential-fit"``) or the
    function is zero (``"zero"``).
    """

    def __init__(self, abscissas, values, tail_model: str = "exponential-fit", min_power: float = 2.0):
        t = np.asarray(abscissas, float)
        v = np.asarray(values, float)
        if t.ndim != 1 or t.size != v.size:
            raise PreconditionError("abscissas and values must be 1-d of equal length")
        if t.size < 4:
            raise PreconditionError("sampled input needs at least 4 points")
        if np.any(np.diff(t) <= 0):
            raise PreconditionError("abscissas must be strictly increasing")
        if t[0] < 0:
            # even function: keep the non-negative half
            keep = t >= 0
            t, v = t[keep], v[keep]
            if t.size < 4:
                raise PreconditionError("need at least 4 samples with tau >= 0")
        self.abscissas = t
        self.values = v
        self._scaled = v * np.exp(_HALF_PI * t)
        self._interp = PchipInterpolator(t, self._scaled, extrapolate=False)
        if tail_model == "zero":
            self.tail = TailModel(0.0, np.inf, float(t[-1]))
        elif tail_model == "exponential-fit":
            self.tail = fit_tail(t, self._scaled, min_power)
        else:
            raise PreconditionError(f"unknown tail model {tail_model!r}")
        self.tail_model = tail_model

    @property
    def grid_end(self) -> float:
        return float(self.abscissas[-1])

    def scaled(self, tau):
        """``F(tau) exp(pi |tau| / 2)``."""
        a = np.abs(np.asarray(tau, float))
        out = np.asarray(self._interp(np.minimum(a, self.grid_end)), float)
        beyond = a > self.grid_end
        if np.any(beyond):
            if self.tail.C == 0:
                out = np.where(beyond, 0.0, out)
            else:
                out = np.where(beyond, self.tail.scaled(np.where(beyond, a, 1.0)), out)
        below = a < self.abscissas[0]
        if np.any(below):
            out = np.where(below, self._scaled[0], out)
        return out

    def __call__(self, tau):
        a = np.abs(np.asarray(tau, float))
        return self.scaled(a) * np.exp(-_HALF_PI * a)


def sample_forward(f: RealFunction, alpha: float, tau_max: float = 48.0, count: int = 481,
                   cfg: Optional[QuadConfig] = None, tail_model: str = "exponential-fit",
                   route: str = "auto") -> SampledFunction:
    """Sample ``F_alpha`` on ``[0, tau_max]`` and wrap it for inversion.

    ``route="auto"`` uses the Mellin-Barnes integral when ``f`` carries a
    closed-form Mellin transform: its error is absolute on the scale of
    ``exp(-pi tau / 2)``, whereas direct quadrature is accurate only
    relative to the L1 norm of the oscillating integrand, which at large
    ``tau`` exceeds ``|F|`` by a power of ``tau``.
    """
    from .transforms import DEFAULT_CFG, forward, forward_via_mellin
    taus = np.linspace(0.0, tau_max, count)
    cfg = cfg or DEFAULT_CFG
    if route == "auto":
        route = "mellin" if f.mellin is not None else "direct"
    if route == "mellin":
        res = forward_via_mellin(f, alpha, taus, cfg=cfg)
    elif route == "direct":
        res = forward(f, alpha, taus, cfg)
    else:
        raise PreconditionError(f"unknown route {route!r}")
    return SampledFunction(taus, res.values, tail_model)


def _as_sampled(F) -> SampledFunction:
    if isinstance(F, SampledFunction):
        return F
    if hasattr(F, "scaled") and hasattr(F, "grid_end") and hasattr(F, "tail"):
        return F
    raise PreconditionError("F must be a SampledFunction (grid values plus tail model)")


_TAIL_REL_TOL = 1e-7
_INV_CFG = QuadConfig(rel_tol=1e-9, abs_tol=1e-12, max_subdivisions=8000)


def _power_tail(integrand, start, cfg, atol, max_octaves=40):
    """``int_start^inf`` of an oscillating integrand with power-law envelope.

    Octave by octave on finite intervals; once two octaves in a row are
    below ``atol`` the remainder is bounded by a geometric series in the
    observed octave ratio.
    """
    total = 0.0
    err = 0.0
    conv = True
    prev = None
    quiet = 0
    a = start
    for _ in range(max_octaves):
        # crude envelope: length times the largest sampled modulus
        env = a * np.max(np.abs(integrand(np.linspace(a, 2 * a, 64))), axis=0)
        piece = integrate_finite(integrand, a, 2 * a, cfg, abs_tol=atol)
        total = total + np.asarray(piece.value, float)
        err = err + np.asarray(piece.err_est, float)
        conv = conv & np.asarray(piece.converged, bool)
        a *= 2
        if np.all(env < atol):
            quiet += 1
            if quiet >= 2 and prev is not None:
                ratio = np.clip(env / np.maximum(prev, 1e-300), 0.0, 0.9)
                return total, err + env * ratio / (1 - ratio), conv
        else:
            quiet = 0
        prev = env
    return total, err + env, np.zeros_like(conv, dtype=bool)


def _invert_with(kernel_scaled, F, x, cfg: QuadConfig, prefactor: float):
    """``prefactor * int_0^inf kernel~ F~ dtau`` for every ``x``."""
    F = _as_sampled(F)
    xs = np.atleast_1d(np.asarray(x, float))
    if np.any(xs <= 0):
        raise PreconditionError("inversion needs x > 0")
    worst = [1.0]

    def integrand(t):
        k, cancel, _ = kernel_scaled(t[:, None], xs[None, :])
        worst[0] = max(worst[0], float(np.max(np.where(F.scaled(t)[:, None] != 0, cancel, 1.0))))
        return k * F.scaled(t)[:, None]

    end = F.grid_end
    nodes = F.abscissas if F.abscissas.size <= 600 else None
    body = integrate_finite(integrand, 0.0, end, cfg, points=nodes)
    total = np.asarray(body.value, float)
    err = np.asarray(body.err_est, float)
    conv = np.asarray(body.converged, bool)
    if F.tail.C != 0:
        # the tail model is a fit; resolving it far below its own accuracy buys nothing
        t_atol = np.maximum(max(cfg.rel_tol, _TAIL_REL_TOL) * np.abs(total), cfg.abs_tol)
        t_val, t_err, t_conv = _power_tail(integrand, end, cfg.with_(rel_tol=max(cfg.rel_tol, _TAIL_REL_TOL)), t_atol)
        total, err, conv = total + t_val, err + t_err, conv & t_conv
    if worst[0] > CANCELLATION_LIMIT:
        raise ConvergenceError(f"inversion kernel cancellation ratio {worst[0]:.3g} exceeds 1e8")
    return prefactor * total, prefactor * err, conv


def invert_forward(F, alpha: float, x, cfg: QuadConfig = _INV_CFG, full_output: bool = False):
    """Recover ``f(x)`` from ``F_alpha`` for ``0 < alpha < 1``.

    ``F`` is a :class:`SampledFunction`.  The caller asserts that the
    Mellin transform of ``f`` vanishes at ``1 - alpha``; without that the
    recovered values are biased.
    """
    _check_alpha_open(alpha)
    v, e, c = _invert_with(lambda t, xx: _kernel_general_scaled(alpha, t, xx), F, x, cfg, 2.0 / np.pi)
    return _finish(v, e, c, x, full_output)


def invert_forward_alpha0(F, x, cfg: QuadConfig = _INV_CFG, full_output: bool = False):
    """Recover ``f(x)`` from ``F_0`` (needs ``int_0^inf f = 0``)."""
    v, e, c = _invert_with(_kernel_alpha0_scaled, F, x, cfg, 1.0 / np.pi)
    return _finish(v, e, c, x, full_output)


def invert_forward_alpha1(F, x, cfg: QuadConfig = _INV_CFG, full_output: bool = False):
    """Recover ``f(x)`` from ``F_1`` (needs ``f*(0) = 0``)."""
    v, e, c = _invert_with(_kernel_alpha1_scaled, F, x, cfg, 2.0 / np.pi)
    return _finish(v, e, c, x, full_output)


def _finish(v, e, c, x, full_output):
    if not np.all(c):
        warnings.warn("inversion quadrature did not converge at every x", RuntimeWarning)
    if full_output:
        return v, e, c
    return v[0] if np.ndim(x) == 0 else v


# ---------------------------------------------------------------------------
# Adjoint inversion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EpsilonSchedule:
    """Geometric schedule ``eps_k = eps0 * ratio^k``, ``k < max_steps``."""

    eps0: float = 0.5
    ratio: float = 0.5
    max_steps: int = 8
    conv_tol: float = 1e-4

    def __post_init__(self):
        if not 0 < self.eps0 <= 1:
            raise PreconditionError("eps0 must lie in (0, 1]")
        if not 0 < self.ratio < 1:
            raise PreconditionError("ratio must lie in (0, 1)")
        if self.max_steps < 2:
            raise PreconditionError("max_steps must be at least 2")
        if not self.conv_tol > 0:
            raise PreconditionError("conv_tol must be positive")

    def epsilons(self) -> np.ndarray:
        return self.eps0 * self.ratio ** np.arange(self.max_steps)


@dataclass
class AdjointInversion:
    """Result of an epsilon-limit inversion at one ``x``.

    ``sequence`` holds the regularised values ``I(eps_k)``, ``extrapolated``
    the values after two rounds of Richardson extrapolation (the error of
    ``I(eps)`` is a power series in ``eps``).  ``monotone`` is False when the
    successive differences of ``sequence`` change sign.
    """

    x: float
    value: float
    converged: bool
    monotone: bool
    epsilons: np.ndarray
    sequence: np.ndarray
    extrapolated: np.ndarray
    steps_used: int
    notes: list = field(default_factory=list)


def _adjoint_params(alpha, eps, x):
    ix = 1j * x
    a = [(eps + ix) / 2, (eps + ix + 1) / 2]
    b = [1 + ix, (eps + alpha + ix) / 2, (eps + ix - alpha) / 2]
    return a, b


def _adjoint_log_prefactor(alpha, eps, x):
    """log of ``Gamma(-ix) / (Gamma(eps - ix) Gamma((eps+alpha+ix)/2) Gamma((eps+ix-alpha)/2))``."""
    ix = 1j * x
    return (_loggamma_complex(-ix) + _log_rgamma(eps - ix) + _log_rgamma((eps + alpha + ix) / 2)
            + _log_rgamma((eps + ix - alpha) / 2))


def adjoint_bracket(alpha: float, eps: float, x, t):
    """First (complex) term of the regularised adjoint-inversion bracket.

    The full bracket is twice its real part; the second term is its
    complex conjugate.
    """
    x = np.asarray(x, float)
    t = np.asarray(t, float)
    a, b = _adjoint_params(alpha, eps, x)
    ser = hyp_pfq(a, b, t * t)
    lp = _adjoint_log_prefactor(alpha, eps, x) + (eps + 1j * x - 1) * np.log(t / 2)
    return np.exp(lp) * ser.value


def adjoint_bracket_alpha0(eps: float, x, t):
    """The same term written with the collapsed ``1F2`` (``alpha = 0``)."""
    x = np.asarray(x, float)
    t = np.asarray(t, float)
    ix = 1j * x
    ser = hyp_pfq([(eps + ix + 1) / 2], [1 + ix, (eps + ix) / 2], t * t)
    lp = (_loggamma_complex(-ix) + _log_rgamma(eps - ix) + 2 * _log_rgamma((eps + ix) / 2)
          + (eps + ix - 1) * np.log(t / 2))
    return np.exp(lp) * ser.value


def epsilon_kernel(alpha: float, eps: float, x, u):
    """Two-term hypergeometric form of the smoothed kernel ``S^_{alpha,eps}(u, x)``."""
    if not eps > 0:
        raise PreconditionError("eps must be positive")
    x = np.asarray(x, float)
    u = np.asarray(u, float)
    if np.any(u <= 0):
        raise PreconditionError("u must be positive")

    def term(xx):
        ix = 1j * xx
        a, b = _adjoint_params(alpha, eps, xx)
        ser = hyp_pfq(a, b, 1.0 / (u * u))
        lp = (np.log(2.0) - (eps + ix) * np.log(2 * u) + _loggamma_complex(eps + ix) + _loggamma_complex(-ix)
              + _log_rgamma((eps + alpha + ix) / 2) + _log_rgamma((eps + ix - alpha) / 2))
        return np.exp(lp) * ser.value

    return term(x) + term(-x)


def epsilon_kernel_contour(alpha: float, eps: float, x: float, u: float, c: Optional[float] = None,
                           cfg: QuadConfig = QuadConfig(rel_tol=1e-11, abs_tol=1e-15)):
    """``S^_{alpha,eps}(u, x)`` from its vertical-line integral along ``Re s = c``.

    Needs ``0 < c < eps/2``; the default is ``0.4 eps``.
    """
    c = 0.4 * eps if c is None else c
    if not 0 < c < eps / 2:
        raise PreconditionError("contour abscissa must lie in (0, eps/2)")
    ix = 1j * x
    lu = np.log(u)

    def integrand(s):
        lg = (_loggamma_complex(s) + _loggamma_complex(0.5 + s) + _log_rgamma(s + alpha / 2)
              + _log_rgamma(s - alpha / 2) + _loggamma_complex((eps + ix) / 2 - s)
              + _loggamma_complex((eps - ix) / 2 - s))
        return np.exp(lg - 2 * s * lu)

    res = integrate_contour_vertical(integrand, c, cfg, decay_hint=np.pi / 2)
    return res.value / (2j * np.pi * np.sqrt(np.pi))


def _series_coeffs(a, b, n_terms):
    """Coefficients ``d_k`` of ``pFq(a; b; z) = sum d_k z^k`` (broadcast over parameters)."""
    shape = np.broadcast_shapes(*(np.shape(p) for p in list(a) + list(b)))
    d = np.ones((n_terms,) + shape, dtype=complex)
    for k in range(1, n_terms):
        r = np.ones(shape, dtype=complex) / k
        for p in a:
            r = r * (p + k - 1)
        for p in b:
            r = r / (p + k - 1)
        d[k] = d[k - 1] * r
    return d


_ADJ_CFG = QuadConfig(rel_tol=1e-8, abs_tol=1e-11, max_subdivisions=2000)


class _GCache:
    """Memoise ``G`` by node value across the pieces of one inversion."""

    def __init__(self, G):
        self.G = G
        self.store = {}

    def __call__(self, t):
        t = np.asarray(t, float)
        missing = np.array([v for v in np.unique(t) if v not in self.store])
        if missing.size:
            vals = np.asarray(self.G(missing), float)
            self.store.update(zip(missing.tolist(), vals.tolist()))
        return np.array([self.store[v] for v in t.tolist()])


def _small_t_basis(alpha: float, e_max: float = 1.0):
    """Terms ``t^e (log t)^j`` of ``G_alpha`` near the origin with ``e <= e_max``.

    The Mellin transform of ``G_alpha`` has poles at ``alpha - 2k`` and
    ``-alpha - 2k``; coinciding poles are double and bring a log term.
    """
    exps = sorted({round(2 * k - alpha, 12) for k in range(4)} | {round(alpha + 2 * k, 12) for k in range(4)})
    basis = []
    for e in exps:
        if e > e_max:
            break
        double = any(abs(e - (2 * k - alpha)) < 1e-12 for k in range(4)) and \
            any(abs(e - (alpha + 2 * k)) < 1e-12 for k in range(4))
        basis.append((e, 0))
        if double:
            basis.append((e, 1))
    return basis


def _fit_small_t(G, basis, t_min):
    """Coefficients of ``basis`` matching ``G`` at ``t_min * 10^-i``."""
    ts = t_min * 10.0 ** (-np.arange(len(basis), dtype=float))
    A = np.array([[t ** e * np.log(t) ** j for e, j in basis] for t in ts])
    return np.linalg.solve(A, np.asarray(G(ts), float))


def _model_eval(basis, coefs, t):
    return sum(c * t ** e * np.log(t) ** j for (e, j), c in zip(basis, coefs))


def _fp_unit(S, basis, coefs):
    """Finite part of ``int_0^1 t^(S-1) model(t) dt`` (``S`` complex, broadcast)."""
    out = 0
    for (e, j), c in zip(basis, coefs):
        w = S + e
        out = out + c * (1.0 / w if j == 0 else -1.0 / (w * w))
    return out


def invert_adjoint(G: Callable, alpha: float, x, sched: EpsilonSchedule = EpsilonSchedule(),
                   cfg: QuadConfig = _ADJ_CFG, t_max: float = 24.0, t_min: float = 1e-4):
    """Recover ``g(x)`` (its even part) from ``G_alpha`` by the epsilon limit.

    ``G`` is a vectorised callable on ``t > 0``.  All epsilons and all ``x``
    share one set of quadrature nodes, so ``G`` is evaluated once per node.
    Returns one :class:`AdjointInversion` per ``x`` (a single one for
    scalar ``x``).
    """
    alpha = abs(float(alpha))
    xs = np.atleast_1d(np.abs(np.asarray(x, float)))
    if np.any(xs == 0):
        raise PreconditionError("adjoint inversion needs x != 0")
    eps = sched.epsilons()
    Gc = _GCache(G)
    E, X = np.meshgrid(eps, xs, indexing="ij")  # (K, J)
    a, b = _adjoint_params(alpha, E, X)
    logP = _adjoint_log_prefactor(alpha, E, X)

    def bracket(t):
        tt = t[:, None, None]
        ser = hyp_pfq(a, b, tt * tt)
        if np.any(ser.ill_conditioned):
            raise ConvergenceError("hypergeometric series lost more than 8 digits")
        return np.exp(logP + (E + 1j * X - 1) * np.log(tt / 2)) * ser.value

    basis = _small_t_basis(alpha)
    coefs = _fit_small_t(Gc, basis, t_min)

    def m(t):
        return _model_eval(basis, coefs, t)

    # closed-form finite part of int_0^1 T1 m dt, T1 = P2 sum_k d_k t^(sigma_k - 1)
    n_terms = 80
    d = _series_coeffs(a, b, n_terms)
    k = np.arange(n_terms)[:, None, None]
    P2 = np.exp(logP) * 2.0 ** (1 - E - 1j * X)
    near = P2 * np.sum(d * _fp_unit(E + 1j * X + 2 * k, basis, coefs), axis=0)

    shape = E.shape

    def mid(u):
        t = np.exp(u)
        vals = bracket(t) * ((Gc(t) - m(t)) * t)[:, None, None]
        return 2.0 * vals.real.reshape(t.size, -1)

    def far(t):
        vals = bracket(t) * Gc(t)[:, None, None]
        return 2.0 * vals.real.reshape(t.size, -1)

    r_mid = integrate_finite(mid, np.log(t_min), 0.0, cfg)
    r_far = integrate_finite(far, 1.0, t_max, cfg)
    total = 2.0 * near.real + r_mid.value.reshape(shape) + r_far.value.reshape(shape)
    conv = np.asarray(r_mid.converged).reshape(shape) & np.asarray(r_far.converged).reshape(shape)
    pref = gamma(2 * eps) / gamma(eps) / np.pi
    seq = pref[:, None] * total  # (K, J)

    out = []
    for j, xv in enumerate(xs):
        out.append(_limit(xv, eps, seq[:, j], sched, bool(np.all(conv[:, j]))))
    return out[0] if np.ndim(x) == 0 else out


def _limit(xv, eps, seq, sched: EpsilonSchedule, quad_ok: bool) -> AdjointInversion:
    # I(eps) = g + c1 eps + c2 eps^2 + ...: two Richardson levels
    r = sched.ratio
    rich1 = (seq[1:] - r * seq[:-1]) / (1 - r)
    rich2 = (rich1[1:] - r * r * rich1[:-1]) / (1 - r * r)
    diffs = np.diff(seq)
    nz = diffs[np.abs(diffs) > 1e-14]
    monotone = bool(np.all(nz > 0) or np.all(nz < 0))
    value, steps, converged = rich2[-1], len(seq), False
    for i in range(1, rich2.size):
        if abs(rich2[i] - rich2[i - 1]) < sched.conv_tol:
            value, steps, converged = rich2[i], i + 3, True
            break
    notes = []
    if not monotone:
        notes.append("epsilon sequence is not monotone; accepted only through extrapolation")
    if not quad_ok:
        notes.append("quadrature did not converge for some epsilon")
    if not converged:
        warnings.warn(f"epsilon limit did not settle at x={xv}", RuntimeWarning)
    return AdjointInversion(float(xv), float(value), converged and quad_ok, monotone, eps, seq, rich2, steps, notes)


def invert_adjoint_alpha1_limit(G: Callable, x, cfg: QuadConfig = _ADJ_CFG, t_max: float = 24.0,
                                t_min: float = 1e-4):
    """``g(x)`` from ``G_1`` with the epsilon limit taken under the integral.

    The kernel is ``2 Re[nu I_nu(t)^2 + (nu+1) I_{nu+1}(t)^2] / (2 pi)`` with
    ``nu = (ix - 1)/2``; the ``1/t`` singularity of ``G_1`` at the origin is
    handled by the same finite-part continuation as :func:`invert_adjoint`.
    """
    xs = np.atleast_1d(np.abs(np.asarray(x, float)))
    if np.any(xs == 0):
        raise PreconditionError("adjoint inversion needs x != 0")
    Gc = _GCache(G)
    nu = (1j * xs - 1.0) / 2

    def kern(t):
        tt = t[:, None]
        ia = _i_unscaled(nu[None, :], tt)
        ib = _i_unscaled(nu[None, :] + 1, tt)
        return nu * ia * ia + (nu + 1) * ib * ib

    basis = _small_t_basis(1.0)
    coefs = _fit_small_t(Gc, basis, t_min)
    n_terms = 80
    near = np.zeros(xs.size, complex)
    k = np.arange(n_terms)[:, None]
    for order in (nu, nu + 1):
        # I_v(t)^2 = sum_k c_k (t/2)^(2v+2k), c_k = (2v+k+1)_k / (k! Gamma(v+k+1)^2)
        lc = (_loggamma_complex(2 * order + 2 * k + 1) - _loggamma_complex(2 * order + k + 1)
              - _loggamma_complex(k + 1.0) - 2 * _loggamma_complex(order + k + 1))
        s = 2 * order + 2 * k
        near += order * np.sum(np.exp(lc - s * np.log(2.0)) * _fp_unit(s + 1, basis, coefs), axis=0)

    def mid(u):
        t = np.exp(u)
        return 2.0 * (kern(t) * ((Gc(t) - _model_eval(basis, coefs, t)) * t)[:, None]).real

    def far(t):
        return 2.0 * (kern(t) * Gc(t)[:, None]).real

    r_mid = integrate_finite(mid, np.log(t_min), 0.0, cfg)
    r_far = integrate_finite(far, 1.0, t_max, cfg)
    total = 2.0 * near.real + r_mid.value + r_far.value
    val = total / (2 * np.pi)
    return val[0] if np.ndim(x) == 0 else val


def _i_unscaled(nu, x):
    nu = np.asarray(nu, complex)
    x = np.asarray(x, float)
    return np.exp(nu * np.log(x / 2.0) + _log_rgamma(nu + 1.0)) * hyp_pfq([], [nu + 1.0], x * x / 4.0).value


def lemma3_check(eps: float, x: float, cfg: QuadConfig = QuadConfig(rel_tol=1e-12, abs_tol=0.0)):
    """``(lhs, rhs)`` of the gamma-modulus identity

        int_R |Gamma((eps + i(x-t))/2) Gamma((eps + i(x+t))/2)|^2 dt
            = 4 pi |Gamma(eps + ix)|^2 B(eps, eps).
    """
    if not eps > 0:
        raise PreconditionError("eps must be positive")

    def integrand(t):
        lg = _loggamma_complex((eps + 1j * (x - t)) / 2) + _loggamma_complex((eps + 1j * (x + t)) / 2)
        return np.exp(2 * lg.real)

    peak = float(integrand(np.array([0.0]))[0])
    res = integrate_real_line(integrand, cfg.with_(tail_cut_tol=1e-17), decay_hint=0.95 * np.pi,
                              abs_tol=1e-15 * peak, points=[-abs(x), abs(x)] if x else None)
    rhs = 4 * np.pi * abs(complex(gamma(complex(eps, x)))) ** 2 * float(beta(eps, eps))
    return float(res.value), float(rhs)


def moment_matched_test_function(alpha: float, family: str = "exp_linear", order: int = 1,
                                 shift: Optional[float] = None) -> RealFunction:
    """Test input whose Mellin transform vanishes where the inversion needs it.

    ``exp_linear`` is ``(c - x) exp(-x)`` with ``c = Gamma(2-alpha)/Gamma(1-alpha) = 1 - alpha``;
    ``exp_poly`` is ``(c - x) x^a exp(-x)`` with ``c = 1 - alpha + a`` (``a`` defaults
    to 1 for ``alpha = 1`` and 1/2 otherwise).  ``order > 1`` adds further
    zeros at ``1 + alpha, 3 - alpha, ...``, which speeds up the decay of the
    transform and so the convergence of the inversion integral.
    """
    if family == "exp_linear":
        a = 0.0 if shift is None else shift
        if alpha >= 1 and a == 0:
            raise PreconditionError("exp_linear has no zero-free strip at alpha >= 1; use exp_poly")
    elif family == "exp_poly":
        a = (1.0 if alpha == 1 else 0.5) if shift is None else shift
    else:
        raise PreconditionError(f"unsupported family {family!r}")
    f = _mm(alpha, order, shift=a, normalize=order > 1)
    return f
