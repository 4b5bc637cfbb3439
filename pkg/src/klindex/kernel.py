"""The index kernel Phi_{alpha,tau}(x) = |K_{(alpha + i tau)/2}(x)|^2.

Four independent ways to compute it are provided, which is what makes the
kernel trustworthy enough to build transforms on:

``phi_direct``
    square modulus of the Macdonald function.
``phi_integral``
    ``int_R K_alpha(2x cosh t) exp(i tau t) dt``.
``phi_cosh_route``
    ``int_R K_{i tau}(2x cosh t) exp(alpha t) dt``.
``phi_mellin_barnes``
    a vertical-line integral of a ratio of six gamma functions.

``phi_derivatives`` differentiates the second representation under the
integral sign, and ``ode_residual`` checks the fourth-order-in-index ODE
the kernel satisfies in ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import DomainError, PreconditionError
from .quadrature import QuadConfig, integrate_contour_vertical, integrate_real_line
from .specfun import _loggamma_complex, bessel_k

__all__ = [
    "KernelParams",
    "ContourConfig",
    "KernelValue",
    "OdeResidual",
    "phi",
    "phi_direct",
    "phi_integral",
    "phi_cosh_route",
    "phi_derivatives",
    "ode_residual",
    "phi_mellin_barnes",
]

_SQRT_PI = np.sqrt(np.pi)
# exp(-z) below this fraction of the peak is dropped from the cosh integrals.
_COSH_CUT = 42.0


@dataclass(frozen=True)
class KernelParams:
    """Order ``alpha`` and index ``tau`` of the kernel."""

    alpha: float
    tau: float

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and np.isfinite(self.tau)):
            raise DomainError("alpha and tau must be finite")


@dataclass(frozen=True)
class ContourConfig:
    """Vertical contour ``Re s = mu`` for the Mellin-Barnes route.

    ``mu=None`` picks ``alpha + 1/2``.
    """

    mu: Optional[float] = None
    decay_hint: float = 0.45 * np.pi


class KernelValue(NamedTuple):
    value: np.ndarray
    err_est: np.ndarray
    converged: np.ndarray


class OdeResidual(NamedTuple):
    residual: np.ndarray
    scale: np.ndarray

    @property
    def relative(self) -> np.ndarray:
        return np.abs(self.residual) / self.scale


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("kernel needs x > 0")
    return x


def phi(alpha, tau, x, rtol: float = 1e-14):
    """Vectorised ``|K_{(alpha + i tau)/2}(x)|^2``; arguments broadcast."""
    x = _check_x(x)
    k = bessel_k((np.asarray(alpha) + 1j * np.asarray(tau)) / 2.0, x, rtol=rtol)
    return np.abs(k) ** 2


def phi_direct(p: KernelParams, x):
    """Kernel value from the Macdonald function itself."""
    return phi(p.alpha, p.tau, x)


def _cosh_cut(x_min: float, growth: float = 0.0) -> float:
    """Smallest T with 2 x (cosh T - 1) - growth T >= _COSH_CUT."""
    t = float(np.arccosh(1.0 + _COSH_CUT / (2 * x_min)))
    while 2 * x_min * (np.cosh(t) - 1.0) - growth * t < _COSH_CUT:
        t += 0.25
    return t


def _line_integral(p: KernelParams, x, order_fn, cfg: QuadConfig, growth: float = 0.0):
    x = np.atleast_1d(_check_x(x))
    c = cfg.with_(initial_truncation=_cosh_cut(float(x.min()), abs(growth)))

    def integrand(t):
        return order_fn(t[:, None], x[None, :])

    res = integrate_real_line(integrand, c, decay_hint=None, points=[0.0])
    return res, x


def phi_integral(p: KernelParams, x, cfg: QuadConfig = QuadConfig(rel_tol=1e-12, abs_tol=1e-15)) -> KernelValue:
    """Kernel via ``int_R K_alpha(2 x cosh t) exp(i tau t) dt``.

    The integrand is even up to the oscillating factor, so the imaginary
    part is quadrature noise; it is folded into the error estimate.
    """
    a, tau = p.alpha, p.tau

    def fn(t, xx):
        return bessel_k(a, 2 * xx * np.cosh(t)).real * np.exp(1j * tau * t)

    res, x = _line_integral(p, x, fn, cfg)
    val = np.real(res.value)
    err = np.asarray(res.err_est) + np.abs(np.imag(res.value))
    return KernelValue(val, err, np.asarray(res.converged))


def phi_cosh_route(p: KernelParams, x, cfg: QuadConfig = QuadConfig(rel_tol=1e-12, abs_tol=1e-15)) -> KernelValue:
    """Kernel via ``int_R K_{i tau}(2 x cosh t) exp(alpha t) dt``."""
    a, tau = p.alpha, p.tau

    def fn(t, xx):
        return bessel_k(1j * tau, 2 * xx * np.cosh(t)).real * np.exp(a * t)

    res, x = _line_integral(p, x, fn, cfg, growth=a)
    val = np.real(res.value)
    return KernelValue(val, np.asarray(res.err_est) + np.abs(np.imag(res.value)), np.asarray(res.converged))


def phi_derivatives(p: KernelParams, x, order: int = 2,
                    cfg: QuadConfig = QuadConfig(rel_tol=1e-12, abs_tol=1e-15)):
    """Kernel and its first ``order`` x-derivatives (order <= 2).

    Returns an array of shape ``(order + 1,) + x.shape``.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    a, tau = p.alpha, p.tau
    x = np.atleast_1d(_check_x(x))
    out = [phi(a, tau, x)]

    def k(nu, z):
        return bessel_k(nu, z).real

    if order >= 1:
        def d1(t, xx):
            z = 2 * xx * np.cosh(t)
            dk = -0.5 * (k(a - 1, z) + k(a + 1, z))
            return 2 * np.cosh(t) * dk * np.cos(tau * t)
        res, _ = _line_integral(p, x, d1, cfg)
        out.append(np.real(res.value))
    if order >= 2:
        def d2(t, xx):
            z = 2 * xx * np.cosh(t)
            ddk = 0.25 * (k(a - 2, z) + 2 * k(a, z) + k(a + 2, z))
            return 4 * np.cosh(t) ** 2 * ddk * np.cos(tau * t)
        res, _ = _line_integral(p, x, d2, cfg)
        out.append(np.real(res.value))
    return np.array(out)


def ode_residual(p: KernelParams, x, cfg: QuadConfig = QuadConfig(rel_tol=1e-12, abs_tol=1e-15)) -> OdeResidual:
    """Residual of ``Phi'' + Phi'/x + tau^2 Phi/x^2 - Phi_{2+a} - 2 Phi - Phi_{2-a}``.

    ``scale`` is the sum of moduli of the six terms, so ``relative`` is a
    meaningful accuracy figure even where the terms cancel.
    """
    x = np.atleast_1d(_check_x(x))
    a, tau = p.alpha, p.tau
    f0, f1, f2 = phi_derivatives(p, x, 2, cfg)
    up = phi(2 + a, tau, x)
    down = phi(2 - a, tau, x)
    terms = [f2, f1 / x, tau ** 2 * f0 / x ** 2, -up, -2 * f0, -down]
    res = sum(terms)
    scale = sum(np.abs(t) for t in terms)
    return OdeResidual(res, scale)


def phi_mellin_barnes(p: KernelParams, x, contour: ContourConfig = ContourConfig(),
                      cfg: QuadConfig = QuadConfig(rel_tol=1e-11, abs_tol=1e-13)) -> KernelValue:
    """Kernel from its Mellin-Barnes integral along ``Re s = mu > |alpha|``.

    For large ``x`` the contour integrand oscillates and cancels down to a
    floor near 1e-14 absolute, hence the absolute default tolerance.
    """
    a, tau = abs(p.alpha), p.tau
    mu = a + 0.5 if contour.mu is None else contour.mu
    if mu <= a or mu <= 0:
        raise PreconditionError(f"contour abscissa mu={mu} must exceed |alpha|={a}")
    x = np.atleast_1d(_check_x(x))
    logx = np.log(x)

    def integrand(s):
        s = s[:, None]
        lg = (_loggamma_complex((s + 1j * tau) / 2) + _loggamma_complex((s - 1j * tau) / 2)
              + _loggamma_complex((s + a) / 2) + _loggamma_complex((s - a) / 2)
              - _loggamma_complex(s / 2) - _loggamma_complex((s + 1) / 2))
        return np.exp(lg - s * logx[None, :])

    res = integrate_contour_vertical(integrand, mu, cfg, decay_hint=contour.decay_hint)
    # ds = i dy, and the prefactor is 1/(8 i sqrt(pi)).
    val = res.value / (8j * _SQRT_PI)
    err = np.asarray(res.err_est) / (8 * _SQRT_PI)
    return KernelValue(np.real(val), err + np.abs(np.imag(val)), np.asarray(res.converged))
