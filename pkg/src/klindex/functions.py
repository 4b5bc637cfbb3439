"""Input functions for the transforms, plus a small library of test inputs.

A :class:`RealFunction` bundles a vectorised callable with the analytic
facts the integrators need: where it lives, how fast it decays, how it
behaves at the origin and, when known, its Mellin transform in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PreconditionError
from .specfun import gamma, loggamma

__all__ = [
    "RealFunction",
    "zero",
    "exp_decay",
    "gauss_half",
    "xgauss",
    "gauss_line",
    "sech_line",
    "moment_matched_test_function",
    "moment_zeros",
    "BUILTIN_HALF_LINE",
    "BUILTIN_REAL_LINE",
]


@dataclass(frozen=True)
class RealFunction:
    """A real function on the half line or the real line.

    fn            vectorised callable.
    domain        ``"half_line"`` or ``"real_line"``.
    decay_hint    exponential rate ``lam`` with ``|f(x)| <~ exp(-lam |x|)``;
                  ``None`` when unknown.
    extent        abscissa beyond which ``|f|`` is negligible (< 1e-17 of
                  its size); overrides ``decay_hint`` for truncation.
    small_x_power ``p`` with ``f(x) ~ x^p`` as ``x -> 0+``; ``None`` means
                  probe numerically.
    mellin        closed-form Mellin transform ``f*(s)`` (vectorised).
    mellin_strip  open interval of ``Re s`` where ``mellin`` is valid.
    even          for real-line functions known to be even.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    domain: str = "half_line"
    decay_hint: Optional[float] = None
    extent: Optional[float] = None
    small_x_power: Optional[float] = None
    mellin: Optional[Callable[[np.ndarray], np.ndarray]] = None
    mellin_strip: Optional[tuple] = None
    even: bool = False
    name: str = "f"

    def __post_init__(self):
        if self.domain not in ("half_line", "real_line"):
            raise ValueError(f"unknown domain {self.domain!r}")
        if self.decay_hint is not None and self.decay_hint <= 0:
            raise ValueError("decay_hint must be positive")

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))

    def origin_power(self) -> float:
        """Exponent ``p`` of the behaviour ``f(x) ~ x^p`` at ``0+``."""
        if self.small_x_power is not None:
            return float(self.small_x_power)
        t = np.array([1e-150, 1e-120])
        v = np.abs(self(t))
        if np.all(v == 0):
            return 8.0
        if np.any(v == 0) or not np.all(np.isfinite(v)):
            return 0.0
        p = np.log(v[1] / v[0]) / np.log(t[1] / t[0])
        # round away probe noise: 0.9999 -> 1
        return float(np.round(p, 3))

    def cut(self, tol: float = 1e-16) -> Optional[float]:
        """Truncation abscissa for integrals over the unbounded direction."""
        if self.extent is not None:
            return float(self.extent)
        if self.decay_hint is not None:
            return float(np.log(1.0 / tol) / self.decay_hint)
        return None

    def even_part(self) -> "RealFunction":
        if self.even or self.domain != "real_line":
            return self
        f = self.fn
        return RealFunction(lambda t: 0.5 * (f(t) + f(-t)), "real_line", self.decay_hint,
                            self.extent, None, None, None, True, self.name + "_even")


def _zero_fn(x):
    return np.zeros_like(np.asarray(x, dtype=float))


def zero(domain: str = "half_line") -> RealFunction:
    return RealFunction(_zero_fn, domain, decay_hint=1.0, extent=1.0, small_x_power=0.0,
                        mellin=lambda s: np.zeros_like(np.asarray(s, complex)), mellin_strip=(-np.inf, np.inf),
                        even=True, name="zero")


def exp_decay(rate: float = 1.0) -> RealFunction:
    """``exp(-rate x)`` on the half line."""
    return RealFunction(
        lambda x: np.exp(-rate * x), "half_line", decay_hint=rate, small_x_power=0.0,
        mellin=lambda s: gamma(np.asarray(s, complex)) * rate ** (-np.asarray(s, complex)),
        mellin_strip=(0.0, np.inf), name="exp" if rate == 1.0 else f"exp{rate:g}",
    )


def gauss_half() -> RealFunction:
    """``exp(-x^2)`` on the half line."""
    return RealFunction(
        lambda x: np.exp(-x * x), "half_line", decay_hint=None, extent=6.5, small_x_power=0.0,
        mellin=lambda s: 0.5 * gamma(np.asarray(s, complex) / 2), mellin_strip=(0.0, np.inf),
        name="gauss",
    )


def xgauss() -> RealFunction:
    """``x exp(-x^2)`` on the half line."""
    return RealFunction(
        lambda x: x * np.exp(-x * x), "half_line", decay_hint=None, extent=6.5, small_x_power=1.0,
        mellin=lambda s: 0.5 * gamma((np.asarray(s, complex) + 1) / 2), mellin_strip=(-1.0, np.inf),
        name="xgauss",
    )


def gauss_line(width: float = 1.0) -> RealFunction:
    """``exp(-width tau^2)`` on the real line."""
    return RealFunction(
        lambda t: np.exp(-width * t * t), "real_line", decay_hint=None,
        extent=float(np.sqrt(40.0 / width)), even=True,
        name="gauss" if width == 1.0 else f"gauss{width:g}",
    )


def sech_line() -> RealFunction:
    """``1/cosh(tau)`` on the real line."""
    return RealFunction(lambda t: 1.0 / np.cosh(t), "real_line", decay_hint=1.0, even=True, name="sech")


# ---------------------------------------------------------------------------
# Moment-matched families
# ---------------------------------------------------------------------------

def moment_zeros(alpha: float, order: int) -> list:
    """First ``order`` Mellin points where the inversion integrand's tail is fed.

    These are ``1-alpha, 1+alpha, 3-alpha, 3+alpha, ...`` with coincident
    points merged (so ``alpha = 0`` gives 1, 3, 5, ... and ``alpha = 1``
    gives 0, 2, 4, ...).
    """
    pts = []
    k = 0
    while len(pts) < order:
        for z in (2 * k + 1 - alpha, 2 * k + 1 + alpha):
            if all(abs(z - q) > 1e-12 for q in pts):
                pts.append(z)
        k += 1
    return sorted(pts)[:order]


def _rising_basis(coef_w: np.ndarray) -> np.ndarray:
    """Rewrite ``sum a_k w^k`` as ``sum c_j (w)_j`` (rising factorials)."""
    p = np.array(coef_w, dtype=float)
    deg = len(p) - 1
    out = np.zeros(deg + 1)
    for j in range(deg, -1, -1):
        rising = np.array([1.0])
        for i in range(j):
            rising = npoly.polymul(rising, [float(i), 1.0])
        c = p[j] if j < len(p) else 0.0
        out[j] = c
        p[: j + 1] = p[: j + 1] - c * rising[: j + 1]
    return out


def moment_matched_test_function(alpha: float, order: int = 1, shift: Optional[float] = None,
                                 normalize: bool = True) -> RealFunction:
    """Test input ``f(x) = sum_j c_j x^(j+a) exp(-x)`` with prescribed Mellin zeros.

    Its Mellin transform is ``Gamma(s+a) prod_k (z_k - s)`` where ``z_k`` are
    the first ``order`` points of :func:`moment_zeros`.  Each zero removes one
    slowly decaying term from ``F_alpha(tau)`` at large ``tau``, which is what
    makes the inversion integral converge at a practical rate.

    ``order=1`` with ``shift=0`` is ``(1 - alpha - x) exp(-x)``; with a shift
    ``a`` it is ``(1 - alpha + a - x) x^a exp(-x)``.
    """
    if order < 1:
        raise PreconditionError("order must be at least 1")
    zeros = moment_zeros(alpha, order)
    if shift is None:
        shift = 0.0 if min(zeros) > 0 else 0.5
    a = float(shift)
    if a < 0 or min(zeros) <= -a:
        raise PreconditionError("Mellin strip of the family must contain a point left of all zeros")
    # polynomial in w = s + a:  prod (z_k + a - w)
    poly = np.array([1.0])
    for z in zeros:
        poly = npoly.polymul(poly, [z + a, -1.0])
    c = _rising_basis(poly)
    scale = 1.0
    if normalize:
        xs = np.linspace(0.0, 12.0 + 2 * order, 4001)
        vals = sum(cj * xs ** (j + a) for j, cj in enumerate(c)) * np.exp(-xs)
        scale = 1.0 / np.max(np.abs(vals))
    c = c * scale
    coeffs = tuple(c)
    zeros_t = tuple(zeros)

    def fn(x, _c=coeffs, _a=a):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for j, cj in enumerate(_c):
            out = out + cj * x ** (j + _a)
        return out * np.exp(-x)

    def mellin(s, _z=zeros_t, _a=a, _scale=scale):
        s = np.asarray(s, dtype=complex)
        out = np.exp(loggamma(s + _a)) * _scale
        for z in _z:
            out = out * (z - s)
        return out

    return RealFunction(fn, "half_line", decay_hint=0.9, small_x_power=a, mellin=mellin,
                        mellin_strip=(-a, np.inf), name=f"moment{order}_a{alpha:g}")


BUILTIN_HALF_LINE = {
    "exp": exp_decay,
    "gauss": gauss_half,
    "xgauss": xgauss,
    "zero": lambda: zero("half_line"),
}

BUILTIN_REAL_LINE = {
    "gauss": gauss_line,
    "gauss4": lambda: gauss_line(4.0),
    "sech": sech_line,
    "zero": lambda: zero("real_line"),
}
