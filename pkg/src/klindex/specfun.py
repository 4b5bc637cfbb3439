"""Special functions at complex order and argument.

Everything here is vectorised over numpy broadcasting.  The transforms in
this package need:

* ``gamma``, ``loggamma``, ``recip_gamma``, ``beta`` for complex arguments,
  including large imaginary parts where Gamma itself under/overflows.
* ``bessel_k``: the Macdonald function K_mu(x) for complex mu and x > 0.
  The default route is the integral ``K_mu(x) = 1/2 int_R exp(-x cosh u + mu u) du``
  discretised by the trapezoid rule (spectrally accurate for this integrand)
  on a contour shifted into the complex plane so that large ``Im mu`` does
  not cost digits to cancellation.  When ``Im mu`` is large and ``x`` is
  comparatively small the integrand oscillates ``~ Im(mu) * log(1/x)`` times
  and the ascending series is both cheaper and more accurate, so it is used
  there instead.
* ``bessel_i`` and the generalized hypergeometric series ``hyp2f3``,
  ``hyp1f2`` with a cancellation diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special as _sc

from .errors import DomainError, PoleError

__all__ = [
    "SeriesResult",
    "gamma",
    "loggamma",
    "recip_gamma",
    "beta",
    "bessel_k",
    "bessel_i",
    "hyp2f3",
    "hyp1f2",
    "hyp_pfq",
]

_EPS = np.finfo(float).eps



def _is_nonpositive_integer(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _loggamma_complex(z: np.ndarray) -> np.ndarray:
    # principal branch; stays finite where Gamma itself under/overflows
    return _sc.loggamma(np.asarray(z, dtype=complex))


def loggamma(z):
    """A branch of log Gamma(z); ``exp(loggamma(z)) == Gamma(z)``.

    For real positive input the result is the real log-gamma.  Raises
    :class:`PoleError` at non-positive integers.
    """
    arr = np.asarray(z)
    zc = np.asarray(arr, dtype=complex)
    if np.any(_is_nonpositive_integer(zc)):
        raise PoleError("log-gamma evaluated at a non-positive integer")
    out = _loggamma_complex(zc)
    if not np.iscomplexobj(arr) and np.all(zc.real > 0):
        out = out.real
    return out[()] if out.ndim == 0 else out


def gamma(z):
    """Gamma(z) for complex z; raises :class:`PoleError` at the poles."""
    arr = np.asarray(z)
    zc = np.asarray(arr, dtype=complex)
    if np.any(_is_nonpositive_integer(zc)):
        raise PoleError("gamma evaluated at a non-positive integer")
    out = np.exp(_loggamma_complex(zc))
    if not np.iscomplexobj(arr):
        out = out.real
    return out[()] if out.ndim == 0 else out


def recip_gamma(z):
    """1/Gamma(z), entire; exactly zero at non-positive integers."""
    arr = np.asarray(z)
    zc = np.atleast_1d(np.asarray(arr, dtype=complex))
    out = np.zeros_like(zc)
    poles = _is_nonpositive_integer(zc)
    ok = ~poles
    if np.any(ok):
        out[ok] = np.exp(-_loggamma_complex(zc[ok]))
    out = out.reshape(np.shape(arr))
    if not np.iscomplexobj(arr):
        out = out.real
    return out[()] if out.ndim == 0 else out


def beta(a, b):
    """Euler beta B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    a_arr, b_arr = np.asarray(a), np.asarray(b)
    ac = np.asarray(a_arr, dtype=complex)
    bc = np.asarray(b_arr, dtype=complex)
    if np.any(_is_nonpositive_integer(ac)) or np.any(_is_nonpositive_integer(bc)):
        raise PoleError("beta evaluated at a pole")
    ab = ac + bc
    log_val = _loggamma_complex(ac) + _loggamma_complex(bc)
    out = np.where(_is_nonpositive_integer(ab), 0.0, 0.0j)
    regular = ~_is_nonpositive_integer(ab)
    out = np.where(regular, np.exp(log_val - _loggamma_complex(np.where(regular, ab, 1.0))), 0.0)
    if not (np.iscomplexobj(a_arr) or np.iscomplexobj(b_arr)):
        out = out.real
    return out[()] if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Hypergeometric series
# ---------------------------------------------------------------------------

@dataclass
class SeriesResult:
    """Value of a truncated power series with diagnostics.

    ``cancellation_ratio`` is max|partial sum| / |value|; values above about
    1e8 mean the result has lost that many digits to cancellation.
    """

    value: np.ndarray
    abs_err_est: np.ndarray
    terms_used: int
    cancellation_ratio: np.ndarray

    CANCELLATION_WARN = 1e8

    @property
    def ill_conditioned(self) -> np.ndarray:
        return np.asarray(self.cancellation_ratio) > self.CANCELLATION_WARN


def hyp_pfq(a_params, b_params, z, tol: float = 1e-16, max_terms: int = 5000) -> SeriesResult:
    """Generalized hypergeometric series pFq(a; b; z) by term recurrence.

    Parameters broadcast against ``z``.  Summation stops once three
    consecutive terms are below ``tol * |partial sum|``.
    """
    z = np.asarray(z, dtype=complex)
    a_list = [np.asarray(a, dtype=complex) for a in a_params]
    b_list = [np.asarray(b, dtype=complex) for b in b_params]
    shape = np.broadcast_shapes(z.shape, *(a.shape for a in a_list), *(b.shape for b in b_list))
    z = np.broadcast_to(z, shape).ravel()
    a_list = [np.broadcast_to(a, shape).ravel() for a in a_list]
    b_list = [np.broadcast_to(b, shape).ravel() for b in b_list]

    # Terminating numerators protect a non-positive integer denominator only if
    # they vanish first.
    stop_at = np.full(z.shape, np.iinfo(np.int64).max)
    for a in a_list:
        neg = _is_nonpositive_integer(a)
        stop_at = np.where(neg, np.minimum(stop_at, (-a.real).astype(np.int64)), stop_at)
    for b in b_list:
        bad = _is_nonpositive_integer(b) & ((-b.real) < stop_at)
        if np.any(bad):
            raise DomainError("denominator parameter is a non-positive integer")

    n_el = z.size
    total = np.ones(n_el, dtype=complex)
    term = np.ones(n_el, dtype=complex)
    peak = np.ones(n_el)
    last_small = np.zeros(n_el, dtype=int)
    active = np.ones(n_el, dtype=bool)
    err = np.zeros(n_el)
    n = 0
    for n in range(max_terms):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        ratio = z[idx] / (n + 1)
        for a in a_list:
            ratio = ratio * (a[idx] + n)
        for b in b_list:
            ratio = ratio / (b[idx] + n)
        t = term[idx] * ratio
        term[idx] = t
        s = total[idx] + t
        total[idx] = s
        peak[idx] = np.maximum(peak[idx], np.abs(s))
        small = np.abs(t) <= tol * np.abs(s)
        small |= t == 0
        last_small[idx] = np.where(small, last_small[idx] + 1, 0)
        done = last_small[idx] >= 3
        err[idx] = np.abs(t)
        active[idx[done]] = False
    terms_used = n + 1
    abs_err = err + 4.0 * _EPS * peak * np.sqrt(terms_used)
    with np.errstate(divide="ignore"):
        cancel = np.where(np.abs(total) > 0, peak / np.maximum(np.abs(total), 1e-300), np.inf)
    return SeriesResult(
        value=total.reshape(shape),
        abs_err_est=abs_err.reshape(shape),
        terms_used=terms_used,
        cancellation_ratio=cancel.reshape(shape),
    )


def hyp2f3(a1, a2, b1, b2, b3, z, tol: float = 1e-16) -> SeriesResult:
    """2F3(a1, a2; b1, b2, b3; z)."""
    return hyp_pfq([a1, a2], [b1, b2, b3], z, tol=tol)


def hyp1f2(a1, b1, b2, z, tol: float = 1e-16) -> SeriesResult:
    """1F2(a1; b1, b2; z)."""
    return hyp_pfq([a1], [b1, b2], z, tol=tol)


def bessel_i(nu, x):
    """Modified Bessel function I_nu(x), complex order, x > 0, by ascending series."""
    nu = np.asarray(nu, dtype=complex)
    x = np.asarray(x, dtype=float)
    nu, x = np.broadcast_arrays(nu, x)
    if np.any(x <= 0):
        raise DomainError("bessel_i needs x > 0")
    # I_{-n} = I_n for integer n keeps the series parameter regular.
    neg_int = _is_nonpositive_integer(nu)
    nu_eff = np.where(neg_int, -nu, nu)
    pre = np.exp(nu_eff * np.log(x / 2.0)) * recip_gamma(nu_eff + 1.0)
    series = hyp_pfq([], [nu_eff + 1.0], x * x / 4.0)
    out = pre * series.value
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Macdonald function
# ---------------------------------------------------------------------------

_K_MIN_NODES = 32
_K_MAX_NODES = 1 << 17
_K_CHUNK = 1 << 21
# Series regime: |Im mu| large relative to x.
_K_SERIES_MIN_IM = 2.0
_K_SERIES_X_FRAC = 0.5


def _k_series(mu: np.ndarray, x: np.ndarray):
    """K_mu(x) from the ascending expansion; mu must be far from the integers."""
    logh = np.log(x / 2.0)
    z = x * x / 4.0
    lg_p = _loggamma_complex(mu)
    lg_m = _loggamma_complex(-mu)
    s_minus = hyp_pfq([], [1.0 - mu], z)
    s_plus = hyp_pfq([], [1.0 + mu], z)
    p1 = np.exp(lg_p - mu * logh) * s_minus.value
    p2 = np.exp(lg_m + mu * logh) * s_plus.value
    val = 0.5 * (p1 + p2)
    err = 0.5 * (np.abs(p1) + np.abs(p2)) * 64 * _EPS + 0.5 * (
        np.abs(np.exp(lg_p - mu * logh)) * s_minus.abs_err_est
        + np.abs(np.exp(lg_m + mu * logh)) * s_plus.abs_err_est
    )
    return val, err


def _k_contour_setup(a, b, x, rtol):
    """Contour angle and truncation window for the shifted trapezoid rule."""
    phi = np.zeros_like(a)
    big = b > 1.0
    ratio = np.minimum(b / x, 1.0)
    phi = np.where(big, np.minimum(np.arcsin(ratio), np.pi / 2 - 1.0 / np.maximum(b, 1.0)), 0.0)
    c = x * np.cos(phi)
    u0 = np.arcsinh(a / c)
    ell0 = -c * np.cosh(u0) + a * u0
    drop = np.log(1.0 / rtol) + 10.0

    def g(u):
        return -c * np.cosh(u) + a * u - (ell0 - drop)

    def gp(u):
        return -c * np.sinh(u) + a

    # Right end: step out until below the threshold, then Newton (monotone).
    step = np.ones_like(a)
    hi = u0 + step
    for _ in range(200):
        bad = g(hi) > 0
        if not np.any(bad):
            break
        step = np.where(bad, 2 * step, step)
        hi = np.where(bad, u0 + step, hi)
    for _ in range(100):
        nxt = hi - g(hi) / gp(hi)
        if np.all(np.abs(nxt - hi) <= 1e-12 * (1 + np.abs(hi))):
            hi = nxt
            break
        hi = nxt
    step = np.ones_like(a)
    lo = u0 - step
    for _ in range(200):
        bad = g(lo) > 0
        if not np.any(bad):
            break
        step = np.where(bad, 2 * step, step)
        lo = np.where(bad, u0 - step, lo)
    for _ in range(100):
        nxt = lo - g(lo) / gp(lo)
        if np.all(np.abs(nxt - lo) <= 1e-12 * (1 + np.abs(lo))):
            lo = nxt
            break
        lo = nxt
    return phi, lo, hi


def _k_trapezoid(a, b, x, rtol):
    """K_{a+ib}(x), a, b >= 0, by the trapezoid rule on Im u = phi."""
    phi, lo, hi = _k_contour_setup(a, b, x, rtol)
    mu = a + 1j * b
    cphi = np.cos(phi)
    sphi = np.sin(phi)
    n_pairs = a.size
    value = np.zeros(n_pairs, dtype=complex)
    err = np.full(n_pairs, np.inf)
    conv = np.zeros(n_pairs, dtype=bool)

    def samples(idx, u):
        # u has shape (len(idx), m)
        xs = x[idx][:, None]
        ex = -xs * (np.cosh(u) * cphi[idx][:, None] + 1j * np.sinh(u) * sphi[idx][:, None])
        ex = ex + mu[idx][:, None] * (u + 1j * phi[idx][:, None])
        return np.exp(ex)

    n_nodes = _K_MIN_NODES
    width = hi - lo
    # level 0
    s_prev = np.zeros(n_pairs, dtype=complex)
    l1_prev = np.zeros(n_pairs)
    active = np.arange(n_pairs)
    for start in range(0, n_pairs, max(1, _K_CHUNK // (n_nodes + 1))):
        idx = active[start:start + max(1, _K_CHUNK // (n_nodes + 1))]
        j = np.arange(n_nodes + 1)
        h = width[idx] / n_nodes
        u = lo[idx][:, None] + h[:, None] * j[None, :]
        e = samples(idx, u)
        w = np.ones(n_nodes + 1)
        w[0] = w[-1] = 0.5
        s_prev[idx] = h * (e @ w)
        l1_prev[idx] = h * (np.abs(e) @ w)
    while active.size and n_nodes < _K_MAX_NODES:
        n_new = 2 * n_nodes
        s_new = np.empty(active.size, dtype=complex)
        l1_new = np.empty(active.size)
        chunk = max(1, _K_CHUNK // n_nodes)
        j = np.arange(1, n_new, 2)
        for start in range(0, active.size, chunk):
            sl = slice(start, start + chunk)
            idx = active[sl]
            h = width[idx] / n_new
            u = lo[idx][:, None] + h[:, None] * j[None, :]
            e = samples(idx, u)
            s_new[sl] = 0.5 * s_prev[idx] + h * e.sum(axis=1)
            l1_new[sl] = 0.5 * l1_prev[idx] + h * np.abs(e).sum(axis=1)
        diff = np.abs(s_new - s_prev[active])
        scale = np.maximum(np.abs(s_new), 1e-2 * l1_new)
        ok = (diff <= rtol * scale) | (l1_new == 0)
        s_prev[active] = s_new
        l1_prev[active] = l1_new
        value[active] = s_new
        err[active] = diff + 4 * _EPS * l1_new
        conv[active[ok]] = True
        active = active[~ok]
        n_nodes = n_new
    return 0.5 * value, 0.5 * err, conv


def bessel_k(mu, x, rtol: float = 1e-14, full_output: bool = False):
    """Macdonald function K_mu(x) for complex order ``mu`` and real ``x > 0``.

    With ``full_output=True`` returns ``(value, abs_err_est, converged)``.
    """
    mu_arr = np.asarray(mu, dtype=complex)
    x_arr = np.asarray(x, dtype=float)
    mu_b, x_b = np.broadcast_arrays(mu_arr, x_arr)
    shape = mu_b.shape
    if np.any(~np.isfinite(x_b)) or np.any(x_b <= 0):
        raise DomainError("bessel_k needs finite x > 0")
    m = mu_b.ravel()
    xv = x_b.ravel().astype(float)
    a = np.abs(m.real)
    b = np.abs(m.imag)
    flip = (m.real * m.imag) < 0

    value = np.empty(m.size, dtype=complex)
    err = np.empty(m.size)
    conv = np.ones(m.size, dtype=bool)

    use_series = (b >= _K_SERIES_MIN_IM) & (xv <= _K_SERIES_X_FRAC * b)
    if np.any(use_series):
        s = use_series
        v, e = _k_series(a[s] + 1j * b[s], xv[s])
        value[s], err[s] = v, e
    quad = ~use_series
    if np.any(quad):
        v, e, c = _k_trapezoid(a[quad], b[quad], xv[quad], rtol)
        value[quad], err[quad], conv[quad] = v, e, c
    value = np.where(flip, np.conj(value), value)
    # Real order: the imaginary part is rounding noise.
    value = np.where(m.imag == 0, value.real + 0j, value)
    value = value.reshape(shape)
    if full_output:
        return value, err.reshape(shape), conv.reshape(shape)
    return value[()] if value.ndim == 0 else value
