import numpy as np
import pytest

from klindex.quadrature import (QuadConfig, integrate_contour_vertical, integrate_finite, integrate_real_line,
                                integrate_semi_infinite)
from klindex.specfun import bessel_k, gamma

K0_1_SQ = 0.17726157759590402559  # mpmath


def test_finite_basic():
    assert integrate_finite(lambda x: np.ones_like(x), 0.0, 1.0).value == pytest.approx(1.0, rel=1e-13)
    assert integrate_finite(np.sin, 0.0, np.pi).value == pytest.approx(2.0, rel=1e-12)


def test_finite_endpoint_singularity():
    r = integrate_finite(lambda x: x ** -0.5, 0.0, 1.0, QuadConfig(rel_tol=1e-8))
    assert r.converged
    assert r.value == pytest.approx(2.0, rel=1e-8)


def test_vector_integrand_flags():
    r = integrate_finite(lambda x: np.stack([x, x ** 2], axis=-1), 0.0, 1.0)
    np.testing.assert_allclose(r.value, [0.5, 1 / 3], rtol=1e-13)
    assert r.all_converged


def test_semi_infinite():
    assert integrate_semi_infinite(lambda x: np.exp(-x), 0.0, decay_hint=1.0).value == pytest.approx(1.0, rel=1e-12)
    r = integrate_semi_infinite(lambda x: np.exp(-x * x), 0.0)
    assert r.value == pytest.approx(np.sqrt(np.pi) / 2, rel=1e-12)


def test_semi_infinite_bessel():
    r = integrate_semi_infinite(lambda x: bessel_k(0.0, x).real, 0.0, decay_hint=1.0)
    assert r.value == pytest.approx(np.pi / 2, rel=1e-10)


def test_real_line():
    assert integrate_real_line(lambda x: np.exp(-x * x)).value == pytest.approx(np.sqrt(np.pi), rel=1e-12)
    assert integrate_real_line(lambda x: 1 / np.cosh(x), decay_hint=1.0).value == pytest.approx(np.pi, rel=1e-12)
    r = integrate_real_line(lambda x: np.exp(1j * x - x * x))
    assert complex(r.value) == pytest.approx(np.sqrt(np.pi) * np.exp(-0.25), rel=1e-12)


def test_contour_laplace():
    # e^{-x} = (1/2 pi i) int Gamma(s) x^{-s} ds at x = 1
    r = integrate_contour_vertical(lambda s: gamma(s), 1.0)
    assert complex(r.value / (2j * np.pi)) == pytest.approx(np.exp(-1), rel=1e-10)


def test_contour_zero():
    r = integrate_contour_vertical(lambda s: np.zeros_like(s), 1.0)
    assert r.value == 0


def test_contour_kernel_square():
    # K_0(x)^2 from its gamma quotient along Re s = 1, at x = 1
    def f(s):
        return gamma(s) ** 3 / gamma(s + 0.5) * (np.sqrt(np.pi) / 2)
    r = integrate_contour_vertical(f, 1.0)
    assert complex(r.value / (2j * np.pi)).real == pytest.approx(K0_1_SQ, rel=1e-10)


def test_nonconvergence_is_flagged():
    r = integrate_finite(lambda x: np.sin(1 / x) / x, 1e-6, 1.0, QuadConfig(max_subdivisions=5))
    assert not r.converged
    assert r.err_est > 0
