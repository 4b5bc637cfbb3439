import itertools

import numpy as np
import pytest

from klindex.errors import DomainError, PreconditionError
from klindex.kernel import (ContourConfig, KernelParams, ode_residual, phi, phi_cosh_route, phi_derivatives,
                            phi_direct, phi_integral, phi_mellin_barnes)

# mpmath, 30 digits
K0_1_SQ = 0.17726157759590402559
DPHI_0_0_1 = -0.50683530693362280437
D2PHI_05_1_1 = 1.2646974054477553539
PHI_1_2_08 = 0.16940209961465407568

GRID = list(itertools.product((0.0, 0.5, 1.0), (0.0, 1.0, 3.0)))
XS = np.array([0.5, 1.0, 2.0])


def test_direct_values():
    assert float(phi_direct(KernelParams(0, 0), 1.0)) == pytest.approx(K0_1_SQ, rel=1e-13)
    assert float(phi_direct(KernelParams(1, 0), 1.0)) == pytest.approx(np.pi / 2 * np.exp(-2), rel=1e-13)
    assert float(phi_direct(KernelParams(1, 2), 0.8)) == pytest.approx(PHI_1_2_08, rel=1e-13)


def test_direct_even_in_tau():
    assert float(phi_direct(KernelParams(1, 2), 0.7)) == float(phi_direct(KernelParams(1, -2), 0.7))


def test_domain():
    with pytest.raises(DomainError):
        phi(0.5, 1.0, -1.0)
    with pytest.raises(DomainError):
        KernelParams(np.nan, 0.0)


@pytest.mark.parametrize("alpha,tau", GRID)
def test_routes_agree(alpha, tau):
    p = KernelParams(alpha, tau)
    ref = np.asarray(phi_direct(p, XS))
    for route in (phi_integral, phi_cosh_route, phi_mellin_barnes):
        r = route(p, XS)
        assert np.all(r.converged)
        np.testing.assert_array_less(np.abs(r.value - ref), 1e-8 * (1 + np.abs(ref)))


def test_integral_tau_zero_real():
    r = phi_integral(KernelParams(0.5, 2.0), 1.0)
    assert np.all(np.abs(np.imag(r.value)) <= r.err_est + 1e-15)


def test_mellin_barnes_contours():
    p = KernelParams(1.0, 2.0)
    a = phi_mellin_barnes(p, 0.8, ContourConfig(mu=1.5)).value[0]
    assert float(a) == pytest.approx(PHI_1_2_08, rel=1e-9)
    b = phi_mellin_barnes(KernelParams(0, 0), 1.0, ContourConfig(mu=1.0)).value[0]
    assert float(b) == pytest.approx(K0_1_SQ, rel=1e-9)
    with pytest.raises(PreconditionError):
        phi_mellin_barnes(p, 1.0, ContourConfig(mu=0.5))


def test_mellin_barnes_even_in_tau():
    v1 = phi_mellin_barnes(KernelParams(0.5, 1.5), XS).value
    v2 = phi_mellin_barnes(KernelParams(0.5, -1.5), XS).value
    np.testing.assert_allclose(v1, v2, rtol=1e-12)


def test_derivatives():
    d = phi_derivatives(KernelParams(0, 0), 1.0, order=1)
    assert d[1][0] == pytest.approx(DPHI_0_0_1, rel=1e-10)
    d = phi_derivatives(KernelParams(0.5, 1.0), 1.0, order=2)
    assert d[2][0] == pytest.approx(D2PHI_05_1_1, rel=1e-9)


def test_derivative_vs_finite_difference():
    p, h = KernelParams(0.0, 0.0), 1e-4
    fd = (float(phi_direct(p, 1 + h)) - float(phi_direct(p, 1 - h))) / (2 * h)
    assert phi_derivatives(p, 1.0, order=1)[1][0] == pytest.approx(fd, abs=1e-5)


def test_derivatives_even_in_tau():
    np.testing.assert_allclose(phi_derivatives(KernelParams(0.5, 1.3), XS),
                               phi_derivatives(KernelParams(0.5, -1.3), XS), rtol=1e-13)


@pytest.mark.parametrize("alpha,tau,x", [(0.5, 1.0, 1.0), (0.0, 2.0, 0.5), (1.0, 0.5, 2.0)])
def test_ode_residual_small(alpha, tau, x):
    assert ode_residual(KernelParams(alpha, tau), x).relative.max() < 1e-6
