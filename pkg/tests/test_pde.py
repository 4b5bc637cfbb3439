import numpy as np
import pytest

from klindex.errors import PreconditionError
from klindex.functions import gauss_line, sech_line, zero
from klindex.pde import PdeConfig, decay_bound_check, pde_residual, residual_convergence, solve_ivp, u_field
from klindex.transforms import adjoint, adjoint_function

G4 = gauss_line(4.0)


def test_zero_datum():
    cfg = PdeConfig(0, [0.8, 1.0, 1.2], [0.0, 0.1, 0.2])
    assert u_field(zero("real_line"), cfg).max_abs() == 0
    assert np.max(np.abs(pde_residual(zero("real_line"), cfg).values)) == 0


def test_order_sign_symmetry():
    r, th = [0.5, 1.0, 2.0], [0.0, 0.3, 0.6]
    a = u_field(G4, PdeConfig(2, r, th)).values
    b = u_field(G4, PdeConfig(-2, r, th)).values
    np.testing.assert_array_equal(a, b)


def test_initial_line_is_adjoint():
    u = u_field(G4, PdeConfig(0, [1.0], [0.0]))
    assert u.values[0, 0] == pytest.approx(adjoint(G4, 0.0, [1.0]).values[0], rel=1e-9)
    assert u.err_ests[0, 0] > 0


# the fourth-difference model is a deliberately pessimistic bound
@pytest.mark.filterwarnings("ignore:grid too coarse")
def test_residual_small_at_h002():
    n_r = n_t = 21
    cfg = PdeConfig(0, np.linspace(0.8, 1.2, n_r), np.linspace(0.0, 0.4, n_t))
    res = pde_residual(G4, cfg)
    assert np.max(np.abs(res.values)) < 1e-3


def test_residual_second_order():
    coarse, fine, ratio = residual_convergence(G4, 0)
    assert coarse < 1e-3
    assert 3.5 <= ratio <= 4.5


def test_residual_needs_uniform_grid():
    with pytest.raises(PreconditionError):
        pde_residual(G4, PdeConfig(0, [0.8, 0.9, 1.2], [0.0, 0.1, 0.2]))


@pytest.mark.parametrize("n,tau,x,beta", [(0, 4.0, 1.0, np.pi / 4), (2, 10.0, 0.5, 1.0)])
def test_decay_bound(n, tau, x, beta):
    lhs, rhs = decay_bound_check(n, tau, x, beta)
    assert lhs <= rhs


def test_decay_bound_at_zero_beta():
    lhs, rhs = decay_bound_check(1, 3.0, 1.0, 0.0)
    assert rhs == pytest.approx(np.sqrt(np.pi / 2) * np.exp(-1), rel=1e-12)
    assert lhs <= rhs


def test_config_validation():
    with pytest.raises(PreconditionError):
        PdeConfig(0, [1.0, 0.5], [0.0])
    with pytest.raises(PreconditionError):
        PdeConfig(0, [1.0], [0.0], beta=2.0)


def test_integrability_probe_rejects_sech():
    with pytest.raises(PreconditionError):
        u_field(sech_line(), PdeConfig(0, [1.0], [0.0]))


def test_ivp_theta_range():
    with pytest.raises(PreconditionError):
        solve_ivp(lambda r: np.zeros_like(r), 0, PdeConfig(0, [1.0], [0.0, np.pi / 2]))


def test_ivp_zero():
    res = solve_ivp(lambda r: np.zeros_like(np.asarray(r, float)), 0, PdeConfig(0, [0.5, 1.0], [0.0, 0.2]))
    assert res.field.max_abs() == 0
    assert res.defect == 0


def test_ivp_synthesized():
    G = adjoint_function(gauss_line(), 0.0)
    res = solve_ivp(G, 0, PdeConfig(0, [0.5, 1.0, 2.0], [0.0, 0.2, 0.4]))
    assert res.defect < 1e-2
