import warnings

import numpy as np
import pytest

from klindex.errors import PreconditionError, TailModelError
from klindex.functions import gauss_line
from klindex.inversion import (EpsilonSchedule, SampledFunction, adjoint_bracket, adjoint_bracket_alpha0,
                               epsilon_kernel, epsilon_kernel_contour, inv_kernel, inv_kernel_alpha0,
                               inv_kernel_alpha1, inv_kernel_complex, invert_adjoint, invert_adjoint_alpha1_limit,
                               invert_forward, invert_forward_alpha0, invert_forward_alpha1, lemma3_check,
                               moment_matched_test_function, sample_forward)
from klindex.transforms import adjoint_function, mellin

INV_KERNEL_05_1_05 = -0.2870881146195188  # mpmath series + gamma
XS = np.array([0.5, 1.0, 2.0])


def _zero_samples():
    t = np.linspace(0, 10, 11)
    return SampledFunction(t, np.zeros_like(t), tail_model="zero")


def test_inv_kernel_value():
    assert float(inv_kernel(0.5, 1.0, 0.5).value) == pytest.approx(INV_KERNEL_05_1_05, rel=1e-10)


def test_inv_kernel_conjugate_in_tau():
    a = inv_kernel_complex(0.5, 1.3, 0.7)
    b = inv_kernel_complex(0.5, -1.3, 0.7)
    assert complex(b) == pytest.approx(complex(a).conjugate(), rel=1e-13)


def test_inv_kernel_near_integer_alpha_finite():
    v = inv_kernel(0.999, np.array([0.0, 1.0, 5.0]), 1.0).value
    assert np.all(np.isfinite(v))


def test_inv_kernel_alpha_range():
    with pytest.raises(PreconditionError):
        inv_kernel(1.0, 1.0, 1.0)


def test_endpoint_kernels_real_at_zero_tau():
    assert np.isfinite(float(inv_kernel_alpha0(0.0, 1.0).value))
    assert np.isfinite(float(inv_kernel_alpha1(0.0, 1.0).value))


@pytest.mark.parametrize("inverse", [lambda F, x: invert_forward(F, 0.5, x), invert_forward_alpha0,
                                     invert_forward_alpha1])
def test_zero_transform_inverts_to_zero(inverse):
    np.testing.assert_array_equal(inverse(_zero_samples(), XS), 0.0)


def test_inversion_is_linear():
    f = moment_matched_test_function(0.5, "exp_linear", 3)
    F = sample_forward(f, 0.5)
    G = SampledFunction(F.abscissas, 3.0 * F.values)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        np.testing.assert_allclose(invert_forward(G, 0.5, XS), 3.0 * invert_forward(F, 0.5, XS), rtol=1e-8)


def test_round_trip_half():
    f = moment_matched_test_function(0.5, "exp_linear", 3)
    v, err, conv = invert_forward(sample_forward(f, 0.5), 0.5, XS, full_output=True)
    assert np.all(conv)
    np.testing.assert_allclose(v, f(XS), rtol=1e-3)


def test_moment_constants():
    assert moment_matched_test_function(0.0)(0.0) == pytest.approx(1.0)
    assert moment_matched_test_function(0.5)(0.0) == pytest.approx(0.5)


@pytest.mark.parametrize("alpha,family", [(0.0, "exp_linear"), (0.5, "exp_linear"), (0.25, "exp_poly"),
                                          (1.0, "exp_poly")])
def test_moment_vanishes(alpha, family):
    f = moment_matched_test_function(alpha, family)
    assert abs(complex(mellin(f, 1.0 - alpha).value[0])) < 1e-10


def test_exp_linear_unavailable_at_one():
    with pytest.raises(PreconditionError):
        moment_matched_test_function(1.0, "exp_linear")


def test_epsilon_kernel_symmetry():
    a = epsilon_kernel(0.5, 0.5, 1.0, 2.0)
    b = epsilon_kernel(0.5, 0.5, -1.0, 2.0)
    assert complex(b) == pytest.approx(complex(a).conjugate(), rel=1e-13)


def test_epsilon_kernel_contour():
    series = complex(epsilon_kernel(0.5, 0.5, 1.0, 2.0))
    contour = complex(epsilon_kernel_contour(0.5, 0.5, 1.0, 2.0, c=0.2))
    assert contour == pytest.approx(series, rel=1e-8)


@pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
def test_epsilon_kernel_integer_alpha_finite(alpha):
    assert np.isfinite(complex(epsilon_kernel(alpha, 0.5, 1.0, 2.0)))


def test_alpha0_bracket_collapses():
    t = np.array([0.3, 2.0])
    np.testing.assert_allclose(adjoint_bracket(0.0, 0.25, 1.0, t), adjoint_bracket_alpha0(0.25, 1.0, t), rtol=1e-12)


def test_adjoint_round_trip_half():
    G = adjoint_function(gauss_line(), 0.5)
    r = invert_adjoint(G, 0.5, 1.0)
    assert r.converged
    assert r.value == pytest.approx(np.exp(-1.0), abs=1e-2)


def test_adjoint_zero():
    r = invert_adjoint(lambda t: np.zeros_like(t), 0.5, 1.0)
    assert r.value == 0
    assert invert_adjoint_alpha1_limit(lambda t: np.zeros_like(t), 1.0) == 0


def test_alpha1_limit_matches_schedule():
    G = adjoint_function(gauss_line(), 1.0)
    lim = invert_adjoint_alpha1_limit(G, 1.0)
    sched = invert_adjoint(G, 1.0, 1.0).value
    assert lim == pytest.approx(sched, abs=1e-2)
    assert lim == pytest.approx(np.exp(-1.0), abs=1e-4)


def test_schedule_validation():
    with pytest.raises(PreconditionError):
        EpsilonSchedule(ratio=1.5)
    with pytest.raises(PreconditionError):
        invert_adjoint(lambda t: t, 0.5, 0.0)


def test_lemma3_closed_form():
    lhs, rhs = lemma3_check(1.0, 0.0)
    assert rhs == pytest.approx(4 * np.pi, rel=1e-14)
    assert lhs == pytest.approx(4 * np.pi, rel=1e-6)
    lhs, rhs = lemma3_check(0.5, 1.0)
    assert lhs == pytest.approx(rhs, rel=1e-6)


# Lowest-order moment matching, as first proposed for these round trips.
# None of them reaches 1e-3 relative; see the reasons.

def _order1_round_trip(alpha, family, inverse):
    f = moment_matched_test_function(alpha, family, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        v, err, conv = inverse(sample_forward(f, alpha), XS, full_output=True)
    assert np.all(conv)
    np.testing.assert_allclose(v, f(XS), rtol=1e-3)


@pytest.mark.xfail(strict=True, raises=TailModelError,
                   reason="F decays like tau^-1.68 exp(-pi tau/2): the inversion integral diverges")
def test_order1_round_trip_half():
    _order1_round_trip(0.5, "exp_linear", lambda F, x, **kw: invert_forward(F, 0.5, x, **kw))


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="tail too slow for the inversion integral to converge")
def test_order1_round_trip_one():
    _order1_round_trip(1.0, "exp_poly", invert_forward_alpha1)


@pytest.mark.slow
@pytest.mark.xfail(strict=True, reason="(1-x)e^-x vanishes at x=1, so relative error is unbounded there; "
                                       "the tau^-2 tail also leaves the integral unconverged")
def test_order1_round_trip_zero():
    _order1_round_trip(0.0, "exp_linear", invert_forward_alpha0)
