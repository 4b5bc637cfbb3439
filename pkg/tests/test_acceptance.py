"""The ten acceptance criteria, each at its stated tolerance.

Every criterion prints one ``criterion N: PASS|FAIL`` line, also when pytest
captures output.  Run alone with ``pytest -v tests/test_acceptance.py``.
"""

import time
import warnings

import numpy as np
import pytest

from klindex import verify
from klindex.errors import NonIntegrableError
from klindex.functions import exp_decay, gauss_line
from klindex.inversion import (invert_adjoint, invert_forward, invert_forward_alpha0, invert_forward_alpha1,
                               moment_matched_test_function, sample_forward)
from klindex.pde import PdeConfig, pde_residual, residual_convergence, solve_ivp
from klindex.specfun import bessel_k, gamma, hyp1f2, hyp2f3, recip_gamma
from klindex.transforms import adjoint_function, forward, forward_via_composition, forward_via_mellin

XS = np.array([0.5, 1.0, 2.0])


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


@pytest.fixture(scope="module")
def bounds():
    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = verify.bound_compliance()
    return res, time.perf_counter() - t0


def test_criterion_01_hs_norm(report):
    c = verify.hs_norm_check(tol=1e-4)
    ok = c.passed and c.seconds <= 300
    report(1, ok, f"relative error {c.measured:.2e} (<= 1e-4), {c.detail}, {c.seconds:.1f} s")
    assert ok


def test_criterion_02_kernel_routes(report):
    c = verify.kernel_route_agreement(tol=1e-8)
    ok = c.passed and c.seconds <= 60
    report(2, ok, f"max gap {c.measured:.2e} (<= 1e-8 (1+|Phi|)), {c.detail}, {c.seconds:.1f} s")
    assert ok


def test_criterion_03_ode_residual(report):
    asserted, recorded = verify.kernel_ode_residual(tol=1e-6)
    report(3, asserted.passed, f"max relative residual {asserted.measured:.2e} at tau != 0 (<= 1e-6); "
                               f"tau = 0 recorded {recorded.measured:.2e}")
    assert asserted.passed


def test_criterion_04_composition(report):
    c = verify.composition_identity(tol=1e-6)
    report(4, c.passed, f"max gap {c.measured:.2e} (<= 1e-6) over integrable combinations; skipped: {c.detail}")
    assert c.passed


@pytest.mark.xfail(strict=True, raises=NonIntegrableError,
                   reason="K_{1/2+i tau/2}(x)^2 e^-x ~ 1/x at 0: the forward integral diverges at alpha=1")
def test_criterion_04_exp_at_alpha_one(report):
    f, taus = exp_decay(), [0.0, 1.0, 2.0]
    try:
        vals = [forward(f, 1.0, taus).values, forward_via_composition(f, 1.0, taus).values,
                forward_via_mellin(f, 1.0, taus).values]
    except NonIntegrableError as exc:
        report(4, False, f"[e^-x, alpha=1] not computable: {exc}")
        raise
    assert max(np.max(np.abs(a - b)) for a in vals for b in vals) <= 1e-6


def test_criterion_05_lemma3(report):
    c = verify.lemma3_identity(tol=1e-6)
    report(5, c.passed, f"max relative gap {c.measured:.2e} (<= 1e-6)")
    assert c.passed


# alpha -> (family, order, inverse)
ROUND_TRIPS = {
    0.25: ("exp_linear", 3, lambda F, x: invert_forward(F, 0.25, x, full_output=True)),
    0.5: ("exp_linear", 3, lambda F, x: invert_forward(F, 0.5, x, full_output=True)),
    0.75: ("exp_linear", 3, lambda F, x: invert_forward(F, 0.75, x, full_output=True)),
    0.0: ("exp_linear", 2, lambda F, x: invert_forward_alpha0(F, x, full_output=True)),
    1.0: ("exp_poly", 3, lambda F, x: invert_forward_alpha1(F, x, full_output=True)),
}


def test_criterion_06_forward_round_trips(report):
    t0 = time.perf_counter()
    worst, all_conv, parts = 0.0, True, []
    for alpha, (family, order, inverse) in ROUND_TRIPS.items():
        f = moment_matched_test_function(alpha, family, order)
        v, _, conv = inverse(sample_forward(f, alpha), XS)
        rel = float(np.max(np.abs(v - f(XS)) / np.abs(f(XS))))
        worst = max(worst, rel)
        all_conv &= bool(np.all(conv))
        parts.append(f"a={alpha:g}:{rel:.1e}")
    secs = time.perf_counter() - t0
    ok = worst <= 1e-3 and all_conv and secs <= 600
    report(6, ok, f"max relative error {worst:.2e} (<= 1e-3) [{' '.join(parts)}], "
                  f"all converged={all_conv}, {secs:.1f} s")
    assert ok


def test_criterion_07_adjoint_round_trip(report):
    g = gauss_line()
    worst, shape_ok, parts = 0.0, True, []
    for alpha in (0.0, 0.5, 1.0):
        for r in invert_adjoint(adjoint_function(g, alpha), alpha, XS):
            err = abs(r.value - np.exp(-r.x ** 2))
            worst = max(worst, err)
            # monotone sequence, or one whose Richardson extrapolation settled
            shape_ok &= r.monotone or r.converged
            parts.append(f"({alpha:g},{r.x:g}):{err:.1e}{'' if r.monotone else '*'}")
    ok = worst <= 1e-2 and shape_ok
    report(7, ok, f"max abs error {worst:.2e} (<= 1e-2) [{' '.join(parts)}]; * = extrapolation-convergent")
    assert ok


def _bound_summary(res, form):
    out = {}
    for b in res:
        n, k, w = out.get(b.formula, (0, 0, 0.0))
        rhs = b.rhs if form == "printed" else b.rhs_rederived
        out[b.formula] = (n + 1, k + b.holds(form), max(w, b.lhs / rhs if rhs > 0 else 0.0))
    return out


def _bound_text(summary):
    return "; ".join(f"{f} {k}/{n} (max lhs/rhs {w:.3f})" for f, (n, k, w) in summary.items())


@pytest.mark.xfail(strict=True, reason="printed constants of the embedding and the weighted adjoint "
                                       "inequality are too small; see the rederived test")
def test_criterion_08_bounds_as_printed(report, bounds):
    res, secs = bounds
    summary = _bound_summary(res, "printed")
    ok = all(b.holds("printed") for b in res)
    report(8, ok, f"printed constants: {_bound_text(summary)}; {secs:.0f} s")
    assert ok


def test_criterion_08_bounds_rederived(report, bounds):
    res, _ = bounds
    summary = _bound_summary(res, "rederived")
    ok = all(b.holds("rederived") for b in res)
    report(8, ok, f"rederived constants: {_bound_text(summary)}")
    assert ok


def test_criterion_08_sound_formulas_as_printed(bounds):
    res, _ = bounds
    sound = [b for b in res if b.formula in ("embedding_p1", "forward_lp", "adjoint_pointwise")]
    assert sound and all(b.holds("printed") for b in sound)


def test_criterion_09_pde(report):
    g = gauss_line(4.0)
    cfg = PdeConfig(0, np.linspace(0.8, 1.2, 21), np.linspace(0.0, 0.4, 21))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        res = float(np.max(np.abs(pde_residual(g, cfg).values)))
    _, _, ratio = residual_convergence(g, 0)
    ivp = solve_ivp(adjoint_function(gauss_line(), 0.0), 0, PdeConfig(0, XS, [0.0, 0.2, 0.4]))
    ok = res < 1e-3 and 3.5 <= ratio <= 4.5 and ivp.defect < 1e-2
    report(9, ok, f"residual {res:.2e} (< 1e-3), Richardson ratio {ratio:.3f} (in [3.5, 4.5]), "
                  f"initial-value defect {ivp.defect:.2e} (< 1e-2)")
    assert ok


def _specfun_checks():
    rng = np.random.default_rng(0)
    out = {}
    z = rng.uniform(-4, 6, 20) + 1j * rng.uniform(-3, 3, 20)
    g1 = gamma(z + 1)
    out["gamma recurrence"] = float(np.max(np.abs(g1 - z * gamma(z)) / np.abs(g1))) <= 1e-10
    out["recip_gamma * gamma"] = float(np.max(np.abs(recip_gamma(z) * gamma(z) - 1))) <= 1e-12
    sym = conj = True
    for mu in rng.uniform(-3, 3, 8) + 1j * rng.uniform(-10, 10, 8):
        for x in (0.5, 1.0, 2.0, 5.0):
            k, e, _ = bessel_k(mu, x, full_output=True)
            km, em, _ = bessel_k(-mu, x, full_output=True)
            sym &= abs(complex(k) - complex(km)) <= float(e) + float(em) + 1e-300
            conj &= abs(complex(bessel_k(np.conj(mu), x)) - np.conj(complex(k))) <= 1e-13 * abs(complex(k))
    out["K symmetry"], out["K conjugation"] = sym, conj
    x = 40.0
    out["large-x asymptotic"] = all(
        abs(complex(bessel_k(mu, x)) * np.sqrt(2 * x / np.pi) * np.exp(x) - 1) < 0.05 for mu in (0.0, 0.5, 1j))
    x, mu = 1e-4, 0.5
    out["small-x asymptotic"] = abs(x ** mu * complex(bessel_k(mu, x)) - 2 ** (mu - 1) * complex(gamma(mu))) < 1e-3
    a = 0.7 + 0.2j
    v2 = complex(hyp2f3(a, 1.1, a, 0.9, 1.3, 0.5).value)
    v1 = complex(hyp1f2(1.1, 0.9, 1.3, 0.5).value)
    out["2F3 -> 1F2 cancellation"] = abs(v2 - v1) <= 1e-14 * abs(v1)
    return out


def test_criterion_10_specfun(report):
    t0 = time.perf_counter()
    checks = _specfun_checks()
    secs = time.perf_counter() - t0
    ok = all(checks.values()) and secs <= 30
    failed = [k for k, v in checks.items() if not v]
    report(10, ok, f"{len(checks) - len(failed)}/{len(checks)} checks"
                   f"{' failed: ' + ', '.join(failed) if failed else ''}, {secs:.2f} s")
    assert ok
