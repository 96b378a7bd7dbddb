import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as si

from heavytail_ineq.densities import GibbsPotential, InverseGammaStd, SymmetricPolynomial, CauchyType
from heavytail_ineq.errors import AdmissibilityError, CatalogUnknown, ConvexityLost, ParameterOutOfRange
from heavytail_ineq.fp_models import (build_model, brascamp_lieb_model, cauchy_chernoff_model,
                                      cauchy_lsi_change_of_variables, cauchy_lsi_model, chernoff_weight,
                                      drift_admissible, invgamma_chernoff_model,
                                      invgamma_lsi_change_of_variables, invgamma_lsi_model, median_form_model,
                                      median_weight, ou_model, pairing_residual, steady_state_residual,
                                      wealth_model)

X = np.linspace(-10, 10, 201)
XP = np.geomspace(0.05, 50, 200)


def test_cauchy_alpha_one_has_linear_drift():
    model = cauchy_chernoff_model(1.0, 1.5)
    assert model.steady_state == CauchyType(2.5)
    assert np.allclose(model.Q(X), 3 * X, rtol=1e-15, atol=0)


def test_cauchy_three_quarters_is_admissible():
    model = cauchy_chernoff_model(0.75, 1.0)
    assert model.params["beta"] == 1.5
    assert np.all(model.dQ(np.linspace(-100, 100, 1000)) > 0)
    assert drift_admissible(model)


def test_cauchy_residual_vanishes_at_origin():
    assert steady_state_residual(cauchy_chernoff_model(0.8, 2.0), [0.0]).sup == 0.0


def test_cauchy_boundary_alpha_is_not_admissible():
    with pytest.raises(ParameterOutOfRange):
        cauchy_chernoff_model(0.5, 1.0)
    adm = drift_admissible(cauchy_chernoff_model(0.5, 1.0, strict=False))
    assert not adm.ok and adm.diagnostics
    with pytest.raises(AdmissibilityError):
        chernoff_weight(cauchy_chernoff_model(0.5, 1.0, strict=False))


def test_invgamma_alpha_one_has_linear_drift():
    lam, m = 2.0, 1.5
    model = invgamma_chernoff_model(1.0, lam, m)
    assert np.allclose(model.Q(XP), lam * XP - m, rtol=1e-14)
    assert float(model.Q(np.array([0.0]))[0]) == -m


def test_invgamma_residual_on_bounded_grid():
    for alpha, lam, m in [(1.0, 2.0, 1.0), (0.75, 1.0, 3.0), (0.6, 4.0, 0.5)]:
        model = invgamma_chernoff_model(alpha, lam, m)
        assert steady_state_residual(model, XP).sup < 1e-8


def test_wealth_model_steady_state():
    model = wealth_model(2.0, 1.0, 0.0)
    assert model.params["mu"] == 1.0
    assert model.steady_state == InverseGammaStd(2.0, 1.0)
    f = model.steady_state.pdf(XP)
    assert np.allclose(f, XP ** -3 * np.exp(-1 / XP), rtol=1e-12)
    assert np.allclose(model.P(XP), XP ** 2) and np.allclose(model.Q(XP), XP - 1)
    assert steady_state_residual(wealth_model(2.0, 1.0, 0.5)).sup < 1e-8


@pytest.mark.parametrize("model", [
    cauchy_chernoff_model(1.0, 1.5), cauchy_chernoff_model(0.6, 0.5), cauchy_lsi_model(1.2, 1.0),
    invgamma_chernoff_model(0.9, 2.0, 1.0), invgamma_lsi_model(1.25, 1.5, 2.0), wealth_model(1.0, 2.0, 0.3),
    ou_model(0.7), brascamp_lieb_model("logcosh"), brascamp_lieb_model("anharmonic"),
], ids=lambda m: m.describe())
def test_steady_state_residual_invariant(model):
    assert steady_state_residual(model).sup < 1e-7


def test_median_weight_for_symmetric_polynomial():
    beta = 2.0
    K, _ = median_weight(SymmetricPolynomial(beta))
    assert np.allclose(K(X), (1 + np.abs(X)) / (2 * beta - 1), rtol=1e-10)


def test_median_form_identity_by_finite_differences():
    model = InverseGammaStd(2.0, 1.0)
    fp = median_form_model(model)
    xbar = model.median()
    x = np.geomspace(0.05, 20, 300)
    x = x[np.abs(x - xbar) > 1e-3]
    h = 1e-6 * x
    kf = lambda t: fp.P(t) * model.pdf(t)
    res = model.pdf(x) * np.sign(x - xbar) + (kf(x + h) - kf(x - h)) / (2 * h)
    assert np.max(np.abs(res)) / np.max(model.pdf(x)) < 1e-6
    assert steady_state_residual(fp, x).sup < 1e-10


def test_median_weight_is_continuous_at_median():
    model = InverseGammaStd(2.0, 1.0)
    K, _ = median_weight(model)
    xbar = model.median()
    left, right = K(np.array([xbar * (1 - 1e-10), xbar * (1 + 1e-10)]))
    assert left == pytest.approx(right, rel=1e-8)
    assert left == pytest.approx(0.5 / model.pdf(xbar), rel=1e-8)


def test_chernoff_weight_examples():
    lam = 1.5
    w = chernoff_weight(cauchy_chernoff_model(1.0, lam))
    assert np.allclose(w(X), (1 + X * X) / (2 * lam), rtol=1e-14)
    assert np.allclose(w.dominating(X), w(X), rtol=1e-14)
    w = chernoff_weight(invgamma_chernoff_model(1.0, lam, 1.0))
    assert np.allclose(w(XP), XP ** 2 / lam, rtol=1e-14)
    pot = GibbsPotential("logcosh")
    w = chernoff_weight(brascamp_lieb_model(pot))
    assert np.allclose(w(X), 1 / pot.d2V(X), rtol=1e-14)
    assert w.label == "1/V''"


@settings(max_examples=40, deadline=None)
@given(st.floats(0.55, 1.0), st.floats(0.2, 5.0))
def test_dominating_weight_bounds_exact_weight(alpha, lam):
    w = chernoff_weight(cauchy_chernoff_model(alpha, lam))
    assert np.all(w(X) <= w.dominating(X) * (1 + 1e-12))
    w = chernoff_weight(invgamma_chernoff_model(alpha, lam, 1.0))
    assert np.all(w(XP) <= w.dominating(XP) * (1 + 1e-12))


def test_ou_drift_is_admissible():
    assert drift_admissible(ou_model(2.0)).ok


def test_build_model_rejects_unknown_names():
    assert build_model("ou", M=1.0).steady_state.median() == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(CatalogUnknown):
        build_model("nope")


def test_parameter_errors():
    for bad in (lambda: invgamma_chernoff_model(1.2, 1.0, 1.0), lambda: wealth_model(1.0, 1.0, 2.0),
                lambda: cauchy_lsi_model(1.0, 1.0), lambda: invgamma_chernoff_model(1.0, 1.0, -1.0)):
        with pytest.raises(ParameterOutOfRange):
            bad()
    with pytest.raises(ConvexityLost):
        invgamma_lsi_change_of_variables(1.6, 1.0, 1.0)


# change of variables

def test_cauchy_cov_is_odd_and_matches_quadrature():
    alpha = 2.0
    cov = cauchy_lsi_change_of_variables(alpha, 1.0, n_grid=10_000)
    assert cov.y_of_x(np.array([0.0]))[0] == 0.0
    assert np.allclose(cov.y_of_x(-X), -cov.y_of_x(X), rtol=1e-15, atol=0)
    for x in (0.3, 2.0, 40.0):
        oracle, _ = si.quad(lambda t: (1 + t * t) ** (-alpha / 2), 0, x, epsabs=1e-14, epsrel=1e-13)
        assert cov.y_of_x(np.array([x]))[0] == pytest.approx(oracle, rel=1e-12)
    # alpha = 2 gives arctan
    assert cov.range[1] == pytest.approx(math.pi / 2, rel=1e-14)


def test_cauchy_cov_grid_minimum():
    cov = cauchy_lsi_change_of_variables(1.2, 1.0)
    assert cov.grid_min == pytest.approx(cov.rho_lower, rel=1e-6)
    cov = cauchy_lsi_change_of_variables(2.0, 1.0)
    assert cov.grid_argmin_x == pytest.approx(0.0, abs=1e-3)
    assert cov.minimizer_x == 0.0


def test_invgamma_cov_examples():
    for m in (0.5, 2.0):
        assert invgamma_lsi_change_of_variables(1.5, 1.0, m).rho_lower == m / 2
    beta, alpha, m = 2.0, 1.25, 1.0
    cov = invgamma_lsi_change_of_variables(alpha, 2 * (beta - alpha), m)
    assert cov.grid_min == pytest.approx(cov.rho_lower, rel=1e-6)
    assert cov.y_of_x(np.array([cov.minimizer_x]))[0] == pytest.approx(cov.params["y_minimizer"], rel=1e-4)


COVS = [lambda: cauchy_lsi_change_of_variables(1.2, 1.0), lambda: cauchy_lsi_change_of_variables(2.5, 0.5),
        lambda: invgamma_lsi_change_of_variables(1.25, 1.5, 1.0),
        lambda: invgamma_lsi_change_of_variables(1.5, 1.0, 3.0)]


@pytest.mark.parametrize("make", COVS)
def test_cov_round_trip_and_certificate(make):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        cov = make()
    x = np.linspace(-50, 50, 1000) if cov.range[0] < 0 else np.geomspace(1e-2, 1e2, 1000)
    back = cov.x_of_y(cov.y_of_x(x))
    assert np.max(np.abs(back - x) / np.maximum(1.0, np.abs(x))) < 1e-10
    assert cov.grid_min >= cov.rho_lower * (1 - 1e-9)


@pytest.mark.parametrize("make", COVS)
def test_pairing_relation(make):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        cov = make()
    x = np.linspace(-20, 20, 401) if cov.range[0] < 0 else np.geomspace(0.05, 50, 400)
    assert np.max(np.abs(pairing_residual(cov, x))) < 1e-8


def test_invgamma_pairing_is_a_density():
    cov = invgamma_lsi_change_of_variables(1.25, 1.5, 1.0)
    mass, _ = si.quad(cov.steady_state_y, 0, np.inf, limit=200)
    assert mass == pytest.approx(1.0, rel=1e-7)
