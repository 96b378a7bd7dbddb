import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from heavytail_ineq.constants import (CONSTANT_TABLE, Branch, Weighting, bobkov_ledoux_prefactor,
                                      chernoff_gamma, chernoff_rho, chernoff_rho_of_alpha, lsi_rho_cauchy,
                                      lsi_rho_invgamma, lsi_rho_invgamma_std, optimize_alpha_chernoff,
                                      wirtinger_D, wirtinger_D_std)
from heavytail_ineq.densities import InverseGammaBM
from heavytail_ineq.errors import ParameterOutOfRange
from heavytail_ineq.fp_models import invgamma_lsi_change_of_variables


def test_chernoff_rho_table():
    assert chernoff_rho(1.0).value == 0.25
    assert chernoff_rho(1.0).branch is Branch.LOW_BETA
    assert chernoff_rho(2.0).value == 2.0
    assert chernoff_rho(2.0).branch is Branch.HIGH_BETA
    assert chernoff_rho(1.5).value == 1.0


def test_chernoff_gamma_table():
    assert chernoff_gamma(2.0).value == 1.0
    assert chernoff_gamma(3.0).value == 2.0
    assert chernoff_gamma(1.0).value == 0.25


@pytest.mark.parametrize("beta", [0.7, 1.2, 1.5, 2.0, 3.7])
def test_gamma_is_rho_under_shape_reparametrisation(beta):
    assert chernoff_gamma(2 * beta - 1).value == pytest.approx(chernoff_rho(beta).value, rel=1e-15)


def test_branch_continuity():
    e = 1e-12
    assert abs(chernoff_rho(1.5 - e).value - chernoff_rho(1.5 + e).value) < 1e-9
    assert abs(chernoff_gamma(2 - e).value - chernoff_gamma(2 + e).value) < 1e-9
    for beta in (1.8, 2.5, 4.0):
        assert abs(lsi_rho_cauchy(beta, 1.5 - e).value - lsi_rho_cauchy(beta, 1.5).value) < 1e-9


@pytest.mark.parametrize("call", [
    lambda: chernoff_rho(0.5), lambda: chernoff_gamma(0.0), lambda: lsi_rho_cauchy(1.0, 0.9),
    lambda: lsi_rho_cauchy(3.0, 3.0), lambda: lsi_rho_invgamma(2.0, 1.6, 1.0),
    lambda: lsi_rho_invgamma(1.4, 1.5, 1.0), lambda: lsi_rho_invgamma_std(2.0, 1.5, 1.0),
    lambda: bobkov_ledoux_prefactor(1.0), lambda: wirtinger_D(0.5, 1.0), lambda: wirtinger_D(1.0, 0.0),
    lambda: chernoff_rho(float("inf")), lambda: chernoff_rho(float("nan")),
])
def test_out_of_range_parameters_raise(call):
    with pytest.raises(ParameterOutOfRange):
        call()


def test_alpha_optimisation_examples():
    opt = optimize_alpha_chernoff(1.0)
    assert opt.alpha_max == 0.75 and opt.rho == 0.25
    opt = optimize_alpha_chernoff(3.0)
    assert opt.alpha_max == 1.0 and opt.rho == 4.0


@settings(max_examples=60, deadline=None)
@given(st.floats(0.51, 6.0), st.sampled_from(list(Weighting)))
def test_numeric_alpha_optimum_matches_closed_form(beta, family):
    opt = optimize_alpha_chernoff(beta, family)
    assert abs(opt.alpha_numeric - opt.alpha_max) < 1e-9
    assert opt.rho_numeric == pytest.approx(opt.rho, rel=1e-12, abs=1e-15)
    assert chernoff_rho_of_alpha(beta, opt.alpha_max, family) == pytest.approx(opt.rho, rel=1e-12, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.51, 6.0), st.floats(0.5, 1.0))
def test_no_alpha_beats_the_optimum(beta, alpha):
    assert chernoff_rho_of_alpha(beta, alpha) <= chernoff_rho(beta).value * (1 + 1e-14)


def test_lsi_cauchy_examples():
    assert lsi_rho_cauchy(3.0, 2.0).value == 4.0
    assert lsi_rho_cauchy(3.0, 1.5).value == 4.5
    assert lsi_rho_cauchy(3.0, 1.001).value < 0.02


def test_lsi_cauchy_interior_branch_against_mpmath():
    beta, alpha = 2.4, 1.2
    with mpmath.workdps(50):
        b, a = mpmath.mpf(beta), mpmath.mpf(alpha)
        exact = (2 * b - a) * ((a - 1) / (2 - a)) ** (3 - 2 * a)
    assert lsi_rho_cauchy(beta, alpha).value == pytest.approx(float(exact), rel=1e-15)


@pytest.mark.parametrize("beta", [2.5, 3.0, 4.0])
def test_bobkov_ledoux_is_recovered_at_alpha_two(beta):
    rho = lsi_rho_cauchy(beta, 2.0).value
    assert rho == 2 * (beta - 1)
    assert abs(2 / rho - bobkov_ledoux_prefactor(beta).value) < 1e-12


def test_bobkov_ledoux_values():
    assert bobkov_ledoux_prefactor(2.0).value == 1.0
    assert bobkov_ledoux_prefactor(3.0).value == 0.5
    assert bobkov_ledoux_prefactor(3.0).metadata["log_gradient_form"] == 0.125


@pytest.mark.parametrize("m", [0.5, 1.0, 4.0])
def test_lsi_invgamma_boundary_is_half_m(m):
    assert lsi_rho_invgamma(2.0, 1.5, m).value == m / 2
    assert lsi_rho_invgamma_std(3.0, 1.5, m).value == m / 2


@pytest.mark.parametrize("m", [1.0, 3.0])
def test_lsi_invgamma_interior_branch_tends_to_boundary(m):
    gaps = [lsi_rho_invgamma(2.0, 1.5 - e, m).value - m / 2 for e in (1e-3, 1e-5, 1e-7, 1e-9)]
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)
    assert gaps[-1] < 1e-6 * max(1.0, m)


def test_lsi_invgamma_matches_grid_minimum():
    beta, alpha, m = 2.0, 1.25, 1.0
    cov = invgamma_lsi_change_of_variables(alpha, 2 * (beta - alpha), m)
    gmin, _ = cov.certify()
    assert gmin == pytest.approx(lsi_rho_invgamma(beta, alpha, m).value, rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(st.floats(1.6, 6.0), st.floats(1.01, 1.49), st.floats(0.2, 5.0))
def test_shape_form_equals_beta_form(beta, alpha, m):
    a = lsi_rho_invgamma(beta, alpha, m).value
    b = lsi_rho_invgamma_std(2 * beta - 1, alpha, m).value
    assert a == pytest.approx(b, rel=1e-14)


def test_wirtinger_D_examples():
    assert wirtinger_D(1.0, 1.0).value == pytest.approx(2 / math.log(2), abs=1e-10)
    assert wirtinger_D_std(1.0, 1.0).value == pytest.approx(2 / math.log(2), abs=1e-10)
    assert wirtinger_D(1.0, 1.0).metadata["median"] == pytest.approx(1 / math.log(2), rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.6, 6.0), st.floats(0.1, 10.0))
def test_wirtinger_D_is_scale_free(beta, m):
    assert wirtinger_D(beta, m).value == pytest.approx(wirtinger_D(beta, 1.0).value, rel=1e-10)


def test_wirtinger_D_definition():
    model = InverseGammaBM(1.7, 2.0)
    xbar = model.median()
    assert wirtinger_D(1.7, 2.0).value == pytest.approx(1 / (xbar * model.pdf(xbar)), rel=1e-14)


def test_constant_table_is_consistent():
    for name, (fn, params) in CONSTANT_TABLE.items():
        args = {"beta": 2.5, "kappa": 4.0, "alpha": 1.25, "m": 1.0}
        assert fn(*(args[p] for p in params)).value > 0, name
