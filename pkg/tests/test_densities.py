import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as si
from scipy import stats
from scipy.special import gammaincc

from heavytail_ineq.densities import (INFINITE, CauchyType, GeneralizedGamma, GibbsPotential,
                                      InverseGammaBM, InverseGammaStd, SymmetricPolynomial,
                                      from_block, is_infinite, make_density)
from heavytail_ineq.errors import CatalogUnknown, DomainError, ParameterOutOfRange
from heavytail_ineq.quadrature import integrate

INF = math.inf


def total_mass(model):
    return integrate(model.pdf, model.interval, points=model.breakpoints).value


# normalisation

def test_cauchy_beta_one_constant_is_one_over_pi():
    assert CauchyType(1.0).norm_constant == pytest.approx(1 / math.pi, rel=1e-12)
    assert CauchyType(1.0).pdf(0.0) == pytest.approx(1 / math.pi, rel=1e-12)


def test_inverse_gamma_shape_one_constant_is_m():
    for m in (0.5, 1.0, 3.0):
        assert InverseGammaStd(1.0, m).norm_constant == pytest.approx(m, rel=1e-14)


def test_symmetric_polynomial_three_halves_constant_is_one():
    assert SymmetricPolynomial(1.5).norm_constant == pytest.approx(1.0, rel=1e-12)


def test_inverse_gamma_numeric_and_closed_form_agree():
    for kappa, m in [(0.7, 1.0), (2.0, 3.0), (5.5, 0.4)]:
        model = InverseGammaStd(kappa, m)
        k = integrate(lambda x: np.exp(model._log_kernel(np.asarray(x))), model.interval).value
        assert 1 / k == pytest.approx(model.norm_constant, rel=1e-10)


def test_generalized_gamma_numeric_constant_matches_closed_form():
    for beta, alpha, m in [(2.0, 1.25, 1.0), (3.0, 1.5, 4.0), (2.5, 1.4, 2.0)]:
        g = GeneralizedGamma(beta, alpha, m)
        assert g.norm_constant == pytest.approx(g.norm_constant_closed_form(), rel=1e-10)
        # about 1e-8 of this mass sits below y = 1, next to the anchor of the tail map
        assert total_mass(g) == pytest.approx(1.0, abs=1e-12)


def test_steep_generalized_gamma_kernel_is_normalised():
    g = GeneralizedGamma(9.1, 1.07, 0.2)
    assert g.norm_constant == pytest.approx(g.norm_constant_closed_form(), rel=1e-10)


# pdf and cdf

def test_inverse_gamma_pdf_at_one():
    assert InverseGammaStd(1.0, 1.0).pdf(1.0) == pytest.approx(math.exp(-1), rel=1e-14)


def test_pdf_matches_scipy_distributions():
    x = np.linspace(-20, 20, 41)
    assert np.allclose(CauchyType(1.0).pdf(x), stats.cauchy.pdf(x), rtol=1e-12)
    xp = np.geomspace(1e-2, 1e3, 40)
    for kappa, m in [(1.0, 1.0), (2.5, 3.0)]:
        assert np.allclose(InverseGammaStd(kappa, m).pdf(xp), stats.invgamma.pdf(xp, kappa, scale=m),
                           rtol=1e-11)
    # InverseGammaBM(beta, m) is the shape 2 beta - 1 law
    assert np.allclose(InverseGammaBM(2.0, 1.5).pdf(xp), stats.invgamma.pdf(xp, 3.0, scale=1.5), rtol=1e-11)


def test_cdf_examples():
    assert CauchyType(1.0).cdf(1.0) == pytest.approx(0.75, abs=1e-14)
    assert InverseGammaStd(1.0, 1.0).cdf(1 / math.log(2)) == pytest.approx(0.5, abs=1e-14)
    for model in (CauchyType(1.7), SymmetricPolynomial(0.9), GibbsPotential("anharmonic")):
        assert model.cdf(0.0) == pytest.approx(0.5, abs=1e-12)


def test_cdf_matches_scipy_for_student_t():
    # CauchyType(beta) is a scaled Student t with 2 beta - 1 degrees of freedom
    beta = 2.5
    nu = 2 * beta - 1
    x = np.linspace(-30, 30, 61)
    assert np.allclose(CauchyType(beta).cdf(x), stats.t.cdf(x * math.sqrt(nu), nu), atol=1e-13)


def test_cdf_against_quadrature_oracle_for_generalized_gamma():
    g = GeneralizedGamma(2.0, 1.25, 1.0)
    for y in (0.1, 1.0, 3.0):
        oracle, _ = si.quad(g.pdf, 0, y, epsabs=1e-14, epsrel=1e-12)
        assert g.cdf(y) == pytest.approx(oracle, rel=1e-9)


def test_symmetric_pdf_is_even():
    x = np.linspace(0, 50, 101)
    for model in (CauchyType(0.8), SymmetricPolynomial(2.0), GibbsPotential("logcosh")):
        assert np.allclose(model.pdf(x), model.pdf(-x), rtol=1e-14)


def test_domain_errors():
    with pytest.raises(DomainError):
        InverseGammaStd(1.0, 1.0).pdf(-1.0)
    with pytest.raises(DomainError):
        InverseGammaStd(1.0, 1.0).cdf(-0.5)


def test_parameter_ranges():
    for bad in (lambda: CauchyType(0.5), lambda: SymmetricPolynomial(0.4), lambda: InverseGammaStd(0.0, 1.0),
                lambda: InverseGammaStd(1.0, -1.0), lambda: InverseGammaBM(0.5, 1.0),
                lambda: GeneralizedGamma(1.2, 1.5, 1.0), lambda: CauchyType(float("nan"))):
        with pytest.raises(ParameterOutOfRange):
            bad()


# median and quantiles

def test_median_examples():
    assert CauchyType(3.0).median() == 0.0
    assert InverseGammaStd(1.0, 1.0).median() == pytest.approx(1 / math.log(2), rel=1e-13)
    med = InverseGammaStd(2.0, 1.0).median()
    # oracle: fine tabulation of Q(2, 1/x)
    xs = np.linspace(0.1, 3.0, 2_900_001)
    tab = xs[np.argmin(np.abs(gammaincc(2.0, 1.0 / xs) - 0.5))]
    assert med == pytest.approx(tab, abs=1e-6)
    assert abs(InverseGammaStd(2.0, 1.0).cdf(med) - 0.5) < 1e-12


def test_gibbs_tails_match_scipy():
    g = GibbsPotential("gaussian", 0.5)
    x = np.array([-12.0, -3.0, 0.0, 2.0, 8.0, 12.0])
    assert np.allclose(g.sf(x), stats.norm.sf(x, 0.5), rtol=1e-10, atol=0)
    assert np.allclose(g.cdf(x), stats.norm.cdf(x, 0.5), rtol=1e-10, atol=0)


def test_gibbs_median_tracks_location():
    assert GibbsPotential("gaussian", 1.5).median() == pytest.approx(1.5, abs=1e-10)


# moments

def test_moment_examples():
    assert CauchyType(2.5).moment(2) == pytest.approx(0.5, rel=1e-10)
    assert CauchyType(1.0).moment(2) is INFINITE
    assert CauchyType(3.0).moment(3) == 0.0
    assert SymmetricPolynomial(1.5).moment(2) is INFINITE


def test_second_moment_finite_iff_beta_above_three_halves():
    assert is_infinite(CauchyType(1.4).moment(2))
    assert not is_infinite(CauchyType(1.6).moment(2))


def test_inverse_gamma_moment_closed_form():
    model = InverseGammaStd(4.0, 2.0)
    assert model.moment(2) == pytest.approx(stats.invgamma.moment(2, 4.0, scale=2.0), rel=1e-10)
    assert model.moment_closed_form(2) == pytest.approx(model.moment(2), rel=1e-10)
    assert model.moment(4) is INFINITE


def test_infinite_marker_behaves_like_inf():
    assert float(INFINITE) == INF
    assert repr(INFINITE) == "Infinite"


# text blocks

def test_block_round_trip():
    for model in (CauchyType(1.25), InverseGammaStd(2.0, 1.5), GeneralizedGamma(2.0, 1.25, 1.0),
                  GibbsPotential("logcosh", 0.5)):
        back = from_block(model.to_block())
        assert back == model


def test_unknown_family_is_rejected():
    with pytest.raises(CatalogUnknown):
        make_density("Pareto", beta=2.0)


# properties over random parameters

def _draw(family, u, v):
    if family == "CauchyType":
        return CauchyType(u)
    if family == "SymmetricPolynomial":
        return SymmetricPolynomial(u)
    if family == "InverseGammaBM":
        return InverseGammaBM(u, v)
    if family == "InverseGammaStd":
        return InverseGammaStd(u, v)
    return GeneralizedGamma(u + 1.1, min(1.5, 1.05 + 0.1 * v), v)


families = st.sampled_from(["CauchyType", "SymmetricPolynomial", "InverseGammaBM", "InverseGammaStd",
                            "GeneralizedGamma"])
betas = st.floats(0.6, 8.0)
scales = st.floats(0.2, 5.0)


@settings(max_examples=200, deadline=None)
@given(families, betas, scales)
def test_random_models_have_unit_mass(family, u, v):
    model = _draw(family, u, v)
    assert abs(total_mass(model) - 1.0) < 1e-8


@settings(max_examples=40, deadline=None)
@given(families, betas, scales)
def test_cdf_derivative_is_pdf(family, u, v):
    model = _draw(family, u, v)
    qs = np.linspace(0.02, 0.98, 64)
    x = np.asarray(model.quantile(qs))
    h = 1e-5 * np.maximum(np.abs(x), 1e-2)
    fd = (model.cdf(x + h) - model.cdf(x - h)) / (2 * h)
    assert np.allclose(fd, model.pdf(x), rtol=1e-6, atol=0)


@settings(max_examples=60, deadline=None)
@given(families, betas, scales)
def test_median_consistency(family, u, v):
    model = _draw(family, u, v)
    assert abs(model.cdf(model.median()) - 0.5) < 1e-10


@settings(max_examples=60, deadline=None)
@given(families, betas, scales, st.floats(1e-6, 1 - 1e-6))
def test_quantile_inverts_cdf(family, u, v, q):
    model = _draw(family, u, v)
    assert model.cdf(model.quantile(q)) == pytest.approx(q, rel=1e-9, abs=1e-12)
