"""Weighted Poincare, log-Sobolev and Wirtinger inequalities for heavy-tailed densities."""

from .constants import (bobkov_ledoux_prefactor, chernoff_gamma, chernoff_rho, lsi_rho_cauchy,
                        lsi_rho_invgamma, lsi_rho_invgamma_std, optimize_alpha_chernoff, wirtinger_D)
from .densities import (INFINITE, CauchyType, GeneralizedGamma, GibbsPotential, InverseGammaBM,
                        InverseGammaStd, SymmetricPolynomial, from_block, make_density)
from .errors import *  # noqa: F401,F403
from .quadrature import QuadratureConfig, expectation, integrate
from .verifiers import DEFAULT_CORPUS, build_spec, run_corpus, verify

__version__ = "0.1.0"
