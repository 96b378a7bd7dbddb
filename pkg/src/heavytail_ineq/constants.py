"""Closed-form constants of the weighted Chernoff, log-Sobolev and Wirtinger inequalities."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath

from .errors import ParameterOutOfRange

_DPS = 40


class Branch(enum.Enum):
    LOW_BETA = "LowBeta"
    HIGH_BETA = "HighBeta"
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"


class Weighting(enum.Enum):
    CAUCHY = "Cauchy"
    INVERSE_GAMMA = "InverseGamma"


@dataclass(frozen=True)
class ConstantValue:
    value: float
    branch: Branch
    valid_range: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ParameterOutOfRange(f"constant evaluated to {self.value}")

    def __float__(self):
        return self.value


def _check(cond: bool, msg: str):
    if not cond:
        raise ParameterOutOfRange(msg)


def _real(*vals):
    for v in vals:
        if not (isinstance(v, (int, float)) and math.isfinite(v)):
            raise ParameterOutOfRange(f"parameter {v!r} is not a finite real")


def chernoff_rho(beta: float) -> ConstantValue:
    """Best Chernoff constant for Cauchy-type and inverse Gamma (beta form) weights."""
    _real(beta)
    _check(beta > 0.5, f"chernoff_rho needs beta > 1/2, got {beta}")
    if beta <= 1.5:
        return ConstantValue((beta - 0.5) ** 2, Branch.LOW_BETA, "1/2 < beta <= 3/2")
    return ConstantValue(2.0 * (beta - 1.0), Branch.HIGH_BETA, "beta > 3/2", {"sharp": True})


def chernoff_gamma(kappa: float) -> ConstantValue:
    """Best Chernoff constant for the inverse Gamma law in shape form."""
    _real(kappa)
    _check(kappa > 0, f"chernoff_gamma needs kappa > 0, got {kappa}")
    if kappa <= 2.0:
        return ConstantValue(kappa * kappa / 4.0, Branch.LOW_BETA, "0 < kappa <= 2")
    return ConstantValue(kappa - 1.0, Branch.HIGH_BETA, "kappa > 2", {"sharp": True})


def chernoff_rho_of_alpha(beta: float, alpha: float,
                          family: Weighting | str = Weighting.CAUCHY) -> float:
    """The constant ``2 (beta - alpha)(2 alpha - 1)`` obtained for a fixed drift exponent.

    Both weightings lead to the same function of ``alpha``.
    """
    Weighting(family)
    return 2.0 * (beta - alpha) * (2.0 * alpha - 1.0)


def _golden_max(fn, a: float, b: float, tol: float = 1e-13) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class AlphaOptimum:
    alpha_max: float
    rho: float
    alpha_numeric: float
    rho_numeric: float


def optimize_alpha_chernoff(beta: float, family: Weighting | str = Weighting.CAUCHY) -> AlphaOptimum:
    """Maximise the Chernoff constant over the drift exponent ``alpha`` in (1/2, 1]."""
    _real(beta)
    _check(beta > 0.5, f"optimize_alpha_chernoff needs beta > 1/2, got {beta}")
    family = Weighting(family) if not isinstance(family, Weighting) else family

    def fn(a):
        return chernoff_rho_of_alpha(beta, a, family)

    a_num = _golden_max(fn, 0.5, 1.0)
    # the objective is a concave parabola: one Newton step removes the
    # bracket's O(sqrt(eps)) flatness error
    if a_num < 1.0 - 1e-7:
        h = 1e-4
        d1 = (fn(a_num + h) - fn(a_num - h)) / (2 * h)
        d2 = (fn(a_num + h) - 2 * fn(a_num) + fn(a_num - h)) / (h * h)
        if d2 < 0:
            a_num = min(1.0, a_num - d1 / d2)
    else:
        a_num = 1.0
    closed = min(1.0, beta / 2.0 + 0.25)
    return AlphaOptimum(closed, chernoff_rho(beta).value, a_num, fn(a_num))


def lsi_rho_cauchy(beta: float, alpha: float) -> ConstantValue:
    """Log-Sobolev constant for Cauchy-type densities with weight ``(1 + x**2)**alpha``."""
    _real(beta, alpha)
    _check(beta > 1.0, f"lsi_rho_cauchy needs beta > 1, got {beta}")
    _check(1.0 < alpha < beta, f"lsi_rho_cauchy needs 1 < alpha < beta, got alpha={alpha}, beta={beta}")
    if alpha >= 1.5:
        return ConstantValue(2.0 * beta - alpha, Branch.HIGH_BETA, "3/2 <= alpha < beta")
    with mpmath.workdps(_DPS):
        b, a = mpmath.mpf(beta), mpmath.mpf(alpha)
        v = (2 * b - a) * ((a - 1) / (2 - a)) ** (3 - 2 * a)
    return ConstantValue(float(v), Branch.INTERIOR, "1 < alpha < 3/2",
                         {"minimizer_x": math.sqrt(3.0 - 2.0 * alpha) / (alpha - 1.0)})


def _lsi_invgamma_core(shape_term: float, alpha: float, m: float) -> float:
    with mpmath.workdps(_DPS):
        s, a, mm = mpmath.mpf(shape_term), mpmath.mpf(alpha), mpmath.mpf(m)
        v = (mpmath.mpf(1) / 2) * (s / (mpmath.mpf(3) / 2 - a)) ** (3 - 2 * a) \
            * (mm * (2 - a)) ** (2 * a - 2) * (a - 1) ** (5 - 4 * a)
        return float(v)


def lsi_rho_invgamma(beta: float, alpha: float, m: float) -> ConstantValue:
    """Log-Sobolev constant for ``x**(-2 beta) exp(-m/x)`` with weight ``x**(2 alpha)``."""
    _real(beta, alpha, m)
    _check(beta > 1.0 and m > 0, f"lsi_rho_invgamma needs beta > 1, m > 0, got beta={beta}, m={m}")
    _check(1.0 < alpha <= 1.5 and alpha < beta,
           f"lsi_rho_invgamma needs 1 < alpha <= 3/2 and alpha < beta, got alpha={alpha}")
    if alpha == 1.5:
        _check(beta > 1.5, f"alpha = 3/2 needs beta > 3/2, got {beta}")
        return ConstantValue(m / 2.0, Branch.BOUNDARY, "alpha = 3/2, beta > 3/2")
    return ConstantValue(_lsi_invgamma_core(2.0 * beta - alpha, alpha, m), Branch.INTERIOR,
                         "1 < alpha < 3/2, alpha < beta")


def lsi_rho_invgamma_std(kappa: float, alpha: float, m: float) -> ConstantValue:
    """As :func:`lsi_rho_invgamma` for the shape parametrisation ``kappa = 2 beta - 1``."""
    _real(kappa, alpha, m)
    _check(kappa > 1.0 and m > 0, f"lsi_rho_invgamma_std needs kappa > 1, m > 0, got kappa={kappa}, m={m}")
    _check(1.0 < alpha <= 1.5 and 2.0 * alpha < kappa + 1.0,
           f"lsi_rho_invgamma_std needs 1 < alpha <= 3/2 and alpha < (kappa + 1)/2, got alpha={alpha}")
    if alpha == 1.5:
        _check(kappa > 2.0, f"alpha = 3/2 needs kappa > 2, got {kappa}")
        return ConstantValue(m / 2.0, Branch.BOUNDARY, "alpha = 3/2, kappa > 2")
    return ConstantValue(_lsi_invgamma_core(kappa + 1.0 - alpha, alpha, m), Branch.INTERIOR,
                         "1 < alpha < 3/2, 2 alpha < kappa + 1")


def bobkov_ledoux_prefactor(beta: float) -> ConstantValue:
    """Prefactor ``1/(beta - 1)`` of the unweighted-in-beta Cauchy log-Sobolev bound."""
    _real(beta)
    _check(beta > 1.0, f"bobkov_ledoux_prefactor needs beta > 1, got {beta}")
    return ConstantValue(1.0 / (beta - 1.0), Branch.HIGH_BETA, "beta > 1",
                         {"log_gradient_form": 1.0 / (4.0 * (beta - 1.0)), "weight": "(1+x^2)^2"})


def wirtinger_D(beta: float, m: float) -> ConstantValue:
    """``1 / (xbar h(xbar))`` with ``xbar`` the median of ``InverseGammaBM(beta, m)``."""
    from .densities import InverseGammaBM

    _real(beta, m)
    _check(beta > 0.5 and m > 0, f"wirtinger_D needs beta > 1/2, m > 0, got beta={beta}, m={m}")
    model = InverseGammaBM(beta, m)
    xbar = model.median()
    return ConstantValue(1.0 / (xbar * model.pdf(xbar)), Branch.INTERIOR, "beta > 1/2, m > 0",
                         {"median": xbar})


def wirtinger_D_std(kappa: float, m: float) -> ConstantValue:
    return wirtinger_D((kappa + 1.0) / 2.0, m)


# sweep helpers used by the CLI: name -> (function, parameter names)
CONSTANT_TABLE = {
    "chernoff-rho": (chernoff_rho, ("beta",)),
    "chernoff-gamma": (chernoff_gamma, ("kappa",)),
    "lsi-rho-cauchy": (lsi_rho_cauchy, ("beta", "alpha")),
    "lsi-rho-invgamma": (lsi_rho_invgamma, ("beta", "alpha", "m")),
    "lsi-rho-invgamma-std": (lsi_rho_invgamma_std, ("kappa", "alpha", "m")),
    "bobkov-ledoux": (bobkov_ledoux_prefactor, ("beta",)),
    "wirtinger-d": (wirtinger_D, ("beta", "m")),
}
