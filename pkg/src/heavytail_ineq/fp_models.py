"""Fokker-Planck models ``f_t = (P f)_xx + (Q f)_x`` and their weighted inequalities.

A model bundles the diffusion ``P``, the drift ``Q``, their derivatives and
the steady state solving ``(P f)' + Q f = 0``.  The Chernoff weight is
``w = P / Q'``.  For the log-Sobolev bounds the variable ``y`` with
``dy/dx = P**-1/2`` turns the equation into one with unit diffusion, and the
convexity of the transformed potential gives the constant.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize, special

from .densities import (CauchyType, DensityModel, GeneralizedGamma, GibbsPotential,
                        InverseGammaBM, InverseGammaStd, POTENTIALS)
from .errors import AdmissibilityError, CatalogUnknown, ConvexityLost, ParameterOutOfRange

Fn = Callable[[np.ndarray], np.ndarray]


def _arr(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class FokkerPlanckModel:
    name: str
    P: Fn
    dP: Fn
    Q: Fn
    dQ: Fn
    steady_state: DensityModel
    params: dict = field(default_factory=dict)
    # description of the parameter range under which the Chernoff argument applies;
    # None when the parameters are inside it
    range_violation: str | None = None
    breakpoints: tuple[float, ...] = ()

    @property
    def interval(self):
        return self.steady_state.interval

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items() if isinstance(v, (int, float)))
        return f"{self.name}({inner})"


def _positive(name, v):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ParameterOutOfRange(f"{name} must be a positive real, got {v!r}")


# ---------------------------------------------------------------------------
# constructors


def _cauchy_coefficients(alpha: float, lam: float):
    def P(x):
        x = _arr(x)
        return (1.0 + x * x) ** alpha

    def dP(x):
        x = _arr(x)
        return 2.0 * alpha * x * (1.0 + x * x) ** (alpha - 1.0)

    def Q(x):
        x = _arr(x)
        return 2.0 * alpha * lam * x * (1.0 + x * x) ** (alpha - 1.0)

    def dQ(x):
        x = _arr(x)
        return 2.0 * alpha * lam * (1.0 + (2.0 * alpha - 1.0) * x * x) * (1.0 + x * x) ** (alpha - 2.0)

    return P, dP, Q, dQ


def cauchy_chernoff_model(alpha: float, lam: float, strict: bool = True) -> FokkerPlanckModel:
    """Drift/diffusion pair with Cauchy-type steady state of exponent ``alpha (1 + lam)``.

    ``strict=False`` admits the endpoint ``alpha = 1/2`` so that its failure of
    admissibility can be reported instead of raised.
    """
    _positive("alpha", alpha)
    _positive("lambda", lam)
    violation = None
    if not 0.5 < alpha <= 1.0:
        msg = f"alpha={alpha} outside (1/2, 1]"
        if strict or not 0.5 <= alpha <= 1.0:
            raise ParameterOutOfRange(msg)
        violation = msg
    beta = alpha * (1.0 + lam)
    if beta <= 0.5:
        raise ParameterOutOfRange(f"beta = alpha (1 + lambda) = {beta} must exceed 1/2")
    P, dP, Q, dQ = _cauchy_coefficients(alpha, lam)
    return FokkerPlanckModel("cauchy_chernoff", P, dP, Q, dQ, CauchyType(beta),
                             {"alpha": alpha, "lambda": lam, "beta": beta}, violation)


def cauchy_lsi_model(alpha: float, lam: float) -> FokkerPlanckModel:
    """Same coefficients with ``alpha > 1``: diffusion ``(1 + x**2)**alpha`` used by the log-Sobolev bound."""
    _positive("alpha", alpha)
    _positive("lambda", lam)
    if not alpha > 1.0:
        raise ParameterOutOfRange(f"alpha={alpha} must exceed 1")
    beta = alpha * (1.0 + lam)
    P, dP, Q, dQ = _cauchy_coefficients(alpha, lam)
    return FokkerPlanckModel("cauchy_lsi", P, dP, Q, dQ, CauchyType(beta),
                             {"alpha": alpha, "lambda": lam, "beta": beta})


def _invgamma_coefficients(alpha: float, lam: float, m: float):
    def P(x):
        x = _arr(x)
        return x ** (2.0 * alpha)

    def dP(x):
        x = _arr(x)
        return 2.0 * alpha * x ** (2.0 * alpha - 1.0)

    def Q(x):
        x = _arr(x)
        return (lam * x - m) * x ** (2.0 * alpha - 2.0)

    def dQ(x):
        x = _arr(x)
        return lam * (2.0 * alpha - 1.0) * x ** (2.0 * alpha - 2.0) \
            - m * (2.0 * alpha - 2.0) * x ** (2.0 * alpha - 3.0)

    return P, dP, Q, dQ


def invgamma_chernoff_model(alpha: float, lam: float, m: float) -> FokkerPlanckModel:
    """Diffusion ``x**(2 alpha)``, drift ``(lam x - m) x**(2 alpha - 2)``; steady state ``h_{beta,m}``, ``2 beta = 2 alpha + lam``."""
    _positive("alpha", alpha)
    _positive("lambda", lam)
    _positive("m", m)
    if not 0.5 < alpha <= 1.0:
        raise ParameterOutOfRange(f"alpha={alpha} outside (1/2, 1]")
    beta = alpha + lam / 2.0
    P, dP, Q, dQ = _invgamma_coefficients(alpha, lam, m)
    return FokkerPlanckModel("invgamma_chernoff", P, dP, Q, dQ, InverseGammaBM(beta, m),
                             {"alpha": alpha, "lambda": lam, "m": m, "beta": beta})


def invgamma_lsi_model(alpha: float, lam: float, m: float) -> FokkerPlanckModel:
    """As :func:`invgamma_chernoff_model` with ``1 < alpha <= 3/2``."""
    _positive("alpha", alpha)
    _positive("lambda", lam)
    _positive("m", m)
    if not 1.0 < alpha <= 1.5:
        raise ParameterOutOfRange(f"alpha={alpha} outside (1, 3/2]")
    beta = alpha + lam / 2.0
    P, dP, Q, dQ = _invgamma_coefficients(alpha, lam, m)
    return FokkerPlanckModel("invgamma_lsi", P, dP, Q, dQ, InverseGammaBM(beta, m),
                             {"alpha": alpha, "lambda": lam, "m": m, "beta": beta},
                             "Q' changes sign near 0 for alpha > 1")


def invgamma_model_for(beta: float, alpha: float, m: float) -> FokkerPlanckModel:
    """Model with steady state ``h_{beta,m}`` and diffusion ``x**(2 alpha)``."""
    lam = 2.0 * (beta - alpha)
    if alpha <= 1.0:
        return invgamma_chernoff_model(alpha, lam, m)
    return invgamma_lsi_model(alpha, lam, m)


def cauchy_model_for(beta: float, alpha: float) -> FokkerPlanckModel:
    lam = beta / alpha - 1.0
    if alpha <= 1.0:
        return cauchy_chernoff_model(alpha, lam)
    return cauchy_lsi_model(alpha, lam)


def wealth_model(sigma: float, lam: float, delta: float = 0.0) -> FokkerPlanckModel:
    """Diffusion ``sigma/2 x**(2 + delta)``, drift ``lam x**delta (x - 1)``.

    The steady state is the inverse Gamma law with ``mu = 2 lam / sigma``,
    shape ``1 + delta + mu`` and scale ``mu``.
    """
    _positive("sigma", sigma)
    _positive("lambda", lam)
    if not (isinstance(delta, (int, float)) and 0.0 <= delta <= 1.0):
        raise ParameterOutOfRange(f"delta={delta} outside [0, 1]")
    mu = 2.0 * lam / sigma

    def P(x):
        x = _arr(x)
        return 0.5 * sigma * x ** (2.0 + delta)

    def dP(x):
        x = _arr(x)
        return 0.5 * sigma * (2.0 + delta) * x ** (1.0 + delta)

    def Q(x):
        x = _arr(x)
        return lam * x ** delta * (x - 1.0)

    def dQ(x):
        x = _arr(x)
        if delta == 0.0:
            return lam * np.ones_like(x)
        return lam * ((1.0 + delta) * x ** delta - delta * x ** (delta - 1.0))

    violation = None if delta == 0.0 else f"delta={delta} > 0 makes Q' negative near 0"
    return FokkerPlanckModel("wealth", P, dP, Q, dQ, InverseGammaStd(1.0 + delta + mu, mu),
                             {"sigma": sigma, "lambda": lam, "delta": delta, "mu": mu}, violation)


def ou_model(M: float = 0.0) -> FokkerPlanckModel:
    """Unit diffusion with linear drift ``x - M`` (Gaussian steady state)."""

    def one(x):
        return np.ones_like(_arr(x))

    def zero(x):
        return np.zeros_like(_arr(x))

    return FokkerPlanckModel("ou", one, zero, lambda x: _arr(x) - M, one,
                             GibbsPotential("gaussian", float(M)), {"M": float(M)})


def brascamp_lieb_model(potential: str | GibbsPotential) -> FokkerPlanckModel:
    """Unit diffusion with drift ``V'``; the Chernoff weight reduces to ``1 / V''``."""
    model = potential if isinstance(potential, GibbsPotential) else GibbsPotential(potential)

    def one(x):
        return np.ones_like(_arr(x))

    def zero(x):
        return np.zeros_like(_arr(x))

    return FokkerPlanckModel("brascamp_lieb", one, zero, model.dV, model.d2V, model,
                             {"potential": model.potential, "loc": model.loc})


def median_weight(model: DensityModel) -> tuple[Fn, Fn]:
    """``K = F/f`` left of the median, ``(1 - F)/f`` right of it, and its derivative."""
    xbar = model.median()

    def K(x):
        x = _arr(x)
        f = model.pdf(x)
        tail = np.where(x <= xbar, model.cdf(x), model.sf(x))
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(f > 0, tail / np.where(f > 0, f, 1.0), 0.0)

    def dK(x):
        x = _arr(x)
        s = np.where(x <= xbar, 1.0, -1.0)
        return s - K(x) * model.dlog_pdf(x)

    return K, dK


def median_form_model(model: DensityModel) -> FokkerPlanckModel:
    """Diffusion ``K`` and drift ``sign(x - median)``; ``f`` is its steady state."""
    xbar = model.median()
    K, dK = median_weight(model)
    return FokkerPlanckModel("median_form", K, dK, lambda x: np.sign(_arr(x) - xbar),
                             lambda x: np.zeros_like(_arr(x)), model, {"median": xbar},
                             "drift is a step function", (xbar,))


MODEL_BUILDERS = {
    "cauchy_chernoff": cauchy_chernoff_model,
    "cauchy_lsi": cauchy_lsi_model,
    "invgamma_chernoff": invgamma_chernoff_model,
    "invgamma_lsi": invgamma_lsi_model,
    "wealth": wealth_model,
    "ou": ou_model,
    "brascamp_lieb": brascamp_lieb_model,
}


def build_model(name: str, **params) -> FokkerPlanckModel:
    try:
        fn = MODEL_BUILDERS[name]
    except KeyError:
        raise CatalogUnknown(f"unknown model {name!r}; known: {sorted(MODEL_BUILDERS)}") from None
    return fn(**params)


# ---------------------------------------------------------------------------
# checks


def graded_grid(interval, n: int = 10_000, reach: float = 1e6) -> np.ndarray:
    lo, hi = interval
    if lo == 0.0 and math.isinf(hi):
        return np.geomspace(1.0 / reach * 1e-2, reach * 1e2, n)
    if math.isinf(lo) and math.isinf(hi):
        s = math.asinh(reach)
        return np.sinh(np.linspace(-s, s, n))
    return np.linspace(lo, hi, n + 2)[1:-1]


@dataclass(frozen=True)
class ResidualReport:
    x: np.ndarray
    residual: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.residual)))


def steady_state_residual(model: FokkerPlanckModel, x=None) -> ResidualReport:
    """``((P f)' + Q f) / max f`` with analytic derivatives on a graded grid."""
    if x is None:
        lo, hi = model.interval
        if lo == 0.0:
            x = np.geomspace(1e-3, 1e4, 2001)
        else:
            x = np.sinh(np.linspace(-math.asinh(1e4), math.asinh(1e4), 2001))
    x = _arr(x)
    # the identity only holds away from the kinks of the coefficients
    x = x[~np.isin(x, model.breakpoints)]
    f = model.steady_state.pdf(x)
    r = f * (model.dP(x) + model.P(x) * model.steady_state.dlog_pdf(x) + model.Q(x))
    return ResidualReport(x, r / np.max(f))


@dataclass(frozen=True)
class Admissibility:
    ok: bool
    diagnostics: tuple[str, ...]
    violating_points: np.ndarray

    def __bool__(self):
        return self.ok


def drift_admissible(model: FokkerPlanckModel, n: int = 10_000) -> Admissibility:
    """Check ``Q' > 0`` on a graded grid and the boundary sign pattern of ``Q``."""
    diags: list[str] = []
    lo, hi = model.interval
    x = graded_grid(model.interval, n)
    with np.errstate(all="ignore"):
        dq = model.dQ(x)
    bad = x[~(dq > 0)]
    if bad.size:
        diags.append(f"Q' <= 0 at {bad.size} of {x.size} grid points (first at x={bad[0]:.6g})")
    if lo == 0.0:
        q_lo, q_hi = float(model.Q(np.array([1e-8]))[0]), float(model.Q(np.array([1e8]))[0])
    else:
        q_lo, q_hi = float(model.Q(np.array([-1e6]))[0]), float(model.Q(np.array([1e6]))[0])
    if not q_lo < 0:
        diags.append(f"Q does not become negative at the left end (Q={q_lo:.6g})")
    if not q_hi > 0:
        diags.append(f"Q does not become positive at the right end (Q={q_hi:.6g})")
    if model.range_violation:
        diags.append(model.range_violation)
    return Admissibility(not diags, tuple(diags), bad)


@dataclass(frozen=True)
class WeightFunction:
    w: Fn
    dominating: Fn | None
    label: str

    def __call__(self, x):
        return self.w(x)


def chernoff_weight(model: FokkerPlanckModel) -> WeightFunction:
    """``w = P / Q'``, with the simpler dominating weight when one is known."""
    adm = drift_admissible(model)
    if not adm:
        raise AdmissibilityError(f"{model.describe()} is not admissible: " + "; ".join(adm.diagnostics))

    def w(x):
        return model.P(x) / model.dQ(x)

    dominating = None
    p = model.params
    if model.name == "cauchy_chernoff":
        a, lam = p["alpha"], p["lambda"]
        dominating = lambda x: (1.0 + _arr(x) ** 2) / (2.0 * a * lam * (2.0 * a - 1.0))  # noqa: E731
        label = "(1+x^2)/(2 alpha lambda (2 alpha - 1))"
    elif model.name == "invgamma_chernoff":
        a, lam = p["alpha"], p["lambda"]
        dominating = lambda x: _arr(x) ** 2 / (lam * (2.0 * a - 1.0))  # noqa: E731
        label = "x^2/(lambda (2 alpha - 1))"
    elif model.name == "wealth":
        lam, sigma = p["lambda"], p["sigma"]
        dominating = lambda x: 0.5 * sigma * _arr(x) ** 2 / lam  # noqa: E731
        label = "sigma x^2/(2 lambda)"
    elif model.name in ("brascamp_lieb", "ou"):
        label = "1/V''"
    else:
        label = "P/Q'"
    return WeightFunction(w, dominating, label)


# ---------------------------------------------------------------------------
# change of variables for the log-Sobolev bounds


@dataclass
class ChangeOfVariables:
    y_of_x: Fn
    x_of_y: Fn
    range: tuple[float, float]
    Wpp: Fn
    rho_lower: float
    minimizer_x: float | None
    steady_state_y: Callable[[np.ndarray], np.ndarray]
    params: dict
    grid: np.ndarray = field(repr=False, default=None)
    grid_min: float = math.nan
    grid_argmin_x: float | None = None
    warnings: list[str] = field(default_factory=list)
    density_y: DensityModel | None = None

    def certify(self, n: int = 100_000) -> tuple[float, float]:
        """Minimum of ``Wpp`` over a dense grid, refined locally; returns ``(min, argmin_x)``."""
        y = self.grid if self.grid is not None and self.grid.size == n else self._make_grid(n)
        vals = self.Wpp(y)
        i = int(np.argmin(vals))
        best = float(vals[i])
        # a flat minimum leaves a run of values tied to rounding; take its centre
        tie = best + 4 * np.finfo(float).eps * abs(best)
        left, right = i, i
        while left > 0 and vals[left - 1] <= tie:
            left -= 1
        while right < y.size - 1 and vals[right + 1] <= tie:
            right += 1
        if right > left:
            y_mid = 0.5 * (y[left] + y[right])
            best = min(best, float(self.Wpp(np.array([y_mid]))[0]))
            return best, float(self.x_of_y(np.array([y_mid]))[0])
        lo, hi = y[max(i - 1, 0)], y[min(i + 1, y.size - 1)]
        best_y = y[i]
        if 0 < i < y.size - 1:
            res = optimize.minimize_scalar(lambda t: float(self.Wpp(np.array([t]))[0]),
                                           bounds=(lo, hi), method="bounded",
                                           options={"xatol": 1e-14 * max(1.0, abs(best_y))})
            if res.fun < best:
                best_y, best = float(res.x), float(res.fun)
        return best, float(self.x_of_y(np.array([best_y]))[0])

    def _make_grid(self, n: int) -> np.ndarray:
        raise NotImplementedError


class _CauchyCoV(ChangeOfVariables):
    def certify(self, n: int = 100_000) -> tuple[float, float]:
        # Wpp is even in x; report the minimizer on the positive side
        gmin, gx = super().certify(n)
        return gmin, abs(gx)

    def _make_grid(self, n):
        a = self.range[1]
        return np.linspace(-a, a, n + 2)[1:-1]


class _InvGammaCoV(ChangeOfVariables):
    def _make_grid(self, n):
        c = self.params["y_center"]
        return np.geomspace(c * 1e-4, c * 1e6, n)


def _finish(cov: ChangeOfVariables, n: int) -> ChangeOfVariables:
    cov.grid = cov._make_grid(n)
    gmin, gx = cov.certify(n)
    cov.grid_min, cov.grid_argmin_x = gmin, gx
    if cov.minimizer_x is not None and abs(gx - cov.minimizer_x) > 1e-4 * max(1.0, abs(cov.minimizer_x)):
        msg = (f"grid argmin x={gx:.10g} differs from the closed-form minimizer "
               f"x={cov.minimizer_x:.10g}; using the grid value")
        cov.warnings.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=3)
        cov.minimizer_x = gx
    return cov


def cauchy_lsi_change_of_variables(alpha: float, lam: float, n_grid: int = 100_000) -> ChangeOfVariables:
    """``y = int_0^x (1 + t**2)**(-alpha/2) dt`` and the convexity of the transformed potential.

    ``y`` is a regularised incomplete Beta function, so both directions are
    evaluated in closed form and the inverse is polished by Newton steps.
    """
    _positive("alpha", alpha)
    _positive("lambda", lam)
    if not alpha > 1.0:
        raise ParameterOutOfRange(f"alpha={alpha} must exceed 1")
    beta = alpha * (1.0 + lam)
    b = 0.5 * (alpha - 1.0)
    half_width = 0.5 * special.beta(0.5, b)

    def y_of_x(x):
        x = _arr(x)
        ax = np.abs(x)
        small = ax <= 1.0
        u = ax * ax / (1.0 + ax * ax)
        v = 1.0 / (1.0 + ax * ax)
        r = np.where(small, special.betainc(0.5, b, u), 1.0 - special.betainc(b, 0.5, v))
        return np.sign(x) * half_width * r

    def dy_dx(x):
        return (1.0 + _arr(x) ** 2) ** (-0.5 * alpha)

    def x_of_y(y):
        y = _arr(y)
        r = np.clip(np.abs(y) / half_width, 0.0, 1.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            u = special.betaincinv(0.5, b, np.minimum(r, 0.5))
            x_small = np.sqrt(u / (1.0 - u))
            v = special.betaincinv(b, 0.5, np.maximum(1.0 - r, 0.0))
            x_large = np.sqrt((1.0 - v) / v)
        x = np.where(r <= 0.5, x_small, x_large)
        x = np.where(np.isfinite(x), x, np.finfo(float).max)
        for _ in range(2):
            step = (y_of_x(x) - np.abs(y)) / dy_dx(x)
            x = np.where(np.isfinite(step), x - step, x)
        return np.sign(y) * np.abs(x)

    scale = 2.0 * beta - alpha   # equals alpha (1 + 2 lam)

    def z(x):
        x = _arr(x)
        return (1.0 + (alpha - 1.0) * x * x) * (1.0 + x * x) ** (alpha - 2.0)

    def Wpp(y):
        return scale * z(x_of_y(y))

    if alpha >= 1.5:
        rho, xbar = scale, 0.0
    else:
        rho = scale * ((alpha - 1.0) / (2.0 - alpha)) ** (3.0 - 2.0 * alpha)
        xbar = math.sqrt(3.0 - 2.0 * alpha) / (alpha - 1.0)

    fb = CauchyType(beta)

    def g_inf(y):
        x = x_of_y(y)
        return fb.pdf(x) * (1.0 + x * x) ** (0.5 * alpha)

    cov = _CauchyCoV(y_of_x, x_of_y, (-half_width, half_width), Wpp, rho, xbar, g_inf,
                     {"alpha": alpha, "lambda": lam, "beta": beta, "a": half_width})
    return _finish(cov, n_grid)


def invgamma_lsi_change_of_variables(alpha: float, lam: float, m: float,
                                     n_grid: int = 100_000) -> ChangeOfVariables:
    """``y = 1 / ((alpha - 1) x**(alpha - 1))`` for the diffusion ``x**(2 alpha)``.

    The steady state in ``y`` is the generalized Gamma law
    ``y**a exp(-c y**(1/(alpha - 1)))``.
    """
    _positive("alpha", alpha)
    _positive("lambda", lam)
    _positive("m", m)
    if alpha > 1.5:
        raise ConvexityLost(f"alpha={alpha} > 3/2: the transformed potential is not uniformly convex")
    if not alpha > 1.0:
        raise ParameterOutOfRange(f"alpha={alpha} must exceed 1")
    beta = alpha + lam / 2.0
    q = 1.0 / (alpha - 1.0)

    def y_of_x(x):
        return 1.0 / ((alpha - 1.0) * _arr(x) ** (alpha - 1.0))

    def x_of_y(y):
        return ((alpha - 1.0) * _arr(y)) ** (-q)

    coef = m * (2.0 - alpha) * (alpha - 1.0) ** ((2.0 - alpha) / (alpha - 1.0))

    def Wpp(y):
        y = _arr(y)
        return (coef * y ** q + alpha + lam) / (y * y * (alpha - 1.0))

    if alpha == 1.5:
        rho, ybar, xbar = m / 2.0, None, None
        center = (alpha + lam) / m
    else:
        rho = 0.5 * ((2.0 * beta - alpha) / (1.5 - alpha)) ** (3.0 - 2.0 * alpha) \
            * (m * (2.0 - alpha)) ** (2.0 * alpha - 2.0) * (alpha - 1.0) ** (5.0 - 4.0 * alpha)
        ybar = ((alpha + lam) / (m * (2.0 - alpha) * (1.5 - alpha))) ** (alpha - 1.0) \
            / (alpha - 1.0) ** (3.0 - 2.0 * alpha)
        xbar = float(x_of_y(np.array([ybar]))[0])
        center = ybar
    density_y = GeneralizedGamma(beta, alpha, m) if beta > alpha else None

    cov = _InvGammaCoV(y_of_x, x_of_y, (0.0, math.inf), Wpp, rho, xbar,
                       density_y.pdf if density_y is not None else None,
                       {"alpha": alpha, "lambda": lam, "m": m, "beta": beta,
                        "y_minimizer": ybar, "y_center": center}, density_y=density_y)
    return _finish(cov, n_grid)


def pairing_residual(cov: ChangeOfVariables, x) -> np.ndarray:
    """Relative mismatch between the ``y``-density at ``y(x)`` and ``f(x) / |dy/dx|``."""
    x = _arr(x)
    p = cov.params
    y = cov.y_of_x(x)
    if "a" in p:
        f = CauchyType(p["beta"]).pdf(x)
        expected = f * (1.0 + x * x) ** (0.5 * p["alpha"])
    else:
        f = InverseGammaBM(p["beta"], p["m"]).pdf(x)
        expected = f * x ** p["alpha"]
    got = cov.steady_state_y(y)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = (got - expected) / expected
    return np.where(expected > 0, rel, np.where(got == 0, 0.0, np.inf))
