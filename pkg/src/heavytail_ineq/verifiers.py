"""Quadrature checks of the weighted Chernoff, log-Sobolev and Wirtinger inequalities.

An :class:`InequalitySpec` fixes a density, a weight, the constant in front
of the right-hand side and the kind of left-hand side.  :func:`verify`
evaluates both sides for one test function and records the slack together
with the quadrature error, which sets the tolerance of the pass/fail verdict.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Sequence

import numpy as np

from . import constants as C
from .densities import (CauchyType, DensityModel, GeneralizedGamma, GibbsPotential,
                        InverseGammaBM, InverseGammaStd, SymmetricPolynomial, make_density)
from .errors import (CatalogUnknown, ConfigError, DivergentIntegral, HeavyTailError,
                     ParameterOutOfRange, QuadratureFailure)
from .fp_models import build_model, chernoff_weight, median_weight
from .quadrature import QuadratureConfig, default_config, integrate

Fn = Callable[[np.ndarray], np.ndarray]


class Kind(enum.Enum):
    CHERNOFF = "CHERNOFF"
    LSI = "LSI"
    WIRTINGER = "WIRTINGER"
    WIRTINGER_CENTERED_AT_MEDIAN = "WIRTINGER_CENTERED_AT_MEDIAN"


class LhsKind(enum.Enum):
    VARIANCE = "VARIANCE"
    ENTROPY = "ENTROPY"
    CENTERED_P_MOMENT = "CENTERED_P_MOMENT"
    ZEROED_P_MOMENT = "ZEROED_P_MOMENT"


class Verdict(enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    VACUOUS = "VACUOUS"
    ERROR = "ERROR"


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class TestFunction:
    id: str
    phi: Fn
    dphi: Fn
    domain: str = "R"              # "R" or "R+"
    bounded: bool = False
    linear: bool = False
    vanishes_at: float | None = None

    __test__ = False   # keep pytest from collecting the class

    def anchored(self, x0: float) -> "TestFunction":
        """``phi - phi(x0)``, which vanishes at ``x0``."""
        c = float(self.phi(np.array([x0]))[0])
        phi = self.phi
        return replace(self, id=f"{self.id}@{x0:.6g}", phi=lambda x: phi(x) - c, vanishes_at=float(x0))

    def scaled(self, c: float, shift: float = 0.0) -> "TestFunction":
        phi, dphi = self.phi, self.dphi
        return replace(self, id=f"{shift:g}+{c:g}*{self.id}",
                       phi=lambda x: shift + c * phi(x), dphi=lambda x: c * dphi(x),
                       vanishes_at=None)


def _a(x):
    return np.asarray(x, dtype=float)


def _tf(id, phi, dphi, domain="R", bounded=False, linear=False):
    return TestFunction(id, lambda x: phi(_a(x)), lambda x: dphi(_a(x)), domain, bounded, linear)


DEFAULT_CORPUS: tuple[TestFunction, ...] = (
    _tf("x", lambda x: x, lambda x: np.ones_like(x), linear=True),
    _tf("x/(1+x^2)", lambda x: x / (1 + x * x), lambda x: (1 - x * x) / (1 + x * x) ** 2, bounded=True),
    _tf("arctan", np.arctan, lambda x: 1 / (1 + x * x), bounded=True),
    _tf("tanh", np.tanh, lambda x: 1 / np.cosh(x) ** 2, bounded=True),
    _tf("sin", np.sin, np.cos, bounded=True),
    # x^3/(1+x^2) written to avoid overflow for large |x|
    _tf("x^3/(1+x^2)", lambda x: x - x / (1 + x * x),
        lambda x: 1 - (1 - x * x) / (1 + x * x) ** 2),
    _tf("x", lambda x: x, lambda x: np.ones_like(x), "R+", linear=True),
    _tf("log(1+x)", np.log1p, lambda x: 1 / (1 + x), "R+"),
    _tf("x/(1+x)", lambda x: x / (1 + x), lambda x: 1 / (1 + x) ** 2, "R+", bounded=True),
    _tf("sqrt(x)/(1+sqrt(x))", lambda x: np.sqrt(x) / (1 + np.sqrt(x)),
        lambda x: 0.5 / (np.sqrt(x) * (1 + np.sqrt(x)) ** 2), "R+", bounded=True),
    _tf("1-exp(-x)", lambda x: -np.expm1(-x), lambda x: np.exp(-x), "R+", bounded=True),
)


def default_corpus(domain: str | None = None) -> list[TestFunction]:
    return [t for t in DEFAULT_CORPUS if domain is None or t.domain == domain]


def constant_function(c: float = 1.0, domain: str = "R") -> TestFunction:
    return TestFunction(f"const={c:g}", lambda x: np.full_like(_a(x), c),
                        lambda x: np.zeros_like(_a(x)), domain, True, True)


def _domain_of(model: DensityModel) -> str:
    return "R+" if model.interval[0] == 0.0 else "R"


# ---------------------------------------------------------------------------
# functionals


@dataclass(frozen=True)
class Estimate:
    value: float
    err: float


def _expect(model: DensityModel, g: Fn, cfg: QuadratureConfig, partial_ok: bool = False) -> Estimate:
    pdf = model.pdf

    def integrand(x):
        d = pdf(x)
        with np.errstate(over="ignore", invalid="ignore"):
            v = _a(g(x)) * d
        return np.where(d == 0.0, 0.0, v)

    try:
        r = integrate(integrand, model.interval, cfg, points=model.breakpoints)
    except QuadratureFailure as exc:
        if partial_ok and exc.partial is not None and not isinstance(exc, DivergentIntegral):
            return Estimate(exc.partial.value, exc.partial.err_estimate)
        raise
    return Estimate(r.value, r.err_estimate)


def _variance(model, fn, cfg, partial_ok=False) -> Estimate:
    mean = _expect(model, fn.phi, cfg, partial_ok)
    m = mean.value
    var = _expect(model, lambda x: (fn.phi(x) - m) ** 2, cfg, partial_ok)
    return Estimate(max(var.value, 0.0), var.err)


def variance_functional(model: DensityModel, fn: TestFunction,
                        config: QuadratureConfig | None = None) -> float:
    """``Var[phi(X)]`` computed as ``E[(phi - E phi)**2]``."""
    return _variance(model, fn, config or default_config()).value


def _entropy(model, fn, cfg, partial_ok=False) -> Estimate:
    z = _expect(model, lambda x: fn.phi(x) ** 2, cfg, partial_ok)
    Z = z.value
    if not Z > 0:
        raise ValueError("entropy needs E[phi^2] > 0")

    def g(x):
        s = fn.phi(x) ** 2
        return s * np.log(np.maximum(s, 1e-300) / Z)

    ent = _expect(model, g, cfg, partial_ok)
    # E[s log(s/Z)] removes the cancellation between E[s log s] and Z log Z
    return Estimate(max(ent.value, 0.0), ent.err + z.err * (1.0 + abs(math.log(Z))))


def entropy_functional(model: DensityModel, fn: TestFunction,
                       config: QuadratureConfig | None = None) -> float:
    """``Ent[phi**2] = E[phi**2 log phi**2] - E[phi**2] log E[phi**2]``."""
    return _entropy(model, fn, config or default_config()).value


def _p_moment(model, fn, p, centered, cfg, partial_ok=False) -> Estimate:
    shift = 0.0
    err = 0.0
    if centered:
        mean = _expect(model, fn.phi, cfg, partial_ok)
        shift, err = mean.value, mean.err
    val = _expect(model, lambda x: np.abs(fn.phi(x) - shift) ** p, cfg, partial_ok)
    # d/dshift E|phi - shift|^p is bounded by p E|phi - shift|^(p-1)
    return Estimate(val.value, val.err + p * max(val.value, 1.0) * err)


def _dirichlet(model, weight, fn, p, weight_power, cfg, partial_ok=False) -> Estimate:
    def g(x):
        w = _a(weight(x))
        d = np.abs(fn.dphi(x))
        with np.errstate(over="ignore", invalid="ignore"):
            out = w ** weight_power * d ** p
        return np.where(d == 0.0, 0.0, out)

    return _expect(model, g, cfg, partial_ok)


def dirichlet_form(model: DensityModel, weight: Fn, fn: TestFunction, p: float = 2.0,
                   weight_power: float = 1.0, config: QuadratureConfig | None = None) -> float:
    """``E[w**weight_power |phi'|**p]``.

    Chernoff and log-Sobolev forms use ``p = 2`` and ``weight_power = 1``;
    the Wirtinger forms use ``weight_power = p``.
    """
    return _dirichlet(model, weight, fn, p, weight_power, config or default_config()).value


# ---------------------------------------------------------------------------
# inequality specs


@dataclass(frozen=True)
class InequalitySpec:
    spec_id: str
    catalog_id: str
    kind: Kind
    model: DensityModel
    weight: Fn
    constant: float
    lhs_kind: LhsKind
    p: float = 2.0
    weight_label: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.constant > 0 and math.isfinite(self.constant)):
            raise ParameterOutOfRange(f"{self.spec_id}: constant must be positive, got {self.constant}")
        if self.p < 1:
            raise ParameterOutOfRange(f"{self.spec_id}: p must be >= 1, got {self.p}")

    @property
    def weight_power(self) -> float:
        return self.p if self.kind in (Kind.WIRTINGER, Kind.WIRTINGER_CENTERED_AT_MEDIAN) else 1.0

    @property
    def requires_bounded(self) -> bool:
        return self.kind is Kind.LSI

    @property
    def requires_zero_at_median(self) -> bool:
        return self.lhs_kind is LhsKind.ZEROED_P_MOMENT

    @property
    def domain(self) -> str:
        return _domain_of(self.model)


def _spec_id(catalog_id: str, params: dict) -> str:
    inner = ",".join(f"{k}={v:g}" if isinstance(v, (int, float)) and not isinstance(v, bool) else f"{k}={v}"
                     for k, v in params.items())
    return f"{catalog_id}[{inner}]"


def _num(params: dict, key: str) -> float:
    if key not in params:
        raise ConfigError(f"missing parameter {key!r}")
    try:
        return float(params[key])
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key}={params[key]!r} is not a number") from None


def _flag(params: dict, key: str, default: bool = False) -> bool:
    v = params.get(key, default)
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes", "t")
    return bool(v)


def _one_plus_x2(power: float) -> Fn:
    return lambda x: (1.0 + _a(x) ** 2) ** power


def _power(k: float) -> Fn:
    return lambda x: _a(x) ** k


def _one_plus_abs(x):
    return 1.0 + np.abs(_a(x))


def _unit(x):
    return np.ones_like(_a(x))


def _build_chernoff_general(p):
    name = p.get("model")
    if not name:
        raise ConfigError("CHERNOFF_GENERAL needs model=<fp model name>")
    kw = {k: float(v) for k, v in p.items() if k != "model"}
    if "lambda" in kw:
        kw["lam"] = kw.pop("lambda")
    try:
        fp = build_model(name, **kw)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for model {name!r}: {exc}") from None
    w = chernoff_weight(fp)
    return Kind.CHERNOFF, fp.steady_state, w.w, 1.0, LhsKind.VARIANCE, 2.0, f"P/Q' ({fp.name})"


def _build_brascamp_lieb(p):
    model = GibbsPotential(str(p.get("potential", "gaussian")), float(p.get("loc", 0.0)))
    return Kind.CHERNOFF, model, lambda x: 1.0 / model.d2V(x), 1.0, LhsKind.VARIANCE, 2.0, "1/V''"


def _build_chernoff_cauchy(p):
    beta = _num(p, "beta")
    rho = C.chernoff_rho(beta).value
    return Kind.CHERNOFF, CauchyType(beta), _one_plus_x2(1.0), 1.0 / rho, LhsKind.VARIANCE, 2.0, "1+x^2"


def _build_chernoff_invgamma(p):
    beta, m = _num(p, "beta"), _num(p, "m")
    rho = C.chernoff_rho(beta).value
    return Kind.CHERNOFF, InverseGammaBM(beta, m), _power(2.0), 1.0 / rho, LhsKind.VARIANCE, 2.0, "x^2"


def _build_chernoff_invgamma_std(p):
    kappa, m = _num(p, "kappa"), _num(p, "m")
    g = C.chernoff_gamma(kappa).value
    return Kind.CHERNOFF, InverseGammaStd(kappa, m), _power(2.0), 1.0 / g, LhsKind.VARIANCE, 2.0, "x^2"


def _build_lsi_cauchy(p):
    beta, alpha = _num(p, "beta"), _num(p, "alpha")
    rho = C.lsi_rho_cauchy(beta, alpha).value
    return Kind.LSI, CauchyType(beta), _one_plus_x2(alpha), 2.0 / rho, LhsKind.ENTROPY, 2.0, "(1+x^2)^alpha"


def _build_lsi_bl(p):
    beta = _num(p, "beta")
    pref = C.bobkov_ledoux_prefactor(beta).value
    return Kind.LSI, CauchyType(beta), _one_plus_x2(2.0), pref, LhsKind.ENTROPY, 2.0, "(1+x^2)^2"


def _build_lsi_invgamma(p):
    beta, alpha, m = _num(p, "beta"), _num(p, "alpha"), _num(p, "m")
    rho = C.lsi_rho_invgamma(beta, alpha, m).value
    return Kind.LSI, InverseGammaBM(beta, m), _power(2.0 * alpha), 2.0 / rho, LhsKind.ENTROPY, 2.0, "x^(2 alpha)"


def _build_lsi_invgamma_std(p):
    kappa, alpha, m = _num(p, "kappa"), _num(p, "alpha"), _num(p, "m")
    rho = C.lsi_rho_invgamma_std(kappa, alpha, m).value
    return Kind.LSI, InverseGammaStd(kappa, m), _power(2.0 * alpha), 2.0 / rho, LhsKind.ENTROPY, 2.0, "x^(2 alpha)"


def _build_lsi_gengamma(p):
    beta, alpha, m = _num(p, "beta"), _num(p, "alpha"), _num(p, "m")
    rho = C.lsi_rho_invgamma(beta, alpha, m).value
    return Kind.LSI, GeneralizedGamma(beta, alpha, m), _unit, 2.0 / rho, LhsKind.ENTROPY, 2.0, "1"


def _wirtinger_model(p) -> DensityModel:
    fam = p.get("family")
    if not fam:
        raise ConfigError("Wirtinger entries need family=<density family>")
    kw = {k: v for k, v in p.items() if k not in ("family", "p", "zeroed")}
    return make_density(fam, **kw)


def _build_wirtinger_general(p):
    model = _wirtinger_model(p)
    pp = _num(p, "p")
    K, _ = median_weight(model)
    return Kind.WIRTINGER, model, K, (2.0 * pp) ** pp, LhsKind.CENTERED_P_MOMENT, pp, "K"


def _build_wirtinger_zeroed(p):
    model = _wirtinger_model(p)
    pp = _num(p, "p")
    K, _ = median_weight(model)
    return (Kind.WIRTINGER_CENTERED_AT_MEDIAN, model, K, pp ** pp, LhsKind.ZEROED_P_MOMENT, pp, "K")


def _build_wirtinger_cauchy(p):
    beta, pp = _num(p, "beta"), _num(p, "p")
    if not beta > 0.5:
        raise ParameterOutOfRange(f"beta must exceed 1/2, got {beta}")
    const = 2.0 ** beta * (2.0 * pp / (2.0 * beta - 1.0)) ** pp
    return Kind.WIRTINGER, CauchyType(beta), _one_plus_abs, const, LhsKind.CENTERED_P_MOMENT, pp, "1+|x|"


def _build_wirtinger_gbeta(p):
    beta, pp = _num(p, "beta"), _num(p, "p")
    if not beta > 0.5:
        raise ParameterOutOfRange(f"beta must exceed 1/2, got {beta}")
    model = SymmetricPolynomial(beta)
    if _flag(p, "zeroed"):
        return (Kind.WIRTINGER_CENTERED_AT_MEDIAN, model, _one_plus_abs,
                (pp / (2.0 * beta - 1.0)) ** pp, LhsKind.ZEROED_P_MOMENT, pp, "1+|x|")
    return (Kind.WIRTINGER, model, _one_plus_abs, (2.0 * pp / (2.0 * beta - 1.0)) ** pp,
            LhsKind.CENTERED_P_MOMENT, pp, "1+|x|")


def _build_wirtinger_invgamma(p):
    beta, m, pp = _num(p, "beta"), _num(p, "m"), _num(p, "p")
    D = C.wirtinger_D(beta, m).value
    return (Kind.WIRTINGER, InverseGammaBM(beta, m), _power(1.0), (pp * D) ** pp,
            LhsKind.CENTERED_P_MOMENT, pp, "x")


CATALOG: dict[str, Callable] = {
    "CHERNOFF_GENERAL": _build_chernoff_general,
    "BRASCAMP_LIEB": _build_brascamp_lieb,
    "CHERNOFF_CAUCHY": _build_chernoff_cauchy,
    "CHERNOFF_INVGAMMA": _build_chernoff_invgamma,
    "CHERNOFF_INVGAMMA_STD": _build_chernoff_invgamma_std,
    "LSI_CAUCHY": _build_lsi_cauchy,
    "LSI_BOBKOV_LEDOUX": _build_lsi_bl,
    "LSI_INVGAMMA": _build_lsi_invgamma,
    "LSI_INVGAMMA_STD": _build_lsi_invgamma_std,
    "LSI_GENERALIZED_GAMMA": _build_lsi_gengamma,
    "WIRTINGER_GENERAL": _build_wirtinger_general,
    "WIRTINGER_ZEROED": _build_wirtinger_zeroed,
    "WIRTINGER_CAUCHY": _build_wirtinger_cauchy,
    "WIRTINGER_GBETA": _build_wirtinger_gbeta,
    "WIRTINGER_INVGAMMA": _build_wirtinger_invgamma,
}

# three admissible parameter points per catalog entry
DEFAULT_POINTS: dict[str, list[dict]] = {
    "CHERNOFF_GENERAL": [
        {"model": "cauchy_chernoff", "alpha": 0.75, "lambda": 1.0},
        {"model": "invgamma_chernoff", "alpha": 0.8, "lambda": 1.5, "m": 1.0},
        {"model": "wealth", "sigma": 2.0, "lambda": 1.0, "delta": 0.0},
    ],
    "BRASCAMP_LIEB": [{"potential": "gaussian"}, {"potential": "anharmonic"}, {"potential": "logcosh"}],
    "CHERNOFF_CAUCHY": [{"beta": 0.8}, {"beta": 1.5}, {"beta": 2.5}],
    "CHERNOFF_INVGAMMA": [{"beta": 0.8, "m": 1.0}, {"beta": 1.5, "m": 2.0}, {"beta": 2.5, "m": 1.0}],
    "CHERNOFF_INVGAMMA_STD": [{"kappa": 1.0, "m": 1.0}, {"kappa": 2.0, "m": 1.0}, {"kappa": 3.5, "m": 2.0}],
    "LSI_CAUCHY": [{"beta": 1.5, "alpha": 1.2}, {"beta": 3.0, "alpha": 2.0}, {"beta": 2.5, "alpha": 1.5}],
    "LSI_BOBKOV_LEDOUX": [{"beta": 1.5}, {"beta": 2.5}, {"beta": 4.0}],
    "LSI_INVGAMMA": [{"beta": 2.0, "alpha": 1.25, "m": 1.0}, {"beta": 2.0, "alpha": 1.5, "m": 1.0},
                     {"beta": 3.0, "alpha": 1.5, "m": 4.0}],
    "LSI_INVGAMMA_STD": [{"kappa": 3.0, "alpha": 1.25, "m": 1.0}, {"kappa": 3.0, "alpha": 1.5, "m": 1.0},
                         {"kappa": 5.0, "alpha": 1.5, "m": 4.0}],
    "LSI_GENERALIZED_GAMMA": [{"beta": 2.0, "alpha": 1.25, "m": 1.0}, {"beta": 2.0, "alpha": 1.5, "m": 1.0},
                              {"beta": 3.0, "alpha": 1.4, "m": 2.0}],
    "WIRTINGER_GENERAL": [{"family": "CauchyType", "beta": 1.0, "p": 1.0},
                          {"family": "SymmetricPolynomial", "beta": 1.5, "p": 2.0},
                          {"family": "InverseGammaStd", "kappa": 2.0, "m": 1.0, "p": 1.5}],
    "WIRTINGER_ZEROED": [{"family": "CauchyType", "beta": 1.0, "p": 1.0},
                         {"family": "SymmetricPolynomial", "beta": 1.5, "p": 2.0},
                         {"family": "InverseGammaStd", "kappa": 2.0, "m": 1.0, "p": 1.5}],
    "WIRTINGER_CAUCHY": [{"beta": 1.0, "p": 1.0}, {"beta": 2.0, "p": 2.0}, {"beta": 0.8, "p": 1.5}],
    "WIRTINGER_GBETA": [{"beta": 1.5, "p": 1.0, "zeroed": True}, {"beta": 1.5, "p": 2.0, "zeroed": False},
                        {"beta": 3.0, "p": 1.5, "zeroed": True}],
    "WIRTINGER_INVGAMMA": [{"beta": 1.0, "m": 1.0, "p": 1.0}, {"beta": 2.0, "m": 3.0, "p": 2.0},
                           {"beta": 0.8, "m": 1.0, "p": 1.5}],
}


def build_spec(catalog_id: str, params: dict | None = None) -> InequalitySpec:
    """Instantiate one catalog entry; raises ``CatalogUnknown`` or ``ParameterOutOfRange``."""
    try:
        builder = CATALOG[catalog_id]
    except KeyError:
        raise CatalogUnknown(f"unknown catalog id {catalog_id!r}; known: {sorted(CATALOG)}") from None
    params = dict(params or {})
    kind, model, weight, const, lhs, p, label = builder(params)
    return InequalitySpec(_spec_id(catalog_id, params), catalog_id, kind, model, weight,
                          float(const), lhs, float(p), label, params)


def default_specs(catalog_ids: Iterable[str] | None = None) -> list[InequalitySpec]:
    ids = list(catalog_ids) if catalog_ids is not None else list(CATALOG)
    return [build_spec(cid, pt) for cid in ids for pt in DEFAULT_POINTS[cid]]


# ---------------------------------------------------------------------------
# verification


@dataclass(frozen=True)
class InequalityReport:
    spec_id: str
    fn_id: str
    lhs: float
    rhs: float
    slack: float
    relative_slack: float
    quad_err: float
    verdict: Verdict
    constant: float = math.nan
    message: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict in (Verdict.PASS, Verdict.VACUOUS)

    @property
    def tolerance(self) -> float:
        return 10.0 * self.quad_err + 1e-12

    def as_row(self) -> dict:
        return {"spec_id": self.spec_id, "fn_id": self.fn_id, "lhs": self.lhs, "rhs": self.rhs,
                "slack": self.slack, "rel_slack": self.relative_slack, "quad_err": self.quad_err,
                "verdict": self.verdict.value}


def default_verify_config() -> QuadratureConfig:
    return default_config()


def verify(spec: InequalitySpec, fn: TestFunction,
           quad_config: QuadratureConfig | None = None) -> InequalityReport:
    """Evaluate both sides of ``spec`` for ``fn``.

    A divergent right-hand side gives a ``VACUOUS`` verdict.  Otherwise the
    report passes when ``rhs - lhs >= -(10 quad_err + 1e-12)``.
    """
    cfg = quad_config or default_config()
    if fn.domain != spec.domain:
        raise ConfigError(f"{fn.id} lives on {fn.domain}, {spec.spec_id} on {spec.domain}")
    if spec.requires_bounded and not fn.bounded:
        raise ConfigError(f"{spec.spec_id} needs a bounded test function, {fn.id} is not")
    if spec.requires_zero_at_median:
        med = spec.model.median()
        if fn.vanishes_at is None or abs(fn.vanishes_at - med) > 1e-9 * max(1.0, abs(med)):
            raise ConfigError(f"{spec.spec_id} needs phi(median)=0; anchor {fn.id} at {med!r}")

    try:
        d = _dirichlet(spec.model, spec.weight, fn, spec.p, spec.weight_power, cfg, partial_ok=True)
    except DivergentIntegral as exc:
        return InequalityReport(spec.spec_id, fn.id, math.nan, math.inf, math.inf, math.inf, 0.0,
                                Verdict.VACUOUS, spec.constant, f"right-hand side diverges: {exc}")
    rhs = spec.constant * d.value
    rhs_err = spec.constant * d.err
    try:
        if spec.lhs_kind is LhsKind.VARIANCE:
            lhs = _variance(spec.model, fn, cfg, partial_ok=True)
        elif spec.lhs_kind is LhsKind.ENTROPY:
            lhs = _entropy(spec.model, fn, cfg, partial_ok=True)
        elif spec.lhs_kind is LhsKind.CENTERED_P_MOMENT:
            lhs = _p_moment(spec.model, fn, spec.p, True, cfg, partial_ok=True)
        else:
            lhs = _p_moment(spec.model, fn, spec.p, False, cfg, partial_ok=True)
    except DivergentIntegral as exc:
        return InequalityReport(spec.spec_id, fn.id, math.inf, rhs, -math.inf, -math.inf, rhs_err,
                                Verdict.FAIL, spec.constant,
                                f"left-hand side diverges while the right-hand side is finite: {exc}")
    err = lhs.err + rhs_err
    slack = rhs - lhs.value
    scale = max(abs(rhs), abs(lhs.value))
    rel = slack / scale if scale > 0 else 0.0
    ok = slack >= -(10.0 * err + 1e-12)
    return InequalityReport(spec.spec_id, fn.id, lhs.value, rhs, slack, rel, err,
                            Verdict.PASS if ok else Verdict.FAIL, spec.constant)


def admissible(spec: InequalitySpec, fn: TestFunction) -> bool:
    if fn.domain != spec.domain:
        return False
    if spec.requires_bounded and not fn.bounded:
        return False
    return True


def _prepare(spec: InequalitySpec, fn: TestFunction) -> TestFunction:
    if spec.requires_zero_at_median:
        return fn.anchored(spec.model.median())
    return fn


def _safe_verify(spec, fn, cfg) -> InequalityReport:
    try:
        return verify(spec, _prepare(spec, fn), cfg)
    except HeavyTailError as exc:
        return InequalityReport(spec.spec_id, fn.id, math.nan, math.nan, math.nan, math.nan,
                                math.nan, Verdict.ERROR, spec.constant, f"{type(exc).__name__}: {exc}")
    except (ArithmeticError, ValueError) as exc:
        return InequalityReport(spec.spec_id, fn.id, math.nan, math.nan, math.nan, math.nan,
                                math.nan, Verdict.ERROR, spec.constant, f"{type(exc).__name__}: {exc}")


def run_corpus(specs: Sequence[InequalitySpec], corpus: Sequence[TestFunction] | None = None,
               quad_config: QuadratureConfig | None = None, jobs: int = 1) -> list[InequalityReport]:
    """Verify every admissible (spec, function) pair; errors are captured per report.

    Specs whose left-hand side must vanish at the median get each function
    shifted so that it does.  Reports come back ordered by ``(spec_id, fn_id)``.
    """
    corpus = list(DEFAULT_CORPUS if corpus is None else corpus)
    cfg = quad_config or default_config()
    pairs = [(s, f) for s in specs for f in corpus if admissible(s, f)]
    if jobs > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(lambda sf: _safe_verify(sf[0], sf[1], cfg), pairs))
    else:
        reports = [_safe_verify(s, f, cfg) for s, f in pairs]
    order = sorted(range(len(reports)), key=lambda i: (reports[i].spec_id, pairs[i][1].id, i))
    return [reports[i] for i in order]


def summarize(reports: Sequence[InequalityReport]) -> dict[str, int]:
    out = {v.value: 0 for v in Verdict}
    for r in reports:
        out[r.verdict.value] += 1
    return out


# ---------------------------------------------------------------------------
# supporting check used for the inverse Gamma Wirtinger weight


def tail_ratio_monotonicity(beta: float, m: float, n: int = 400) -> tuple[np.ndarray, np.ndarray]:
    """``H(x) / (x h(x))`` on ``(0, median]``; it should be nondecreasing."""
    model = InverseGammaBM(beta, m)
    xbar = model.median()
    x = np.linspace(xbar / n, xbar, n)
    F, f = model.cdf(x), model.pdf(x)
    # close to 0 both factors underflow
    keep = (F > 0) & (f > 0)
    return x[keep], F[keep] / (x[keep] * f[keep])
