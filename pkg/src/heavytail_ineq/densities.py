"""Density families on the line and the half line.

Every model is an immutable dataclass exposing ``pdf``, ``log_pdf``, ``cdf``,
``sf``, ``median``, ``quantile`` and ``moment``.  Normalisation constants are
obtained by quadrature of the kernel and cached on the instance, except for
the inverse Gamma families whose constant ``m**kappa / Gamma(kappa)`` is used
directly.
"""
from __future__ import annotations

import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, fields
from functools import cached_property
from typing import Callable, ClassVar

import numpy as np
from scipy import optimize, special

from .errors import (CatalogUnknown, ConfigError, ConvergenceFailure,
                     DomainError, ParameterOutOfRange)
from .quadrature import QuadratureConfig, default_config, integrate

REAL_LINE = (-math.inf, math.inf)
HALF_LINE = (0.0, math.inf)


class Family(enum.Enum):
    CAUCHY_TYPE = "CauchyType"
    SYMMETRIC_POLYNOMIAL = "SymmetricPolynomial"
    INVERSE_GAMMA_BM = "InverseGammaBM"
    INVERSE_GAMMA_STD = "InverseGammaStd"
    GENERALIZED_GAMMA = "GeneralizedGamma"
    GIBBS_POTENTIAL = "GibbsPotential"


class _Infinite:
    """Marker for a divergent moment."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __float__(self):
        return math.inf

    def __repr__(self):
        return "Infinite"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


def is_infinite(value) -> bool:
    return value is INFINITE


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


class DensityModel(ABC):
    """Base class of all density families."""

    family: ClassVar[Family]
    symmetric: ClassVar[bool] = False

    @property
    @abstractmethod
    def interval(self) -> tuple[float, float]: ...

    @abstractmethod
    def _log_kernel(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _dlog_kernel(self, x: np.ndarray) -> np.ndarray: ...

    # parameters / serialisation ------------------------------------------

    @property
    def params(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_block(self) -> str:
        lines = [f"family={self.family.value}"]
        for k, v in self.params.items():
            lines.append(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}")
        return "\n".join(lines)

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}"
                          for k, v in self.params.items())
        return f"{self.family.value}({inner})"

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Points where the density is not smooth (handed to quadrature)."""
        return ()

    # density ---------------------------------------------------------------

    def _check_domain(self, x: np.ndarray):
        lo, hi = self.interval
        if np.any(np.isnan(x)) or np.any(x < lo) or np.any(x > hi):
            raise DomainError(f"{self.describe()}: argument outside [{lo}, {hi}]")

    # log of the kernel's maximum; subtracted before integrating so that
    # steep kernels do not overflow
    _log_kernel_peak = 0.0

    @cached_property
    def norm_constant(self) -> float:
        return math.exp(self.log_norm_constant)

    @cached_property
    def log_norm_constant(self) -> float:
        peak = self._log_kernel_peak
        res = integrate(lambda t: np.exp(self._log_kernel(t) - peak), self.interval,
                        QuadratureConfig(rel_tol=1e-13, abs_tol=1e-300),
                        points=self.breakpoints)
        return -peak - math.log(res.value)

    def log_pdf(self, x):
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            out = self.log_norm_constant + self._log_kernel(arr)
        return _out(out, scalar)

    def pdf(self, x):
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
            out = np.exp(self.log_norm_constant + self._log_kernel(arr))
        return _out(out, scalar)

    def dlog_pdf(self, x):
        """Derivative of ``log pdf``."""
        arr, scalar = _as_array(x)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return _out(self._dlog_kernel(arr), scalar)

    # distribution function --------------------------------------------------

    def _cdf_numeric(self, x: float) -> float:
        lo, hi = self.interval
        if x <= lo:
            return 0.0
        if x >= hi:
            return 1.0
        cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-15)
        pts = [p for p in self.breakpoints]
        # integrate the lighter side to keep the relative error small
        if self.symmetric and x > 0:
            return 1.0 - self._cdf_numeric(-x)
        left = integrate(self.pdf, (lo, x), cfg, points=pts).value
        return min(1.0, max(0.0, left))

    def _cdf(self, x: np.ndarray) -> np.ndarray:
        return np.array([self._cdf_numeric(float(v)) for v in x.ravel()]).reshape(x.shape)

    def _sf_numeric(self, x: float) -> float:
        lo, hi = self.interval
        if x <= lo:
            return 1.0
        if x >= hi:
            return 0.0
        if self.symmetric:
            return self._cdf_numeric(-x)
        cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-300)
        right = integrate(self.pdf, (x, hi), cfg, points=list(self.breakpoints)).value
        return min(1.0, max(0.0, right))

    def _sf(self, x: np.ndarray) -> np.ndarray:
        return np.array([self._sf_numeric(float(v)) for v in x.ravel()]).reshape(x.shape)

    def cdf(self, x):
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        return _out(np.clip(self._cdf(arr), 0.0, 1.0), scalar)

    def sf(self, x):
        """Survival function ``1 - cdf``, accurate in the right tail."""
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        return _out(np.clip(self._sf(arr), 0.0, 1.0), scalar)

    def _quantile_guess(self, q: float) -> float:
        return 1.0

    def _quantile_closed(self, q: np.ndarray) -> np.ndarray | None:
        return None

    def quantile(self, q):
        arr, scalar = _as_array(q)
        if np.any((arr < 0) | (arr > 1)):
            raise DomainError("quantile level outside [0, 1]")
        closed = self._quantile_closed(arr)
        if closed is None:
            closed = np.array([self._quantile_root(float(v)) for v in arr.ravel()]).reshape(arr.shape)
        return _out(closed, scalar)

    def _quantile_root(self, q: float) -> float:
        lo, hi = self.interval
        if q == 0.0:
            return lo
        if q == 1.0:
            return hi

        def g(t):
            # compare on the smaller tail so tiny levels are resolved
            return self.cdf(t) - q if q <= 0.5 else (1.0 - q) - self.sf(t)

        a, b = self._bracket(g, self._quantile_guess(q))
        try:
            root = optimize.brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps,
                                   maxiter=500)
        except (RuntimeError, ValueError) as exc:
            raise ConvergenceFailure(f"{self.describe()}: quantile({q}) failed: {exc}") from exc
        return float(root)

    def _bracket(self, g: Callable[[float], float], guess: float) -> tuple[float, float]:
        lo_end, hi_end = self.interval
        if lo_end == 0.0:
            a, b = guess / 16.0, guess * 16.0
            for _ in range(64):
                ga, gb = g(a), g(b)
                if ga <= 0.0 <= gb:
                    return a, b
                if ga > 0.0:
                    a /= 16.0
                if gb < 0.0:
                    b *= 16.0
        else:
            width = max(abs(guess), 1.0)
            a, b = guess - 16.0 * width, guess + 16.0 * width
            for _ in range(64):
                ga, gb = g(a), g(b)
                if ga <= 0.0 <= gb:
                    return a, b
                if ga > 0.0:
                    a -= 16.0 * (b - a)
                if gb < 0.0:
                    b += 16.0 * (b - a)
        raise ConvergenceFailure(f"{self.describe()}: could not bracket the root")

    @cached_property
    def _median(self) -> float:
        if self.symmetric:
            return 0.0
        x = self._quantile_root(0.5)
        if abs(self.cdf(x) - 0.5) >= 1e-12:
            raise ConvergenceFailure(f"{self.describe()}: median residual too large")
        return x

    def median(self) -> float:
        return self._median

    # moments ---------------------------------------------------------------

    def max_finite_moment(self) -> float:
        """Supremum of the orders ``k`` with ``E|X|**k`` finite."""
        return math.inf

    def moment(self, k: int, config: QuadratureConfig | None = None):
        if k < 0 or int(k) != k:
            raise ValueError("moment order must be a nonnegative integer")
        k = int(k)
        if k == 0:
            return 1.0
        if not k < self.max_finite_moment():
            return INFINITE
        if self.symmetric and k % 2 == 1:
            return 0.0
        from .quadrature import expectation
        return expectation(self, lambda x: x ** k, config or default_config()).value


# ---------------------------------------------------------------------------


def _require(cond: bool, msg: str):
    if not cond:
        raise ParameterOutOfRange(msg)


def _finite(*vals):
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals)


@dataclass(frozen=True)
class CauchyType(DensityModel):
    """``C (1 + x**2)**-beta`` on the real line."""

    beta: float
    family: ClassVar[Family] = Family.CAUCHY_TYPE
    symmetric: ClassVar[bool] = True

    def __post_init__(self):
        _require(_finite(self.beta) and self.beta > 0.5, f"CauchyType needs beta > 1/2, got {self.beta}")

    @property
    def interval(self):
        return REAL_LINE

    def _log_kernel(self, x):
        return -self.beta * np.log1p(x * x)

    def _dlog_kernel(self, x):
        return -2.0 * self.beta * x / (1.0 + x * x)

    def _upper_tail(self, ax):
        # P(X > |x|) = I_{1/(1+x^2)}(beta - 1/2, 1/2) / 2
        return 0.5 * special.betainc(self.beta - 0.5, 0.5, 1.0 / (1.0 + ax * ax))

    def _cdf(self, x):
        t = self._upper_tail(np.abs(x))
        return np.where(x < 0, t, 1.0 - t)

    def _sf(self, x):
        t = self._upper_tail(np.abs(x))
        return np.where(x > 0, t, 1.0 - t)

    def _quantile_closed(self, q):
        tail = np.minimum(q, 1.0 - q)
        with np.errstate(divide="ignore"):
            v = special.betaincinv(self.beta - 0.5, 0.5, 2.0 * tail)
            ax = np.sqrt((1.0 - v) / v)
        return np.where(q < 0.5, -ax, ax)

    def max_finite_moment(self):
        return 2.0 * self.beta - 1.0


@dataclass(frozen=True)
class SymmetricPolynomial(DensityModel):
    """``c (1 + |x|)**(-2 beta)`` on the real line."""

    beta: float
    family: ClassVar[Family] = Family.SYMMETRIC_POLYNOMIAL
    symmetric: ClassVar[bool] = True

    def __post_init__(self):
        _require(_finite(self.beta) and self.beta > 0.5,
                 f"SymmetricPolynomial needs beta > 1/2, got {self.beta}")

    @property
    def interval(self):
        return REAL_LINE

    @property
    def breakpoints(self):
        return (0.0,)

    def _log_kernel(self, x):
        return -2.0 * self.beta * np.log1p(np.abs(x))

    def _dlog_kernel(self, x):
        return -2.0 * self.beta * np.sign(x) / (1.0 + np.abs(x))

    def _half_tail(self, ax):
        return 0.5 * (1.0 + ax) ** (1.0 - 2.0 * self.beta)

    def _cdf(self, x):
        t = self._half_tail(np.abs(x))
        return np.where(x < 0, t, 1.0 - t)

    def _sf(self, x):
        t = self._half_tail(np.abs(x))
        return np.where(x > 0, t, 1.0 - t)

    def _quantile_closed(self, q):
        tail = np.minimum(q, 1.0 - q)
        with np.errstate(divide="ignore"):
            ax = (2.0 * tail) ** (1.0 / (1.0 - 2.0 * self.beta)) - 1.0
        return np.where(q < 0.5, -ax, ax)

    def max_finite_moment(self):
        return 2.0 * self.beta - 1.0


class _InverseGammaBase(DensityModel):
    """``m**kappa / Gamma(kappa) x**(-kappa-1) exp(-m/x)`` on the half line."""

    @property
    def interval(self):
        return HALF_LINE

    @cached_property
    def norm_constant(self) -> float:
        return math.exp(self.log_norm_constant)

    @cached_property
    def log_norm_constant(self) -> float:
        return self.kappa * math.log(self.m) - math.lgamma(self.kappa)

    def _log_kernel(self, x):
        return -(self.kappa + 1.0) * np.log(x) - self.m / x

    def _dlog_kernel(self, x):
        return (self.m / x - (self.kappa + 1.0)) / x

    def pdf(self, x):
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        safe = np.where(arr > 0, arr, 1.0)
        with np.errstate(over="ignore", under="ignore"):
            out = np.where(arr > 0, np.exp(self.log_norm_constant + self._log_kernel(safe)), 0.0)
        return _out(out, scalar)

    def _cdf(self, x):
        with np.errstate(divide="ignore"):
            return np.where(x > 0, special.gammaincc(self.kappa, self.m / np.where(x > 0, x, 1.0)), 0.0)

    def _sf(self, x):
        with np.errstate(divide="ignore"):
            return np.where(x > 0, special.gammainc(self.kappa, self.m / np.where(x > 0, x, 1.0)), 1.0)

    def _quantile_closed(self, q):
        # X = m / Y with Y ~ Gamma(kappa), so F(x) = Q(kappa, m/x)
        with np.errstate(divide="ignore"):
            y = special.gammainccinv(self.kappa, q)
            return np.where(q > 0, self.m / y, 0.0)

    def _quantile_guess(self, q):
        k = self.kappa
        y_med = k * (1.0 - 1.0 / (9.0 * k)) ** 3 if k > 1.0 / 9.0 else k
        return self.m / max(y_med, 1e-300)

    @cached_property
    def _median(self) -> float:
        x = self._quantile_root(0.5)
        if abs(self.cdf(x) - 0.5) >= 1e-12:
            raise ConvergenceFailure(f"{self.describe()}: median residual too large")
        return x

    def max_finite_moment(self):
        return self.kappa

    def moment_closed_form(self, k: int):
        """``m**k Gamma(kappa - k) / Gamma(kappa)`` (used as a cross-check)."""
        if not k < self.kappa:
            return INFINITE
        return math.exp(k * math.log(self.m) + math.lgamma(self.kappa - k) - math.lgamma(self.kappa))


@dataclass(frozen=True)
class InverseGammaStd(_InverseGammaBase):
    """Inverse Gamma law with shape ``kappa`` and scale ``m``."""

    kappa: float
    m: float
    family: ClassVar[Family] = Family.INVERSE_GAMMA_STD

    def __post_init__(self):
        _require(_finite(self.kappa) and self.kappa > 0, f"InverseGammaStd needs kappa > 0, got {self.kappa}")
        _require(_finite(self.m) and self.m > 0, f"InverseGammaStd needs m > 0, got {self.m}")


@dataclass(frozen=True)
class InverseGammaBM(_InverseGammaBase):
    """``C x**(-2 beta) exp(-m/x)``, i.e. the inverse Gamma law with ``kappa = 2 beta - 1``."""

    beta: float
    m: float
    family: ClassVar[Family] = Family.INVERSE_GAMMA_BM

    def __post_init__(self):
        _require(_finite(self.beta) and self.beta > 0.5, f"InverseGammaBM needs beta > 1/2, got {self.beta}")
        _require(_finite(self.m) and self.m > 0, f"InverseGammaBM needs m > 0, got {self.m}")

    @property
    def kappa(self):
        return 2.0 * self.beta - 1.0


def inverse_gamma(kappa: float, m: float) -> InverseGammaStd:
    return InverseGammaStd(kappa, m)


@dataclass(frozen=True)
class GeneralizedGamma(DensityModel):
    """Image of ``InverseGammaBM(beta, m)`` under ``y = 1 / ((alpha - 1) x**(alpha - 1))``.

    The density is ``C y**a exp(-c y**q)`` with ``a = (2 beta - alpha)/(alpha - 1)``,
    ``q = 1/(alpha - 1)`` and ``c = m (alpha - 1)**q``.
    """

    beta: float
    alpha: float
    m: float
    family: ClassVar[Family] = Family.GENERALIZED_GAMMA

    def __post_init__(self):
        _require(_finite(self.beta, self.alpha, self.m), "GeneralizedGamma parameters must be finite")
        _require(self.beta > self.alpha > 1.0,
                 f"GeneralizedGamma needs beta > alpha > 1, got beta={self.beta}, alpha={self.alpha}")
        _require(self.m > 0, f"GeneralizedGamma needs m > 0, got {self.m}")

    @property
    def interval(self):
        return HALF_LINE

    @property
    def a(self) -> float:
        return (2.0 * self.beta - self.alpha) / (self.alpha - 1.0)

    @property
    def q(self) -> float:
        return 1.0 / (self.alpha - 1.0)

    @property
    def c(self) -> float:
        return self.m * (self.alpha - 1.0) ** self.q

    @property
    def _shape(self) -> float:
        return (self.a + 1.0) / self.q

    @property
    def _mode(self) -> float:
        return (self.a / (self.c * self.q)) ** (1.0 / self.q)

    @cached_property
    def _log_kernel_peak(self) -> float:
        return float(self._log_kernel(np.array([self._mode]))[0])

    @property
    def breakpoints(self):
        # for alpha near 1 the mass sits in a narrow band of log y around the mode
        mode = self._mode
        width = 1.0 / math.sqrt(self.a * self.q)
        return tuple(mode * math.exp(k * width) for k in (-8, -3, -1, 0, 1, 3, 8))

    def _log_kernel(self, y):
        return self.a * np.log(y) - self.c * y ** self.q

    def _dlog_kernel(self, y):
        return self.a / y - self.c * self.q * y ** (self.q - 1.0)

    def pdf(self, x):
        arr, scalar = _as_array(x)
        self._check_domain(arr)
        safe = np.where(arr > 0, arr, 1.0)
        with np.errstate(over="ignore", under="ignore"):
            out = np.where(arr > 0, np.exp(self.log_norm_constant + self._log_kernel(safe)), 0.0)
        return _out(out, scalar)

    def norm_constant_closed_form(self) -> float:
        s = self._shape
        return math.exp(math.log(self.q) + s * math.log(self.c) - math.lgamma(s))

    def _cdf(self, y):
        return special.gammainc(self._shape, self.c * np.maximum(y, 0.0) ** self.q)

    def _sf(self, y):
        return special.gammaincc(self._shape, self.c * np.maximum(y, 0.0) ** self.q)

    def _quantile_closed(self, p):
        return (special.gammaincinv(self._shape, p) / self.c) ** (1.0 / self.q)

    def _quantile_guess(self, p):
        return (self._shape / self.c) ** (1.0 / self.q)

    @cached_property
    def _median(self) -> float:
        x = self._quantile_root(0.5)
        if abs(self.cdf(x) - 0.5) >= 1e-12:
            raise ConvergenceFailure(f"{self.describe()}: median residual too large")
        return x


# ---------------------------------------------------------------------------
# Gibbs densities exp(-V) with strictly convex V


@dataclass(frozen=True)
class Potential:
    name: str
    V: Callable[[np.ndarray], np.ndarray]
    dV: Callable[[np.ndarray], np.ndarray]
    d2V: Callable[[np.ndarray], np.ndarray]


def _logcosh(x):
    ax = np.abs(x)
    return ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)


POTENTIALS: dict[str, Potential] = {
    "gaussian": Potential("gaussian", lambda x: 0.5 * x * x, lambda x: x, lambda x: np.ones_like(x)),
    "anharmonic": Potential("anharmonic", lambda x: 0.5 * x * x + 0.25 * x ** 4,
                            lambda x: x + x ** 3, lambda x: 1.0 + 3.0 * x * x),
    "logcosh": Potential("logcosh", lambda x: 0.5 * x * x + _logcosh(x),
                         lambda x: x + np.tanh(x), lambda x: 1.0 + 1.0 / np.cosh(x) ** 2),
}


@dataclass(frozen=True)
class GibbsPotential(DensityModel):
    """``exp(-V(x - loc)) / Z`` for a registered even, strictly convex potential."""

    potential: str
    loc: float = 0.0
    family: ClassVar[Family] = Family.GIBBS_POTENTIAL

    def __post_init__(self):
        if self.potential not in POTENTIALS:
            raise CatalogUnknown(f"unknown potential {self.potential!r}; known: {sorted(POTENTIALS)}")
        _require(_finite(float(self.loc)), f"loc must be finite, got {self.loc}")

    @property
    def symmetric(self) -> bool:
        return self.loc == 0.0

    @property
    def interval(self):
        return REAL_LINE

    @property
    def handle(self) -> Potential:
        return POTENTIALS[self.potential]

    def V(self, x):
        return self.handle.V(np.asarray(x, dtype=float) - self.loc)

    def dV(self, x):
        return self.handle.dV(np.asarray(x, dtype=float) - self.loc)

    def d2V(self, x):
        return self.handle.d2V(np.asarray(x, dtype=float) - self.loc)

    @property
    def breakpoints(self):
        return (self.loc,) if self.loc != 0.0 else ()

    def _log_kernel(self, x):
        return -self.V(x)

    def _dlog_kernel(self, x):
        return -self.dV(x)

    def _cdf_numeric(self, x: float) -> float:
        if self.loc != 0.0:
            return GibbsPotential(self.potential)._cdf_numeric(x - self.loc)
        return super()._cdf_numeric(x)

    def _sf_numeric(self, x: float) -> float:
        if self.loc != 0.0:
            return GibbsPotential(self.potential)._sf_numeric(x - self.loc)
        return super()._sf_numeric(x)

    def _quantile_guess(self, q):
        return self.loc

    @cached_property
    def _median(self) -> float:
        return self.loc

    def moment(self, k: int, config: QuadratureConfig | None = None):
        if self.loc != 0.0 and k > 0 and int(k) == k:
            from .quadrature import expectation
            return expectation(self, lambda x: x ** int(k), config or default_config()).value
        return super().moment(k, config)


# ---------------------------------------------------------------------------
# construction from the key=value block


_BUILDERS = {
    Family.CAUCHY_TYPE: (CauchyType, ("beta",)),
    Family.SYMMETRIC_POLYNOMIAL: (SymmetricPolynomial, ("beta",)),
    Family.INVERSE_GAMMA_BM: (InverseGammaBM, ("beta", "m")),
    Family.INVERSE_GAMMA_STD: (InverseGammaStd, ("kappa", "m")),
    Family.GENERALIZED_GAMMA: (GeneralizedGamma, ("beta", "alpha", "m")),
    Family.GIBBS_POTENTIAL: (GibbsPotential, ("potential", "loc")),
}


def parse_block(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for raw in text.replace(";", "\n").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"malformed line {raw!r}, expected key=value")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k] = v
    return out


def make_density(family: str | Family, **params) -> DensityModel:
    try:
        fam = family if isinstance(family, Family) else Family(family)
    except ValueError:
        raise CatalogUnknown(f"unknown density family {family!r}") from None
    cls, names = _BUILDERS[fam]
    if fam is Family.GIBBS_POTENTIAL:
        params.setdefault("loc", 0.0)
    missing = [n for n in names if n not in params]
    extra = [k for k in params if k not in names]
    if missing or extra:
        raise ConfigError(f"{fam.value} takes parameters {names}; missing {missing}, unexpected {extra}")
    args = []
    for n in names:
        v = params[n]
        if n != "potential":
            try:
                v = float(v)
            except (TypeError, ValueError):
                raise ConfigError(f"parameter {n}={v!r} is not a number") from None
        args.append(v)
    return cls(*args)


def from_block(text: str) -> DensityModel:
    kv = parse_block(text)
    if "family" not in kv:
        raise ConfigError("model block needs a family= line")
    fam = kv.pop("family")
    return make_density(fam, **kv)
