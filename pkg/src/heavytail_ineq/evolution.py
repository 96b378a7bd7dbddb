"""Finite-volume solver for ``f_t = (P f)_xx + (Q f)_x`` and relative-entropy tracking.

The flux ``J = (P f)_x + Q f`` is rewritten as ``P f_inf (f / f_inf)_x``.  Each
face uses the logarithmic mean of the neighbouring steady-state values, an
exponential-fitting weighting in the spirit of Chang and Cooper.  The
discrete steady state is then exactly the projection of ``f_inf``, and
implicit Euler steps are Markov operators fixing it, so the discrete relative
entropy cannot increase.
"""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from .densities import DensityModel
from .errors import ConfigError, GridMismatch, InsufficientDecay, StabilityFailure
from .fp_models import FokkerPlanckModel

log = logging.getLogger(__name__)

TAIL_EPS = 5e-9
NEG_TOL = 1e-14


class Scheme(enum.Enum):
    CHANG_COOPER = "ChangCooper"
    CENTERED_IMPLICIT = "CenteredImplicit"


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class CellGrid:
    faces: np.ndarray
    centers: np.ndarray

    def __post_init__(self):
        if len(self.centers) != len(self.faces) - 1:
            raise ConfigError("need one more face than cells")
        if np.any(np.diff(self.faces) <= 0):
            raise ConfigError("faces must be strictly increasing")

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.faces)

    @property
    def n_cells(self) -> int:
        return len(self.centers)

    def same_as(self, other: "CellGrid") -> bool:
        return self is other or (self.faces.shape == other.faces.shape
                                 and np.array_equal(self.faces, other.faces))


def truncated_domain(steady: DensityModel, eps: float = TAIL_EPS) -> tuple[float, float]:
    a, b = steady.quantile([eps, 1.0 - eps])
    return float(a), float(b)


def cell_grid(steady: DensityModel, n_cells: int, domain: tuple[float, float] | None = None) -> CellGrid:
    """Cells uniform in ``log x`` on the half line, in ``asinh`` of a scaled offset on the line."""
    a, b = domain if domain is not None else truncated_domain(steady)
    if not a < b:
        raise ConfigError(f"empty domain [{a}, {b}]")
    if steady.interval[0] == 0.0:
        if a <= 0:
            raise ConfigError("half-line domain must start above 0")
        u = np.linspace(math.log(a), math.log(b), n_cells + 1)
        uc = 0.5 * (u[:-1] + u[1:])
        faces, centers = np.exp(u), np.exp(uc)
    else:
        med = steady.median()
        q1, q3 = steady.quantile([0.25, 0.75])
        s = max(0.5 * (q3 - q1), 1e-12)
        u = np.linspace(math.asinh((a - med) / s), math.asinh((b - med) / s), n_cells + 1)
        uc = 0.5 * (u[:-1] + u[1:])
        faces, centers = med + s * np.sinh(u), med + s * np.sinh(uc)
    faces[0], faces[-1] = a, b
    return CellGrid(faces, centers)


@dataclass(frozen=True)
class GridDensity:
    """Cell averages on a grid."""

    grid: CellGrid
    values: np.ndarray

    @property
    def mass(self) -> float:
        return float(np.sum(self.values * self.grid.widths))

    def normalized(self) -> "GridDensity":
        return GridDensity(self.grid, self.values / self.mass)


def project(model: DensityModel, grid: CellGrid, normalize: bool = True) -> GridDensity:
    """Cell averages of ``model`` from cdf differences."""
    F = np.asarray(model.cdf(grid.faces), dtype=float)
    S = np.asarray(model.sf(grid.faces), dtype=float)
    # use whichever tail is smaller to keep the differences accurate
    mass = np.where(grid.centers <= model.median(), np.diff(F), -np.diff(S))
    out = GridDensity(grid, np.maximum(mass, 0.0) / grid.widths)
    return out.normalized() if normalize else out


def relative_entropy(f: GridDensity, f_inf: GridDensity) -> float:
    """``sum(width * f * log(f / f_inf))`` with ``0 log 0 = 0``."""
    if not f.grid.same_as(f_inf.grid):
        raise GridMismatch("densities live on different grids")
    p, q, h = f.values, f_inf.values, f.grid.widths
    pos = p > 0
    if np.any(q[pos] <= 0):
        return math.inf
    terms = np.zeros_like(p)
    terms[pos] = p[pos] * np.log(p[pos] / q[pos])
    # the mass difference makes the sum nonnegative even if masses differ slightly
    H = float(np.sum(h * (terms - p + q)))
    if H < -1e-12:
        raise StabilityFailure(f"negative relative entropy {H}")
    return max(H, 0.0)


# ---------------------------------------------------------------------------
# initial data


def _transformed(steady: DensityModel, grid: CellGrid, loc: float, scale: float) -> GridDensity:
    """Projection of the law of ``loc + scale X`` with ``X`` the steady state."""
    t = (grid.faces - loc) / scale
    lo, hi = steady.interval
    t = np.clip(t, lo, hi)
    F = np.asarray(steady.cdf(t), dtype=float)
    return GridDensity(grid, np.maximum(np.diff(F), 0.0) / grid.widths).normalized()


def preset_initial(name: str, steady: DensityModel, grid: CellGrid, f_inf: GridDensity) -> GridDensity:
    """Reproducible perturbations of the steady state.

    ``shift``: translate by one quartile width (on the half line: rescale by 2).
    ``rescale``: law of ``2 X`` (for inverse Gamma laws, ``m -> 2 m``).
    ``bump``: multiply by ``1 + exp(-(u - u_med)**2 / (2 * 0.5**2))`` with ``u`` the
    log (half line) or scaled asinh coordinate.
    ``mixture``: equal mixture of the steady state and ``rescale``.
    """
    half = steady.interval[0] == 0.0
    med = steady.median()
    q1, q3 = steady.quantile([0.25, 0.75])
    spread = max(0.5 * (q3 - q1), 1e-12)
    if name == "steady":
        return f_inf
    if name == "shift":
        if half:
            return _transformed(steady, grid, 0.0, 2.0)
        return _transformed(steady, grid, spread, 1.0)
    if name == "rescale":
        if half:
            return _transformed(steady, grid, 0.0, 2.0)
        return _transformed(steady, grid, med * (1 - 2.0), 2.0)
    if name == "bump":
        x = grid.centers
        u = np.log(x / med) if half else np.arcsinh((x - med) / spread)
        g = 1.0 + np.exp(-u * u / (2 * 0.5 ** 2))
        return GridDensity(grid, f_inf.values * g).normalized()
    if name == "mixture":
        other = preset_initial("rescale", steady, grid, f_inf)
        return GridDensity(grid, 0.5 * (f_inf.values + other.values)).normalized()
    raise ConfigError(f"unknown preset {name!r}; known: steady, shift, rescale, bump, mixture")


PRESETS = ("steady", "shift", "rescale", "bump", "mixture")


# ---------------------------------------------------------------------------
# configuration and results


@dataclass(frozen=True)
class PdeConfig:
    domain: tuple[float, float]
    n_cells: int = 512
    dt: float = 0.01
    t_end: float = 10.0
    scheme: Scheme = Scheme.CHANG_COOPER
    snapshot_stride: int = 0     # 0 keeps only the final state

    def __post_init__(self):
        a, b = self.domain
        if not (math.isfinite(a) and math.isfinite(b) and a < b):
            raise ConfigError(f"bad domain {self.domain}")
        if self.n_cells < 128:
            raise ConfigError(f"n_cells must be at least 128, got {self.n_cells}")
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not (self.t_end > 0 and math.isfinite(self.t_end)):
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.snapshot_stride < 0:
            raise ConfigError("snapshot_stride must be nonnegative")
        object.__setattr__(self, "scheme", Scheme(self.scheme))

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_end / self.dt)))


def default_pde_config(model: FokkerPlanckModel, rho: float | None = None, n_cells: int = 512,
                       **overrides) -> PdeConfig:
    """``dt = t_relax / 200`` and ``t_end = 12 t_relax`` with ``t_relax = 1 / rho`` (1 if unknown)."""
    t_relax = 1.0 / rho if rho else 1.0
    kw = dict(domain=truncated_domain(model.steady_state), n_cells=n_cells,
              dt=t_relax / 200.0, t_end=12.0 * t_relax)
    kw.update(overrides)
    return PdeConfig(**kw)


@dataclass(frozen=True)
class DecayFit:
    rate: float
    r_squared: float
    window: tuple[int, int]


def fit_decay_rate(times, H, lo: float = 1e-6, hi: float = 1e-2) -> DecayFit:
    """Least-squares slope of ``log H`` against ``t`` where ``lo <= H <= hi``.

    The window is the first contiguous run of samples inside the band.
    """
    t = np.asarray(times, dtype=float)
    h = np.asarray(H, dtype=float)
    inside = (h >= lo) & (h <= hi)
    idx = np.flatnonzero(inside)
    if idx.size < 2:
        raise InsufficientDecay(f"fewer than two samples with {lo:g} <= H <= {hi:g}")
    start = idx[0]
    stop = start
    while stop + 1 < len(h) and inside[stop + 1]:
        stop += 1
    if stop - start + 1 < 2:
        raise InsufficientDecay("fitting window holds a single sample")
    tt, yy = t[start:stop + 1], np.log(h[start:stop + 1])
    slope, intercept = np.polyfit(tt, yy, 1)
    resid = yy - (slope * tt + intercept)
    ss_tot = float(np.sum((yy - yy.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(-float(slope), r2, (int(start), int(stop + 1)))


@dataclass
class EntropyTrace:
    times: np.ndarray
    H: np.ndarray
    mass_drift: float
    truncated_mass: float
    fitted_rate: float = math.nan
    r_squared: float = math.nan
    fit_window: tuple[int, int] = (0, 0)

    @property
    def max_increase(self) -> float:
        """Largest step-to-step increase of ``H`` (nonpositive when the H-theorem holds)."""
        return float(np.max(np.diff(self.H))) if len(self.H) > 1 else 0.0

    def fit(self, lo: float = 1e-6, hi: float = 1e-2) -> DecayFit:
        res = fit_decay_rate(self.times, self.H, lo, hi)
        self.fitted_rate, self.r_squared, self.fit_window = res.rate, res.r_squared, res.window
        return res


@dataclass
class EvolutionResult:
    trace: EntropyTrace
    final: GridDensity
    steady: GridDensity
    snapshots: list[tuple[float, np.ndarray]] = field(default_factory=list)
    clipped_mass: float = 0.0

    @property
    def grid(self) -> CellGrid:
        return self.steady.grid


# ---------------------------------------------------------------------------
# solver


def _logmean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        r = (a - b) / (np.log(a) - np.log(b))
    close = np.abs(a - b) <= 1e-12 * np.maximum(a, b)
    return np.where(close, 0.5 * (a + b), r)


def _operator(model: FokkerPlanckModel, grid: CellGrid, f_inf: np.ndarray, scheme: Scheme):
    """Sparse matrix ``A`` with ``d/dt (width * f) = A f``."""
    x, xf = grid.centers, grid.faces[1:-1]
    dx = np.diff(x)
    P = np.asarray(model.P(xf), dtype=float)
    n = grid.n_cells
    if scheme is Scheme.CHANG_COOPER:
        T = P * _logmean(f_inf[:-1], f_inf[1:]) / dx
        # J = T (f_{i+1}/finf_{i+1} - f_i/finf_i)
        left = -T / f_inf[:-1]
        right = T / f_inf[1:]
    else:
        Pc = np.asarray(model.P(x), dtype=float)
        Qf = np.asarray(model.Q(xf), dtype=float)
        left = -Pc[:-1] / dx + 0.5 * Qf
        right = Pc[1:] / dx + 0.5 * Qf
    # cell i gains J_{i+1/2} and loses J_{i-1/2}
    main = np.zeros(n)
    main[:-1] += left
    main[1:] -= right
    upper = right          # coefficient of f_{i+1} in row i
    lower = -left          # coefficient of f_i in row i+1
    return diags([lower, main, upper], [-1, 0, 1], format="csc")


def evolve(model: FokkerPlanckModel, f0: GridDensity, config: PdeConfig,
           steady: GridDensity | None = None) -> EvolutionResult:
    """Implicit Euler with no-flux boundaries from ``f0`` up to ``config.t_end``.

    Relative entropy is recorded after every step.  Negative cell values below
    ``-1e-14 max f`` raise ``StabilityFailure``; smaller ones are clipped and
    the lost mass is logged.
    """
    grid = f0.grid
    if grid.n_cells != config.n_cells:
        raise ConfigError(f"f0 has {grid.n_cells} cells, config asks for {config.n_cells}")
    if steady is None:
        steady = project(model.steady_state, grid)
    elif not steady.grid.same_as(grid):
        raise GridMismatch("steady state and initial datum live on different grids")
    if np.any(f0.values < 0):
        raise ConfigError("initial datum has negative cells")
    if abs(f0.mass - 1.0) > 1e-8:
        raise ConfigError(f"initial datum has mass {f0.mass!r}, expected 1")
    if np.any(steady.values <= 0):
        raise StabilityFailure("steady state underflows on the grid; shrink the domain")

    h = grid.widths
    A = _operator(model, grid, steady.values, config.scheme)
    dt = config.dt
    lu = splu((diags(h / dt) - A).tocsc())

    f = f0.values.copy()
    m0 = float(np.sum(f * h))
    times = [0.0]
    Hs = [relative_entropy(GridDensity(grid, f), steady)]
    snaps = [(0.0, f.copy())] if config.snapshot_stride else []
    drift = 0.0
    clipped = 0.0
    for k in range(1, config.n_steps + 1):
        f = lu.solve(h * f / dt)
        fmin = float(f.min())
        if fmin < 0:
            if fmin < -NEG_TOL * float(f.max()):
                raise StabilityFailure(f"negative cell value {fmin:.3e} at step {k}")
            lost = float(np.sum(np.where(f < 0, -f, 0.0) * h))
            f = np.maximum(f, 0.0)
            f *= m0 / float(np.sum(f * h))
            clipped += lost
            log.debug("clipped %.3e mass at step %d", lost, k)
        m = float(np.sum(f * h))
        drift = max(drift, abs(m - m0))
        t = k * dt
        times.append(t)
        Hs.append(relative_entropy(GridDensity(grid, f), steady))
        if config.snapshot_stride and k % config.snapshot_stride == 0:
            snaps.append((t, f.copy()))
    if not snaps or snaps[-1][0] != times[-1]:
        snaps.append((times[-1], f.copy()))

    truncated = float(model.steady_state.cdf(grid.faces[0]) + model.steady_state.sf(grid.faces[-1]))
    trace = EntropyTrace(np.array(times), np.array(Hs), drift, truncated)
    try:
        trace.fit()
    except InsufficientDecay:
        pass
    return EvolutionResult(trace, GridDensity(grid, f), steady, snaps, clipped)


def run_preset(model: FokkerPlanckModel, preset: str = "bump", rho: float | None = None,
               n_cells: int = 512, **overrides) -> EvolutionResult:
    """Build grid, steady state and initial datum for ``model`` and evolve."""
    config = default_pde_config(model, rho, n_cells, **overrides)
    grid = cell_grid(model.steady_state, config.n_cells, config.domain)
    steady = project(model.steady_state, grid)
    f0 = preset_initial(preset, model.steady_state, grid, steady)
    return evolve(model, f0, config, steady)


def steady_drift(result: EvolutionResult) -> float:
    """Sup-norm distance of the final state from the discrete steady state, relative to its max."""
    return float(np.max(np.abs(result.final.values - result.steady.values)) / np.max(result.steady.values))

