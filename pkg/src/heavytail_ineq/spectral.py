"""Best weighted Poincare constants from a discretised Sturm-Liouville problem.

The smallest nonzero eigenvalue of ``-(w f phi')' = lambda f phi`` with natural
boundary conditions is the best constant ``lambda1`` in
``lambda1 Var[phi] <= E[w phi'**2]``.  It is approximated with continuous
piecewise-linear elements on a grid graded uniformly in the logit of the
cumulative probability, so that cells stay small in the centre and grow
geometrically in polynomial tails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import solveh_banded
from scipy.sparse.linalg import ArpackError, ArpackNoConvergence, LinearOperator, eigsh

from .constants import chernoff_rho
from .densities import CauchyType, DensityModel
from .errors import DivergentIntegral, EigenSolveFailure, MassDeficit, ParameterOutOfRange, QuadratureFailure
from .quadrature import QuadratureConfig, integrate
from .verifiers import TestFunction, _dirichlet, _entropy

Fn = Callable[[np.ndarray], np.ndarray]

# probability left out on each side; the two together stay below 1e-8
TAIL_EPS = 5e-9
MIN_COVERAGE = 1.0 - 1e-8
_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


def graded_nodes(model: DensityModel, n_cells: int, eps: float = TAIL_EPS) -> np.ndarray:
    """``n_cells + 1`` quantiles of ``model`` equally spaced in logit(p) on ``[eps, 1 - eps]``.

    Doubling ``n_cells`` adds one node between each pair of old ones.
    """
    if n_cells < 2:
        raise ParameterOutOfRange(f"need at least 2 cells, got {n_cells}")
    t = np.linspace(math.log(eps / (1 - eps)), math.log((1 - eps) / eps), n_cells + 1)
    p = 1.0 / (1.0 + np.exp(-t))
    x = np.asarray(model.quantile(p), dtype=float)
    if np.any(np.diff(x) <= 0):
        raise ParameterOutOfRange("quantile grid is not strictly increasing; use fewer cells")
    return x


@dataclass(frozen=True)
class SpectralProblem:
    model: DensityModel
    weight: Fn
    grid: np.ndarray
    weight_id: str = "w"

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if g.ndim != 1 or np.any(np.diff(g) <= 0):
            raise ParameterOutOfRange("grid must be strictly increasing")
        if self.n_interior < 64:
            raise ParameterOutOfRange(f"need at least 64 interior nodes, got {self.n_interior}")
        lo, hi = self.model.interval
        if g[0] < lo or g[-1] > hi or not np.all(np.isfinite(g)):
            raise ParameterOutOfRange("grid leaves the model interval")
        cov = self.coverage
        if cov < MIN_COVERAGE:
            raise MassDeficit(f"grid carries probability {cov!r} < {MIN_COVERAGE}")

    @property
    def n_interior(self) -> int:
        return len(self.grid) - 2

    @property
    def n_cells(self) -> int:
        return len(self.grid) - 1

    @property
    def coverage(self) -> float:
        a, b = float(self.grid[0]), float(self.grid[-1])
        return float(1.0 - self.model.cdf(a) - self.model.sf(b))


def build_problem(model: DensityModel, weight: Fn, n_cells: int = 2048, eps: float = TAIL_EPS,
                  weight_id: str = "w") -> SpectralProblem:
    return SpectralProblem(model, weight, graded_nodes(model, n_cells, eps), weight_id)


def assemble(problem: SpectralProblem) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Stiffness ``E[w phi' psi']`` and consistent mass ``E[phi psi]`` on the hat basis."""
    x = np.asarray(problem.grid, dtype=float)
    a, b = x[:-1], x[1:]
    h = b - a
    # Gauss-Legendre nodes in every cell, shape (cells, 8)
    xq = 0.5 * (a + b)[:, None] + 0.5 * h[:, None] * _GL_X[None, :]
    wq = 0.5 * h[:, None] * _GL_W[None, :]
    f = problem.model.pdf(xq)
    w = np.asarray(problem.weight(xq), dtype=float)
    s = (xq - a[:, None]) / h[:, None]       # local coordinate in [0, 1]
    kw = np.sum(wq * w * f, axis=1) / (h * h)
    m00 = np.sum(wq * f * (1 - s) ** 2, axis=1)
    m01 = np.sum(wq * f * s * (1 - s), axis=1)
    m11 = np.sum(wq * f * s * s, axis=1)
    if not (np.all(np.isfinite(kw)) and np.all(np.isfinite(m00 + m01 + m11))):
        raise EigenSolveFailure("non-finite entries in the assembled pencil")

    n = len(x)
    kd = np.zeros(n)
    kd[:-1] += kw
    kd[1:] += kw
    md = np.zeros(n)
    md[:-1] += m00
    md[1:] += m11
    K = sparse.diags([-kw, kd, -kw], [-1, 0, 1], format="csr")
    M = sparse.diags([m01, md, m01], [-1, 0, 1], format="csr")
    return K, M


@dataclass(frozen=True)
class SpectralResult:
    lambda1: float
    eigenfunction: np.ndarray
    grid: np.ndarray
    n_cells: int
    coverage: float


def _deflated_solver(K: sparse.csr_matrix, M: sparse.csr_matrix):
    """Pseudo-inverse of ``K`` mapping into the M-orthogonal complement of the constants.

    ``K`` is singular with the constants as kernel.  For a right-hand side
    orthogonal to them, the system is consistent; pinning one node turns it
    into a positive definite tridiagonal system.
    """
    n = K.shape[0]
    pin = n // 2
    keep = np.r_[0:pin, pin + 1:n]
    Kr = K[keep][:, keep].tocsr()
    ab = np.zeros((2, n - 1))
    ab[1] = Kr.diagonal()
    ab[0, 1:] = Kr.diagonal(1)
    ones = np.ones(n)
    m1 = M @ ones
    total = float(ones @ m1)

    def project(v):
        return v - (m1 @ v) / total

    def apply(b):
        b = np.array(b, dtype=float).ravel()
        b -= m1 * (np.sum(b) / total)    # make the system consistent
        v = np.zeros(n)
        v[keep] = solveh_banded(ab, b[keep], lower=False, check_finite=False)
        return project(v)

    return apply, project


def poincare_best_constant(problem: SpectralProblem) -> SpectralResult:
    """Smallest nonzero generalised eigenvalue of the stiffness/mass pencil.

    Returns the eigenvalue and the nodal values of its eigenfunction, scaled
    to unit variance and positive slope at the median.
    """
    K, M = assemble(problem)
    apply, project = _deflated_solver(K, M)
    n = K.shape[0]
    op = LinearOperator((n, n), matvec=apply, dtype=float)
    x = np.asarray(problem.grid, dtype=float)
    v0 = project(np.arctan((x - x[n // 2]) / max(1.0, abs(x[n // 2]))))
    try:
        # shift-invert Lanczos at 0; the constants are mapped to zero by the
        # deflated solve, so the first eigenvalue found is lambda1
        vals, vecs = eigsh(K, k=1, M=M, sigma=0.0, OPinv=op, which="LM", v0=v0,
                           tol=1e-12, maxiter=5000)
    except (ArpackError, ArpackNoConvergence) as exc:
        raise EigenSolveFailure(f"Lanczos iteration failed: {exc}") from None
    if not (vals[0] > 0 and math.isfinite(vals[0])):
        raise EigenSolveFailure(f"nonpositive eigenvalue {vals[0]}")
    phi = project(vecs[:, 0])
    var = float(phi @ (M @ phi))
    phi = phi / math.sqrt(var)
    # Rayleigh polish on the exact pencil
    lam = float(phi @ (K @ phi)) / float(phi @ (M @ phi))
    k = n // 2
    if phi[min(k + 1, n - 1)] - phi[max(k - 1, 0)] < 0:
        phi = -phi
    return SpectralResult(lam, phi, x, problem.n_cells, problem.coverage)


def dense_best_constant(problem: SpectralProblem) -> float:
    """Same eigenvalue from a dense symmetric-definite solve (small grids only)."""
    from scipy.linalg import eigh

    K, M = assemble(problem)
    vals = eigh(K.toarray(), M.toarray(), eigvals_only=True, subset_by_index=[0, 1])
    return float(vals[1])


def rayleigh_quotient(problem: SpectralProblem, values: np.ndarray,
                      config: QuadratureConfig | None = None) -> float:
    """``E[w phi'**2] / Var[phi]`` by adaptive quadrature of the interpolant.

    ``phi`` is piecewise linear on the grid and constant beyond it.
    """
    x = np.asarray(problem.grid, dtype=float)
    v = np.asarray(values, dtype=float)
    slopes = np.diff(v) / np.diff(x)
    model = problem.model
    cfg = config or QuadratureConfig(rel_tol=1e-9)
    pts = tuple(x)

    def phi(t):
        return np.interp(t, x, v)

    def dphi(t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(x, t, side="right") - 1, 0, len(slopes) - 1)
        inside = (t > x[0]) & (t < x[-1])
        return np.where(inside, slopes[idx], 0.0)

    def expect(g):
        return integrate(lambda t: np.where(model.pdf(t) > 0, g(t) * model.pdf(t), 0.0),
                         model.interval, cfg, points=pts).value

    mean = expect(phi)
    var = expect(lambda t: (phi(t) - mean) ** 2)
    # phi' vanishes outside the grid, so the weighted form lives on the grid
    energy = integrate(lambda t: problem.weight(t) * dphi(t) ** 2 * model.pdf(t),
                       (x[0], x[-1]), cfg, points=pts[1:-1]).value
    return energy / var


# ---------------------------------------------------------------------------
# log-Sobolev ratio probe

LSI_SHIFTS = (0.25, 1.0, 4.0)


def lsi_ratio_probe(model: DensityModel, weight: Fn, corpus: Sequence[TestFunction],
                    config: QuadratureConfig | None = None) -> float:
    """Largest ``Ent[phi_c**2] / E[w phi_c'**2]`` over the corpus, ``phi_c = 1 + c phi``.

    Both sides of the log-Sobolev inequality scale alike under ``phi -> c phi``,
    so the scalings are applied around the constant function instead.  Any
    value is a lower bound on the best constant.
    """
    cfg = config or QuadratureConfig(rel_tol=1e-9)
    dom = "R+" if model.interval[0] == 0.0 else "R"
    best = 0.0
    used = 0
    for fn in corpus:
        if fn.domain != dom or not fn.bounded:
            continue
        for c in LSI_SHIFTS:
            g = fn.scaled(c, shift=1.0)
            try:
                d = _dirichlet(model, weight, g, 2.0, 1.0, cfg, partial_ok=True)
            except DivergentIntegral:
                continue
            if not d.value > 0:
                continue
            ent = _entropy(model, g, cfg, partial_ok=True)
            used += 1
            best = max(best, ent.value / d.value)
    if used == 0:
        raise QuadratureFailure("no admissible corpus function gave a finite Dirichlet form")
    return best


# ---------------------------------------------------------------------------
# sweep helper


def cauchy_gap_row(beta: float, n_cells: int = 2048) -> dict:
    """CSV row ``(beta, weight_id, n, lambda1, rho_paper, gap)`` for weight ``1 + x**2``."""
    problem = build_problem(CauchyType(beta), lambda x: 1.0 + np.asarray(x) ** 2, n_cells,
                            weight_id="1+x^2")
    lam = poincare_best_constant(problem).lambda1
    rho = chernoff_rho(beta).value
    return {"beta": beta, "weight_id": problem.weight_id, "n": n_cells, "lambda1": lam,
            "rho_paper": rho, "gap": lam - rho}
