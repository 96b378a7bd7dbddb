"""Adaptive Gauss-Kronrod integration on bounded and unbounded intervals.

The integrator works on vectorised integrands (``f(x)`` receives a 1-D array)
and bisects the subintervals with the largest error estimate until the global
estimate meets ``max(abs_tol, rel_tol * |value|)``.

Infinite ends are mapped to finite parameter ranges.  The default
``Substitution.EXP`` splits at ``|x| = 1`` and integrates each polynomial tail
in the logarithmic variable ``x = c + expm1(s)``, which turns a tail ``x**-p``
into the exponential ``exp(-(p - 1) s)`` for any ``p > 1``.  Tails are cut at
``s = tail_log_cutoff``; before integrating, the integrand is probed far out in
the tail to estimate its power-law exponent, non-integrable tails raise
``DivergentIntegral`` and the neglected remainder is bounded and added to the
error estimate.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import DivergentIntegral, NonFiniteIntegrand, QuadratureFailure

# QUADPACK qk15 abscissae and weights, largest abscissa first.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:7], [0.0], _XGK[6::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:7], [_WGK[7]], _WGK[6::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss points are the odd-indexed Kronrod abscissae (and the centre).
for _k, _w in zip((1, 3, 5), _WG[:3]):
    GAUSS_WEIGHTS[_k] = _w
    GAUSS_WEIGHTS[14 - _k] = _w
GAUSS_WEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps
_UFLOW = np.finfo(float).tiny


class Substitution(enum.Enum):
    NONE = "none"
    TAN = "tan"
    RECIPROCAL = "reciprocal"
    EXP = "exp"


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_subdivisions: int = 4096
    substitution: Substitution = Substitution.EXP
    scale: float = 1.0
    tail_log_cutoff: float = 170.0
    check_tails: bool = True

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 8:
            raise ValueError("max_subdivisions must be at least 8")
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if not isinstance(self.substitution, Substitution):
            object.__setattr__(self, "substitution", Substitution(self.substitution))

    def with_overrides(self, **kw) -> "QuadratureConfig":
        return replace(self, **kw)


def default_config() -> QuadratureConfig:
    """Default configuration, honouring ``HEAVYTAIL_QUAD_RTOL`` if set."""
    rtol = os.environ.get("HEAVYTAIL_QUAD_RTOL")
    if rtol:
        return QuadratureConfig(rel_tol=float(rtol))
    return QuadratureConfig()


class QuadResult(NamedTuple):
    value: float
    err_estimate: float
    n_intervals: int = 0
    n_evals: int = 0


# ---------------------------------------------------------------------------
# parameter maps: each piece integrates g(t) = f(x(t)) * x'(t) over [t0, t1]


@dataclass(frozen=True)
class _Piece:
    t0: float
    t1: float
    kind: str          # "plain", "exp_right", "exp_left", "exp_zero", ...
    anchor: float = 0.0
    scale: float = 1.0

    def map(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k = self.kind
        c = self.anchor
        if k == "plain":
            return t, np.ones_like(t)
        if k == "exp_right":
            e = np.exp(t)
            return c + (e - 1.0), e
        if k == "exp_left":
            e = np.exp(t)
            return c - (e - 1.0), e
        if k == "exp_zero":
            x = c * np.exp(-t)
            return x, x
        if k == "tan_right":          # x = c + cot(eps), eps in (0, pi/2]
            s = np.sin(t)
            return c + np.cos(t) / s, 1.0 / (s * s)
        if k == "tan_left":
            s = np.sin(t)
            return c - np.cos(t) / s, 1.0 / (s * s)
        if k == "frac_right":         # x = c + (1 - eps) / eps
            return c + (1.0 - t) / t, 1.0 / (t * t)
        if k == "recip_right":        # x = c - s + s / u
            s = self.scale
            return c - s + s / t, s / (t * t)
        if k == "recip_left":
            s = self.scale
            return c + s - s / t, s / (t * t)
        raise ValueError(k)


def _breaks(lo: float, hi: float, points: Sequence[float]) -> list[float]:
    pts = sorted({float(p) for p in points if lo < p < hi})
    return pts


def _pieces(interval, cfg: QuadratureConfig, points: Sequence[float]) -> list[_Piece]:
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"empty interval ({a}, {b})")
    sub = cfg.substitution
    inf_lo, inf_hi = math.isinf(a), math.isinf(b)
    if not (inf_lo or inf_hi):
        nodes = [a, *_breaks(a, b, points), b]
        return [_Piece(u, v, "plain") for u, v in zip(nodes[:-1], nodes[1:])]
    if sub is Substitution.NONE:
        raise ValueError("Substitution.NONE cannot handle an infinite interval")

    s = cfg.scale
    pieces: list[_Piece] = []
    if sub is Substitution.TAN:
        if inf_lo and inf_hi:
            # x = tan(t) on each half line, parametrised by the distance to pi/2
            pts = _breaks(a, b, points)
            right = sorted({math.atan2(1.0, p) for p in pts if p > 0} | {0.0, math.pi / 2})
            left = sorted({math.atan2(1.0, -p) for p in pts if p < 0} | {0.0, math.pi / 2})
            pieces += [_Piece(u, v, "tan_right") for u, v in zip(right[:-1], right[1:])]
            pieces += [_Piece(u, v, "tan_left") for u, v in zip(left[:-1], left[1:])]
            return pieces
        if inf_hi:
            return [_Piece(0.0, 1.0, "frac_right", anchor=a)]
        return [_Piece(0.0, math.pi / 2, "tan_left", anchor=b)]

    # EXP and RECIPROCAL share the breakpoint layout
    if inf_lo and inf_hi:
        extra = [-s, s] if sub is Substitution.RECIPROCAL else [-1.0, 1.0]
        nodes = sorted(set(extra) | set(_breaks(a, b, points)))
    elif inf_hi:
        anchor = a + (s if sub is Substitution.RECIPROCAL else 1.0)
        nodes = sorted({anchor} | set(_breaks(a, b, points)))
    else:
        anchor = b - (s if sub is Substitution.RECIPROCAL else 1.0)
        nodes = sorted({anchor} | set(_breaks(a, b, points)))

    cutoff = cfg.tail_log_cutoff
    if inf_lo:
        if sub is Substitution.EXP:
            pieces.append(_Piece(0.0, cutoff, "exp_left", anchor=nodes[0]))
        else:
            pieces.append(_Piece(0.0, 1.0, "recip_left", anchor=nodes[0], scale=s))
    else:
        if a == 0.0 and sub is Substitution.EXP:
            pieces.append(_Piece(0.0, cutoff, "exp_zero", anchor=nodes[0]))
        else:
            pieces.append(_Piece(a, nodes[0], "plain"))
    pieces += [_Piece(u, v, "plain") for u, v in zip(nodes[:-1], nodes[1:])]
    if inf_hi:
        if sub is Substitution.EXP:
            pieces.append(_Piece(0.0, cutoff, "exp_right", anchor=nodes[-1]))
        else:
            pieces.append(_Piece(0.0, 1.0, "recip_right", anchor=nodes[-1], scale=s))
    else:
        pieces.append(_Piece(nodes[-1], b, "plain"))
    return [p for p in pieces if p.t1 > p.t0]


# ---------------------------------------------------------------------------
# tail probes


_PROBE_NEAR, _PROBE_FAR = 1e20, 1e40
_TAIL_SPLITS = (0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0, 512.0)
_PROBE_OFFSETS = 1.0 + 1e-3 * np.arange(256) / 256.0
_DIVERGENCE_MARGIN = 1e-3


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore", invalid="ignore", divide="ignore"):
        y = f(x)
    y = np.asarray(y, dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    return y


def _envelope(f: Callable, x0: float) -> float:
    y = np.abs(_evaluate(f, x0 * _PROBE_OFFSETS))
    if np.any(np.isnan(y)):
        raise NonFiniteIntegrand(f"integrand is NaN near x = {x0:.3g}")
    return float(np.max(y))


def _tail_bound(f: Callable, direction: int, cut: float) -> float:
    """Bound on the integral beyond ``cut`` (``direction`` +1/-1 for +-inf, 0 for 0+).

    Raises ``DivergentIntegral`` when the probed exponent says the tail is not
    integrable.
    """
    if direction == 0:
        near, far = 1.0 / _PROBE_NEAR, 1.0 / _PROBE_FAR
    else:
        near, far = direction * _PROBE_NEAR, direction * _PROBE_FAR
    e1, e2 = _envelope(f, near), _envelope(f, far)
    if math.isinf(e1) or math.isinf(e2):
        raise DivergentIntegral("integrand overflows in the tail")
    if e2 == 0.0:
        return 0.0
    if e1 == 0.0:
        raise DivergentIntegral("integrand grows in the tail")
    # local power-law exponent: |f| ~ |x|**k
    k = math.log(e2 / e1) / math.log(abs(far) / abs(near))
    if direction == 0:
        if k <= -1.0 + _DIVERGENCE_MARGIN:
            raise DivergentIntegral(f"integrand ~ x**{k:.3f} is not integrable at 0")
        env_cut = max(e2 * (cut / abs(far)) ** k, 2.0 * _envelope(f, cut / 2.0) * 2.0 ** k)
        return env_cut * cut / (k + 1.0)
    if k >= -1.0 - _DIVERGENCE_MARGIN:
        raise DivergentIntegral(f"integrand ~ |x|**{k:.3f} is not integrable at infinity")
    env_cut = max(e2 * (abs(cut) / abs(far)) ** k, 2.0 * _envelope(f, cut))
    return env_cut * abs(cut) / (-k - 1.0)


# ---------------------------------------------------------------------------
# core adaptive loop


def _gk15(g: Callable, a: np.ndarray, b: np.ndarray):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    t = c[:, None] + h[:, None] * NODES[None, :]
    vals = g(t.ravel()).reshape(t.shape)
    k = h * (vals @ KRONROD_WEIGHTS)
    gs = h * (vals @ GAUSS_WEIGHTS)
    resabs = np.abs(h) * (np.abs(vals) @ KRONROD_WEIGHTS)
    mean = np.divide(k, 2 * h, out=np.zeros_like(k), where=h != 0)
    resasc = np.abs(h) * (np.abs(vals - mean[:, None]) @ KRONROD_WEIGHTS)
    err = np.abs(k - gs)
    scaled = np.where((resasc != 0) & (err != 0),
                      resasc * np.minimum(1.0, (200.0 * err / np.where(resasc == 0, 1, resasc)) ** 1.5),
                      err)
    floor = np.where(resabs > _UFLOW / (50 * _EPS), 50 * _EPS * resabs, 0.0)
    return k, np.maximum(scaled, floor)


# tail cutoffs (in the logarithmic variable) tried when the default one
# leaves too much to resolve, e.g. for oscillating tails
_FALLBACK_CUTOFFS = (math.log(1e6), math.log(1e4), math.log(1e3))
# cutoffs tried when an integrable tail is too heavy to drop at the default one
_EXTENDED_CUTOFFS = (math.log(1e150), math.log(1e280))


class _TailTooHeavy(QuadratureFailure):
    pass


def integrate(f: Callable, interval, config: QuadratureConfig | None = None,
              points: Sequence[float] = ()) -> QuadResult:
    """Integrate a vectorised ``f`` over ``interval`` = ``(a, b)``.

    ``a`` and ``b`` may be infinite.  ``points`` are interior breakpoints
    (kinks, discontinuities) where the initial partition is split.

    When the budget runs out on an unbounded interval the integration is
    retried with the tails cut closer in (their bound is added to the error).
    If no attempt meets the tolerance, the ``QuadratureFailure`` raised carries
    the attempt with the smallest error as ``partial``.
    """
    cfg = config or default_config()
    try:
        return _integrate(f, interval, cfg, points)
    except QuadratureFailure as exc:
        if isinstance(exc, (DivergentIntegral, NonFiniteIntegrand)):
            raise
        unbounded = math.isinf(interval[0]) or math.isinf(interval[1]) or \
            (interval[0] == 0.0 and cfg.substitution is Substitution.EXP)
        if not unbounded or cfg.substitution is not Substitution.EXP:
            raise
        best = exc
    if isinstance(best, _TailTooHeavy):
        for cut in _EXTENDED_CUTOFFS:
            if cut <= cfg.tail_log_cutoff:
                continue
            try:
                with np.errstate(over="ignore"):
                    return _integrate(f, interval, replace(cfg, tail_log_cutoff=cut), points)
            except NonFiniteIntegrand:
                break
            except QuadratureFailure as exc2:
                if isinstance(exc2, DivergentIntegral):
                    break
                if exc2.partial is not None and (best.partial is None or
                                                 exc2.partial.err_estimate < best.partial.err_estimate):
                    best = exc2
        raise best
    for cut in _FALLBACK_CUTOFFS:
        if cut >= cfg.tail_log_cutoff:
            continue
        try:
            return _integrate(f, interval, replace(cfg, tail_log_cutoff=cut), points)
        except QuadratureFailure as exc:
            if best.partial is None or (exc.partial is not None and
                                        exc.partial.err_estimate < best.partial.err_estimate):
                best = exc
    raise best


def _integrate(f: Callable, interval, cfg: QuadratureConfig, points: Sequence[float]) -> QuadResult:
    pieces = _pieces(interval, cfg, points)

    tail_err = 0.0
    if cfg.check_tails:
        cut = math.expm1(cfg.tail_log_cutoff)
        for p in pieces:
            if p.kind in ("exp_right", "tan_right", "frac_right", "recip_right"):
                tail_err += _tail_bound(f, +1, p.anchor + cut) if p.kind == "exp_right" \
                    else (_tail_bound(f, +1, 1e300), 0.0)[1]
            elif p.kind in ("exp_left", "tan_left", "recip_left"):
                tail_err += _tail_bound(f, -1, p.anchor - cut) if p.kind == "exp_left" \
                    else (_tail_bound(f, -1, -1e300), 0.0)[1]
            elif p.kind == "exp_zero":
                tail_err += _tail_bound(f, 0, p.anchor * math.exp(-cfg.tail_log_cutoff))

    def mapped(idx: int) -> Callable:
        piece = pieces[idx]

        def g(t):
            x, jac = piece.map(t)
            y = _evaluate(f, x)
            if not np.all(np.isfinite(y)):
                bad = x[~np.isfinite(y)][0]
                raise NonFiniteIntegrand(f"integrand is not finite at x = {bad!r}")
            with np.errstate(over="ignore", invalid="ignore"):
                out = y * jac
            # jac overflows only where y has underflowed to zero
            return np.where(y == 0.0, 0.0, out)
        return g

    funcs = [mapped(i) for i in range(len(pieces))]
    # a single rule over a long exponential tail piece can miss a peak next to
    # its anchor entirely, so those pieces start out split geometrically
    spans = []
    for i, p in enumerate(pieces):
        if p.kind in ("exp_right", "exp_left", "exp_zero"):
            cuts = [0.0] + [c for c in _TAIL_SPLITS if c < p.t1] + [p.t1]
            spans += [(u, v, i) for u, v in zip(cuts[:-1], cuts[1:])]
        else:
            spans.append((p.t0, p.t1, i))
    lo = np.array([u for u, _, _ in spans])
    hi = np.array([v for _, v, _ in spans])
    pid = np.array([i for _, _, i in spans])
    val = np.empty(len(spans))
    err = np.empty(len(spans))
    n_evals = 0
    for i in np.unique(pid):
        m = pid == i
        val[m], err[m] = _gk15(funcs[i], lo[m], hi[m])
        n_evals += 15 * int(m.sum())

    while True:
        total = float(np.sum(val))
        total_err = float(np.sum(err)) + tail_err
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if total_err <= tol:
            return QuadResult(total, total_err, len(val), n_evals)
        partial = QuadResult(total, total_err, len(val), n_evals)
        if len(val) >= cfg.max_subdivisions:
            raise QuadratureFailure(
                f"subdivision budget exhausted: value {total:.6g}, error {total_err:.3g} > {tol:.3g}",
                partial)
        if tail_err > tol:
            raise _TailTooHeavy(
                f"tail beyond the cutoff is too heavy: bound {tail_err:.3g} > {tol:.3g}", partial)
        # bisect the worst intervals that can still be split
        width_ok = (hi - lo) > 64 * _EPS * np.maximum(np.abs(lo), np.abs(hi))
        cand = np.where(width_ok)[0]
        emax = err[cand].max() if cand.size else 0.0
        if emax <= 0:
            raise QuadratureFailure("round-off limit reached before tolerance", partial)
        sel = cand[err[cand] >= 0.1 * emax]
        room = max(1, min(64, cfg.max_subdivisions - len(val)))
        if sel.size > room:
            sel = sel[np.argsort(err[sel])[::-1][:room]]
        mid = 0.5 * (lo[sel] + hi[sel])
        new_lo = np.concatenate([lo[sel], mid])
        new_hi = np.concatenate([mid, hi[sel]])
        new_pid = np.concatenate([pid[sel], pid[sel]])
        new_val = np.empty(new_lo.size)
        new_err = np.empty(new_lo.size)
        for i in np.unique(new_pid):
            m = new_pid == i
            new_val[m], new_err[m] = _gk15(funcs[i], new_lo[m], new_hi[m])
            n_evals += 15 * int(m.sum())
        keep = np.ones(len(val), dtype=bool)
        keep[sel] = False
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        pid = np.concatenate([pid[keep], new_pid])
        val = np.concatenate([val[keep], new_val])
        err = np.concatenate([err[keep], new_err])


def expectation(model, g: Callable, config: QuadratureConfig | None = None,
                points: Sequence[float] = ()) -> QuadResult:
    """``E[g(X)]`` for ``X`` distributed according to ``model``."""
    pdf = model.pdf

    def integrand(x):
        d = pdf(x)
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.asarray(g(x), dtype=float) * d
        # density underflow wins over a large g
        return np.where(d == 0.0, 0.0, v)

    pts = tuple(model.breakpoints) + tuple(points)
    return integrate(integrand, model.interval, config, points=pts)
