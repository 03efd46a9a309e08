"""Quantitative robustness: distance bounds and suboptimality probes.

The probe walks a feasible path away from the optimum, measuring how far
the Gram matrix, the realization vectors and the projectors move as a
function of the objective deficit ``epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InvalidArgumentError, NotPSDError, PreconditionError
from .graphs import ExclusivityGraph, cycle_order
from .realizations import (
    QuantumRealization,
    canonical_kcbs,
    lemma_alignment,
    projector_deviations,
    realization_from_gram,
    scaled_vectors,
    vector_deviations,
)
from .theta_sdp import SdpSolution, affine_project, build_problem, strict_feasible_point

DEFAULT_SEED = 42
# drops eigenvalue noise of exact optima while keeping O(t) interior directions
PROBE_RANK_TOL = 1e-12
DISTANCE_KINDS = ("gram_distance", "vector_distance", "projector_distance")
CSV_COLUMNS = ("t", "epsilon", "gram_distance", "vector_distance", "projector_distance")


@dataclass(frozen=True)
class ProbeConfig:
    steps: int = 20
    t_min: float = 1e-6
    t_max: float = 1e-1
    m: float | None = None  # strictly feasible point parameter, default n + 1
    rank_tol: float = PROBE_RANK_TOL


@dataclass
class ProbePoint:
    t: float
    epsilon: float
    gram_distance: float
    vector_distance: float
    projector_distance: float

    def as_row(self) -> tuple:
        return tuple(getattr(self, c) for c in CSV_COLUMNS)


@dataclass
class RobustnessProbe:
    graph: ExclusivityGraph
    points: list = field(default_factory=list)
    family: str = "path"

    @property
    def t(self) -> np.ndarray:
        return np.array([p.t for p in self.points])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points])

    def ratios(self, which: str, exponent: float) -> np.ndarray:
        eps = self.column("epsilon")
        d = self.column(which)
        mask = eps > 0
        return d[mask] / eps[mask] ** exponent

    def summary(self) -> dict:
        gram = self.ratios("gram_distance", 1.0)
        proj = self.ratios("projector_distance", 0.5)
        vec = self.ratios("vector_distance", 0.5)
        return {
            "family": self.family,
            "points": len(self.points),
            "max_gram_ratio": float(gram.max()) if gram.size else None,
            "min_gram_ratio": float(gram.min()) if gram.size else None,
            "max_vector_ratio_sqrt": float(vec.max()) if vec.size else None,
            "max_projector_ratio_sqrt": float(proj.max()) if proj.size else None,
        }


def gram_closeness_bound(x, x2, v=None, v2=None):
    """Align two Gram decompositions and compare against ``sqrt(n ||x - x2||_F)``.

    ``v`` and ``v2`` are optional decompositions (vectors as rows); by
    default the eigen-based ones are used. Returns
    ``(U, max_i ||U v_i - v2_i||, bound)``.
    """
    x = linalg.sym(x)
    x2 = linalg.sym(x2)
    if x.shape != x2.shape:
        raise InvalidArgumentError(f"shape mismatch {x.shape} vs {x2.shape}")
    n = x.shape[0]
    for m in (x, x2):
        if linalg.min_eigenvalue(m) < -linalg.PSD_SLACK:
            raise NotPSDError("gram_closeness_bound needs positive semidefinite inputs")
    v = linalg.gram_decompose(x, 0.0) if v is None else np.asarray(v, dtype=float)
    v2 = linalg.gram_decompose(x2, 0.0) if v2 is None else np.asarray(v2, dtype=float)
    u = lemma_alignment(v, v2)
    dim = u.shape[0]
    va = np.zeros((n, dim))
    va[:, : v.shape[1]] = v
    vb = np.zeros((n, dim))
    vb[:, : v2.shape[1]] = v2
    dist = float(np.max(np.linalg.norm(va @ u.T - vb, axis=1)))
    bound = math.sqrt(n * linalg.frob(x - x2))
    return u, dist, bound


def normalization_bound_check(a, b) -> tuple[float, float]:
    """``(||a/|a| - b/|b|||, 2 ||a - b|| / ||a||)``; requires ``||a|| >= 2 ||a - b||``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    delta = float(np.linalg.norm(a - b))
    na = float(np.linalg.norm(a))
    if na == 0.0 or na < 2 * delta:
        raise PreconditionError(f"need ||a|| >= 2 ||a - b|| (got {na:.3e} vs {delta:.3e})")
    nb = float(np.linalg.norm(b))
    lhs = float(np.linalg.norm(a / na - b / nb))
    return lhs, 2 * delta / na


def projector_bound_check(x, y, unit_tol: float = 1e-10) -> tuple[float, float]:
    """``(||xx^T - yy^T||_F, sqrt(2) ||x - y||)`` for unit vectors."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    for v in (x, y):
        if abs(np.linalg.norm(v) - 1.0) > unit_tol:
            raise PreconditionError("projector_bound_check needs unit vectors")
    lhs = linalg.frob(np.outer(x, x) - np.outer(y, y))
    return lhs, math.sqrt(2.0) * float(np.linalg.norm(x - y))


def _reference(g: ExclusivityGraph, x_star: np.ndarray, reference):
    if reference is not None:
        return reference
    order = cycle_order(g)
    unit = all(w == 1.0 for w in g.weights)
    if order == list(range(1, g.n + 1)) and g.n % 2 == 1 and g.n >= 5 and unit:
        return canonical_kcbs(g.n)
    return realization_from_gram(x_star, g)


def _as_optimum(g: ExclusivityGraph, x_star, feas_tol: float = 1e-6) -> np.ndarray:
    if isinstance(x_star, SdpSolution):
        if not x_star.converged:
            raise InvalidArgumentError("x_star comes from a solver run that did not converge")
        x_star = x_star.x
    x = linalg.sym(x_star)
    p = build_problem(g)
    if x.shape != (p.dim, p.dim):
        raise InvalidArgumentError(f"x_star shape {x.shape} does not match graph dim {p.dim}")
    if p.affine_residual(x) > feas_tol or linalg.min_eigenvalue(x) < -feas_tol:
        raise InvalidArgumentError("x_star is not a feasible point of the theta SDP")
    return x


def measure_point(g, x_star, x, reference: QuantumRealization, t: float, rank_tol: float = PROBE_RANK_TOL) -> ProbePoint:
    p = build_problem(g)
    eps = p.objective(x_star) - p.objective(x)
    gram = linalg.frob(x - x_star)
    r = realization_from_gram(x, g, rank_tol=rank_tol)
    u = lemma_alignment(scaled_vectors(reference), scaled_vectors(r))
    vec = float(np.max(vector_deviations(reference, r, u)))
    proj = float(np.max(projector_deviations(reference, r, u)))
    return ProbePoint(t, eps, gram, vec, proj)


def suboptimality_distance_probe(
    g: ExclusivityGraph,
    x_star,
    steps: int = 20,
    t_min: float = 1e-6,
    t_max: float = 1e-1,
    *,
    m: float | None = None,
    reference: QuantumRealization | None = None,
    rank_tol: float = PROBE_RANK_TOL,
    include_zero: bool = False,
) -> RobustnessProbe:
    """Probe ``X_t = (1 - t) X* + t F`` on a log-spaced grid of t.

    ``F`` is the strictly feasible point, so every ``X_t`` is feasible. Each
    point records the objective deficit, the Gram distance and, after
    aligning the recovered realization with ``reference`` (canonical KCBS for
    the plainly labelled odd cycle), the worst vector and projector distance.
    """
    if steps < 1 or not (0 < t_min <= t_max <= 1):
        raise InvalidArgumentError("need steps >= 1 and 0 < t_min <= t_max <= 1")
    x = _as_optimum(g, x_star)
    ref = _reference(g, x, reference)
    f = strict_feasible_point(g.n, g.n + 1 if m is None else m)
    ts = list(np.geomspace(t_min, t_max, steps))
    if include_zero:
        ts = [0.0] + ts
    probe = RobustnessProbe(g, family="path")
    for t in ts:
        xt = (1 - t) * x + t * f
        probe.points.append(measure_point(g, x, xt, ref, float(t), rank_tol))
    return probe


def _project_feasible(x, p, tol: float = 1e-9, max_iter: int = 20000):
    # alternate affine and cone projections; return the PSD iterate
    y = linalg.psd_project(x)
    for _ in range(max_iter):
        y = linalg.psd_project(affine_project(y, p))
        if p.affine_residual(y) <= tol:
            return y
    return None


def random_family_probe(
    g: ExclusivityGraph,
    x_star,
    trials: int = 20,
    seed: int = DEFAULT_SEED,
    scale_min: float = 1e-4,
    scale_max: float = 1e-1,
    *,
    reference: QuantumRealization | None = None,
    rank_tol: float = PROBE_RANK_TOL,
    tol: float = 1e-9,
) -> RobustnessProbe:
    """Random perturbations of ``X*`` pulled back to the feasible set.

    Each trial adds a random symmetric direction (Frobenius size drawn
    log-uniformly in ``[scale_min, scale_max]``) and alternates affine and
    PSD projections. Points whose final affine residual exceeds ``tol`` are
    discarded.
    """
    x = _as_optimum(g, x_star)
    ref = _reference(g, x, reference)
    p = build_problem(g)
    rng = np.random.default_rng(seed)
    probe = RobustnessProbe(g, family="random")
    for _ in range(trials):
        d = rng.standard_normal((p.dim, p.dim))
        d = linalg.sym(d)
        size = math.exp(rng.uniform(math.log(scale_min), math.log(scale_max)))
        d *= size / linalg.frob(d)
        y = _project_feasible(x + d, p, tol)
        if y is None or np.min(y.diagonal()[1:]) <= 1e-8:
            continue
        probe.points.append(measure_point(g, x, y, ref, size, rank_tol))
    return probe


def fit_scaling_exponent(probe: RobustnessProbe, which: str) -> tuple[float, float]:
    """Least-squares slope of ``log(distance)`` against ``log(epsilon)`` and its R^2."""
    if which not in DISTANCE_KINDS:
        raise InvalidArgumentError(f"unknown distance kind {which!r}")
    eps = probe.column("epsilon")
    d = probe.column(which)
    mask = (eps > 0) & (d > 0)
    if mask.sum() < 5:
        raise InvalidArgumentError(f"need at least 5 points with epsilon > 0, got {int(mask.sum())}")
    lx, ly = np.log(eps[mask]), np.log(d[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2
