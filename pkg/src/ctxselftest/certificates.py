"""Dual certificates, optimality checks and the dual-nondegeneracy test.

A dual feasible point is described by multipliers ``(t, lambda, mu)`` and
the matrix

    Z = t E_00 + sum_i (lambda_i - w_i) E_ii - sum_i lambda_i E_0i + sum_{i~j} mu_ij E_ij

with ``E_ij = (e_i e_j^T + e_j e_i^T) / 2``. So ``Z_0i = -lambda_i / 2`` and
``Z_ij = mu_ij / 2`` off the diagonal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import linalg
from .errors import InvalidArgumentError, UnsupportedGraphError
from .graphs import ExclusivityGraph, adjacency_matrix, cycle_graph, cycle_order, weighted_independence_number
from .theta_sdp import ThetaProblem, build_problem, cycle_theta_closed_form, solve

PSD_TOL = 1e-9
COMPLEMENTARITY_TOL = 1e-8
NONDEGENERACY_TOL = 1e-8
OVERLAP_TOL = 1e-8


@dataclass(frozen=True)
class DualCertificate:
    z: np.ndarray
    t: float
    lam: tuple
    mu: dict  # (i, j) with i < j -> multiplier

    @property
    def dual_value(self) -> float:
        return self.t

    @property
    def n(self) -> int:
        return len(self.lam)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "lambda": list(self.lam),
            "mu": {f"{i},{j}": v for (i, j), v in sorted(self.mu.items())},
        }

    @classmethod
    def from_dict(cls, d: dict, g: ExclusivityGraph) -> "DualCertificate":
        for key in ("t", "lambda", "mu"):
            if key not in d:
                raise InvalidArgumentError(f"dual JSON is missing field {key!r}")
        lam = d["lambda"]
        if not isinstance(lam, list) or len(lam) != g.n:
            raise InvalidArgumentError(f"dual JSON field 'lambda' must list {g.n} numbers")
        if not isinstance(d["mu"], dict):
            raise InvalidArgumentError("dual JSON field 'mu' must be an object keyed 'i,j'")
        mu = {}
        for key, val in d["mu"].items():
            try:
                i, j = (int(s) for s in key.split(","))
            except ValueError:
                raise InvalidArgumentError(f"dual JSON 'mu' key {key!r} is not of the form 'i,j'") from None
            mu[(min(i, j), max(i, j))] = float(val)
        return dual_from_multipliers(g, float(d["t"]), [float(x) for x in lam], mu)


def template_matrix(g: ExclusivityGraph, t: float, lam, mu: dict) -> np.ndarray:
    """Assemble Z from multipliers using the symmetric basis matrices."""
    dim = g.n + 1
    w = g.weights
    z = t * linalg.basis_matrix(dim, 0, 0)
    for i in range(1, dim):
        z += (lam[i - 1] - w[i - 1]) * linalg.basis_matrix(dim, i, i)
        z -= lam[i - 1] * linalg.basis_matrix(dim, 0, i)
    for (i, j), m in mu.items():
        if not (1 <= i <= g.n and 1 <= j <= g.n) or i == j:
            raise InvalidArgumentError(f"multiplier index ({i}, {j}) is not a vertex pair")
        z += m * linalg.basis_matrix(dim, i, j)
    return z


def dual_from_multipliers(g: ExclusivityGraph, t: float, lam, mu: dict) -> DualCertificate:
    lam = tuple(float(x) for x in lam)
    if len(lam) != g.n:
        raise InvalidArgumentError(f"expected {g.n} lambda multipliers, got {len(lam)}")
    mu = {(min(i, j), max(i, j)): float(v) for (i, j), v in mu.items()}
    return DualCertificate(template_matrix(g, t, lam, mu), float(t), lam, mu)


def load_dual(path, g: ExclusivityGraph) -> DualCertificate:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InvalidArgumentError(f"dual file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"dual file {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise InvalidArgumentError("dual JSON must be an object")
    return DualCertificate.from_dict(data, g)


def _check_odd(n: int, low: int = 3) -> None:
    if int(n) != n or n < low or n % 2 == 0:
        raise InvalidArgumentError(f"expected odd n >= {low}, got {n}")


def cycle_dual_matrix(n: int) -> np.ndarray:
    """``[[theta, -e^T], [-e, I + (n - theta)/(2 theta) A]]`` for the n-cycle."""
    _check_odd(n)
    theta = cycle_theta_closed_form(n)
    z = np.zeros((n + 1, n + 1))
    z[0, 0] = theta
    z[0, 1:] = z[1:, 0] = -1.0
    z[1:, 1:] = np.eye(n) + (n - theta) / (2 * theta) * adjacency_matrix(cycle_graph(n))
    return z


def build_cycle_dual(n: int) -> DualCertificate:
    """Dual optimal certificate for the odd n-cycle with unit weights.

    Multipliers are chosen to reproduce ``cycle_dual_matrix(n)`` through the
    template: ``t = theta``, ``lambda_i = 2`` and ``mu = (n - theta) / theta``
    on every edge.
    """
    _check_odd(n)
    g = cycle_graph(n)
    theta = cycle_theta_closed_form(n)
    mu = {e: (n - theta) / theta for e in g.edges}
    return dual_from_multipliers(g, theta, [2.0] * n, mu)


def relabeled_cycle_dual(g: ExclusivityGraph) -> DualCertificate:
    """Cycle certificate transported to a graph that is an odd cycle under some labelling."""
    order = cycle_order(g)
    if order is None or g.n % 2 == 0 or g.n < 5 or any(w != 1.0 for w in g.weights):
        raise UnsupportedGraphError("graph is not a unit-weight odd cycle with n >= 5")
    base = build_cycle_dual(g.n)
    perm = {k + 1: v for k, v in enumerate(order)}
    mu = {(min(perm[i], perm[j]), max(perm[i], perm[j])): m for (i, j), m in base.mu.items()}
    lam = [0.0] * g.n
    for k, x in enumerate(base.lam, start=1):
        lam[perm[k] - 1] = x
    return dual_from_multipliers(g, base.t, lam, mu)


@dataclass
class DualCheck:
    passed: bool
    failed_check: str | None
    template_error: float
    off_edge_multipliers: list
    min_eigenvalue: float

    def summary(self) -> dict:
        return {
            "passed": self.passed,
            "failed_check": self.failed_check,
            "template_error": self.template_error,
            "min_eigenvalue": self.min_eigenvalue,
        }


def verify_dual_feasible(cert: DualCertificate, g: ExclusivityGraph, psd_tol: float = PSD_TOL) -> DualCheck:
    """Check template reconstruction (multipliers only on edges) and positive semidefiniteness.

    Failures are reported, not raised; ``failed_check`` names the first
    violated check.
    """
    z = np.asarray(cert.z, dtype=float)
    if z.shape != (g.dim, g.dim):
        raise InvalidArgumentError(f"certificate dim {z.shape} does not match graph dim {g.dim}")
    off_edge = sorted(e for e in cert.mu if e not in g.edges)
    mu_edges = {e: v for e, v in cert.mu.items() if e in g.edges}
    recon = template_matrix(g, cert.t, cert.lam, mu_edges)
    template_error = float(np.max(np.abs(recon - z)))
    min_eig = linalg.min_eigenvalue(z)
    failed = None
    # multipliers on non-edges have no constraint behind them, so they show
    # up as a template mismatch
    if template_error != 0.0 or off_edge:
        failed = "template"
    elif min_eig < -psd_tol:
        failed = "psd"
    elif cert.t < 0:
        failed = "sign"
    return DualCheck(failed is None, failed, template_error, off_edge, min_eig)


def schur_complement(z) -> np.ndarray:
    """Schur complement of ``z`` with respect to its top-left entry."""
    z = np.asarray(z, dtype=float)
    b = z[1:, 0]
    return z[1:, 1:] - np.outer(b, b) / z[0, 0]


def cycle_block_eigenvalues(n: int) -> np.ndarray:
    """Analytic spectrum of the Schur complement of the cycle certificate.

    ``0`` from the all-ones direction, then
    ``1 + ((n - theta)/theta) cos(2 pi k / n)`` for ``k = 1..n-1``.
    """
    _check_odd(n)
    theta = cycle_theta_closed_form(n)
    k = np.arange(1, n)
    return np.concatenate([[0.0], 1.0 + (n - theta) / theta * np.cos(2 * np.pi * k / n)])


def verify_complementarity(x, cert: DualCertificate) -> float:
    """Trace inner product ``<X, Z>``."""
    x = np.asarray(x, dtype=float)
    if x.shape != cert.z.shape:
        raise InvalidArgumentError(f"shape mismatch {x.shape} vs {cert.z.shape}")
    return float(np.sum(x * cert.z))


@dataclass
class NondegeneracyVerdict:
    nullspace_dim: int
    free_parameter_count: int
    constraint_matrix_rank: int
    smallest_nonzero_singular_value: float
    passed: bool

    def summary(self) -> dict:
        return {
            "nullspace_dim": self.nullspace_dim,
            "free_parameter_count": self.free_parameter_count,
            "constraint_matrix_rank": self.constraint_matrix_rank,
            "smallest_nonzero_singular_value": self.smallest_nonzero_singular_value,
            "passed": self.passed,
        }


def parameterized_m(g: ExclusivityGraph) -> list[np.ndarray]:
    """Basis of symmetric M with ``M_00 = 0``, ``M_0i = M_ii`` and ``M_ij = 0`` on edges.

    Parameters 1..n drive the coupled (handle, diagonal) entries; the rest
    are the non-edge pairs in lexicographic order.
    """
    dim = g.dim
    basis = []
    for i in range(1, dim):
        m = np.zeros((dim, dim))
        m[i, i] = m[0, i] = m[i, 0] = 1.0
        basis.append(m)
    for i, j in g.non_edges():
        m = np.zeros((dim, dim))
        m[i, j] = m[j, i] = 1.0
        basis.append(m)
    return basis


def assemble_m(g: ExclusivityGraph, params) -> np.ndarray:
    basis = parameterized_m(g)
    if len(params) != len(basis):
        raise InvalidArgumentError(f"expected {len(basis)} parameters, got {len(params)}")
    return sum(p * b for p, b in zip(params, basis))


def nondegeneracy_system(cert: DualCertificate, g: ExclusivityGraph) -> np.ndarray:
    """Rows ``vec(B_k Z)``, one per free parameter ``k``."""
    z = np.asarray(cert.z, dtype=float)
    if z.shape != (g.dim, g.dim):
        raise InvalidArgumentError(f"certificate dim {z.shape} does not match graph dim {g.dim}")
    return np.array([(b @ z).ravel() for b in parameterized_m(g)])


def check_nondegeneracy(
    cert: DualCertificate, g: ExclusivityGraph, tol: float = NONDEGENERACY_TOL
) -> NondegeneracyVerdict:
    rows = nondegeneracy_system(cert, g)
    count = rows.shape[0]
    rank = linalg.numeric_rank(rows, tol)
    s = linalg.singular_values(np.linalg.qr(rows.T, mode="r")) if count else np.zeros(0)
    nonzero = s[s > tol * s[0]] if s.size and s[0] > 0 else np.zeros(0)
    smallest = float(nonzero[-1]) if nonzero.size else 0.0
    nullity = count - rank
    return NondegeneracyVerdict(nullity, count, rank, smallest, nullity == 0)


def analytic_cycle_nondegeneracy(n: int) -> dict:
    """Hand argument that ``M Z_n = 0`` forces ``M = 0`` on the odd n-cycle.

    With ``A`` the vertex block of M, ``c`` the edge entry of ``Z_n`` and
    ``T = (M Z_n)[1:, 1:]``::

        T_ij = -A_ii + A_ij + c (A_{i,j-1} + A_{i,j+1})      (indices mod n)

    The columns ``j = i +- 1`` give ``A_{i,i+-2} = ((1 - c)/c) A_ii``, and
    ``(1 - c)/c`` equals ``alpha = 2 cos(pi/n) - 1``. Symmetry of A turns
    this into ``alpha A_ii = alpha A_{i+2,i+2}``; for odd n the step-2 walk
    visits every vertex, so a nonzero alpha makes the diagonal constant.
    ``(M Z_n)_00 = -trace(A)`` then forces it to zero, and the remaining
    columns of T propagate zeros along each row.
    """
    _check_odd(n)
    theta = cycle_theta_closed_form(n)
    c = (n - theta) / (2 * theta)
    alpha = 2 * math.cos(math.pi / n) - 1
    ratio = (1 - c) / c
    step_two_covers = math.gcd(2, n) == 1
    forces_zero = abs(alpha) > 1e-12 and abs(ratio - alpha) <= 1e-12 and step_two_covers and c != 0
    return {
        "theta": theta,
        "c": c,
        "alpha": alpha,
        "ratio": ratio,
        "step_two_covers": step_two_covers,
        "forces_zero": forces_zero,
    }


class Verdict(str, Enum):
    ROBUST_SELF_TEST = "ROBUST_SELF_TEST"
    FAILED = "FAILED"
    UNSUPPORTED = "UNSUPPORTED"


STAGES = ("solve", "dual_feasibility", "complementarity", "nondegeneracy", "realization_overlap")


@dataclass
class CertificationReport:
    graph: dict
    theta: float | None = None
    nc_bound: float | None = None
    dual: dict | None = None
    nondegeneracy: dict | None = None
    realization: dict | None = None
    solver: dict | None = None
    probe: dict | None = None
    stages: dict = field(default_factory=dict)
    verdict: Verdict = Verdict.FAILED
    failed_stage: str | None = None
    message: str | None = None

    @property
    def quantum_advantage(self) -> float | None:
        if self.theta is None or self.nc_bound is None:
            return None
        return self.theta - self.nc_bound

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.ROBUST_SELF_TEST

    def to_dict(self) -> dict:
        verdict = self.verdict.value
        if self.verdict is Verdict.FAILED:
            verdict = f"FAILED({self.failed_stage})"
        return {
            "schema": 1,
            "graph": self.graph,
            "theta": self.theta,
            "nc_bound": self.nc_bound,
            "quantum_advantage": self.quantum_advantage,
            "solver": self.solver,
            "dual": self.dual,
            "nondegeneracy": self.nondegeneracy,
            "realization": self.realization,
            "probe": self.probe,
            "stages": self.stages,
            "verdict": verdict,
            "message": self.message,
        }


def nc_bound_of(g: ExclusivityGraph, max_n: int | None = None) -> float:
    from .graphs import DEFAULT_MAX_ENUMERATION

    limit = DEFAULT_MAX_ENUMERATION if max_n is None else max_n
    if g.n > limit and cycle_order(g) is not None and g.n % 2 == 1 and all(w == 1.0 for w in g.weights):
        return (g.n - 1) / 2
    return weighted_independence_number(g, limit)


def default_dual(g: ExclusivityGraph) -> DualCertificate:
    try:
        return relabeled_cycle_dual(g)
    except UnsupportedGraphError:
        raise UnsupportedGraphError(
            "no dual certificate is known for this graph; supply one as JSON"
        ) from None


def certify_self_test(
    g: ExclusivityGraph,
    dual: DualCertificate | None = None,
    *,
    tol: float = 1e-9,
    max_iter: int = 200_000,
    complementarity_tol: float = COMPLEMENTARITY_TOL,
    nondegeneracy_tol: float = NONDEGENERACY_TOL,
    max_enumeration: int | None = None,
) -> CertificationReport:
    """Run the full robust self-testing pipeline on one graph.

    Stages, in order: solve the theta SDP; check the dual certificate is
    feasible; check it is optimal against the solver optimum (duality gap and
    ``<X, Z>``); check dual nondegeneracy; check every projector vector of
    the recovered realization overlaps the handle. The verdict is
    ``ROBUST_SELF_TEST`` only if all stages pass.

    Raises :class:`UnsupportedGraphError` when no dual is given and the graph
    is not a unit-weight odd cycle.
    """
    from .realizations import behavior_of, realization_from_gram

    if dual is None:
        dual = default_dual(g)
    report = CertificationReport(graph=g.to_dict())
    report.nc_bound = nc_bound_of(g, max_enumeration)

    def fail(stage, message):
        report.stages[stage] = False
        report.failed_stage = stage
        report.verdict = Verdict.FAILED
        report.message = message
        return report

    p: ThetaProblem = build_problem(g)
    sol = solve(p, tol=tol, max_iter=max_iter)
    report.theta = sol.objective
    report.solver = {
        "objective": sol.objective,
        "primal_residual": sol.primal_residual,
        "cone_residual": sol.cone_residual,
        "iterations": sol.iterations,
        "converged": sol.converged,
    }
    if not sol.converged:
        return fail("solve", f"solver did not converge in {sol.iterations} iterations")
    report.stages["solve"] = True

    check = verify_dual_feasible(dual, g)
    report.dual = {"t": dual.t, "min_eigenvalue": check.min_eigenvalue, "feasibility": check.summary()}
    if not check.passed:
        return fail("dual_feasibility", f"dual certificate fails the {check.failed_check} check")
    report.stages["dual_feasibility"] = True

    comp = verify_complementarity(sol.x, dual)
    gap = dual.t - sol.objective
    report.dual.update({"complementarity": comp, "duality_gap": gap})
    gap_tol = 1e-6 * max(1.0, abs(sol.objective))
    if abs(comp) > complementarity_tol or abs(gap) > gap_tol:
        return fail("complementarity", f"<X, Z> = {comp:.3e}, duality gap = {gap:.3e}")
    report.stages["complementarity"] = True

    verdict = check_nondegeneracy(dual, g, nondegeneracy_tol)
    report.nondegeneracy = verdict.summary()
    if not verdict.passed:
        return fail("nondegeneracy", f"homogeneous system has {verdict.nullspace_dim} free directions")
    report.stages["nondegeneracy"] = True

    diag = sol.x.diagonal()[1:]
    if np.min(diag) <= OVERLAP_TOL:
        return fail("realization_overlap", "some projector vector is orthogonal to the handle")
    r = realization_from_gram(sol.x, g)
    report.realization = {
        "dimension": r.dimension,
        "behavior": list(behavior_of(r)),
        "min_overlap": float(np.min(np.abs(r.vectors @ r.handle))),
    }
    report.stages["realization_overlap"] = True
    report.verdict = Verdict.ROBUST_SELF_TEST
    return report
