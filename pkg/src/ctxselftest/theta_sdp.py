"""The weighted Lovasz-theta SDP and a first-order ADMM solver for it.

The primal problem, in ``(1+n) x (1+n)`` symmetric matrices with the handle
at index 0, is::

    maximize    sum_i w_i X_ii
    subject to  X_00 = 1,  X_ii = X_0i (i = 1..n),  X_ij = 0 (i ~ j),  X >= 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import InvalidArgumentError
from .graphs import ExclusivityGraph, cycle_order


@dataclass(frozen=True)
class ThetaProblem:
    graph: ExclusivityGraph

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def dim(self) -> int:
        return self.graph.n + 1

    @property
    def weights(self) -> np.ndarray:
        return np.asarray(self.graph.weights, dtype=float)

    def constraints(self) -> list[tuple]:
        """Constraint list: ('handle',), ('diag', i), ('edge', i, j)."""
        cons = [("handle",)]
        cons += [("diag", i) for i in range(1, self.n + 1)]
        cons += [("edge", i, j) for i, j in self.graph.sorted_edges()]
        return cons

    @property
    def num_constraints(self) -> int:
        return 1 + self.n + len(self.graph.edges)

    def cost_matrix(self) -> np.ndarray:
        c = np.zeros((self.dim, self.dim))
        c[np.arange(1, self.dim), np.arange(1, self.dim)] = self.weights
        return c

    def objective(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(self.weights @ x.diagonal()[1:])

    def affine_residual(self, x) -> float:
        return linalg.frob(np.asarray(x, dtype=float) - affine_project(x, self))

    def is_cycle(self) -> bool:
        return cycle_order(self.graph) is not None


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 200_000
    penalty: float = 1.0


@dataclass
class SdpSolution:
    x: np.ndarray
    objective: float
    primal_residual: float
    cone_residual: float
    iterations: int
    converged: bool
    dual_residual: float = math.nan
    history: list = field(default_factory=list, repr=False)


def build_problem(g: ExclusivityGraph) -> ThetaProblem:
    return ThetaProblem(g)


def affine_project(x, p: ThetaProblem) -> np.ndarray:
    """Frobenius-nearest symmetric matrix satisfying every affine constraint.

    The constraint classes touch disjoint entries, so the projection splits:
    ``X_00 <- 1``; each edge entry is zeroed; and each triple of equal-weight
    entries ``(X_ii, X_0i, X_i0)`` is replaced by its mean
    ``(X_ii + 2 X_0i) / 3``.
    """
    x = linalg.sym(x)
    if x.shape != (p.dim, p.dim):
        raise InvalidArgumentError(f"matrix shape {x.shape} does not match problem dim {p.dim}")
    x[0, 0] = 1.0
    idx = np.arange(1, p.dim)
    a = (x[idx, idx] + 2.0 * x[0, idx]) / 3.0
    x[idx, idx] = a
    x[0, idx] = a
    x[idx, 0] = a
    for i, j in p.graph.edges:
        x[i, j] = x[j, i] = 0.0
    return x


def strict_feasible_point(n: int, m: float) -> np.ndarray:
    """Positive definite point with ``F_00 = 1`` and ``F_0i = F_ii = 1/m``.

    Feasible for the theta SDP of any graph on n vertices (its vertex-vertex
    block is diagonal); positive definite whenever ``m > n``.
    """
    if not m > n:
        raise InvalidArgumentError(f"need m > n, got m={m}, n={n}")
    f = np.eye(n + 1) / m
    f[0, 0] = 1.0
    f[0, 1:] = f[1:, 0] = 1.0 / m
    return f


def random_feasible_point(g: ExclusivityGraph, seed=None, mix: float = 0.5) -> np.ndarray:
    """A random feasible point of the theta SDP.

    Draws a random pure-state realization (random unit vectors made
    orthogonal to their already-placed neighbours), takes the Gram matrix of
    the scaled vectors and mixes it with the strictly feasible point so the
    result lies in the interior.
    """
    rng = np.random.default_rng(seed)
    d = g.n + 1
    u0 = rng.standard_normal(d)
    u0 /= np.linalg.norm(u0)
    vecs = np.zeros((g.n, d))
    for i in range(1, g.n + 1):
        placed = [vecs[j - 1] for j in g.neighbors(i) if j < i]
        while True:
            v = rng.standard_normal(d)
            for _ in range(2):
                for q in _orthonormal(placed):
                    v -= (q @ v) * q
            nrm = np.linalg.norm(v)
            if nrm > 1e-6:
                break
        vecs[i - 1] = v / nrm
    scaled = np.vstack([u0, (vecs @ u0)[:, None] * vecs])
    gram = scaled @ scaled.T
    lam = mix * rng.uniform(0.2, 1.0)
    return linalg.sym((1 - lam) * gram + lam * strict_feasible_point(g.n, g.n + 1))


def _orthonormal(vs):
    out = []
    for v in vs:
        y = np.array(v, dtype=float)
        for q in out:
            y -= (q @ y) * q
        nrm = np.linalg.norm(y)
        if nrm > 1e-12:
            out.append(y / nrm)
    return out


def initial_point(p: ThetaProblem) -> np.ndarray:
    if p.is_cycle():
        return strict_feasible_point(p.n, p.n + 1)
    return np.eye(p.dim)


def solve(
    p: ThetaProblem,
    tol: float = 1e-9,
    max_iter: int = 200_000,
    *,
    start=None,
    seed=None,
    penalty: float = 1.0,
    record_history: bool = False,
) -> SdpSolution:
    """Solve the theta SDP by two-block ADMM.

    Splitting ``X`` (affine set) from ``Y`` (PSD cone) with scaled dual ``U``::

        X <- affine_project(Y - U + C / rho)
        Y <- psd_project(X + U)
        U <- U + X - Y

    The linear objective enters only through the ``C / rho`` shift in the
    affine step. Stops once ``||X - Y||_F`` and ``||Y - Y_prev||_F`` are both
    below ``tol``. The returned matrix is the PSD iterate ``Y``.

    ``start`` overrides the initial point; ``seed`` draws a random feasible one.
    """
    if start is None:
        start = random_feasible_point(p.graph, seed) if seed is not None else initial_point(p)
    y = linalg.sym(start)
    if y.shape != (p.dim, p.dim):
        raise InvalidArgumentError(f"start shape {y.shape} does not match problem dim {p.dim}")
    c_shift = p.cost_matrix() / penalty
    u = np.zeros_like(y)
    history = []
    r = s = math.inf
    it = 0
    for it in range(1, max_iter + 1):
        x = affine_project(y - u + c_shift, p)
        y_new = linalg.psd_project(x + u)
        u = u + x - y_new
        r = linalg.frob(x - y_new)
        s = penalty * linalg.frob(y_new - y)
        y = y_new
        if record_history:
            history.append((r, s, p.objective(y)))
        if r <= tol and s <= tol:
            break
    primal_res = p.affine_residual(y)
    cone_res = linalg.frob(y - linalg.psd_project(y))
    converged = r <= tol and s <= tol and primal_res <= tol and cone_res <= tol
    return SdpSolution(
        x=y,
        objective=p.objective(y),
        primal_residual=primal_res,
        cone_residual=cone_res,
        iterations=it,
        converged=converged,
        dual_residual=s,
        history=history,
    )


def cycle_theta_closed_form(n: int) -> float:
    """``n cos(pi/n) / (1 + cos(pi/n))`` for odd n >= 3."""
    if int(n) != n or n < 3 or n % 2 == 0:
        raise InvalidArgumentError(f"closed form needs odd n >= 3, got {n}")
    c = math.cos(math.pi / n)
    return n * c / (1.0 + c)


def cycle_nc_bound(n: int) -> float:
    if int(n) != n or n < 3 or n % 2 == 0:
        raise InvalidArgumentError(f"closed form needs odd n >= 3, got {n}")
    return (n - 1) / 2
