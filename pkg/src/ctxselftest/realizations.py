"""Pure-state quantum realizations and their Gram-matrix correspondence.

A realization is a unit handle vector ``u_0`` and unit vectors
``u_1..u_n``; the behaviour is ``p_i = <u_0, u_i>^2``. All vectors are real.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg
from .errors import DegenerateOverlapError, InfeasibleRealizationError, InvalidArgumentError
from .graphs import ExclusivityGraph

UNIT_TOL = 1e-10
ORTHO_TOL = 1e-9
VALUE_ORTHO_TOL = 1e-6
BEHAVIOR_TOL = 1e-9
FEASIBILITY_TOL = 1e-6
MIN_OVERLAP = 1e-8


@dataclass(frozen=True)
class QuantumRealization:
    handle: np.ndarray
    vectors: np.ndarray  # shape (n, dimension)

    def __post_init__(self):
        h = np.asarray(self.handle, dtype=float).ravel()
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        if v.shape[1] != h.size:
            raise InvalidArgumentError(f"vectors have length {v.shape[1]}, handle has {h.size}")
        object.__setattr__(self, "handle", h)
        object.__setattr__(self, "vectors", v)

    @property
    def dimension(self) -> int:
        return self.handle.size

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def all_vectors(self) -> np.ndarray:
        """Rows ``u_0, u_1, ..., u_n``."""
        return np.vstack([self.handle, self.vectors])

    def padded(self, dim: int) -> "QuantumRealization":
        if dim < self.dimension:
            raise InvalidArgumentError(f"cannot pad dimension {self.dimension} down to {dim}")
        extra = dim - self.dimension
        return QuantumRealization(
            np.concatenate([self.handle, np.zeros(extra)]),
            np.hstack([self.vectors, np.zeros((self.n, extra))]),
        )

    def check(self, g: ExclusivityGraph | None = None, ortho_tol: float = ORTHO_TOL) -> list[str]:
        """Invariant violations (empty list when the realization is valid)."""
        problems = []
        norms = np.linalg.norm(self.all_vectors(), axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > UNIT_TOL)
        problems += [f"vector {i} has norm {norms[i]:.12g}" for i in bad]
        if g is not None:
            if g.n != self.n:
                problems.append(f"graph has {g.n} vertices, realization has {self.n}")
            else:
                for i, j in g.sorted_edges():
                    ip = float(self.vectors[i - 1] @ self.vectors[j - 1])
                    if abs(ip) > ortho_tol:
                        problems.append(f"edge {{{i},{j}}} has overlap {ip:.3e}")
        return problems

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "handle": self.handle.tolist(),
            "vectors": self.vectors.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QuantumRealization":
        for key in ("handle", "vectors"):
            if key not in d:
                raise InvalidArgumentError(f"realization JSON is missing field {key!r}")
        r = cls(np.array(d["handle"], dtype=float), np.array(d["vectors"], dtype=float))
        if "dimension" in d and int(d["dimension"]) != r.dimension:
            raise InvalidArgumentError(
                f"realization JSON field 'dimension' is {d['dimension']}, vectors have length {r.dimension}"
            )
        return r


def load_realization(path) -> QuantumRealization:
    return QuantumRealization.from_dict(json.loads(Path(path).read_text()))


def kcbs_angle(n: int) -> float:
    """theta with ``cos^2 theta = cos(pi/n) / (1 + cos(pi/n))``."""
    c = math.cos(math.pi / n)
    return math.acos(math.sqrt(c / (1.0 + c)))


def canonical_kcbs(n: int) -> QuantumRealization:
    """Optimal qutrit realization for the odd n-cycle.

    ``u_0 = (1, 0, 0)`` and ``u_j = (cos t, sin t sin phi_j, sin t cos phi_j)``
    with ``phi_j = j pi (n - 1) / n``; consecutive vectors are orthogonal.
    """
    if int(n) != n or n < 5 or n % 2 == 0:
        raise InvalidArgumentError(f"canonical KCBS realization needs odd n >= 5, got {n}")
    theta = kcbs_angle(n)
    j = np.arange(1, n + 1)
    phi = j * math.pi * (n - 1) / n
    vecs = np.column_stack(
        [np.full(n, math.cos(theta)), math.sin(theta) * np.sin(phi), math.sin(theta) * np.cos(phi)]
    )
    return QuantumRealization(np.array([1.0, 0.0, 0.0]), vecs)


def behavior_of(r: QuantumRealization) -> np.ndarray:
    return (r.vectors @ r.handle) ** 2


def is_behavior(p, g: ExclusivityGraph, tol: float = BEHAVIOR_TOL) -> bool:
    p = np.asarray(p, dtype=float)
    if np.any(p < -tol) or np.any(p > 1 + tol):
        return False
    return all(p[i - 1] + p[j - 1] <= 1 + tol for i, j in g.edges)


def inequality_value(r: QuantumRealization, g: ExclusivityGraph) -> float:
    """``sum_i w_i p_i``; the realization must respect the graph's exclusivities."""
    problems = r.check(g, ortho_tol=VALUE_ORTHO_TOL)
    edge_problems = [s for s in problems if s.startswith(("edge", "graph"))]
    if edge_problems:
        raise InfeasibleRealizationError("; ".join(edge_problems))
    return float(np.asarray(g.weights) @ behavior_of(r))


def scaled_vectors(r: QuantumRealization) -> np.ndarray:
    """Rows ``u_0, <u_0,u_1> u_1, ..., <u_0,u_n> u_n``."""
    overlaps = r.vectors @ r.handle
    return np.vstack([r.handle, overlaps[:, None] * r.vectors])


def gram_of_realization(r: QuantumRealization) -> np.ndarray:
    w = scaled_vectors(r)
    return linalg.sym(w @ w.T)


def realization_from_gram(
    x, g: ExclusivityGraph, rank_tol: float = linalg.DEFAULT_RANK_TOL, feas_tol: float = FEASIBILITY_TOL
) -> QuantumRealization:
    """Realization whose scaled Gram matrix is ``x``.

    Decomposes ``x``, normalizes every row and flips signs so that
    ``<u_0, u_i> >= 0``. ``x`` must be feasible for the theta SDP of ``g``
    and have a strictly positive diagonal.
    """
    from .theta_sdp import build_problem

    x = linalg.sym(x)
    p = build_problem(g)
    if x.shape != (p.dim, p.dim):
        raise InvalidArgumentError(f"matrix shape {x.shape} does not match graph dim {p.dim}")
    res = p.affine_residual(x)
    if res > feas_tol:
        raise InfeasibleRealizationError(f"matrix violates the SDP constraints (residual {res:.3e})")
    diag = x.diagonal()[1:]
    zero = np.flatnonzero(diag <= MIN_OVERLAP)
    if zero.size:
        raise DegenerateOverlapError(
            f"vertices {[int(i) + 1 for i in zero]} have zero overlap with the handle"
        )
    rows = linalg.gram_decompose(x, rank_tol)
    rows = rows / np.linalg.norm(rows, axis=1)[:, None]
    handle, vecs = rows[0], rows[1:]
    signs = np.where(vecs @ handle < 0, -1.0, 1.0)
    return QuantumRealization(handle, vecs * signs[:, None])


def _square(rows: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros((dim, dim))
    out[: rows.shape[0], : rows.shape[1]] = rows
    return out


def lemma_alignment(v_a: np.ndarray, v_b: np.ndarray) -> np.ndarray:
    """Orthogonal ``U`` with ``U v_a[i] ~ v_b[i]`` built from polar factors.

    Both inputs hold vectors as rows and are zero-padded to a common square
    size. With ``V = |V| U_V`` the map is ``U = U_{V_b}^T U_{V_a}``; it is
    exact whenever the two Gram matrices agree.
    """
    dim = max(v_a.shape[0], v_a.shape[1], v_b.shape[0], v_b.shape[1])
    ua = linalg.polar_unitary(_square(v_a, dim))
    ub = linalg.polar_unitary(_square(v_b, dim))
    return ub.T @ ua


def projector_deviations(a: QuantumRealization, b: QuantumRealization, u: np.ndarray) -> np.ndarray:
    """``||U u_i u_i^T U^T - u'_i u'_i^T||_F`` for ``i = 0..n``."""
    dim = u.shape[0]
    xa = a.padded(dim).all_vectors() @ u.T
    xb = b.padded(dim).all_vectors()
    # explicit outer products; the closed form sqrt(|x|^4 + |y|^4 - 2(x.y)^2)
    # cancels badly near zero
    diff = xa[:, :, None] * xa[:, None, :] - xb[:, :, None] * xb[:, None, :]
    return np.sqrt(np.sum(diff * diff, axis=(1, 2)))


def vector_deviations(a: QuantumRealization, b: QuantumRealization, u: np.ndarray) -> np.ndarray:
    dim = u.shape[0]
    xa = a.padded(dim).all_vectors() @ u.T
    return np.linalg.norm(xa - b.padded(dim).all_vectors(), axis=1)


def align(a: QuantumRealization, b: QuantumRealization) -> tuple[np.ndarray, float]:
    """Isometry taking realization ``a`` onto ``b`` and the worst projector deviation.

    The lower-dimensional realization is zero-padded. Returns
    ``(U, max_i ||U u_i u_i^T U^T - u'_i u'_i^T||_F)`` over ``i = 0..n``.
    """
    if a.n != b.n:
        raise InvalidArgumentError(f"realizations have {a.n} and {b.n} projectors")
    u = lemma_alignment(scaled_vectors(a), scaled_vectors(b))
    return u, float(np.max(projector_deviations(a, b, u)))
