"""Dense real linear algebra used throughout the package.

Everything here works on small dense ``float64`` arrays. The single trusted
spectral routine is :func:`eigh`, a cyclic Jacobi eigensolver; the SVD, the
polar factor and the numeric rank are all built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NotPSDError

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
DEFAULT_RANK_TOL = 1e-7
PSD_SLACK = 1e-9
_DENSE_ROTATION_MAX = 48


def sym(a) -> np.ndarray:
    """Return ``(a + a.T) / 2`` as a fresh float array."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return 0.5 * (a + a.T)


def basis_matrix(dim: int, i: int, j: int) -> np.ndarray:
    """The symmetric basis matrix ``(e_i e_j^T + e_j e_i^T) / 2``."""
    e = np.zeros((dim, dim))
    e[i, j] += 0.5
    e[j, i] += 0.5
    return e


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # orthonormal columns
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # Tournament schedule: every pair (p, q) appears exactly once per sweep and
    # the pairs inside a round are disjoint, so their rotations commute.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            p, q = players[k], players[m - 1 - k]
            if p < n and q < n:
                ps.append(min(p, q))
                qs.append(max(p, q))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _rotation(app, aqq, apq):
    # tan of the angle that zeroes a_pq; hypot avoids overflow for tiny a_pq
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        theta = np.where(apq == 0.0, np.inf, 0.5 * (aqq - app) / apq)
        t = np.copysign(1.0, theta) / (np.abs(theta) + np.hypot(theta, 1.0))
    c = 1.0 / np.sqrt(t * t + 1.0)
    return c, t * c


def eigh(a, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps visit every off-diagonal pair once, in a round-robin order that
    lets disjoint rotations be applied together. Iteration stops when the
    off-diagonal Frobenius norm drops to ``tol * max(1, ||a||_F)``.
    Eigenvalues are returned in descending order.
    """
    a = sym(a)
    n = a.shape[0]
    v = np.eye(n)
    if n == 1:
        return EigenDecomposition(a.diagonal().copy(), v, 0)
    scale = max(1.0, float(np.linalg.norm(a)))
    rounds = _round_robin(n)
    offdiag = ~np.eye(n, dtype=bool)
    dense = n <= _DENSE_ROTATION_MAX
    for sweep in range(max_sweeps + 1):
        if np.linalg.norm(a[offdiag]) <= tol * scale:
            break
        if sweep == max_sweeps:
            raise ConvergenceError(f"Jacobi eigensolver exceeded {max_sweeps} sweeps")
        for p, q in rounds:
            c, s = _rotation(a[p, p], a[q, q], a[p, q])
            if dense:
                j = np.eye(n)
                j[p, p] = c
                j[q, q] = c
                j[p, q] = s
                j[q, p] = -s
                a = j.T @ a @ j
                v = v @ j
            else:
                ap, aq = a[:, p], a[:, q]
                a[:, p], a[:, q] = c * ap - s * aq, s * ap + c * aq
                ap, aq = a[p, :], a[q, :]
                a[p, :], a[q, :] = c[:, None] * ap - s[:, None] * aq, s[:, None] * ap + c[:, None] * aq
                vp, vq = v[:, p], v[:, q]
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
            a[p, q] = 0.0
            a[q, p] = 0.0
    w = a.diagonal().copy()
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order], v[:, order], sweep)


def eigvalsh(a) -> np.ndarray:
    return eigh(a).eigenvalues


def min_eigenvalue(a) -> float:
    return float(eigh(a).eigenvalues[-1])


def psd_project(a) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix (negative eigenvalues clipped)."""
    d = eigh(a)
    q = d.eigenvectors
    return sym((q * np.maximum(d.eigenvalues, 0.0)) @ q.T)


def _checked_psd(a, slack: float) -> EigenDecomposition:
    d = eigh(a)
    if d.eigenvalues[-1] < -slack:
        raise NotPSDError(f"matrix has eigenvalue {d.eigenvalues[-1]:.3e} < -{slack:g}")
    return d


def sqrt_psd(a, slack: float = PSD_SLACK) -> np.ndarray:
    """Positive semidefinite square root; small negative eigenvalues are clipped."""
    d = _checked_psd(a, slack)
    q = d.eigenvectors
    return sym((q * np.sqrt(np.maximum(d.eigenvalues, 0.0))) @ q.T)


def gram_decompose(a, rank_tol: float = DEFAULT_RANK_TOL, slack: float = PSD_SLACK) -> np.ndarray:
    """Vectors whose Gram matrix is ``a``, one per row.

    Rows of ``Q sqrt(L)`` restricted to eigenvalues above
    ``rank_tol * max(1, lambda_max)``; the row length is the numeric rank.
    ``rank_tol=0`` keeps every strictly positive eigenvalue.
    """
    d = _checked_psd(a, max(slack, rank_tol))
    cutoff = rank_tol * max(1.0, float(d.eigenvalues[0]))
    keep = d.eigenvalues > cutoff
    return d.eigenvectors[:, keep] * np.sqrt(d.eigenvalues[keep])


def orthonormal_completion(q: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal columns ``q`` (dim x k) to a full orthonormal basis."""
    cols = [q[:, k] for k in range(q.shape[1])]
    for e in np.eye(dim):
        if len(cols) == dim:
            break
        x = e.copy()
        for _ in range(2):
            for c in cols:
                x -= (c @ x) * c
        nrm = np.linalg.norm(x)
        if nrm > 1e-8:
            cols.append(x / nrm)
    return np.column_stack(cols) if cols else np.zeros((dim, 0))


def _orthonormalize(x: np.ndarray) -> np.ndarray:
    cols = []
    for k in range(x.shape[1]):
        y = x[:, k].copy()
        for _ in range(2):
            for c in cols:
                y -= (c @ y) * c
        cols.append(y / np.linalg.norm(y))
    return np.column_stack(cols) if cols else np.zeros((x.shape[0], 0))


def singular_values(a) -> np.ndarray:
    """Singular values (descending) from the eigenvalues of ``[[0, A], [A^T, 0]]``."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    m, k = a.shape
    r = min(m, k)
    if r == 0:
        return np.zeros(0)
    block = np.zeros((m + k, m + k))
    block[:m, m:] = a
    block[m:, :m] = a.T
    w = eigh(block).eigenvalues
    return np.maximum(w[:r], 0.0)


def svd(a, tol: float = 1e-10):
    """Full SVD ``a = U diag(s) V^T`` of a square or rectangular matrix.

    Singular triplets come from the positive eigenpairs of the symmetric
    block embedding; directions for singular values below
    ``tol * max(1, s_max)`` are filled in by orthonormal completion.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    m, k = a.shape
    r = min(m, k)
    block = np.zeros((m + k, m + k))
    block[:m, m:] = a
    block[m:, :m] = a.T
    d = eigh(block)
    w = d.eigenvalues[:r]
    s = np.maximum(w, 0.0)
    cutoff = tol * max(1.0, float(s[0]) if r else 1.0)
    good = s > cutoff
    x = d.eigenvectors[:m, :r][:, good]
    u = _orthonormalize(x) if x.size else np.zeros((m, 0))
    # right vectors recomputed from A^T u / s keeps the pair consistent
    v = a.T @ u / s[good] if u.shape[1] else np.zeros((k, 0))
    v = _orthonormalize(v) if v.shape[1] else v
    u_full = orthonormal_completion(u, m)
    v_full = orthonormal_completion(v, k)
    s_out = np.where(good, s, 0.0)
    return u_full, s_out, v_full


def polar_unitary(v) -> np.ndarray:
    """Orthogonal factor ``U`` in the left polar decomposition ``V = |V| U``.

    With ``V = P S Q^T`` this is ``P Q^T``. Rank-deficient input gets an
    arbitrary but valid completion.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise ValueError(f"polar_unitary needs a square matrix, got {v.shape}")
    p, _, q = svd(v)
    return p @ q.T


def numeric_rank(rows, tol: float = DEFAULT_RANK_TOL) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    a = np.atleast_2d(np.asarray(rows, dtype=float))
    if a.size == 0:
        return 0
    if a.shape[1] > a.shape[0]:
        a = a.T
    if a.shape[0] > a.shape[1]:
        # orthogonal reduction to a square factor keeps the singular values
        a = np.linalg.qr(a, mode="r")
    s = singular_values(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def frob(a) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=float)))
