"""Dense symmetric linear algebra shared by the SDP solver and the VFA.

Symmetric matrices are plain square ``ndarray`` objects; every entry point
symmetrises its input as ``(A + A.T) / 2`` so only the values matter, not
which triangle was filled in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

DEFAULT_RANK_TOL = 1e-8


class EigenvalueError(np.linalg.LinAlgError):
    pass


def sym(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return (a + a.T) / 2


@dataclass(frozen=True)
class EigenDecomposition:
    """``A = vectors @ diag(values) @ vectors.T`` with values in descending order."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def eigh(a) -> EigenDecomposition:
    a = sym(a)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if a.shape[0] == 0:
        return EigenDecomposition(np.zeros(0), np.zeros((0, 0)))
    try:
        vals, vecs = scipy.linalg.eigh(a, driver="evr")
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenvalueError(str(exc)) from exc
    return EigenDecomposition(vals[::-1].copy(), vecs[:, ::-1].copy())


def _cutoff(vals: np.ndarray, rank_tol: float) -> float:
    top = float(np.max(np.abs(vals))) if vals.size else 0.0
    return rank_tol * top


def pseudo_inverse(a, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Moore-Penrose inverse of a symmetric (near-)PSD matrix.

    Eigenvalues at or below ``rank_tol * max|eigenvalue|`` count as zero;
    slightly negative ones are clipped the same way.
    """
    dec = eigh(a)
    if dec.values.size == 0:
        return np.zeros((0, 0))
    keep = dec.values > _cutoff(dec.values, rank_tol)
    u = dec.vectors[:, keep]
    return (u / dec.values[keep]) @ u.T


def quad_pinv(q, a, rank_tol: float = DEFAULT_RANK_TOL) -> float:
    """``q.T @ pinv(a) @ q`` without forming the inverse."""
    q = np.asarray(q, dtype=float)
    dec = eigh(a)
    if dec.values.size == 0:
        return 0.0
    keep = dec.values > _cutoff(dec.values, rank_tol)
    c = dec.vectors[:, keep].T @ q
    return float(np.sum(c * c / dec.values[keep]))


def in_range(q, Q, tol: float = 1e-8, rank_tol: float = DEFAULT_RANK_TOL) -> bool:
    """True iff ``||(I - Q Q^+) q|| <= tol * (1 + ||q||)``."""
    q = np.asarray(q, dtype=float)
    dec = eigh(Q)
    keep = dec.values > _cutoff(dec.values, rank_tol)
    u = dec.vectors[:, keep]
    resid = q - u @ (u.T @ q)
    return bool(np.linalg.norm(resid) <= tol * (1 + np.linalg.norm(q)))


def min_eigenvalue(a) -> float:
    a = sym(a)
    if a.shape[0] == 0:
        return 0.0
    if a.shape[0] == 1:
        return float(a[0, 0])
    return float(scipy.linalg.eigh(a, eigvals_only=True, subset_by_index=[0, 0])[0])


@dataclass(frozen=True)
class QuadraticSolution:
    y: np.ndarray
    value: float  # y'(Q + ridge I)y - 2 q'y
    iterations: int
    residual: float
    converged: bool


def solve_regularized_quadratic(
    Q,
    q,
    ridge: float = 1e-4,
    warm_start=None,
    tol: float = 1e-6,
    max_iter: int | None = None,
) -> QuadraticSolution:
    """Minimise ``y'(Q + ridge I)y - 2 q'y`` by conjugate gradients.

    Stops once ``||(Q + ridge I) y - q|| <= tol * (1 + ||q||)``.  On hitting
    ``max_iter`` the best iterate is returned with ``converged=False``.
    """
    A = np.asarray(Q, dtype=float)
    b = np.asarray(q, dtype=float)
    dim = b.shape[0]
    if dim == 0:
        return QuadraticSolution(np.zeros(0), 0.0, 0, 0.0, True)
    if max_iter is None:
        max_iter = 10 * dim + 50
    thresh = tol * (1.0 + float(np.sqrt(b @ b)))
    y = np.zeros(dim) if warm_start is None else np.array(warm_start, dtype=float)
    r = b - (A @ y + ridge * y)
    rr = float(r @ r)
    best_y, best_rr = y.copy(), rr
    p = r.copy()
    it = 0
    while np.sqrt(rr) > thresh and it < max_iter:
        ap = A @ p + ridge * p
        pap = float(p @ ap)
        if pap <= 0.0:
            break
        step = rr / pap
        y += step * p
        r -= step * ap
        rr_new = float(r @ r)
        it += 1
        if rr_new < best_rr:
            best_y, best_rr = y.copy(), rr_new
        p = r + (rr_new / rr) * p
        rr = rr_new
    converged = np.sqrt(best_rr) <= thresh
    y = best_y
    value = float(y @ (A @ y) + ridge * (y @ y) - 2.0 * (b @ y))
    return QuadraticSolution(y, value, it, float(np.sqrt(best_rr)), bool(converged))
