"""Dense linear-algebra substrate shared by both solvers.

Vectors are 1-d float ndarrays and matrices are 2-d row-major float
ndarrays; the helpers here add the validation both solvers rely on
(finite entries, matching dimensions) plus a factor-once SPD solve.
Everything is desk-scale dense; there is no sparse path.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

SYMMETRY_ATOL = 1e-12


class NotPositiveDefiniteError(ValueError):
    """Raised when an SPD factorization meets a non-positive pivot."""


def as_vector(x, dim=None, name="vector"):
    """Validate and return ``x`` as a finite 1-d float array.

    Raises ValueError on non-finite entries, wrong rank, or (when ``dim``
    is given) wrong length.
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    return v


def as_matrix(M, shape=None, name="matrix"):
    """Validate and return ``M`` as a finite 2-d float array."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    if shape is not None and A.shape != tuple(shape):
        raise ValueError(f"{name} has shape {A.shape}, expected {tuple(shape)}")
    return A


def matvec(M, x):
    """Return ``M @ x`` with dimension checking."""
    M = as_matrix(M)
    x = as_vector(x)
    if M.shape[1] != x.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {M.shape[0]}x{M.shape[1]}, "
            f"vector has dimension {x.shape[0]}")
    return M @ x


def adjoint_matvec(M, y):
    """Return ``M.T @ y`` with dimension checking."""
    M = as_matrix(M)
    y = as_vector(y)
    if M.shape[0] != y.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {M.shape[0]}x{M.shape[1]}, "
            f"vector has dimension {y.shape[0]}")
    return M.T @ y


def symmetrize(M):
    """Return ``(M + M.T) / 2``; guards against file round-trip noise."""
    return 0.5 * (M + M.T)


class SpdFactor:
    """Cholesky factor of a symmetric positive-definite matrix.

    Factor once, solve many times. ``matrix`` keeps the symmetrized
    input so tests can verify the reconstruction error.
    """

    def __init__(self, matrix, cho):
        self.matrix = matrix
        self._cho = cho

    @property
    def order(self):
        return self.matrix.shape[0]

    def solve(self, b):
        b = as_vector(b, dim=self.order, name="right-hand side")
        return scipy.linalg.cho_solve(self._cho, b)


def spd_factor(M):
    """Factor a symmetric positive-definite matrix for repeated solves.

    The input must be symmetric within ``SYMMETRY_ATOL`` per entry; it is
    symmetrized before factoring. Raises NotPositiveDefiniteError when a
    pivot is not positive.
    """
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if M.size and np.max(np.abs(M - M.T)) > SYMMETRY_ATOL:
        raise ValueError("matrix is not symmetric within tolerance 1e-12")
    S = symmetrize(M)
    try:
        cho = scipy.linalg.cho_factor(S, lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite: {exc}") from exc
    return SpdFactor(S, cho)


def spd_solve(factor, b):
    """Solve ``factor.matrix @ s = b`` using the cached factorization."""
    return factor.solve(b)


def spectral_norm_est(M, iters=100, tol=1e-12):
    """Estimate the spectral norm of ``M`` by power iteration on M.T @ M.

    Deterministic: the start vector is fixed, so the same matrix always
    yields the same estimate.
    """
    M = as_matrix(M)
    m, n = M.shape
    if m == 0 or n == 0:
        return 0.0
    v = np.ones(n) + 1e-3 * np.arange(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = M.T @ (M @ v)
        nw = np.linalg.norm(w)
        if nw <= 1e-300:
            return 0.0
        v_next = w / nw
        est_next = np.sqrt(nw)
        if abs(est_next - est) <= tol * max(1.0, est_next):
            return est_next
        v, est = v_next, est_next
    return est
