"""Problem data, KKT residuals, and strong-infeasibility certificates.

The problem is

    minimize    0.5 * <Q x, x> + <q, x>
    subject to  A x in C,

with Q symmetric positive semidefinite and C a nonempty closed convex
set described by a :class:`~splitqp.sets.SetDescriptor`.

A nonzero ``ybar`` with ``A.T ybar = 0`` and ``support_C(ybar) < 0``
proves the problem strongly infeasible; a nonzero ``xbar`` with
``Q xbar = 0``, ``A xbar`` in the recession cone of C, and
``<q, xbar> < 0`` proves its dual strongly infeasible. The checkers
below evaluate those conditions with a scale-free tolerance: every
threshold is ``eps`` times the inf-norm of the candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, as_vector, symmetrize
from .sets import SetDescriptor

Q_SYMMETRY_ATOL = 1e-12
Q_PSD_RTOL = 1e-10


@dataclass
class ProblemData:
    """Immutable problem data ``(Q, q, A, C)``; validated on build."""

    Q: np.ndarray
    q: np.ndarray
    A: np.ndarray
    C: SetDescriptor

    def __post_init__(self):
        self.A = as_matrix(self.A, name="A")
        m, n = self.A.shape
        if m < 1 or n < 1:
            raise ValueError("problem needs at least one variable and one constraint row")
        self.Q = as_matrix(self.Q, shape=(n, n), name="Q")
        self.q = as_vector(self.q, dim=n, name="q")
        if np.max(np.abs(self.Q - self.Q.T), initial=0.0) > Q_SYMMETRY_ATOL:
            raise ValueError("Q is not symmetric within tolerance 1e-12")
        self.Q = symmetrize(self.Q)
        if not isinstance(self.C, SetDescriptor):
            raise ValueError("C must be a set descriptor")
        if self.C.dim != m:
            raise ValueError(
                f"constraint set has dimension {self.C.dim}, expected {m}")
        eigs = np.linalg.eigvalsh(self.Q)
        scale = max(1.0, float(np.max(np.abs(eigs), initial=0.0)))
        if eigs.size and eigs[0] < -Q_PSD_RTOL * scale:
            raise ValueError("Q is not positive semidefinite")

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    def objective(self, x):
        x = as_vector(x, dim=self.n, name="x")
        return 0.5 * float(x @ (self.Q @ x)) + float(self.q @ x)


@dataclass(frozen=True)
class KktResiduals:
    """inf-norms of the stationarity system at a candidate triple."""

    primal: float  # ||A x - z||_inf
    dual: float    # ||Q x + q + A.T y||_inf


@dataclass(frozen=True)
class Certificate:
    """A strong-infeasibility certificate vector with its metrics.

    ``kind`` is ``"primal_infeasibility"`` (vector lives in constraint
    space) or ``"dual_infeasibility"`` (vector lives in variable space).
    ``metrics`` stores the checker's measurements, recomputable from the
    vector.
    """

    kind: str
    vector: np.ndarray
    metrics: dict


def kkt_residuals(problem, x, z, y):
    """Primal and dual stationarity residuals at ``(x, z, y)``.

    The complementarity pair ``(z, y)`` is not re-checked here; solver
    iterates satisfy it by construction.
    """
    x = as_vector(x, dim=problem.n, name="x")
    z = as_vector(z, dim=problem.m, name="z")
    y = as_vector(y, dim=problem.m, name="y")
    primal = float(np.max(np.abs(problem.A @ x - z), initial=0.0))
    dual = float(np.max(np.abs(problem.Q @ x + problem.q + problem.A.T @ y),
                        initial=0.0))
    return KktResiduals(primal=primal, dual=dual)


def check_primal_certificate(problem, ybar, eps):
    """Test ``ybar`` as a certificate that the problem is strongly infeasible.

    Returns ``(ok, metrics)`` where metrics holds ``norm_At_y`` and
    ``support``; ``ok`` is true iff ``||A.T ybar||_inf <= eps * ||ybar||_inf``
    and ``support_C(ybar) <= -eps * ||ybar||_inf``. Polar-cone membership
    inside the support evaluation uses the same ``eps``.
    """
    ybar = as_vector(ybar, dim=problem.m, name="ybar")
    if eps <= 0:
        raise ValueError("eps must be positive")
    norm_y = float(np.max(np.abs(ybar), initial=0.0))
    if norm_y == 0.0:
        raise ValueError("certificate must be nonzero")
    norm_At_y = float(np.max(np.abs(problem.A.T @ ybar), initial=0.0))
    support = problem.C.support(ybar, cone_tol=eps)
    metrics = {"norm_At_y": norm_At_y, "support": support}
    ok = norm_At_y <= eps * norm_y and support <= -eps * norm_y
    return ok, metrics


def check_dual_certificate(problem, xbar, eps):
    """Test ``xbar`` as a certificate that the dual is strongly infeasible.

    Returns ``(ok, metrics)`` with ``norm_Q_x``, ``dist_rec`` (distance of
    ``A xbar`` from the recession cone of C), and ``q_dot_x``.
    """
    xbar = as_vector(xbar, dim=problem.n, name="xbar")
    if eps <= 0:
        raise ValueError("eps must be positive")
    norm_x = float(np.max(np.abs(xbar), initial=0.0))
    if norm_x == 0.0:
        raise ValueError("certificate must be nonzero")
    norm_Q_x = float(np.max(np.abs(problem.Q @ xbar), initial=0.0))
    dist_rec = problem.C.distance_to_recession(problem.A @ xbar)
    q_dot_x = float(problem.q @ xbar)
    metrics = {"norm_Q_x": norm_Q_x, "dist_rec": dist_rec, "q_dot_x": q_dot_x}
    ok = (norm_Q_x <= eps * norm_x
          and dist_rec <= eps * norm_x
          and q_dot_x <= -eps * norm_x)
    return ok, metrics


def certificate_metrics(problem, certificate):
    """Recompute a certificate's metrics from its vector."""
    if certificate.kind == "primal_infeasibility":
        eps = certificate.metrics.get("eps", 1e-6)
        _, metrics = check_primal_certificate(problem, certificate.vector, eps)
    elif certificate.kind == "dual_infeasibility":
        eps = certificate.metrics.get("eps", 1e-6)
        _, metrics = check_dual_certificate(problem, certificate.vector, eps)
    else:
        raise ValueError(f"unknown certificate kind {certificate.kind!r}")
    if math.isinf(metrics.get("support", 0.0)):
        metrics["support"] = math.inf
    return metrics
