"""Proximal-point iteration on the KKT operator, with infeasibility detection.

Each outer step applies the resolvent of the maximally monotone KKT
operator: given ``(x_n, y_n)`` it finds the unique root of

    F(x) = (I + gamma Q) x - x_n + gamma q
           + gamma^2 A.T (Id - Pi_C)(A x + y_n / gamma)

and then sets ``y_n+1 = gamma (Id - Pi_C)(A x_n+1 + y_n / gamma)``. F is
strongly monotone with modulus one, so the root is unique. Two inner
methods are available: a semismooth Newton iteration using the
projection's generalized derivative (default), and a damped fixed-point
iteration with step ``1 / (1 + gamma ||Q|| + gamma^2 ||A||^2)``.

With ``v_n+1 = A x_n+1 + y_n / gamma`` and ``z = Pi_C(v)``, the
optimality residuals are the scaled difference norms:

    A x_n+1 - Pi_C(v_n+1) =  dy_n+1 / gamma        (exact by construction)
    Q x_n+1 + q + A.T y_n+1 = -dx_n+1 / gamma      (up to the inner tolerance)

and the differences ``dy_n``, ``dx_n`` are the certificate candidates,
exactly as in the Douglas-Rachford loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from . import outcome as oc
from .linalg import spectral_norm_est
from .problem import (Certificate, ProblemData, check_dual_certificate,
                      check_primal_certificate)

INNER_METHODS = ("semismooth_newton", "damped_fixed_point")


def _inf_norm(v):
    return float(np.max(np.abs(v), initial=0.0))


class InnerSolveError(RuntimeError):
    """Inner root-find ran out of iterations; carries the best iterate."""

    def __init__(self, message, best_x, residual_norm, iterations):
        super().__init__(message)
        self.best_x = best_x
        self.residual_norm = residual_norm
        self.iterations = iterations


@dataclass(frozen=True)
class PpConfig:
    """Regularization, inner-solve policy, and termination tolerances.

    ``inner_tol_abs=None`` selects the adaptive schedule
    ``max(1e-12, min(1e-10, 1e-3 * current outer residual))``; a float
    fixes the inner tolerance for every step.
    """

    gamma: float = 1.0
    inner_method: str = "semismooth_newton"
    inner_tol_abs: Optional[float] = None
    inner_max_iter: int = 1000
    eps_abs: float = 1e-6
    eps_rel: float = 1e-6
    eps_pinf: float = 1e-6
    eps_dinf: float = 1e-6
    max_iter: int = 20000
    check_interval: int = 25

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must be positive")
        if self.inner_method not in INNER_METHODS:
            raise ValueError(f"unknown inner method {self.inner_method!r}")
        if self.inner_tol_abs is not None and self.inner_tol_abs <= 0.0:
            raise ValueError("inner_tol_abs must be positive")
        if self.inner_max_iter < 1:
            raise ValueError("inner_max_iter must be at least 1")
        for name in ("eps_abs", "eps_rel", "eps_pinf", "eps_dinf"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.check_interval < 1:
            raise ValueError("check_interval must be at least 1")


@dataclass
class PpState:
    """Outer iterates plus auxiliary split and cached differences.

    ``v = A x + y_prev / gamma`` and ``z = Pi_C(v)``, so that
    ``y = gamma (v - z)`` holds exactly for every state with ``n >= 1``.
    """

    n: int
    x: np.ndarray
    y: np.ndarray
    v: np.ndarray
    z: np.ndarray
    dx: np.ndarray
    dy: np.ndarray
    dv: np.ndarray
    dz: np.ndarray
    inner_iters: int = 0


class PpSolver:
    """Drives the outer resolvent loop; one handle per run."""

    def __init__(self, problem: ProblemData, config: PpConfig = None):
        self.problem = problem
        self.config = config if config is not None else PpConfig()
        g = self.config.gamma
        self._S = np.eye(problem.n) + g * problem.Q
        if self.config.inner_method == "damped_fixed_point":
            norm_Q = spectral_norm_est(problem.Q)
            norm_A = spectral_norm_est(problem.A)
            self._tau = 1.0 / (1.0 + g * norm_Q + g * g * norm_A * norm_A)
        else:
            self._tau = None

    def _f_value(self, x, x_prev, u_base):
        """F(x); ``u_base = y_prev / gamma`` is fixed during the solve."""
        P, g = self.problem, self.config.gamma
        u = P.A @ x + u_base
        resid = u - P.C.project(u)
        return self._S @ x - x_prev + g * P.q + (g * g) * (P.A.T @ resid), u

    def resolvent_solve(self, x_prev, y_prev, tol):
        """Root-find F(x) = 0, then recover the next dual iterate.

        Returns ``(x_next, y_next, inner_iters)`` with
        ``||F(x_next)||_inf <= tol``. Raises InnerSolveError if the inner
        iteration budget runs out.
        """
        P, cfg, g = self.problem, self.config, self.config.gamma
        u_base = y_prev / g
        x = np.asarray(x_prev, dtype=float).copy()
        Fx, u = self._f_value(x, x_prev, u_base)
        iters = 0
        best_x, best_norm = x, _inf_norm(Fx)
        while _inf_norm(Fx) > tol:
            if iters >= cfg.inner_max_iter:
                raise InnerSolveError(
                    f"inner solve did not reach tolerance {tol:g} within "
                    f"{cfg.inner_max_iter} iterations "
                    f"(best residual {best_norm:g})",
                    best_x=best_x, residual_norm=best_norm, iterations=iters)
            if cfg.inner_method == "semismooth_newton":
                D = P.C.projection_jacobian(u)
                J = self._S + (g * g) * (P.A.T @ ((np.eye(P.m) - D) @ P.A))
                step = scipy.linalg.cho_solve(
                    scipy.linalg.cho_factor(J, lower=True), -Fx)
                norm_Fx = _inf_norm(Fx)
                t = 1.0
                while t > 1e-12:
                    x_trial = x + t * step
                    F_trial, u_trial = self._f_value(x_trial, x_prev, u_base)
                    if _inf_norm(F_trial) <= (1.0 - 1e-4 * t) * norm_Fx:
                        break
                    t *= 0.5
                else:  # no sufficient decrease found; take the full step
                    x_trial = x + step
                    F_trial, u_trial = self._f_value(x_trial, x_prev, u_base)
                x, Fx, u = x_trial, F_trial, u_trial
            else:
                x = x - self._tau * Fx
                Fx, u = self._f_value(x, x_prev, u_base)
            iters += 1
            norm = _inf_norm(Fx)
            if norm < best_norm:
                best_x, best_norm = x, norm
        y_next = g * (u - P.C.project(u))
        return x, y_next, iters

    def _effective_inner_tol(self, state):
        cfg = self.config
        if cfg.inner_tol_abs is not None:
            return cfg.inner_tol_abs
        if state.n < 1:
            return 1e-10
        prim, dual = self.residuals(state)
        return max(1e-12, min(1e-10, 1e-3 * max(prim, dual)))

    def initial_state(self, warm=None):
        """Cold start at zero, or warm start from a given ``(x, y)`` pair."""
        P, g = self.problem, self.config.gamma
        if warm is None:
            x = np.zeros(P.n)
            y = np.zeros(P.m)
        else:
            x0, y0 = warm
            x = np.asarray(x0, dtype=float).copy()
            y = np.asarray(y0, dtype=float).copy()
            if x.shape != (P.n,) or y.shape != (P.m,):
                raise ValueError("warm start dimensions do not match problem")
        v = P.A @ x + y / g
        z = P.C.project(v)
        return PpState(n=0, x=x, y=y, v=v, z=z,
                       dx=np.zeros(P.n), dy=np.zeros(P.m),
                       dv=np.zeros(P.m), dz=np.zeros(P.m))

    def step(self, state: PpState) -> PpState:
        P, g = self.problem, self.config.gamma
        tol = self._effective_inner_tol(state)
        x_next, y_next, iters = self.resolvent_solve(state.x, state.y, tol)
        v_next = P.A @ x_next + state.y / g
        z_next = P.C.project(v_next)
        return PpState(
            n=state.n + 1, x=x_next, y=y_next, v=v_next, z=z_next,
            dx=x_next - state.x, dy=y_next - state.y,
            dv=v_next - state.v, dz=z_next - state.z,
            inner_iters=iters)

    def residuals(self, state: PpState):
        """Residual norms from the scaled differences."""
        if state.n < 1:
            raise ValueError("residuals need at least one completed iteration")
        g = self.config.gamma
        return _inf_norm(state.dy) / g, _inf_norm(state.dx) / g

    def residual_vectors(self, state: PpState):
        """Both evaluations of each residual identity at this state.

        Returns ``(prim_delta, dual_delta, prim_direct, dual_direct)``;
        the primal pair agrees exactly, the dual pair up to the inner
        tolerance divided by gamma.
        """
        P, g = self.problem, self.config.gamma
        prim_delta = state.dy / g
        dual_delta = -state.dx / g
        prim_direct = P.A @ state.x - state.z
        dual_direct = P.Q @ state.x + P.q + g * (P.A.T @ (state.v - state.z))
        return prim_delta, dual_delta, prim_direct, dual_direct

    def check_termination(self, state: PpState):
        P, cfg = self.problem, self.config
        prim, dual = self.residuals(state)
        Ax = P.A @ state.x
        Qx = P.Q @ state.x
        Aty = P.A.T @ state.y
        eps_prim = cfg.eps_abs + cfg.eps_rel * max(_inf_norm(Ax), _inf_norm(state.z))
        eps_dual = cfg.eps_abs + cfg.eps_rel * max(
            _inf_norm(Qx), _inf_norm(P.q), _inf_norm(Aty))
        if prim <= eps_prim and dual <= eps_dual:
            return oc.SolveOutcome(
                status=oc.SOLVED, iterations=state.n,
                x=state.x.copy(), z=state.z.copy(), y=state.y.copy(),
                residuals=(prim, dual))

        primal_cert = None
        dual_cert = None
        if _inf_norm(state.dy) > 0.0:
            ok, metrics = check_primal_certificate(P, state.dy, cfg.eps_pinf)
            if ok:
                primal_cert = Certificate(
                    kind="primal_infeasibility", vector=state.dy.copy(),
                    metrics={**metrics, "eps": cfg.eps_pinf})
        if _inf_norm(state.dx) > 0.0:
            ok, metrics = check_dual_certificate(P, state.dx, cfg.eps_dinf)
            if ok:
                dual_cert = Certificate(
                    kind="dual_infeasibility", vector=state.dx.copy(),
                    metrics={**metrics, "eps": cfg.eps_dinf})
        if primal_cert is not None:
            extra = {}
            if dual_cert is not None:
                extra["secondary_certificate"] = dual_cert
            return oc.SolveOutcome(
                status=oc.PRIMAL_INFEASIBLE, iterations=state.n,
                x=state.x.copy(), z=state.z.copy(), y=state.y.copy(),
                certificate=primal_cert, residuals=(prim, dual), extra=extra)
        if dual_cert is not None:
            return oc.SolveOutcome(
                status=oc.DUAL_INFEASIBLE, iterations=state.n,
                x=state.x.copy(), z=state.z.copy(), y=state.y.copy(),
                certificate=dual_cert, residuals=(prim, dual))
        return None

    def trace_record(self, state: PpState):
        P, cfg = self.problem, self.config
        prim, dual = self.residuals(state)
        return oc.TraceRecord(
            n=state.n, primal_res=prim, dual_res=dual,
            norm_dx=_inf_norm(state.dx), norm_dy=_inf_norm(state.dy),
            norm_At_dy=_inf_norm(P.A.T @ state.dy),
            support_dy=float(P.C.support(state.dy, cone_tol=cfg.eps_pinf)),
            norm_Q_dx=_inf_norm(P.Q @ state.dx),
            q_dot_dx=float(P.q @ state.dx),
            dist_rec=P.C.distance_to_recession(P.A @ state.dx),
            inner_iters=state.inner_iters)

    def run(self, warm=None, collect_trace=False):
        cfg = self.config
        state = self.initial_state(warm)
        history = [] if collect_trace else None
        for _ in range(cfg.max_iter):
            state = self.step(state)
            if collect_trace:
                history.append(self.trace_record(state))
            if state.n >= 2 and state.n % cfg.check_interval == 0:
                result = self.check_termination(state)
                if result is not None:
                    result.residual_history = history
                    return result
        if state.n >= 2:
            result = self.check_termination(state)
            if result is not None:
                result.residual_history = history
                return result
        prim, dual = self.residuals(state)
        return oc.SolveOutcome(
            status=oc.MAX_ITERATIONS, iterations=state.n,
            x=state.x.copy(), z=state.z.copy(), y=state.y.copy(),
            residuals=(prim, dual), residual_history=history)


def pp_run(problem, config=None, warm=None, collect_trace=False):
    """Set up and run the proximal-point solver on ``problem``."""
    return PpSolver(problem, config).run(warm=warm, collect_trace=collect_trace)
