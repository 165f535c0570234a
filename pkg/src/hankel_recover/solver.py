"""ADMM for the lifted nuclear-norm programs, equality-constrained or
noise-ball-constrained, operating in the weighted variable y = D x."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hankel import HankelLift
from .measurement import MeasurementEnsemble, Observation, project_affine, project_ball

__all__ = ["RecoveryResult", "SolverConfig", "solve", "success", "svt"]


@dataclass(frozen=True)
class SolverConfig:
    """ADMM parameters; ``delta = 0`` selects the equality-constrained program."""

    rho: float = 1.0
    max_iters: int = 2000
    tol_primal: float = 1e-7
    tol_dual: float = 1e-7
    delta: float = 0.0

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol_primal <= 0 or self.tol_dual <= 0:
            raise ValueError("tolerances must be positive")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


@dataclass(frozen=True, eq=False)
class RecoveryResult:
    """Recovered signal with convergence diagnostics.

    ``x_hat`` is the unweighted signal, ``y_hat`` the weighted variable the
    solver iterates on; ``objective`` is the nuclear norm of the final lifted
    iterate. ``converged`` holds iff both residuals met their tolerances
    before ``max_iters``.
    """

    x_hat: np.ndarray
    y_hat: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    objective: float
    converged: bool


def svt(x_mat, tau: float) -> np.ndarray:
    """Singular value thresholding: the prox of tau * nuclear norm at x_mat.

    Returns U max(S - tau, 0) V^H from the SVD of x_mat.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    u, s, vh = np.linalg.svd(np.asarray(x_mat, dtype=complex), full_matrices=False)
    return (u * np.maximum(s - tau, 0.0)) @ vh


def solve(
    ens: MeasurementEnsemble,
    obs: Observation,
    lift_ctx: HankelLift,
    cfg: SolverConfig | None = None,
) -> RecoveryResult:
    """Minimize the nuclear norm of the lifted signal subject to data consistency.

    Splitting Z = G y with scaled dual U, each sweep does

        Z <- svt(G y + U, 1/rho)
        y <- projection of G*(Z - U) onto {B y = b} (or the delta-ball)
        U <- U + G y - Z

    The y-update collapses to a vector projection because the lift is an
    isometry. Terminates when the primal residual ||G y - Z||_F and the dual
    residual rho * ||G*(Z - Z_prev)||_2 fall below their (relative)
    tolerances; hitting max_iters yields ``converged=False``, not an error.
    """
    if cfg is None:
        cfg = SolverConfig()
    if lift_ctx.ambient_len != ens.ambient_len:
        raise ValueError(
            f"lift context ({lift_ctx.ambient_len}) and ensemble ({ens.ambient_len}) disagree"
        )
    b = np.asarray(obs.b, dtype=complex)
    if b.shape != (ens.m,):
        raise ValueError(f"expected observation of length {ens.m}, got shape {b.shape}")

    n = lift_ctx.n
    tau = 1.0 / cfg.rho
    y = np.zeros(lift_ctx.ambient_len, dtype=complex)
    lifted_y = np.zeros((n, n), dtype=complex)
    z = np.zeros((n, n), dtype=complex)
    dual = np.zeros((n, n), dtype=complex)
    primal_res = dual_res = np.inf
    converged = False
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        z_prev = z
        z = svt(lifted_y + dual, tau)
        v = lift_ctx.lift_adjoint(z - dual)
        if cfg.delta == 0.0:
            y = project_affine(ens, v, b)
        else:
            y = project_ball(ens, v, b, cfg.delta)
        lifted_y = lift_ctx.lift(y)
        dual = dual + lifted_y - z
        primal_res = float(np.linalg.norm(lifted_y - z))
        dual_res = float(cfg.rho * np.linalg.norm(lift_ctx.lift_adjoint(z - z_prev)))
        if primal_res <= cfg.tol_primal * (1.0 + np.linalg.norm(z)) and dual_res <= cfg.tol_dual * (
            1.0 + np.linalg.norm(y)
        ):
            converged = True
            break

    objective = float(np.linalg.svd(lifted_y, compute_uv=False).sum())
    return RecoveryResult(
        x_hat=lift_ctx.weight(y, inverse=True),
        y_hat=y,
        iterations=iterations,
        primal_residual=primal_res,
        dual_residual=dual_res,
        objective=objective,
        converged=converged,
    )


def success(result: RecoveryResult, truth, threshold: float = 1e-3) -> bool:
    """True iff the relative l2 recovery error is within threshold (closed)."""
    truth = np.asarray(truth, dtype=complex)
    if truth.shape != result.x_hat.shape:
        raise ValueError(f"truth shape {truth.shape} does not match {result.x_hat.shape}")
    ref = np.linalg.norm(truth)
    if ref == 0.0:
        raise ValueError("truth must be nonzero")
    return bool(np.linalg.norm(result.x_hat - truth) <= threshold * ref)
