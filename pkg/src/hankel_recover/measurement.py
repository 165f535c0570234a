"""Scaled complex Gaussian measurement ensembles, noise injection, and the two
feasibility projections (affine and noise ball) used by the solver."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .hankel import weight_apply

__all__ = [
    "MeasurementEnsemble",
    "Observation",
    "ProjectionError",
    "measure",
    "project_affine",
    "project_ball",
    "sample_ensemble",
]


class ProjectionError(RuntimeError):
    """A feasibility projection failed (rank-deficient sketch or bracketing)."""


class MeasurementEnsemble:
    """A complex Gaussian sketch matrix with a cached SVD.

    Entries have i.i.d. standard normal real and imaginary parts. The SVD is
    computed once here and reused by every projection, since the solver calls
    them hundreds of times per recovery. Instances are immutable and safe to
    share across worker threads.
    """

    def __init__(self, b_matrix, n: int):
        b = np.array(b_matrix, dtype=complex)
        if n < 1:
            raise ValueError("n must be >= 1")
        if b.ndim != 2 or b.shape[0] < 1 or b.shape[1] != 2 * n - 1:
            raise ValueError(f"expected an M x {2 * n - 1} matrix, got shape {b.shape}")
        if not np.isfinite(b).all():
            raise ValueError("sketch matrix must have finite entries")
        b.setflags(write=False)
        self.b_matrix = b
        self.m = b.shape[0]
        self.n = n
        self.ambient_len = 2 * n - 1
        u, s, vh = np.linalg.svd(b, full_matrices=False)
        for arr in (u, s, vh):
            arr.setflags(write=False)
        self._u, self._s, self._vh = u, s, vh

    def apply(self, y) -> np.ndarray:
        """B @ y."""
        return self.b_matrix @ y


@dataclass(frozen=True, eq=False)
class Observation:
    """Measured vector b with its noise level (0 for noise-free data)."""

    b: np.ndarray
    delta: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.b, dtype=complex)
        if b.ndim != 1:
            raise ValueError(f"expected a vector, got shape {b.shape}")
        object.__setattr__(self, "b", b)
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")


def sample_ensemble(m: int, n: int, rng_seed=None) -> MeasurementEnsemble:
    """Draw an M x (2N-1) sketch, deterministic given the seed."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    shape = (m, 2 * n - 1)
    rng = np.random.default_rng(rng_seed)
    return MeasurementEnsemble(rng.standard_normal(shape) + 1j * rng.standard_normal(shape), n)


def measure(ens: MeasurementEnsemble, x, noise_delta: float = 0.0, rng_seed=None) -> Observation:
    """Observe b = B D x, plus complex Gaussian noise rescaled to norm noise_delta.

    The noise is rescaled so that ||b - B D x||_2 equals ``noise_delta``
    exactly, making the noisy program's constraint hypothesis hold with
    equality.
    """
    x = np.asarray(x, dtype=complex)
    if x.shape != (ens.ambient_len,):
        raise ValueError(f"expected a vector of length {ens.ambient_len}, got shape {x.shape}")
    if noise_delta < 0:
        raise ValueError("noise_delta must be nonnegative")
    b = ens.b_matrix @ weight_apply(x)
    if noise_delta > 0:
        rng = np.random.default_rng(rng_seed)
        eta = rng.standard_normal(ens.m) + 1j * rng.standard_normal(ens.m)
        b = b + eta * (noise_delta / np.linalg.norm(eta))
    return Observation(b, float(noise_delta))


def _check_vector(v, length: int, name: str) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (length,):
        raise ValueError(f"expected {name} of length {length}, got shape {v.shape}")
    return v


def _pinv_components(ens: MeasurementEnsemble):
    s = ens._s
    if ens.m > ens.ambient_len or s[-1] <= ens.ambient_len * np.finfo(float).eps * s[0]:
        raise ProjectionError(
            f"sketch is rank deficient (m={ens.m}, smallest singular value {s[-1]:.3e})"
        )
    return ens._u, s, ens._vh


def project_affine(ens: MeasurementEnsemble, v, b) -> np.ndarray:
    """Closest point to v (in l2) satisfying B y = b exactly."""
    v = _check_vector(v, ens.ambient_len, "v")
    b = _check_vector(b, ens.m, "b")
    u, s, vh = _pinv_components(ens)
    w = ens.b_matrix @ v - b
    return v - vh.conj().T @ ((u.conj().T @ w) / s)


def project_ball(ens: MeasurementEnsemble, v, b, delta: float) -> np.ndarray:
    """Closest point to v satisfying ||B y - b||_2 <= delta.

    Interior points are returned unchanged. Otherwise the constraint is active
    and its Lagrange multiplier is the unique root of a strictly decreasing
    scalar function of the sketch's singular values, found by bracketed
    Brent iteration.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    v = _check_vector(v, ens.ambient_len, "v")
    b = _check_vector(b, ens.m, "b")
    if delta == 0.0:
        return project_affine(ens, v, b)
    w = ens.b_matrix @ v - b
    gap = float(np.linalg.norm(w))
    if gap <= delta:
        return v.copy()
    u, s, vh = _pinv_components(ens)
    wt = u.conj().T @ w
    wt2 = np.abs(wt) ** 2
    s2 = s**2

    def excess(mu: float) -> float:
        return float(wt2 @ (1.0 + mu * s2) ** -2) - delta**2

    hi = (gap / delta - 1.0) / float(s2.min())
    for _ in range(64):
        if excess(hi) <= 0.0:
            break
        hi *= 2.0
    else:
        raise ProjectionError(
            f"failed to bracket the ball-projection multiplier "
            f"(gap={gap:.3e}, delta={delta:.3e}, hi={hi:.3e}, excess={excess(hi):.3e})"
        )
    mu = brentq(excess, 0.0, hi, xtol=1e-18, rtol=1e-12, maxiter=200)
    return v - vh.conj().T @ (mu * s * wt / (1.0 + mu * s2))
