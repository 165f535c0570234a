"""Hankel/Toeplitz structure: anti-diagonal weights, the isometric lifting
operator and its adjoint, and the Hankel-to-Toeplitz flip."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "HankelLift",
    "hankel_map",
    "lift",
    "lift_adjoint",
    "numerical_rank",
    "toeplitz_map",
    "weight_apply",
]


@lru_cache(maxsize=None)
def _antidiag_lengths(n: int) -> np.ndarray:
    """K_j, the number of entries on the j-th anti-diagonal of an N x N matrix."""
    j = np.arange(2 * n - 1)
    k = np.minimum(j + 1, 2 * n - 1 - j)
    k.setflags(write=False)
    return k


@lru_cache(maxsize=None)
def _antidiag_weights(n: int) -> np.ndarray:
    """sqrt(K_j), the diagonal of the weighting matrix for side length n."""
    d = np.sqrt(_antidiag_lengths(n).astype(float))
    d.setflags(write=False)
    return d


def _check_signal(x, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.shape[0] != 2 * n - 1:
        raise ValueError(f"expected a vector of length {2 * n - 1}, got shape {x.shape}")
    return x


def _check_square(x_mat) -> np.ndarray:
    x_mat = np.asarray(x_mat, dtype=complex)
    if x_mat.ndim != 2 or x_mat.shape[0] != x_mat.shape[1] or x_mat.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {x_mat.shape}")
    return x_mat


def hankel_map(x, n: int) -> np.ndarray:
    """Arrange a length-(2N-1) vector into the N x N Hankel matrix H[j, k] = x[j+k]."""
    x = _check_signal(x, n)
    idx = np.arange(n)
    return x[idx[:, None] + idx[None, :]]


def lift(y, n: int) -> np.ndarray:
    """Isometric lift of y onto the Hankel subspace: entries y[j+k] / sqrt(K_{j+k}).

    The Frobenius norm of the output equals the Euclidean norm of y, and
    ``lift_adjoint(lift(y)) == y``.
    """
    y = _check_signal(y, n)
    return hankel_map(y / _antidiag_weights(n), n)


def lift_adjoint(x_mat) -> np.ndarray:
    """Adjoint of :func:`lift`: anti-diagonal sums scaled by 1 / sqrt(K_j).

    ``lift(lift_adjoint(X))`` is the orthogonal projection of X onto the
    Hankel subspace of C^(N x N).
    """
    x_mat = _check_square(x_mat)
    n = x_mat.shape[0]
    idx = (np.arange(n)[:, None] + np.arange(n)[None, :]).ravel()
    sums = np.bincount(idx, weights=x_mat.real.ravel(), minlength=2 * n - 1) + 1j * np.bincount(
        idx, weights=x_mat.imag.ravel(), minlength=2 * n - 1
    )
    return sums / _antidiag_weights(n)


def weight_apply(x, inverse: bool = False) -> np.ndarray:
    """Multiply entrywise by sqrt(K_j), or divide when ``inverse`` is set.

    The two directions are exact reciprocals, so a round trip is the identity.
    """
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1 or x.shape[0] % 2 == 0:
        raise ValueError(f"expected a vector of odd length, got shape {x.shape}")
    d = _antidiag_weights((x.shape[0] + 1) // 2)
    return x / d if inverse else x * d


def toeplitz_map(x, n: int) -> np.ndarray:
    """Arrange x into the N x N Toeplitz matrix T[i, j] = x[N-1+i-j].

    T(x) equals H(x) times the anti-identity, a unitary flip, so the two share
    singular values and in particular nuclear norm.
    """
    x = _check_signal(x, n)
    idx = np.arange(n)
    return x[n - 1 + idx[:, None] - idx[None, :]]


def numerical_rank(x_mat, margin: float = 1e3) -> int:
    """Singular values above max(shape) * eps * sigma_1 * margin."""
    x_mat = np.asarray(x_mat, dtype=complex)
    s = np.linalg.svd(x_mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    cutoff = max(x_mat.shape) * np.finfo(float).eps * s[0] * margin
    return int(np.count_nonzero(s > cutoff))


@dataclass(frozen=True, eq=False)
class HankelLift:
    """Lifting context for N x N Hankel matrices.

    Attributes
    ----------
    n : int
        Matrix side length; signals live in C^(2N-1).
    ambient_len : int
        2N - 1.
    weights : ndarray
        Anti-diagonal lengths K_j (a palindrome, max N, min 1).
    d_diag : ndarray
        sqrt(K_j), the diagonal that converts a raw signal x into the
        isometric variable y = d_diag * x.
    """

    n: int
    ambient_len: int = field(init=False)
    weights: np.ndarray = field(init=False)
    d_diag: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "ambient_len", 2 * self.n - 1)
        object.__setattr__(self, "weights", _antidiag_lengths(self.n))
        object.__setattr__(self, "d_diag", _antidiag_weights(self.n))

    def hankel(self, x) -> np.ndarray:
        return hankel_map(x, self.n)

    def lift(self, y) -> np.ndarray:
        return lift(y, self.n)

    def lift_adjoint(self, x_mat) -> np.ndarray:
        x_mat = _check_square(x_mat)
        if x_mat.shape[0] != self.n:
            raise ValueError(f"expected a {self.n} x {self.n} matrix, got {x_mat.shape}")
        return lift_adjoint(x_mat)

    def toeplitz(self, x) -> np.ndarray:
        return toeplitz_map(x, self.n)

    def weight(self, x, inverse: bool = False) -> np.ndarray:
        x = _check_signal(x, self.n)
        return weight_apply(x, inverse=inverse)
