"""Covariance algebra for jointly Gaussian variables.

Everything here reduces to log-determinants of small symmetric
positive-definite matrices. Determinants are computed by a Cholesky
factorization with an explicit pivot check: det(M) equals the product of
the pivots, so log2 det(M) is the sum of their base-2 logs, and a pivot at
or below ``epsilon`` rejects the matrix as not positive definite. This is
the single production path; cofactor expansion exists only inside the test
suite as an independent oracle.

Mutual information for independent Gaussian inputs over a linear channel
Y = H x + Z, with P = diag(tx powers) and Sigma_N = diag(rx noises), is

    I(X; Y) = 1/2 log2 det(Sigma_N + H P H^T) - 1/2 log2 det(Sigma_N).

Conditioning on other independent transmitters subtracts their known
signals exactly, which is why only the transmitter set of interest enters.

All public rates are bits per channel use (log base 2). Every function is
pure; nothing here holds mutable state, so concurrent callers are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativePower,
    NonPositiveNoise,
    NotPositiveDefinite,
)

#: Absolute tolerance for the symmetry invariant of SymMatrix.
SYMMETRY_ATOL = 1e-12

#: Default pivot threshold for positive-definiteness rejection. Callers
#: sweeping quantization noise toward zero may need to tighten or loosen it.
PD_EPSILON = 1e-12


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix of variances, linear scale.

    The entries are copied and frozen on construction. Asymmetry beyond
    ``SYMMETRY_ATOL`` (absolute) is rejected immediately; positive
    definiteness is checked only by the operations that require it.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] == 0:
            raise DimensionMismatch("matrix dimension must be positive")
        # equal_nan so that NaN entries fall through to the positive-
        # definiteness check, which names the actual problem.
        if not np.allclose(a, a.T, rtol=0.0, atol=SYMMETRY_ATOL, equal_nan=True):
            worst = float(np.max(np.abs(a - a.T)))
            raise ValueError(
                f"matrix is not symmetric within atol={SYMMETRY_ATOL:g} "
                f"(max |a - a.T| = {worst:.3e})"
            )
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _cholesky_log2_pivots(a: np.ndarray, epsilon: float) -> tuple[np.ndarray, float]:
    """Lower Cholesky factor and sum of base-2 log pivots of ``a``.

    Pivot k is a[k,k] minus the accumulated squared row of the factor; a
    pivot <= epsilon (or NaN) raises NotPositiveDefinite.
    """
    n = a.shape[0]
    lower = np.zeros((n, n))
    log2_sum = 0.0
    for k in range(n):
        pivot = a[k, k] - lower[k, :k] @ lower[k, :k]
        if not pivot > epsilon:
            raise NotPositiveDefinite(
                f"pivot {pivot:.6e} at index {k} is <= epsilon {epsilon:g}"
            )
        log2_sum += math.log2(pivot)
        root = math.sqrt(pivot)
        lower[k, k] = root
        if k + 1 < n:
            lower[k + 1 :, k] = (a[k + 1 :, k] - lower[k + 1 :, :k] @ lower[k, :k]) / root
    return lower, log2_sum


def _as_symmetric_array(m: SymMatrix | np.ndarray) -> np.ndarray:
    if isinstance(m, SymMatrix):
        return m.entries
    return SymMatrix(np.asarray(m)).entries


def log2_det(m: SymMatrix | np.ndarray, epsilon: float = PD_EPSILON) -> float:
    """log2 of the determinant of a symmetric positive definite matrix.

    Computed as the sum of base-2 logs of the Cholesky pivots, which is
    numerically stable and O(n^3). A 3x3 identity gives exactly 0.0.

    Raises NotPositiveDefinite if any pivot is <= epsilon.
    """
    return _cholesky_log2_pivots(_as_symmetric_array(m), epsilon)[1]


def conditional_mi_bits(
    gains_tx_to_rx: np.ndarray,
    tx_powers: np.ndarray,
    rx_total_noise: np.ndarray,
    epsilon: float = PD_EPSILON,
) -> float:
    """I(X_tx ; Y_rx | X_others) in bits for independent Gaussian inputs.

    ``gains_tx_to_rx`` holds amplitude gains (square roots of power gains)
    with shape (num_rx, num_tx); entry (j, i) couples transmitter i into
    receiver j. ``rx_total_noise`` is the per-receiver total noise variance
    (thermal plus any quantization noise folded in by the caller).

    Returns 1/2 log2 det(Sigma_N + H P H^T) - 1/2 log2 det(Sigma_N). With
    all powers zero the two determinants coincide and the result is exactly
    0.0.
    """
    gains = np.atleast_2d(np.asarray(gains_tx_to_rx, dtype=float))
    powers = np.atleast_1d(np.asarray(tx_powers, dtype=float))
    noise = np.atleast_1d(np.asarray(rx_total_noise, dtype=float))
    if powers.ndim != 1 or noise.ndim != 1:
        raise DimensionMismatch("tx_powers and rx_total_noise must be vectors")
    if gains.shape != (noise.size, powers.size):
        raise DimensionMismatch(
            f"gains shape {gains.shape} does not match "
            f"({noise.size} receivers, {powers.size} transmitters)"
        )
    if np.any(noise <= 0.0) or not np.all(np.isfinite(noise)):
        raise NonPositiveNoise(f"receiver noise variances must be > 0, got {noise}")
    if np.any(powers < 0.0):
        raise NegativePower(f"transmit powers must be >= 0, got {powers}")

    signal = (gains * powers) @ gains.T
    sigma = np.diag(noise) + 0.5 * (signal + signal.T)  # exact symmetrization
    log2_noise = float(np.sum(np.log2(noise)))
    return 0.5 * (log2_det(sigma, epsilon) - log2_noise)


def joint_covariance(coefficients: np.ndarray, factor_variances: np.ndarray) -> np.ndarray:
    """Covariance A diag(v) A^T of variables that are rows of A over
    independent zero-mean Gaussian factors with variances v."""
    a = np.atleast_2d(np.asarray(coefficients, dtype=float))
    v = np.atleast_1d(np.asarray(factor_variances, dtype=float))
    if a.shape[1] != v.size:
        raise DimensionMismatch(
            f"{a.shape[1]} coefficient columns vs {v.size} factor variances"
        )
    if np.any(v < 0.0):
        raise ValueError(f"factor variances must be >= 0, got {v}")
    sigma = (a * v) @ a.T
    return 0.5 * (sigma + sigma.T)


def conditional_covariance(
    sigma: np.ndarray,
    keep: list[int],
    given: list[int],
    epsilon: float = PD_EPSILON,
) -> np.ndarray:
    """Schur complement: covariance of the ``keep`` block given the ``given``
    block, Sigma_kk - Sigma_kg Sigma_gg^{-1} Sigma_gk."""
    s = np.asarray(sigma, dtype=float)
    if not given:
        return s[np.ix_(keep, keep)].copy()
    s_gg = s[np.ix_(given, given)]
    s_gg = 0.5 * (s_gg + s_gg.T)
    _cholesky_log2_pivots(s_gg, epsilon)  # PD gate before the solve
    solved = np.linalg.solve(s_gg, s[np.ix_(given, keep)])
    cond = s[np.ix_(keep, keep)] - s[np.ix_(keep, given)] @ solved
    return 0.5 * (cond + cond.T)
