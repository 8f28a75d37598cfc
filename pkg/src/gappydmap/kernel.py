"""Gaussian affinities and the density-normalized Markov operator.

The affinity between two points is ``exp(-(||x_i - x_j|| / epsilon)**2)``:
the bandwidth divides the distance *before* squaring. Software that uses
``exp(-||x_i - x_j||**2 / eps)`` needs ``eps = epsilon**2`` to match.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist

from .errors import DegenerateData, InvalidArgument, InvalidData


@dataclass(frozen=True)
class KernelConfig:
    epsilon: float
    density_normalize: bool = True

    def __post_init__(self):
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise InvalidArgument(f"epsilon must be positive, got {self.epsilon!r}")


@dataclass(frozen=True)
class MarkovOperator:
    """Row-stochastic ``K = D^-1 W~`` together with the matrices it was built from.

    Attributes
    ----------
    K : ndarray (N, N)
        Markov matrix.
    W : ndarray (N, N)
        Raw Gaussian affinities.
    W_tilde : ndarray (N, N)
        Density-normalized affinities ``P^-1 W P^-1`` (equal to ``W`` when
        density normalization is disabled).
    row_density : ndarray (N,)
        ``P_ii``, the row sums of ``W``.
    row_sums_tilde : ndarray (N,)
        ``D_ii``, the row sums of ``W_tilde``.
    """

    K: np.ndarray
    W: np.ndarray
    W_tilde: np.ndarray
    row_density: np.ndarray
    row_sums_tilde: np.ndarray


def as_points(X, name="X"):
    """Return ``X`` as a finite 2-D float64 array (a 1-D input is one column)."""
    data = getattr(X, "data", X)
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise InvalidData(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise InvalidData(f"{name} has a non-finite entry at row {bad[0]}, column {bad[1]}")
    return arr


def gaussian(distances, epsilon):
    """Elementwise ``exp(-(d / epsilon)**2)``."""
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise InvalidArgument(f"epsilon must be positive, got {epsilon!r}")
    return np.exp(-np.square(np.asarray(distances) / epsilon))


def cross_affinity(Y, X, epsilon):
    """Affinities between query rows ``Y`` (M, d) and reference rows ``X`` (N, d)."""
    return gaussian(cdist(as_points(Y, "Y"), as_points(X), "euclidean"), epsilon)


def pairwise_affinity(X, epsilon):
    """Symmetric Gaussian affinity matrix ``W`` with unit diagonal.

    Every entry is computed from its own pair of rows, so the result does not
    depend on how the work is split.
    """
    pts = as_points(X)
    W = gaussian(cdist(pts, pts, "euclidean"), epsilon)
    np.fill_diagonal(W, 1.0)
    return W


def median_bandwidth(X, multiplier=1.0):
    """``multiplier`` times the median of all pairwise Euclidean distances."""
    if not (np.isfinite(multiplier) and multiplier > 0):
        raise InvalidArgument(f"multiplier must be positive, got {multiplier!r}")
    pts = as_points(X)
    if pts.shape[0] < 2:
        raise InvalidArgument("median bandwidth needs at least two points")
    med = float(np.median(pdist(pts, "euclidean")))
    if med <= 0.0:
        raise DegenerateData("median pairwise distance is zero; points are (mostly) identical")
    return multiplier * med


def density_normalize(W):
    """``W~ = P^-1 W P^-1`` with ``P_ii`` the row sums of ``W``.

    Returns ``(W_tilde, P_diag)``.
    """
    W = np.asarray(W, dtype=np.float64)
    p = W.sum(axis=1)
    if np.any(p <= 0):
        raise DegenerateData(f"zero row sum in affinity matrix at row {int(np.argmin(p))}")
    return W / np.outer(p, p), p


def markov_normalize(W_tilde):
    """Row-normalize ``W~`` into a stochastic matrix. Returns ``(K, D_diag)``."""
    W_tilde = np.asarray(W_tilde, dtype=np.float64)
    d = W_tilde.sum(axis=1)
    if np.any(d <= 0):
        raise DegenerateData(f"zero row sum in normalized kernel at row {int(np.argmin(d))}")
    return W_tilde / d[:, None], d


def markov_operator(X, config):
    """Build the full chain ``W -> W~ -> K`` for data ``X``."""
    W = pairwise_affinity(X, config.epsilon)
    if config.density_normalize:
        W_tilde, p = density_normalize(W)
    else:
        W_tilde, p = W, W.sum(axis=1)
    K, d = markov_normalize(W_tilde)
    return MarkovOperator(K=K, W=W, W_tilde=W_tilde, row_density=p, row_sums_tilde=d)
