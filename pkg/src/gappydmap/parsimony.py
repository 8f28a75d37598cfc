"""Non-harmonic eigenvector detection by local linear regression.

Each coordinate ``phi_k`` is regressed, leave-one-out, on its predecessors
``phi_2 .. phi_{k-1}`` with a Gaussian-weighted local linear fit. The
normalized residual ``r_k`` is near 0 for harmonics (functions of earlier
coordinates) and near 1 for coordinates describing a new direction.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import InvalidArgument

DEFAULT_BANDWIDTH_FACTOR = 1.0 / 3.0
PINV_RCOND = 1e-10
# eigenvectors whose eigenvalue is below this fraction of lambda_1 are
# dominated by roundoff and are left out of the default scan
EIGENVALUE_FLOOR = 1e-8
_CHUNK = 64


@dataclass(frozen=True)
class ResidualReport:
    """``r[i]`` is the residual of coordinate ``labels[i]`` (labels start at 2)."""

    labels: tuple
    r: np.ndarray
    selected: tuple = ()
    threshold_used: float = float("nan")

    def as_dict(self):
        return dict(zip(self.labels, self.r.tolist()))


def local_linear_residual(target, regressors, bandwidth_factor=DEFAULT_BANDWIDTH_FACTOR):
    """Leave-one-out local linear regression residual of ``target`` on ``regressors``.

    Parameters
    ----------
    target : ndarray (N,)
    regressors : ndarray (N, q), q >= 1
    bandwidth_factor : float
        Kernel scale as a multiple of the median pairwise distance in regressor space.

    Returns
    -------
    float
        ``sqrt(sum (target - fit)**2 / sum target**2)``.
    """
    y = np.asarray(target, dtype=np.float64)
    Z = np.asarray(regressors, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z[:, None]
    N, q = Z.shape
    if bandwidth_factor <= 0:
        raise InvalidArgument("bandwidth_factor must be positive")
    med = float(np.median(pdist(Z))) if N > 1 else 0.0
    if med <= 0.0:
        # regressors carry no information: best local fit is the LOO mean
        fit = (y.sum() - y) / max(N - 1, 1)
    else:
        eps = bandwidth_factor * med
        fit = np.empty(N)
        for start in range(0, N, _CHUNK):
            rows = np.arange(start, min(start + _CHUNK, N))
            fit[rows] = _loo_predict(y, Z, rows, eps)
    denom = float(np.dot(y, y))
    if denom == 0.0:
        return 0.0
    return float(np.sqrt(np.sum((y - fit) ** 2) / denom))


def _loo_predict(y, Z, rows, eps):
    # local fit centred on each query point: y_j ~ a + b.(z_j - z_i); prediction is a
    delta = Z[None, :, :] - Z[rows, None, :]
    w = np.exp(-np.sum(delta**2, axis=2) / eps**2)
    w[np.arange(len(rows)), rows] = 0.0
    design = np.concatenate([np.ones(delta.shape[:2] + (1,)), delta], axis=2)
    sw = np.sqrt(w)[:, :, None]
    A = sw * design
    gram = np.matmul(A.transpose(0, 2, 1), A)
    rhs = np.matmul(A.transpose(0, 2, 1), (sw[:, :, 0] * y[None, :])[:, :, None])
    coef = np.matmul(np.linalg.pinv(gram, rcond=PINV_RCOND, hermitian=True), rhs)
    return coef[:, 0, 0]


def coordinate_residuals(coords, bandwidth_factor=DEFAULT_BANDWIDTH_FACTOR):
    """Residuals for the columns of ``coords`` = ``[phi_2, phi_3, ...]``.

    The first column has no predecessors and gets ``r = 1`` by definition.
    """
    coords = np.asarray(coords, dtype=np.float64)
    r = np.ones(coords.shape[1])
    for c in range(1, coords.shape[1]):
        r[c] = local_linear_residual(coords[:, c], coords[:, :c], bandwidth_factor)
    return r


def residuals(model, k_max=None, regression_bandwidth_factor=DEFAULT_BANDWIDTH_FACTOR):
    """Compute ``r_k`` for ``k = 2 .. k_max`` on a fitted :class:`DMapModel`.

    By default ``k_max`` is the last coordinate whose eigenvalue is at least
    ``EIGENVALUE_FLOOR * lambda_1`` (but never below 3).
    """
    if k_max is None:
        lam = np.asarray(model.eigenvalues)
        k_max = max(3, int(np.sum(lam >= EIGENVALUE_FLOOR * lam[0])))
        k_max = min(k_max, model.n_pairs)
    k_max = int(k_max)
    if k_max < 3:
        raise InvalidArgument(f"k_max must be at least 3, got {k_max}")
    if k_max > model.n_pairs:
        raise InvalidArgument(f"k_max={k_max} exceeds the {model.n_pairs} computed eigenpairs")
    r = coordinate_residuals(model.eigenvectors[:, 1:k_max], regression_bandwidth_factor)
    return ResidualReport(labels=tuple(range(2, k_max + 1)), r=r)


def gap_count(r):
    """Number of coordinates above the largest drop in the descending-sorted residuals.

    Drops are measured relative to the largest residual, so small fluctuations
    among near-zero harmonics cannot outrank the real separation.
    """
    s = np.sort(np.asarray(r, dtype=np.float64))[::-1]
    if s.size < 2 or s[0] <= 0:
        return int(s.size)
    drops = (s[:-1] - s[1:]) / s[0]
    return int(np.argmax(drops)) + 1


def select_coordinates(report, top_m=None, threshold=None):
    """Choose non-harmonic coordinates; returns an updated report.

    With neither rule given, ``top_m`` is set by :func:`gap_count`. The
    selection is returned in ascending label order.
    """
    if top_m is not None and threshold is not None:
        raise InvalidArgument("give either top_m or threshold, not both")
    labels = np.asarray(report.labels)
    if threshold is not None:
        chosen = labels[report.r >= threshold]
        used = float(threshold)
    else:
        m = gap_count(report.r) if top_m is None else int(top_m)
        if not 1 <= m <= labels.size:
            raise InvalidArgument(f"top_m={m} but only {labels.size} coordinates are available")
        order = np.argsort(-report.r, kind="stable")[:m]
        chosen = labels[order]
        used = float(np.min(report.r[order]))
    return ResidualReport(report.labels, report.r, tuple(sorted(int(k) for k in chosen)), used)
