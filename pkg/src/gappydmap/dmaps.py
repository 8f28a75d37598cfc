"""Diffusion-map eigendecomposition and Nyström out-of-sample extension.

Coordinates use 1-based labels throughout: ``phi_1`` is the trivial constant
eigenvector (eigenvalue 1) and ``phi_2`` the first informative one, so a
selection such as ``(2, 3, 5)`` reads the same as in the usual plots.
"""

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import IllPosedError, InvalidArgument, NumericError, OutOfSupport
from .kernel import KernelConfig, as_points, cross_affinity, markov_operator, median_bandwidth

DEFAULT_MAX_PAIRS = 20
RESIDUAL_TOL = 1e-8
MIN_SUPPORT = 1e-300
MIN_EIGENVALUE = 1e-12


def data_hash(X):
    """SHA-256 of a float64 matrix's shape and raw bytes."""
    arr = np.ascontiguousarray(as_points(X), dtype="<f8")
    h = hashlib.sha256()
    h.update(f"{arr.shape[0]}x{arr.shape[1]}".encode())
    h.update(arr.tobytes())
    return h.hexdigest()


def fix_signs(vectors):
    """Flip each column so its largest-magnitude entry is positive.

    Entries within a relative 1e-10 of the largest magnitude count as tied and
    the first of them decides, so symmetric/antisymmetric vectors do not flip
    with roundoff.
    """
    vectors = np.array(vectors, dtype=np.float64, copy=True)
    mag = np.abs(vectors)
    idx = np.argmax(mag >= mag.max(axis=0) * (1 - 1e-10), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


@dataclass(frozen=True, eq=False)
class DMapModel:
    """Fitted diffusion map.

    ``eigenvectors[:, j - 1]`` holds ``phi_j`` (unit Euclidean norm).
    ``selected`` lists the 1-based labels of the non-harmonic coordinates and
    stays empty until a selection is attached with :meth:`with_selection`.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    training_data: np.ndarray
    kernel_config: KernelConfig
    row_density: np.ndarray
    row_sums_tilde: np.ndarray
    selected: tuple = ()
    training_hash: str = field(default="")

    def __post_init__(self):
        # C order everywhere, so a reloaded model runs the same BLAS paths
        for name in ("eigenvalues", "eigenvectors", "training_data", "row_density", "row_sums_tilde"):
            object.__setattr__(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.float64))
        if not self.training_hash:
            object.__setattr__(self, "training_hash", data_hash(self.training_data))

    @property
    def n_pairs(self):
        return len(self.eigenvalues)

    def with_selection(self, selected):
        selected = tuple(int(k) for k in selected)
        for k in selected:
            if not 1 <= k <= self.n_pairs:
                raise InvalidArgument(f"coordinate label {k} outside 1..{self.n_pairs}")
        return replace(self, selected=selected)

    def coordinates(self, labels=None):
        """Training-set values of the requested coordinates (default: ``selected``)."""
        labels = self.selected if labels is None else tuple(labels)
        if not labels:
            raise InvalidArgument("no coordinates selected; run parsimony selection first")
        return self.eigenvectors[:, [k - 1 for k in labels]]


def fit(X, config=None, n_pairs=None):
    """Top ``n_pairs`` eigenpairs of the density-normalized Markov matrix.

    The non-symmetric ``K = D^-1 W~`` is similar to ``S = D^-1/2 W~ D^-1/2``;
    ``S`` is solved with a symmetric dense eigensolver and its eigenvectors are
    mapped back by ``D^-1/2``.

    Parameters
    ----------
    X : array_like or SnapshotMatrix, shape (N, d)
    config : KernelConfig, optional
        Defaults to the median-distance bandwidth with density normalization.
    n_pairs : int, optional
        Defaults to ``min(N, 20)``.

    Raises
    ------
    NumericError
        If any returned pair violates ``||K phi - lambda phi|| <= 1e-8 ||phi||``.
    """
    pts = as_points(X)
    N = pts.shape[0]
    if config is None:
        config = KernelConfig(median_bandwidth(pts))
    if n_pairs is None:
        n_pairs = min(N, DEFAULT_MAX_PAIRS)
    if not 1 <= n_pairs <= N:
        raise InvalidArgument(f"n_pairs must be in 1..{N}, got {n_pairs}")

    op = markov_operator(pts, config)
    d_sqrt = np.sqrt(op.row_sums_tilde)
    S = op.W_tilde / np.outer(d_sqrt, d_sqrt)
    S = 0.5 * (S + S.T)
    vals, vecs = scipy.linalg.eigh(S, subset_by_index=[N - n_pairs, N - 1])
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    phi = vecs[:, order] / d_sqrt[:, None]
    phi /= np.linalg.norm(phi, axis=0)
    phi = fix_signs(phi)

    resid = np.linalg.norm(op.K @ phi - phi * vals, axis=0)
    if np.any(resid > RESIDUAL_TOL):
        raise NumericError(
            f"eigenpair residuals exceed {RESIDUAL_TOL:g}: max {resid.max():.3e}", residuals=resid
        )

    return DMapModel(
        eigenvalues=vals,
        eigenvectors=phi,
        training_data=pts,
        kernel_config=config,
        row_density=op.row_density,
        row_sums_tilde=op.row_sums_tilde,
    )


def extension_weights(model, x_new):
    """Normalized kernel rows between query points and the training set.

    Applies the same normalizations as the fit: divide ``w(x_new, x_i)`` by
    ``p_new * P_ii`` and then rescale each row to sum to one (``p_new`` cancels
    in that last step but is still checked against underflow).
    """
    Y = as_points(x_new, "x_new")
    X = model.training_data
    if Y.shape[1] != X.shape[1]:
        raise InvalidArgument(f"query has dimension {Y.shape[1]}, model expects {X.shape[1]}")
    w = cross_affinity(Y, X, model.kernel_config.epsilon)
    p_new = w.sum(axis=1)
    far = np.flatnonzero(p_new < MIN_SUPPORT)
    if far.size:
        raise OutOfSupport(f"query row {far[0]} is outside the data support (kernel sum {p_new[far[0]]:.3g})")
    if model.kernel_config.density_normalize:
        w = w / model.row_density[None, :]
    return w / w.sum(axis=1, keepdims=True)


def nystrom_extend(model, x_new, labels=None):
    """Diffusion coordinates of new ambient points.

    ``phi_j(x_new) = lambda_j^-1 * sum_i k~(x_i, x_new) phi_j(x_i)``.

    Parameters
    ----------
    model : DMapModel
    x_new : array_like, shape (d,) or (M, d)
    labels : sequence of int, optional
        1-based coordinate labels to return; defaults to all computed pairs.

    Returns
    -------
    ndarray, shape (n_labels,) for a single point or (M, n_labels).
    """
    single = np.ndim(x_new) == 1
    labels = tuple(range(1, model.n_pairs + 1)) if labels is None else tuple(labels)
    cols = [k - 1 for k in labels]
    lam = model.eigenvalues[cols]
    small = np.flatnonzero(np.abs(lam) < MIN_EIGENVALUE)
    if small.size:
        raise IllPosedError(f"eigenvalue of phi_{labels[small[0]]} is {lam[small[0]]:.3g}; extension is ill-posed")
    k = extension_weights(model, np.atleast_2d(x_new) if single else x_new)
    out = (k @ model.eigenvectors[:, cols]) / lam
    return out[0] if single else out
