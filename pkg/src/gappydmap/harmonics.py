"""Geometric Harmonics regression and its latent-space variant (double diffusion maps).

A :class:`GHModel` projects training targets onto the leading eigenvectors
``psi_a`` of the plain Gaussian affinity matrix of the inputs (no Markov
normalization), keeping modes with ``sigma_a >= delta * sigma_1``. New inputs
are handled by extending each retained eigenvector with its Nyström formula.

The same code serves ambient inputs and latent inputs; :func:`double_dmaps_fit`
only chooses the selected diffusion coordinates as inputs.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from .dmaps import data_hash, fix_signs
from .errors import InvalidArgument
from .kernel import as_points, cross_affinity, median_bandwidth, pairwise_affinity

DEFAULT_DELTA = 1e-6
# eigenvalues at or below this fraction of sigma_1 are roundoff, not modes
NONPOSITIVE_TOL = 1e-12


class UnderfitWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class GHModel:
    """Fitted Geometric Harmonics regressor.

    Attributes
    ----------
    input_points : ndarray (M, q)
    bandwidth : float
    delta : float
    sigma : ndarray (n_retained,)
        Retained eigenvalues, descending.
    psi : ndarray (M, n_retained)
        Orthonormal retained eigenvectors.
    coefficients : ndarray (n_retained, r)
        ``<f, psi_a>`` for each target column.
    input_space : str
        ``"ambient"`` or ``"latent"``.
    training_hash : str
        Hash of the snapshot matrix the model derives from (for consistency checks).
    underfit : bool
        True when at most one mode survived the truncation.
    """

    input_points: np.ndarray
    bandwidth: float
    delta: float
    sigma: np.ndarray
    psi: np.ndarray
    coefficients: np.ndarray
    input_space: str = "ambient"
    training_hash: str = ""
    underfit: bool = False
    n_candidates: int = field(default=0)

    def __post_init__(self):
        for name in ("input_points", "sigma", "psi", "coefficients"):
            object.__setattr__(self, name, np.ascontiguousarray(getattr(self, name), dtype=np.float64))

    @property
    def n_retained(self):
        return len(self.sigma)

    @property
    def output_dim(self):
        return self.coefficients.shape[1]


def gh_fit(inputs, targets, bandwidth=None, delta=DEFAULT_DELTA, *, input_space="ambient",
           training_hash=""):
    """Fit a Geometric Harmonics model.

    Parameters
    ----------
    inputs : array_like (M, q)
    targets : array_like (M,) or (M, r)
        All columns share one eigenbasis.
    bandwidth : float, optional
        Kernel scale; defaults to the median pairwise distance of ``inputs``.
    delta : float in (0, 1]
        Relative eigenvalue cutoff. ``delta = 1`` keeps only the leading
        mode and is accepted (with an underfit warning) as the degenerate edge.
    """
    X = as_points(inputs, "inputs")
    Y = np.asarray(targets, dtype=np.float64)
    if Y.ndim == 1:
        Y = Y[:, None]
    M = X.shape[0]
    if M < 2:
        raise InvalidArgument("geometric harmonics needs at least two training points")
    if Y.shape[0] != M:
        raise InvalidArgument(f"inputs have {M} rows but targets have {Y.shape[0]}")
    if not np.all(np.isfinite(Y)):
        raise InvalidArgument("targets contain non-finite values")
    if not (0.0 < delta <= 1.0):
        raise InvalidArgument(f"delta must lie in (0, 1], got {delta!r}")
    if bandwidth is None:
        bandwidth = median_bandwidth(X)
    elif not bandwidth > 0:
        raise InvalidArgument(f"bandwidth must be positive, got {bandwidth!r}")

    W = pairwise_affinity(X, bandwidth)
    sigma, psi = scipy.linalg.eigh(W)
    sigma, psi = sigma[::-1], psi[:, ::-1]
    keep = sigma > NONPOSITIVE_TOL * sigma[0]
    keep &= sigma >= delta * sigma[0]
    sigma, psi = sigma[keep], fix_signs(psi[:, keep])

    underfit = len(sigma) <= 1
    if underfit:
        warnings.warn(
            f"only {len(sigma)} geometric harmonic retained (delta={delta:g}); the fit will underfit",
            UnderfitWarning,
            stacklevel=2,
        )
    return GHModel(
        input_points=X,
        bandwidth=float(bandwidth),
        delta=float(delta),
        sigma=sigma,
        psi=psi,
        coefficients=psi.T @ Y,
        input_space=input_space,
        training_hash=training_hash or data_hash(X),
        underfit=underfit,
        n_candidates=M,
    )


def gh_extend(model, x_new):
    """Evaluate the extension ``(Ef)(x_new) = sum_a <f, psi_a> Psi_a(x_new)``.

    ``x_new`` of shape (q,) gives an (r,) result, shape (n, q) gives (n, r).
    """
    single = np.ndim(x_new) == 1
    Y = as_points(np.atleast_2d(x_new) if single else x_new, "x_new")
    if Y.shape[1] != model.input_points.shape[1]:
        raise InvalidArgument(
            f"query has dimension {Y.shape[1]}, model expects {model.input_points.shape[1]}"
        )
    w = cross_affinity(Y, model.input_points, model.bandwidth)
    out = ((w @ model.psi) / model.sigma) @ model.coefficients
    return out[0] if single else out


def support_distance(model, x_new):
    """Distance from each query to its nearest training input, in bandwidth units.

    Extensions decay toward zero beyond a few bandwidths; this is the
    diagnostic to check before trusting them.
    """
    Y = as_points(np.atleast_2d(x_new), "x_new")
    return cdist(Y, model.input_points).min(axis=1) / model.bandwidth


def double_dmaps_fit(dmap, targets, bandwidth_latent=None, delta=DEFAULT_DELTA):
    """Geometric Harmonics on the selected diffusion coordinates of ``dmap``.

    With ``targets`` equal to the training snapshots this is the inverse map
    latent -> ambient.
    """
    if not dmap.selected:
        raise InvalidArgument("diffusion map has no selected coordinates; run parsimony selection first")
    return gh_fit(
        dmap.coordinates(),
        targets,
        bandwidth_latent,
        delta,
        input_space="latent",
        training_hash=dmap.training_hash,
    )
