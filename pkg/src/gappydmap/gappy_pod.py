"""POD bases, energy truncation and masked (gappy) least-squares reconstruction."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IllPosedError, InvalidArgument
from .kernel import as_points

# relative cutoff applied to the singular values of A = B^T B
A_RCOND = 1e-12


class IllConditionedWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class PODBasis:
    """Truncated left singular vectors of the transposed snapshot matrix.

    ``U`` is (d, rank). ``singular_values`` keeps the full spectrum so other
    truncations can be evaluated later. ``mean`` and ``scale`` are the
    per-feature shift and divisor applied before the SVD (zeros and ones
    unless centering or standardization was requested).
    """

    U: np.ndarray
    singular_values: np.ndarray
    rank: int
    energy_captured: float
    centered: bool = False
    mean: np.ndarray = None
    scale: np.ndarray = None
    squared_energy: bool = False

    def __post_init__(self):
        d = self.U.shape[0]
        mean = np.zeros(d) if self.mean is None else self.mean
        scale = np.ones(d) if self.scale is None else self.scale
        for name, value in (("U", self.U), ("singular_values", self.singular_values),
                            ("mean", mean), ("scale", scale)):
            object.__setattr__(self, name, np.ascontiguousarray(value, dtype=np.float64))

    @property
    def d(self):
        return self.U.shape[0]

    def to_reduced(self, x):
        return (np.asarray(x, dtype=np.float64) - self.mean) / self.scale

    def from_reduced(self, z):
        return np.asarray(z) * self.scale + self.mean

    def project(self, X):
        """Best approximation of each row of ``X`` in the basis span."""
        Z = self.to_reduced(as_points(X))
        return self.from_reduced((Z @ self.U) @ self.U.T)


@dataclass(frozen=True)
class ObservationMask:
    """Known entries of a d-vector (0-based indices, sorted, unique)."""

    known_indices: tuple
    d: int

    def __post_init__(self):
        idx = tuple(int(i) for i in self.known_indices)
        if len(set(idx)) != len(idx):
            raise InvalidArgument("mask indices must be unique")
        if not idx:
            raise InvalidArgument("mask must contain at least one known index")
        if min(idx) < 0 or max(idx) >= self.d:
            raise InvalidArgument(f"mask indices must lie in 0..{self.d - 1}")
        object.__setattr__(self, "known_indices", tuple(sorted(idx)))

    @property
    def vector(self):
        m = np.zeros(self.d)
        m[list(self.known_indices)] = 1.0
        return m

    @property
    def index(self):
        return np.asarray(self.known_indices, dtype=int)

    def __len__(self):
        return len(self.known_indices)


@dataclass(frozen=True, eq=False)
class GappyResult:
    x_rec: np.ndarray
    coefficients: np.ndarray
    condition_number: float
    residual_on_known: float


def energy_fraction(singular_values, i, squared=False):
    """Cumulative energy ``E_i % = 100 * sum_{n<=i} xi_n / sum_n xi_n``.

    By default the raw singular values are summed; ``squared=True`` uses
    ``xi_n**2`` (the variance convention).
    """
    xi = np.asarray(singular_values, dtype=np.float64)
    if xi.size == 0:
        raise InvalidArgument("empty singular value spectrum")
    if not 1 <= i <= xi.size:
        raise InvalidArgument(f"i must be in 1..{xi.size}, got {i}")
    if squared:
        xi = xi**2
    total = xi.sum()
    if total <= 0:
        raise InvalidArgument("spectrum has zero total energy")
    return float(100.0 * xi[:i].sum() / total)


def cumulative_energy(singular_values, squared=False):
    xi = np.asarray(singular_values, dtype=np.float64)
    xi = xi**2 if squared else xi
    return 100.0 * np.cumsum(xi) / xi.sum()


def reconstruction_errors(singular_values):
    """Relative Frobenius error (percent) of the rank-i truncation for every i."""
    s2 = np.asarray(singular_values, dtype=np.float64) ** 2
    tail = np.concatenate([np.cumsum(s2[::-1])[::-1][1:], [0.0]])
    return 100.0 * np.sqrt(tail / s2.sum())


def pod_fit(X, *, energy_percent=None, rank=None, reconstruction_error_percent=None,
            center=False, standardize=False, squared_energy=False):
    """SVD of ``X^T`` truncated by exactly one rule.

    Parameters
    ----------
    X : array_like (N, d)
    energy_percent : float in (0, 100]
        Smallest rank with ``E_i % >= energy_percent``.
    rank : int
    reconstruction_error_percent : float > 0
        Smallest rank whose relative Frobenius error is at most this value.
    center, standardize : bool
        Subtract the column mean / divide by the column std before the SVD.

    If the requested energy or error is not attainable before the spectrum
    hits zero, the full numerical rank is used and a warning reports the
    achievable value.
    """
    rules = [energy_percent is not None, rank is not None, reconstruction_error_percent is not None]
    if sum(rules) != 1:
        raise InvalidArgument("specify exactly one of energy_percent, rank, reconstruction_error_percent")
    data = as_points(X)
    N, d = data.shape
    mean = data.mean(axis=0) if center or standardize else np.zeros(d)
    scale = np.ones(d)
    if standardize:
        scale = data.std(axis=0)
        scale[scale == 0] = 1.0
    Z = (data - mean) / scale
    U, s, _ = np.linalg.svd(Z.T, full_matrices=False)
    n_modes = s.size
    numerical_rank = int(np.sum(s > s[0] * max(N, d) * np.finfo(float).eps)) if s[0] > 0 else 0
    if numerical_rank == 0:
        raise InvalidArgument("snapshot matrix is identically zero after preprocessing")

    if rank is not None:
        if not 1 <= rank <= n_modes:
            raise InvalidArgument(f"rank must be in 1..{n_modes}, got {rank}")
        r = int(rank)
    elif energy_percent is not None:
        if not 0 < energy_percent <= 100:
            raise InvalidArgument("energy_percent must lie in (0, 100]")
        E = cumulative_energy(s, squared_energy)
        hits = np.flatnonzero(E >= energy_percent - 1e-12)
        r = int(hits[0]) + 1 if hits.size else n_modes
        if r > numerical_rank:
            warnings.warn(f"energy target {energy_percent}% reached only with zero singular values; "
                          f"using numerical rank {numerical_rank} ({E[numerical_rank - 1]:.6g}%)")
            r = numerical_rank
    else:
        if not reconstruction_error_percent > 0:
            raise InvalidArgument("reconstruction_error_percent must be positive")
        err = reconstruction_errors(s)
        hits = np.flatnonzero(err <= reconstruction_error_percent)
        r = int(hits[0]) + 1 if hits.size else n_modes
        if r > numerical_rank:
            warnings.warn(f"error target {reconstruction_error_percent}% needs zero singular values; "
                          f"using numerical rank {numerical_rank} ({err[numerical_rank - 1]:.3g}%)")
            r = numerical_rank

    return PODBasis(
        U=U[:, :r].copy(),
        singular_values=s,
        rank=r,
        energy_captured=energy_fraction(s, r, squared_energy),
        centered=bool(center or standardize),
        mean=mean,
        scale=scale,
        squared_energy=squared_energy,
    )


def _masked_svd(basis, mask):
    if mask.d != basis.d:
        raise InvalidArgument(f"mask is for d={mask.d}, basis has d={basis.d}")
    B = basis.U[mask.index, :]
    u, s, Vt = np.linalg.svd(B, full_matrices=False)
    return u, s, Vt


def _cond_from_svals(s, rank):
    # A = B^T B is rank x rank; it is singular when B has fewer rows than columns
    if s.size < rank or s[-1] == 0.0:
        return float("inf")
    return float((s[0] / s[-1]) ** 2)


def mask_diagnostics(basis, mask):
    """2-norm condition number of ``A = (m*U)^T (m*U)``, computed from the masked rows."""
    _, s, _ = _masked_svd(basis, mask)
    return _cond_from_svals(s, basis.rank)


def gappy_reconstruct(basis, mask, x_partial):
    """Recover a full vector from its known entries.

    Solves the least-squares problem ``(m*U) c ~ m*x`` (whose normal equations
    are ``A c = (m*U)^T x``) through the SVD of the masked basis rows,
    discarding directions whose eigenvalue in ``A`` is below ``1e-12`` of the
    largest. Values of ``x_partial`` at unknown positions are never read.

    Parameters
    ----------
    x_partial : array_like
        Either a full d-vector (unknown entries ignored) or a vector holding
        only the ``len(mask)`` known values in mask order.
    """
    x = np.asarray(x_partial, dtype=np.float64)
    idx = mask.index
    if x.shape == (basis.d,):
        known = x[idx]
    elif x.shape == (len(idx),):
        known = x
    else:
        raise InvalidArgument(f"x_partial must have length {basis.d} or {len(idx)}, got {x.shape}")
    if not np.all(np.isfinite(known)):
        raise InvalidArgument("known entries must be finite")

    u, s, Vt = _masked_svd(basis, mask)
    if s.size == 0 or s[0] == 0.0:
        raise IllPosedError("masked basis rows are all zero; the known entries carry no information")
    cond = _cond_from_svals(s, basis.rank)
    if len(idx) < basis.rank or cond > 1.0 / A_RCOND:
        warnings.warn(f"gappy system is ill-posed (cond(A) = {cond:.3g}); returning the minimum-norm solution",
                      IllConditionedWarning, stacklevel=2)

    keep = s**2 > A_RCOND * s[0] ** 2
    z_known = (known - basis.mean[idx]) / basis.scale[idx]
    c = Vt[keep].T @ ((u[:, keep].T @ z_known) / s[keep])
    x_rec = basis.from_reduced(basis.U @ c)
    return GappyResult(
        x_rec=x_rec,
        coefficients=c,
        condition_number=cond,
        residual_on_known=float(np.linalg.norm(x_rec[idx] - known)),
    )
