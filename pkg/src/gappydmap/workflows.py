"""End-to-end prediction pipelines built from one training set.

A :class:`Pipeline` bundles a diffusion map with four Geometric Harmonics
maps that all share the same training snapshots:

* ``forward_gh``  parameters -> latent coordinates
* ``inverse_gh``  latent coordinates -> full snapshot (double diffusion maps)
* ``params_gh``   latent coordinates -> parameters
* ``partial_gh``  a few observed entries -> latent coordinates (optional)

Every ``predict_*`` function returns a :class:`Prediction` carrying the latent
point it passed through, so intermediate coordinates can be audited.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import dmaps, harmonics, parsimony
from .errors import DataMismatch, InvalidArgument
from .gappy_pod import ObservationMask, gappy_reconstruct, mask_diagnostics
from .kernel import KernelConfig, as_points, median_bandwidth

DMAP_BANDWIDTH_MULTIPLIER = 1.0
# the plain median distance over-smooths geometric harmonics at delta = 1e-6
GH_BANDWIDTH_MULTIPLIER = 0.5
MIN_DEFINED = 1e-300


# --------------------------------------------------------------------- error metrics


def relative_error(predicted, actual, denominator="predicted"):
    """Signed percent error ``100 * (pred - act) / pred`` per entry.

    Entries whose denominator is below 1e-300 in magnitude are undefined and
    come back as NaN. ``denominator="actual"`` switches to the conventional
    ``(pred - act) / act``.
    """
    pred = np.asarray(predicted, dtype=np.float64)
    act = np.asarray(actual, dtype=np.float64)
    if pred.shape != act.shape:
        raise InvalidArgument(f"shape mismatch: {pred.shape} vs {act.shape}")
    if denominator not in ("predicted", "actual"):
        raise InvalidArgument("denominator must be 'predicted' or 'actual'")
    denom = pred if denominator == "predicted" else act
    out = np.full(pred.shape, np.nan)
    ok = np.abs(denom) >= MIN_DEFINED
    out[ok] = 100.0 * (pred[ok] - act[ok]) / denom[ok]
    return out


def mean_relative_error(predicted, actual, denominator="predicted", axis=None):
    """Mean absolute percent error over defined entries."""
    err = np.abs(relative_error(predicted, actual, denominator))
    return np.nanmean(err, axis=axis)


def whitney_min_observations(n_latent):
    """Generic observations sufficient to embed an ``n_latent``-dimensional manifold."""
    if n_latent < 0:
        raise InvalidArgument("n_latent must be non-negative")
    return 2 * int(n_latent) + 1


# --------------------------------------------------------------------- data splits and masks


def holdout_split(n, fraction=0.1, seed=0):
    """Seeded uniform split; returns sorted ``(train_idx, test_idx)``."""
    if not 0 < fraction < 1:
        raise InvalidArgument("holdout fraction must lie in (0, 1)")
    n_test = max(1, int(round(fraction * n)))
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def k_center_mask(X, size, exclude=()):
    """Greedy farthest-point choice of ``size`` columns of ``X``.

    Columns are compared as vectors over the samples, so the picked entries
    are mutually the least alike. The first pick is the column farthest from
    the mean column.
    """
    cols = as_points(X).T
    d = cols.shape[0]
    excluded = set(int(i) for i in exclude)
    if size < 1 or size > d - len(excluded):
        raise InvalidArgument(f"cannot pick {size} of {d - len(excluded)} available entries")
    avail = np.ones(d, dtype=bool)
    avail[list(excluded)] = False
    dist = np.linalg.norm(cols - cols.mean(axis=0), axis=1)
    picked = []
    for t in range(size):
        j = int(np.argmax(np.where(avail, dist, -np.inf)))
        picked.append(j)
        avail[j] = False
        dj = np.linalg.norm(cols - cols[j], axis=1)
        dist = dj if t == 0 else np.minimum(dist, dj)
    return ObservationMask(tuple(picked), d)


def random_mask(d, size, seed=0, exclude=()):
    pool = np.setdiff1d(np.arange(d), np.asarray(list(exclude), dtype=int))
    if size > pool.size:
        raise InvalidArgument(f"cannot pick {size} of {pool.size} available entries")
    return ObservationMask(tuple(np.random.default_rng(seed).choice(pool, size, replace=False)), d)


# --------------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class Prediction:
    value: np.ndarray
    latent: np.ndarray


@dataclass(frozen=True, eq=False)
class Pipeline:
    """Fitted models sharing one training set (checked through their data hashes)."""

    dmap: dmaps.DMapModel
    forward_gh: harmonics.GHModel
    inverse_gh: harmonics.GHModel
    params_gh: harmonics.GHModel
    param_mean: np.ndarray
    param_std: np.ndarray
    partial_gh: harmonics.GHModel = None
    partial_mask: ObservationMask = None
    partial_mean: np.ndarray = None
    partial_std: np.ndarray = None
    residual_report: parsimony.ResidualReport = None
    settings: dict = field(default_factory=dict)

    def __post_init__(self):
        ref = self.dmap.training_hash
        for name in ("forward_gh", "inverse_gh", "params_gh", "partial_gh"):
            model = getattr(self, name)
            if model is not None and model.training_hash != ref:
                raise DataMismatch(f"{name} was fitted on data {model.training_hash[:12]}, "
                                   f"the diffusion map on {ref[:12]}")

    @property
    def n_latent(self):
        return len(self.dmap.selected)

    @property
    def training_data(self):
        return self.dmap.training_data

    def scale_params(self, params):
        return (np.asarray(params, dtype=np.float64) - self.param_mean) / self.param_std


def fit_pipeline(X, params, *, bandwidth_multiplier=DMAP_BANDWIDTH_MULTIPLIER, n_pairs=None,
                 k_max=None, regression_bandwidth_factor=parsimony.DEFAULT_BANDWIDTH_FACTOR,
                 top_m=None, threshold=None, selected=None, delta=harmonics.DEFAULT_DELTA,
                 gh_bandwidth_multiplier=GH_BANDWIDTH_MULTIPLIER, latent_bandwidth=None,
                 param_bandwidth=None, partial_mask=None, partial_size=None):
    """Fit every model of a :class:`Pipeline` on snapshots ``X`` and parameters ``params``.

    Coordinates are chosen by the residual gap rule unless ``top_m``,
    ``threshold`` or an explicit ``selected`` list is given. Parameters (and
    partial observations) are standardized before their kernels are built,
    since their columns carry unrelated units. Harmonics bandwidths not given
    explicitly are ``gh_bandwidth_multiplier`` times the median distance of
    their own inputs. ``partial_size`` picks a k-center mask when no
    ``partial_mask`` is given.
    """
    X = as_points(X)
    P = np.asarray(getattr(params, "params", params), dtype=np.float64)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] != X.shape[0]:
        raise InvalidArgument(f"{X.shape[0]} snapshots but {P.shape[0]} parameter rows")

    config = KernelConfig(median_bandwidth(X, bandwidth_multiplier))
    dmap = dmaps.fit(X, config, n_pairs)
    report = None
    if selected is None:
        report = parsimony.select_coordinates(
            parsimony.residuals(dmap, k_max, regression_bandwidth_factor), top_m=top_m, threshold=threshold
        )
        selected = report.selected
    dmap = dmap.with_selection(selected)
    latent = dmap.coordinates()
    h = dmap.training_hash

    p_mean, p_std = P.mean(axis=0), P.std(axis=0)
    p_std[p_std == 0] = 1.0
    P_scaled = (P - p_mean) / p_std
    if param_bandwidth is None:
        param_bandwidth = median_bandwidth(P_scaled, gh_bandwidth_multiplier)
    if latent_bandwidth is None:
        latent_bandwidth = median_bandwidth(latent, gh_bandwidth_multiplier)
    forward = harmonics.gh_fit(P_scaled, latent, param_bandwidth, delta, training_hash=h)
    inverse = harmonics.double_dmaps_fit(dmap, X, latent_bandwidth, delta)
    to_params = harmonics.double_dmaps_fit(dmap, P, latent_bandwidth, delta)

    pipe = Pipeline(
        dmap=dmap,
        forward_gh=forward,
        inverse_gh=inverse,
        params_gh=to_params,
        param_mean=p_mean,
        param_std=p_std,
        residual_report=report,
        settings=dict(
            bandwidth_multiplier=bandwidth_multiplier,
            delta=delta,
            regression_bandwidth_factor=regression_bandwidth_factor,
            gh_bandwidth_multiplier=gh_bandwidth_multiplier,
        ),
    )
    if partial_mask is None and partial_size:
        partial_mask = k_center_mask(X, partial_size)
    if partial_mask is not None:
        pipe = with_partial_mask(pipe, partial_mask)
    return pipe


def with_partial_mask(pipe, mask, bandwidth=None):
    """Return a copy of ``pipe`` whose partial-observation map uses ``mask``.

    Observed values are standardized with the training statistics of the
    masked entries before the kernel is applied.
    """
    X = pipe.training_data
    if mask.d != X.shape[1]:
        raise InvalidArgument(f"mask is for d={mask.d}, training data has d={X.shape[1]}")
    obs = X[:, mask.index]
    mean, std = obs.mean(axis=0), obs.std(axis=0)
    std[std == 0] = 1.0
    obs = (obs - mean) / std
    if bandwidth is None:
        bandwidth = median_bandwidth(obs, pipe.settings.get("gh_bandwidth_multiplier", GH_BANDWIDTH_MULTIPLIER))
    gh = harmonics.gh_fit(obs, pipe.dmap.coordinates(), bandwidth,
                          pipe.settings.get("delta", harmonics.DEFAULT_DELTA),
                          training_hash=pipe.dmap.training_hash)
    return replace(pipe, partial_gh=gh, partial_mask=mask, partial_mean=mean, partial_std=std)


def _check_partial(pipe, values):
    if pipe.partial_gh is None:
        raise InvalidArgument("pipeline has no partial-observation map; fit one with with_partial_mask")
    v = np.asarray(values, dtype=np.float64)
    if v.shape[-1] != len(pipe.partial_mask):
        raise InvalidArgument(f"expected {len(pipe.partial_mask)} observed values, got {v.shape[-1]}")
    return v


def latent_from_partial(pipe, values):
    v = _check_partial(pipe, values)
    return harmonics.gh_extend(pipe.partial_gh, (v - pipe.partial_mean) / pipe.partial_std)


def predict_observation_from_params(pipe, params):
    """Parameters -> latent (forward map) -> full snapshot (inverse map)."""
    p = np.asarray(params, dtype=np.float64)
    if p.shape[-1] != pipe.param_mean.size:
        raise InvalidArgument(f"expected {pipe.param_mean.size} parameters, got {p.shape[-1]}")
    latent = harmonics.gh_extend(pipe.forward_gh, pipe.scale_params(p))
    return Prediction(harmonics.gh_extend(pipe.inverse_gh, latent), latent)


def predict_params_from_observation(pipe, x_new):
    """Snapshot -> latent (Nyström) -> parameters."""
    latent = dmaps.nystrom_extend(pipe.dmap, x_new, pipe.dmap.selected)
    return Prediction(harmonics.gh_extend(pipe.params_gh, latent), latent)


def predict_params_from_partial(pipe, values):
    """Observed entries at ``partial_mask`` -> latent -> parameters."""
    latent = latent_from_partial(pipe, values)
    return Prediction(harmonics.gh_extend(pipe.params_gh, latent), latent)


def predict_partial_from_partial(pipe, values, target_mask=None):
    """Observed entries -> latent -> entries at ``target_mask`` (all entries if None)."""
    latent = latent_from_partial(pipe, values)
    full = harmonics.gh_extend(pipe.inverse_gh, latent)
    if target_mask is None:
        return Prediction(full, latent)
    return Prediction(full[..., target_mask.index], latent)


def reconstruct_from_observation(pipe, x_new):
    """Snapshot -> latent (Nyström) -> snapshot, the double-diffusion-maps roundtrip."""
    latent = dmaps.nystrom_extend(pipe.dmap, x_new, pipe.dmap.selected)
    return Prediction(harmonics.gh_extend(pipe.inverse_gh, latent), latent)


# --------------------------------------------------------------------- gappy comparison


@dataclass(frozen=True)
class ComparisonReport:
    """Per-test-vector mean relative errors (percent) of both reconstructions."""

    mask: ObservationMask
    pod_rank: int
    n_latent: int
    condition_number: float
    dmap_error: np.ndarray
    pod_error: np.ndarray
    pod_residual_on_known: np.ndarray

    def rows(self):
        for i, (e_d, e_p, r) in enumerate(zip(self.dmap_error, self.pod_error, self.pod_residual_on_known)):
            yield dict(test_index=i, gappy_dmap_error_pct=float(e_d), gappy_pod_error_pct=float(e_p),
                       pod_residual_on_known=float(r), cond_A=self.condition_number)


def compare_gappy(pipe, basis, mask, test_X):
    """Gappy POD versus gappy diffusion maps from the same observed entries.

    Both reconstruct each full test vector from its values at ``mask``: POD
    through :func:`gappy_reconstruct`, the diffusion-map route through the
    partial-observation map (refitted for ``mask`` if needed) and the inverse map.
    """
    test_X = as_points(test_X)
    if pipe.partial_mask != mask:
        pipe = with_partial_mask(pipe, mask)
    idx = mask.index
    dmap_rec = predict_partial_from_partial(pipe, test_X[:, idx]).value
    pod_rec, resid = [], []
    for x in test_X:
        res = gappy_reconstruct(basis, mask, x[idx])
        pod_rec.append(res.x_rec)
        resid.append(res.residual_on_known)
    pod_rec = np.array(pod_rec)
    return ComparisonReport(
        mask=mask,
        pod_rank=basis.rank,
        n_latent=pipe.n_latent,
        condition_number=mask_diagnostics(basis, mask),
        dmap_error=mean_relative_error(dmap_rec, test_X, axis=1),
        pod_error=mean_relative_error(pod_rec, test_X, axis=1),
        pod_residual_on_known=np.array(resid),
    )
