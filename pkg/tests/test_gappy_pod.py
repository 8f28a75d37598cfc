import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gappydmap import gappy_pod, workflows
from gappydmap.errors import IllPosedError, InvalidArgument
from gappydmap.gappy_pod import IllConditionedWarning, ObservationMask


def _low_rank(N=60, d=12, r=3, seed=0):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(N, r)) @ rng.normal(size=(r, d))


def _basis_from_columns(U):
    U = np.asarray(U, dtype=float)
    d, r = U.shape
    return gappy_pod.PODBasis(U=U, singular_values=np.ones(r), rank=r, energy_captured=100.0,
                              mean=np.zeros(d), scale=np.ones(d))


def test_energy_fraction_examples():
    assert gappy_pod.energy_fraction([3.0, 1.0], 1) == 75.0
    assert gappy_pod.energy_fraction([3.0, 1.0], 1, squared=True) == 90.0
    assert gappy_pod.energy_fraction([3.0, 1.0], 2) == 100.0
    with pytest.raises(InvalidArgument):
        gappy_pod.energy_fraction([3.0, 1.0], 3)
    with pytest.raises(InvalidArgument):
        gappy_pod.energy_fraction([0.0, 0.0], 1)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=10).filter(lambda v: sum(v) > 0))
def test_cumulative_energy_monotone(values):
    s = np.sort(values)[::-1]
    E = gappy_pod.cumulative_energy(s)
    assert np.all(np.diff(E) >= -1e-12) and E[-1] == pytest.approx(100.0)


def test_reconstruction_errors_match_truncation():
    X = np.random.default_rng(1).normal(size=(20, 6))
    U, s, Vt = np.linalg.svd(X.T, full_matrices=False)
    err = gappy_pod.reconstruction_errors(s)
    for i in range(1, 7):
        approx = (U[:, :i] * s[:i]) @ Vt[:i]
        direct = 100 * np.linalg.norm(X.T - approx) / np.linalg.norm(X)
        assert err[i - 1] == pytest.approx(direct, abs=1e-10)
    assert np.all(np.diff(err) <= 1e-12)


def test_truncation_rules():
    X = _low_rank()
    b = gappy_pod.pod_fit(X, rank=2)
    assert b.rank == 2 and b.U.shape == (12, 2)
    assert np.allclose(b.U.T @ b.U, np.eye(2), atol=1e-12)
    b = gappy_pod.pod_fit(X, energy_percent=100.0)
    assert b.rank == 3
    E = gappy_pod.cumulative_energy(b.singular_values)
    b = gappy_pod.pod_fit(X, energy_percent=E[1])
    assert b.rank == 2 and b.energy_captured == pytest.approx(E[1])
    b = gappy_pod.pod_fit(X, reconstruction_error_percent=1e-6)
    assert b.rank == 3
    with pytest.raises(InvalidArgument):
        gappy_pod.pod_fit(X)
    with pytest.raises(InvalidArgument):
        gappy_pod.pod_fit(X, rank=2, energy_percent=90.0)
    with pytest.raises(InvalidArgument):
        gappy_pod.pod_fit(X, rank=13)
    with pytest.raises(InvalidArgument):
        gappy_pod.pod_fit(np.zeros((4, 3)), rank=1)


def test_unreachable_energy_falls_back_to_numerical_rank():
    X = _low_rank(r=2)
    with pytest.warns(UserWarning, match="numerical rank 2"):
        b = gappy_pod.pod_fit(X, reconstruction_error_percent=1e-20)
    assert b.rank == 2


def test_centered_and_standardized_project():
    X = _low_rank() + 4.0
    for kwargs in ({"center": True}, {"standardize": True}):
        b = gappy_pod.pod_fit(X, rank=3, **kwargs)
        assert b.centered
        assert np.allclose(b.project(X), X, atol=1e-9)


def test_full_mask_is_exact():
    X = _low_rank()
    b = gappy_pod.pod_fit(X, energy_percent=100.0)
    mask = ObservationMask(range(12), 12)
    res = gappy_pod.gappy_reconstruct(b, mask, X[5])
    assert np.allclose(res.x_rec, X[5], atol=1e-10)
    assert res.condition_number == pytest.approx(1.0)
    assert res.residual_on_known < 1e-10


def test_hand_example_two_columns():
    b = _basis_from_columns([[1, 0], [0, 1], [0, 0]])
    res = gappy_pod.gappy_reconstruct(b, ObservationMask((0, 1), 3), [5.0, 7.0, 123.0])
    assert np.allclose(res.x_rec, [5.0, 7.0, 0.0], atol=1e-14)
    res = gappy_pod.gappy_reconstruct(b, ObservationMask((0, 1), 3), [5.0, 7.0])
    assert np.allclose(res.x_rec, [5.0, 7.0, 0.0], atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000), st.floats(-1e3, 1e3))
def test_unknown_entries_never_read(seed, junk):
    X = _low_rank(seed=seed)
    b = gappy_pod.pod_fit(X, rank=3)
    mask = ObservationMask((0, 3, 5, 8), 12)
    x = X[0].copy()
    y = x.copy()
    y[[1, 2, 4]] = junk
    a = gappy_pod.gappy_reconstruct(b, mask, x).x_rec
    c = gappy_pod.gappy_reconstruct(b, mask, y).x_rec
    assert np.array_equal(a, c)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000))
def test_in_span_vector_recovered(seed):
    rng = np.random.default_rng(seed)
    b = gappy_pod.pod_fit(_low_rank(seed=seed), rank=3)
    x = b.U @ rng.normal(size=3)
    mask = ObservationMask(rng.choice(12, 5, replace=False), 12)
    cond = gappy_pod.mask_diagnostics(b, mask)
    if cond < 1e6:
        res = gappy_pod.gappy_reconstruct(b, mask, x)
        assert np.allclose(res.x_rec, x, atol=1e-8 * max(1.0, cond) * np.abs(x).max())


def test_condition_number_matches_normal_matrix():
    b = gappy_pod.pod_fit(_low_rank(), rank=3)
    mask = ObservationMask((1, 4, 6, 9, 11), 12)
    M = np.diag(mask.vector) @ b.U
    assert gappy_pod.mask_diagnostics(b, mask) == pytest.approx(np.linalg.cond(M.T @ M), rel=1e-8)


def test_too_few_known_entries_warns():
    b = gappy_pod.pod_fit(_low_rank(), rank=3)
    mask = ObservationMask((0, 1), 12)
    assert gappy_pod.mask_diagnostics(b, mask) == float("inf")
    with pytest.warns(IllConditionedWarning):
        res = gappy_pod.gappy_reconstruct(b, mask, np.ones(12))
    assert np.all(np.isfinite(res.x_rec))


def test_zero_masked_rows_raise():
    b = _basis_from_columns([[1, 0], [0, 1], [0, 0]])
    with pytest.raises(IllPosedError):
        gappy_pod.gappy_reconstruct(b, ObservationMask((2,), 3), [0.0, 0.0, 1.0])


def test_mask_validation():
    assert ObservationMask((3, 1), 5).known_indices == (1, 3)
    assert ObservationMask((3, 1), 5).vector.tolist() == [0, 1, 0, 1, 0]
    for bad in ((), (1, 1), (5,), (-1,)):
        with pytest.raises(InvalidArgument):
            ObservationMask(bad, 5)
    b = gappy_pod.pod_fit(_low_rank(), rank=3)
    with pytest.raises(InvalidArgument):
        gappy_pod.mask_diagnostics(b, ObservationMask((0,), 4))
    with pytest.raises(InvalidArgument):
        gappy_pod.gappy_reconstruct(b, ObservationMask((0, 1, 2), 12), np.ones(5))


def test_parameter_like_mask_is_worse_conditioned(surrogate_data):
    # a rank-3 basis of [X | P]: observing only the parameter columns is far
    # worse than observing a spread of three state entries
    X, P = surrogate_data
    Z = np.hstack([X, P])
    d = Z.shape[1]
    b = gappy_pod.pod_fit(Z, rank=3)
    param_mask = ObservationMask(range(d - 3, d), d)
    spread = ObservationMask(workflows.k_center_mask(X, 3).known_indices, d)
    ratio = gappy_pod.mask_diagnostics(b, param_mask) / gappy_pod.mask_diagnostics(b, spread)
    assert ratio >= 1e3
