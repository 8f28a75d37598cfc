"""The eight acceptance criteria, each at its stated tolerance and runtime.

Every test builds its own data so the measured runtime covers the whole
computation. A PASS/FAIL line per criterion is printed in the terminal
summary (see conftest.py).
"""

import math
import warnings

import numpy as np
import pytest
from scipy.stats import pearsonr, spearmanr

from gappydmap import cli, datagen, dmaps, gappy_pod, harmonics, kernel, parsimony, persist, workflows
from gappydmap.kernel import KernelConfig

from conftest import Stopwatch


def _surrogate():
    P = datagen.cvd_parameter_grid(720)
    return datagen.generate_surrogate_cvd(P, 200, 1).data, P.params


def _slow():
    X, P = datagen.generate_slow_manifold(0.01, 1000, 0, return_params=True)
    return X.data, P.params


def _split(X, P):
    train, test = workflows.holdout_split(len(X), 0.1, 0)
    return X[train], P[train], X[test], P[test]


# --------------------------------------------------------------------- 1


@pytest.mark.criterion(1, "operator invariants (row sums, lambda_1, eigen-residuals, GH orthonormality)")
def test_criterion_1_operator_invariants():
    clock = Stopwatch()
    for X, _ in (_slow(), _surrogate()):
        config = KernelConfig(kernel.median_bandwidth(X))
        op = kernel.markov_operator(X, config)
        assert np.max(np.abs(op.K.sum(axis=1) - 1.0)) <= 1e-12

        model = dmaps.fit(X, config)
        assert abs(model.eigenvalues[0] - 1.0) <= 1e-10
        phi = model.eigenvectors
        resid = np.linalg.norm(op.K @ phi - phi * model.eigenvalues, axis=0) / np.linalg.norm(phi, axis=0)
        assert resid.max() <= 1e-8

        gh = harmonics.gh_fit(X, X[:, :1])
        gram = gh.psi.T @ gh.psi
        assert np.max(np.abs(gram - np.eye(gh.n_retained))) <= 1e-8
    assert clock.elapsed < 30


# --------------------------------------------------------------------- 2


def _brute_affinity(A, B, eps):
    return [[math.exp(-(math.dist(a, b) / eps) ** 2) for b in B] for a in A]


@pytest.mark.criterion(2, "small-instance oracle equivalence to brute-force arithmetic")
def test_criterion_2_small_instance_oracles():
    clock = Stopwatch()
    X = [[0.0, 0.0], [1.0, 0.2], [2.1, -0.1], [2.9, 0.4], [4.2, 0.0]]
    eps = 1.3
    N = len(X)

    # kernel and density normalization, entry by entry
    W = _brute_affinity(X, X, eps)
    p = [sum(row) for row in W]
    Wt = [[W[i][j] / (p[i] * p[j]) for j in range(N)] for i in range(N)]
    d = [sum(row) for row in Wt]
    K = [[Wt[i][j] / d[i] for j in range(N)] for i in range(N)]
    op = kernel.markov_operator(np.array(X), KernelConfig(eps))
    assert np.max(np.abs(op.W - np.array(W))) <= 1e-10
    assert np.max(np.abs(op.W_tilde - np.array(Wt))) <= 1e-10
    assert np.max(np.abs(op.K - np.array(K))) <= 1e-10

    # eigenpairs against a general (non-symmetric) eigensolve of K itself
    model = dmaps.fit(np.array(X), KernelConfig(eps), n_pairs=N)
    vals, vecs = np.linalg.eig(np.array(K))
    order = np.argsort(-vals.real)
    vals, vecs = vals.real[order], vecs.real[:, order]
    vecs = dmaps.fix_signs(vecs / np.linalg.norm(vecs, axis=0))
    assert np.max(np.abs(model.eigenvalues - vals)) <= 1e-10
    assert np.max(np.abs(model.eigenvectors - vecs)) <= 1e-10

    # Nystrom at an off-sample point, from the written-out formula
    x_new = [1.6, 0.05]
    w_new = _brute_affinity([x_new], X, eps)[0]
    p_new = sum(w_new)
    kt = [w_new[i] / (p_new * p[i]) for i in range(N)]
    kt = [v / sum(kt) for v in kt]
    expected = [sum(kt[i] * vecs[i, j] for i in range(N)) / vals[j] for j in range(N)]
    got = dmaps.nystrom_extend(model, np.array(x_new))
    assert np.max(np.abs(got - np.array(expected))) <= 1e-10

    # geometric harmonics with every mode kept is kernel interpolation:
    # E f(x) = w(x)^T W^-1 f
    f = np.array([0.3, -1.2, 2.0, 0.7, 1.1])
    gh = harmonics.gh_fit(np.array(X), f, bandwidth=eps, delta=1e-12)
    assert gh.n_retained == N
    coef = np.linalg.solve(np.array(W), f)
    expected = sum(w_new[i] * coef[i] for i in range(N))
    assert abs(harmonics.gh_extend(gh, np.array(x_new))[0] - expected) <= 1e-10

    # gappy solve against the normal equations written out
    U = np.linalg.qr(np.array([[1.0, 0.5], [0.2, 1.0], [0.7, -0.3], [0.1, 0.9], [0.4, 0.4]]))[0]
    basis = gappy_pod.PODBasis(U, np.array([2.0, 1.0]), 2, 100.0, mean=np.zeros(5), scale=np.ones(5))
    mask = gappy_pod.ObservationMask((0, 2, 4), 5)
    x = np.array([1.0, 9.9, -0.5, 9.9, 0.8])
    mU = U * mask.vector[:, None]
    A = [[sum(mU[k, a] * mU[k, b] for k in range(5)) for b in range(2)] for a in range(2)]
    rhs = [sum(mU[k, a] * x[k] * mask.vector[k] for k in range(5)) for a in range(2)]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    c = [(A[1][1] * rhs[0] - A[0][1] * rhs[1]) / det, (A[0][0] * rhs[1] - A[1][0] * rhs[0]) / det]
    res = gappy_pod.gappy_reconstruct(basis, mask, x)
    assert np.max(np.abs(res.coefficients - np.array(c))) <= 1e-10
    assert np.max(np.abs(res.x_rec - U @ np.array(c))) <= 1e-10
    assert abs(res.condition_number / np.linalg.cond(np.array(A)) - 1) <= 1e-10
    assert clock.elapsed < 1


# --------------------------------------------------------------------- 3


@pytest.mark.criterion(3, "slow manifold: one coordinate, POD needs rank >= 2, roundtrip < 1%")
def test_criterion_3_slow_manifold():
    clock = Stopwatch()
    X, P = _slow()
    model = dmaps.fit(X)
    report = parsimony.select_coordinates(parsimony.residuals(model))
    assert len(report.selected) == 1

    assert gappy_pod.pod_fit(X, reconstruction_error_percent=1.0).rank >= 2

    X_train, P_train, X_test, _ = _split(X, P)
    pipe = workflows.fit_pipeline(X_train, P_train)
    assert pipe.n_latent == 1
    rec = workflows.reconstruct_from_observation(pipe, X_test).value
    assert workflows.mean_relative_error(rec, X_test) < 1.0
    assert clock.elapsed < 60


# --------------------------------------------------------------------- 4


@pytest.mark.criterion(4, "surrogate: gap rule selects 3 coordinates, one-to-one with parameters")
def test_criterion_4_surrogate_parsimony():
    clock = Stopwatch()
    X, P = _surrogate()
    model = dmaps.fit(X)
    report = parsimony.select_coordinates(parsimony.residuals(model))
    assert len(report.selected) == 3

    coords = model.with_selection(report.selected).coordinates()
    R = np.array([[abs(pearsonr(coords[:, i], P[:, j])[0]) for j in range(3)] for i in range(3)])
    strong = R > 0.95
    assert np.all(strong.sum(axis=1) == 1)          # each coordinate tracks exactly one parameter
    assert np.all(strong.sum(axis=0) == 1)          # and no parameter is claimed twice
    assert clock.elapsed < 60


# --------------------------------------------------------------------- 5


@pytest.mark.criterion(5, "pipeline accuracy on holdout and the 2n+1 observation demonstration")
def test_criterion_5_pipeline_accuracy():
    clock = Stopwatch()
    X, P = _surrogate()
    X_train, P_train, X_test, P_test = _split(X, P)
    pipe = workflows.fit_pipeline(X_train, P_train, partial_size=7)
    assert len(pipe.partial_mask) == workflows.whitney_min_observations(pipe.n_latent) == 7

    p2o = workflows.predict_observation_from_params(pipe, P_test).value
    assert workflows.mean_relative_error(p2o, X_test) < 1.0

    o2p = workflows.predict_params_from_observation(pipe, X_test).value
    assert np.all(workflows.mean_relative_error(o2p, P_test, axis=0) < 1.0)

    idx7 = pipe.partial_mask.index
    pp7 = workflows.predict_params_from_partial(pipe, X_test[:, idx7]).value
    err7 = workflows.mean_relative_error(pp7, P_test, axis=0)
    assert np.all(err7 < 1.0)

    target = workflows.k_center_mask(X_train, 7, exclude=idx7)
    pq = workflows.predict_partial_from_partial(pipe, X_test[:, idx7], target).value
    assert workflows.mean_relative_error(pq, X_test[:, target.index]) < 1.0

    mask2 = workflows.k_center_mask(X_train, 2)
    pipe2 = workflows.with_partial_mask(pipe, mask2)
    pp2 = workflows.predict_params_from_partial(pipe2, X_test[:, mask2.index]).value
    err2 = workflows.mean_relative_error(pp2, P_test, axis=0)
    assert err2.mean() >= 5 * err7.mean()
    assert clock.elapsed < 120


# --------------------------------------------------------------------- 6


@pytest.mark.criterion(6, "gappy POD conditioning: cond(A) spread >= 1e3, Spearman(cond, error) > 0.5")
def test_criterion_6_conditioning_sweep():
    clock = Stopwatch()
    X, P = _surrogate()
    X_train, P_train, X_test, _ = _split(X, P)
    pipe = workflows.fit_pipeline(X_train, P_train)
    basis = gappy_pod.pod_fit(X_train, rank=3)
    conds, errors = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", gappy_pod.IllConditionedWarning)
        for seed in range(40):
            mask = workflows.random_mask(X.shape[1], 3, seed=seed)
            rep = workflows.compare_gappy(pipe, basis, mask, X_test)
            conds.append(rep.condition_number)
            errors.append(rep.pod_error.mean())
    conds = np.array(conds)
    assert np.all(np.isfinite(conds))
    assert conds.max() / conds.min() >= 1e3
    assert spearmanr(conds, errors)[0] > 0.5
    assert clock.elapsed < 60


# --------------------------------------------------------------------- 7


@pytest.mark.criterion(7, "equal-information comparison: gappy DMAP vs gappy POD")
def test_criterion_7_equal_information():
    clock = Stopwatch()
    X, P = _surrogate()
    X_train, P_train, X_test, _ = _split(X, P)
    pipe = workflows.fit_pipeline(X_train, P_train)
    mask = workflows.k_center_mask(X_train, 7)
    basis = gappy_pod.pod_fit(X_train, rank=pipe.n_latent)
    assert basis.rank == 3
    rep = workflows.compare_gappy(pipe, basis, mask, X_test)
    assert rep.dmap_error.mean() <= rep.pod_error.mean()

    X, P = _slow()
    X_train, P_train, X_test, _ = _split(X, P)
    pipe = workflows.fit_pipeline(X_train, P_train)
    basis = gappy_pod.pod_fit(X_train, rank=pipe.n_latent)
    assert basis.rank == 1
    rep = workflows.compare_gappy(pipe, basis, gappy_pod.ObservationMask((0,), 2), X_test)
    assert rep.pod_error.mean() >= 5 * rep.dmap_error.mean()
    assert clock.elapsed < 60


# --------------------------------------------------------------------- 8


@pytest.mark.criterion(8, "determinism and bit-exact persistence")
def test_criterion_8_determinism(tmp_path):
    clock = Stopwatch()
    data = tmp_path / "data"
    data.mkdir()
    assert cli.main(["generate", "surrogate", "--out", str(data), "--seed", "1"]) == 0
    snaps, params = str(data / "snapshots.csv"), str(data / "params.csv")

    reports = []
    for run in ("a", "b"):
        out = tmp_path / run
        out.mkdir()
        model = str(out / "model.gdm")
        assert cli.main(["fit", "--data", snaps, "--params", params, "--out", model, "--partial-size", "7"]) == 0
        for route in ("params-to-obs", "partial-to-params"):
            assert cli.main(["predict", "--model", model, "--data", snaps, "--params", params,
                             "--route", route, "--out", str(out)]) == 0
        reports.append(out)
    a, b = reports
    assert (a / "model.gdm").read_bytes() == (b / "model.gdm").read_bytes()
    csvs = sorted(p.name for p in a.glob("*.csv"))
    assert csvs
    for name in csvs:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name

    # save/load preserves every prediction route to the last bit
    X = datagen.read_array(snaps)
    P = datagen.read_array(params)
    pipe, extra = persist.load_model(a / "model.gdm", with_extra=True)
    test = np.asarray(extra["test_index"])
    again = persist.load_model(b / "model.gdm")
    path = tmp_path / "resaved.gdm"
    persist.save_model(pipe, path, extra)
    assert path.read_bytes() == (a / "model.gdm").read_bytes()
    obs = X[test][:, pipe.partial_mask.index]
    for one, two in ((pipe, again), (pipe, persist.load_model(path))):
        pairs = [
            (workflows.predict_observation_from_params(one, P[test]),
             workflows.predict_observation_from_params(two, P[test])),
            (workflows.predict_params_from_observation(one, X[test]),
             workflows.predict_params_from_observation(two, X[test])),
            (workflows.predict_params_from_partial(one, obs), workflows.predict_params_from_partial(two, obs)),
            (workflows.reconstruct_from_observation(one, X[test]),
             workflows.reconstruct_from_observation(two, X[test])),
        ]
        for u, v in pairs:
            assert np.array_equal(u.value, v.value) and np.array_equal(u.latent, v.latent)
    assert clock.elapsed < 30
