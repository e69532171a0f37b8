import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from anobench.detectors import (
    DETECTORS,
    LABEL_INFORMED,
    UNSUPERVISED,
    average_path_length,
    cblof_score,
    copod_score,
    ecod_score,
    gnb_fit_predict,
    hbos_score,
    iforest_score,
    kneighbors,
    knn_score,
    loda_score,
    lof_score,
    make_detector,
    pca_fit_score,
    rforest_fit_predict,
    scorestack_fit_predict,
)
from anobench.detectors.cblof import large_cluster_count
from anobench.detectors.histogram import loda_bin_count
from anobench.detectors.neighbors import brute_kneighbors
from anobench.errors import (
    ConfigError,
    DegenerateData,
    DimMismatch,
    KTooLarge,
    SingleClassTraining,
    UnknownParameter,
)
from anobench.evaluation import aucroc

from conftest import scattered, two_blobs

ALL = sorted(DETECTORS)


def fit_any(name, X, y, seed=0, **params):
    det = make_detector(name, **params)
    if det.label_informed:
        return det.fit(X, y, y == 1, seed=seed)
    return det.fit(X, seed=seed)


# common contract

def test_roster_names():
    assert set(ALL) == {"pca", "knn", "lof", "cblof", "hbos", "ecod", "copod", "iforest", "loda",
                        "gnb", "rforest", "scorestack"}
    assert set(LABEL_INFORMED) == {"gnb", "rforest", "scorestack"}
    assert set(UNSUPERVISED) | set(LABEL_INFORMED) == set(ALL)


def test_unknown_detector_and_parameter():
    with pytest.raises(ConfigError):
        make_detector("deep_svdd")
    with pytest.raises(UnknownParameter):
        make_detector("knn", neighbours=3)


@pytest.mark.parametrize("name,params", [("knn", {"k": 0}), ("pca", {"variance_kept": 0.0}),
                                         ("hbos", {"n_bins": 0}), ("iforest", {"n_trees": 0}),
                                         ("loda", {"n_projections": 0})])
def test_parameter_domains(name, params):
    with pytest.raises((ValueError, ConfigError)):
        make_detector(name, **params)


@pytest.mark.parametrize("name", ALL)
def test_contract_finite_deterministic_dims(name):
    X, y = two_blobs(n=240, d=3, anomaly_frac=0.1, seed=1)
    Xq = np.vstack([X[:50], [[40.0, -40.0, 40.0]]])
    s1 = fit_any(name, X, y, seed=5).score(Xq)
    s2 = fit_any(name, X, y, seed=5).score(Xq)
    assert s1.shape == (51,) and np.all(np.isfinite(s1))
    assert np.array_equal(s1, s2)
    with pytest.raises(DimMismatch):
        fit_any(name, X, y).score(np.zeros((3, 2)))


@pytest.mark.parametrize("name", ALL)
def test_separable_fixture_detected(name):
    X, y = scattered(n=300, d=3, anomaly_frac=0.05, radius=8.0, seed=2)
    assert aucroc(fit_any(name, X, y, seed=0).score(X), y) > 0.9


def test_score_before_fit():
    with pytest.raises(Exception):
        make_detector("knn").score(np.zeros((2, 2)))


@pytest.mark.parametrize("name", ["knn", "lof", "cblof", "iforest", "hbos", "ecod", "copod"])
def test_column_permutation_equivariance(name):
    r = np.random.default_rng(3)
    X = r.normal(size=(150, 4)) * [1, 2, 3, 4]
    Xq = r.normal(size=(30, 4)) * 3
    perm = [2, 0, 3, 1]
    a = fit_any(name, X, None, seed=7).score(Xq)
    b = fit_any(name, X[:, perm], None, seed=7).score(Xq[:, perm])
    if name == "iforest":
        # random feature choice is reseeded under permutation; compare rankings loosely
        assert np.corrcoef(a, b)[0, 1] > 0.8
    else:
        assert np.allclose(a, b, rtol=1e-9, atol=1e-9)


# neighbours

@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6), st.integers(1, 8))
def test_kdtree_matches_brute(seed, d, k):
    r = np.random.default_rng(seed)
    train, X = r.normal(size=(60, d)), r.normal(size=(25, d))
    db, _ = brute_kneighbors(train, X, k)
    dt, _ = kneighbors(train, X, k, method="kdtree")
    assert np.allclose(db, dt, atol=1e-10)


def test_knn_examples():
    train = np.array([[0.0], [1.0], [2.0]])
    assert knn_score(train, [[10.0]], k=1).tolist() == [8.0]
    assert knn_score(train, [[1.0]], k=1).tolist() == [0.0]
    with pytest.raises(KTooLarge):
        knn_score(train, [[0.0]], k=4)


def test_lof_grid():
    g = np.array([[i, j] for i in range(5) for j in range(5)], float)
    s = lof_score(g, g, k=4)
    assert np.all((s >= 0.8) & (s <= 1.3))


def test_lof_far_point():
    r = np.random.default_rng(0)
    X = np.vstack([r.normal(0, 0.1, size=(50, 2)), [[100.0, 0.0]]])
    s = lof_score(X, X, k=10)
    assert s[-1] > s[:-1].max()


def test_lof_identical_points():
    X = np.ones((30, 2))
    assert np.all(lof_score(X, X, k=5) == 1.0)


def test_lof_k_too_large():
    with pytest.raises(KTooLarge):
        lof_score(np.zeros((5, 1)) + np.arange(5)[:, None], np.zeros((1, 1)), k=5)


def test_lof_matches_sklearn_on_tie_free_data():
    sk = pytest.importorskip("sklearn.neighbors")
    r = np.random.default_rng(4)
    X = np.vstack([r.normal(size=(200, 3)), r.normal(4, 1, size=(10, 3))])
    Xq = r.normal(size=(40, 3)) * 2
    ref = sk.LocalOutlierFactor(n_neighbors=20, novelty=True).fit(X)
    ours = lof_score(X, Xq, k=20)
    assert np.allclose(ours, -ref.score_samples(Xq), rtol=1e-6)


# PCA

def test_pca_line_examples():
    t = np.linspace(-5, 5, 21)
    train = np.column_stack([t, t])
    on_line = pca_fit_score(train, [[2.0, 2.0]])
    off = pca_fit_score(train, [[1.0 / np.sqrt(2), -1.0 / np.sqrt(2)]])
    assert on_line[0] == pytest.approx(0.0, abs=1e-12)
    assert off[0] == pytest.approx(1.0, abs=1e-12)


def test_pca_full_variance_zero_on_train():
    r = np.random.default_rng(0)
    X = r.normal(size=(30, 4))
    assert np.allclose(pca_fit_score(X, X, variance_kept=1.0), 0.0, atol=1e-20)


def test_pca_degenerate():
    with pytest.raises(DegenerateData):
        pca_fit_score(np.ones((10, 3)), np.ones((2, 3)))


# CBLOF

def test_large_cluster_count():
    assert large_cluster_count([50, 45, 3, 2], 0.9, 5) == 2
    assert large_cluster_count([100], 0.9, 5) == 1


def test_cblof_examples():
    r = np.random.default_rng(0)
    X = np.vstack([r.normal(0, 0.5, size=(100, 2)), r.normal(20, 0.5, size=(100, 2))])
    det = make_detector("cblof", n_clusters=2).fit(X, seed=0)
    c = det.large_centers_[np.argmin(np.linalg.norm(det.large_centers_, axis=1))]
    assert det.score(c[None])[0] == pytest.approx(0.0, abs=1e-9)
    far = c + np.array([-50.0 / np.sqrt(2), -50.0 / np.sqrt(2)])
    assert det.score(far[None])[0] == pytest.approx(50.0, abs=1.0)
    with pytest.raises(KTooLarge):
        cblof_score(X[:5], X, n_clusters=6)


# histograms

def test_hbos_single_bin_and_constant():
    r = np.random.default_rng(0)
    X = r.uniform(size=(100, 3))
    assert np.allclose(hbos_score(X, X, n_bins=1), 0.0)
    Xc = np.column_stack([X, np.full(100, 7.0)])
    assert np.allclose(hbos_score(Xc, Xc), hbos_score(X, X))


def test_hbos_sparse_tail():
    train = np.r_[np.arange(100.0), np.full(200, 50.0)][:, None]
    s = hbos_score(train, [[200.0], [50.0]])
    assert s[0] > s[1]


def test_loda_bins_and_examples():
    assert loda_bin_count(25) == 10 and loda_bin_count(2500) == 50 and loda_bin_count(10 ** 6) == 100
    r = np.random.default_rng(0)
    for seed in range(20):
        X = np.vstack([r.normal(size=(200, 3)), [[15.0, 15.0, 15.0]]])
        s = loda_score(X, X, seed=seed)
        assert s[-1] > np.median(s[:-1])
    assert np.array_equal(loda_score(X, X, seed=3), loda_score(X, X, seed=3))


def test_loda_one_projection_1d_matches_hbos_ranking():
    from scipy.stats import spearmanr

    r = np.random.default_rng(1)
    X = r.normal(size=(400, 1))
    n_bins = loda_bin_count(400)
    a = loda_score(X, X, n_projections=1, seed=0)
    b = hbos_score(X, X, n_bins=n_bins)
    assert spearmanr(a, b).statistic >= 0.95


# ECOD / COPOD

def test_ecod_examples():
    t = np.array([-2.0, -1, 0, 1, 2])[:, None]
    s = ecod_score(t, [[0.0], [2.0]])
    assert s[0] <= s[1]
    t10 = np.arange(1.0, 11.0)[:, None]
    assert ecod_score(t10, [[10.0]])[0] == pytest.approx(np.log(10), abs=1e-12)


@pytest.mark.parametrize("fn", [ecod_score, copod_score])
def test_tail_monotone_invariance(fn):
    r = np.random.default_rng(0)
    X, Xq = r.normal(size=(80, 3)), r.normal(size=(20, 3)) * 2
    a = fn(X, Xq)
    b = fn(X ** 3, Xq ** 3)
    assert np.array_equal(a, b)


def test_copod_examples():
    r = np.random.default_rng(2)
    for _ in range(10):
        x = r.normal(size=(60, 1)) ** 3
        lo, hi = np.argmin(x[:, 0]), np.argmax(x[:, 0])
        e, c = ecod_score(x, x), copod_score(x, x)
        assert (e[lo] < e[hi]) == (c[lo] < c[hi])
    t = np.array([-2.0, -1, 0, 1, 2])[:, None]
    s = copod_score(t, t)
    assert np.argmin(s) == 2
    const = np.column_stack([r.normal(size=30), np.full(30, 3.0)])
    d = copod_score(const, const) - copod_score(const[:, :1], const[:, :1])
    assert np.allclose(d, d[0])


# IForest

def test_average_path_length():
    assert average_path_length(2) == 1.0
    assert average_path_length(1) == 0.0
    m = 256
    H = np.sum(1.0 / np.arange(1, m))
    assert average_path_length(m) == pytest.approx(2 * H - 2 * (m - 1) / m, rel=1e-3)


def test_iforest_far_point_and_range():
    r = np.random.default_rng(0)
    X = r.normal(size=(300, 2))
    diffs = []
    for seed in range(200):
        s = iforest_score(X, [[0.0, 0.0], [10.0, 0.0]], n_trees=10, seed=seed)
        assert np.all((s > 0) & (s <= 1))
        diffs.append(s[1] - s[0])
    assert np.mean(diffs) > 0.05


# label-informed

def test_gnb_examples():
    X = np.r_[np.linspace(-3, 1, 41), np.linspace(-1, 3, 41)][:, None]
    y = np.r_[np.zeros(41, int), np.ones(41, int)]
    s = gnb_fit_predict(X, y, [[0.0], [50.0]])
    assert s[0] == pytest.approx(0.5, abs=1e-9)
    assert s[1] == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(SingleClassTraining):
        gnb_fit_predict(X, np.zeros(82, int), X)


def test_rforest_examples():
    X, y = two_blobs(n=200, d=2, anomaly_frac=0.1, shift=8.0, seed=0)
    assert aucroc(rforest_fit_predict(X, y, X, seed=1), y) == 1.0
    single = rforest_fit_predict(X, y, X, n_trees=1, seed=2)
    assert set(np.unique(single)) <= {0.0, 1.0}
    assert np.array_equal(rforest_fit_predict(X, y, X, seed=3), rforest_fit_predict(X, y, X, seed=3))
    with pytest.raises(SingleClassTraining):
        rforest_fit_predict(X, np.zeros(200, int), X)


def test_gnb_separable_train_auc():
    X, y = two_blobs(n=200, d=2, anomaly_frac=0.1, shift=10.0, seed=1)
    assert aucroc(gnb_fit_predict(X, y, X), y) == 1.0


def test_scorestack_reductions():
    X, y = two_blobs(n=200, d=3, anomaly_frac=0.1, shift=4.0, seed=4)
    Xq, _ = two_blobs(n=100, d=3, anomaly_frac=0.1, shift=4.0, seed=5)
    empty = scorestack_fit_predict(X, y, np.zeros(200, bool) | (y == 1), Xq, roster=(), n_trees=20, seed=9)
    rf = rforest_fit_predict(X, y, Xq, n_trees=20, seed=9)
    assert np.array_equal(empty, rf)
    with pytest.raises(SingleClassTraining):
        scorestack_fit_predict(X, y, np.zeros(200, bool), Xq, n_trees=5)


def test_scorestack_unlabeled_treated_as_normal():
    X, y = two_blobs(n=200, d=3, anomaly_frac=0.1, shift=4.0, seed=6)
    mask = y == 1
    mask[np.flatnonzero(mask)[1:]] = False
    det = make_detector("scorestack", n_trees=10).fit(X, y, mask, seed=0)
    manual = make_detector("scorestack", n_trees=10).fit(X, mask.astype(int), mask, seed=0)
    assert np.array_equal(det.score(X), manual.score(X))


def test_scorestack_beats_raw_forest_at_low_supervision():
    from anobench.evaluation import stratified_split, subsample_labels

    wins = 0
    for seed in range(20):
        X, y = two_blobs(n=300, d=4, anomaly_frac=0.1, shift=3.0, seed=100 + seed)
        s = stratified_split(X, y, 0.7, seed)
        m = subsample_labels(s.y_train, 0.1, seed)
        a = aucroc(scorestack_fit_predict(s.X_train, s.y_train, m, s.X_test, n_trees=30, seed=seed), s.y_test)
        b = aucroc(rforest_fit_predict(s.X_train, m.astype(int), s.X_test, n_trees=30, seed=seed), s.y_test)
        wins += a >= b
    assert wins > 10


def test_skew_signs_match_scipy(rng):
    from scipy.stats import skew

    from anobench.detectors.ecdf import skew_signs

    X = np.column_stack([rng.exponential(size=200), -rng.exponential(size=200), np.full(200, 3.0)])
    assert np.array_equal(skew_signs(X), [1.0, -1.0, 0.0])
    Y = rng.normal(size=(50, 6)) ** 3
    assert np.array_equal(skew_signs(Y), np.sign(skew(Y, axis=0)))
