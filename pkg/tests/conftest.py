import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def two_blobs(n=400, d=2, anomaly_frac=0.05, shift=6.0, seed=0):
    """Gaussian normals around the origin plus a shifted anomaly blob."""
    r = np.random.default_rng(seed)
    n_anom = max(2, int(round(n * anomaly_frac)))
    X = np.vstack([r.normal(size=(n - n_anom, d)), r.normal(shift, 0.5, size=(n_anom, d))])
    y = np.r_[np.zeros(n - n_anom, int), np.ones(n_anom, int)]
    perm = r.permutation(n)
    return X[perm], y[perm]


def scattered(n=300, d=3, anomaly_frac=0.05, radius=8.0, seed=0):
    """Gaussian normals plus anomalies spread on a sphere of the given radius."""
    r = np.random.default_rng(seed)
    n_anom = max(2, int(round(n * anomaly_frac)))
    u = r.normal(size=(n_anom, d))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    X = np.vstack([r.normal(size=(n - n_anom, d)), radius * u])
    y = np.r_[np.zeros(n - n_anom, int), np.ones(n_anom, int)]
    perm = r.permutation(n)
    return X[perm], y[perm]


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for key in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[key])
