"""Generative models of a dataset's normal class and the four synthetic anomaly types.

Normal data are modelled by a Gaussian mixture fitted with EM (number of
components chosen by BIC unless given). Anomalies are produced by

* ``local``: the same mixture with every covariance inflated by ``alpha``;
* ``global``: per-feature uniform draws from the ``alpha``-scaled feature range;
* ``dependency``: per-feature KDE marginals sampled independently, while the
  matching normals couple the same marginals through a Gaussian copula;
* ``clustered``: the same mixture with every mean scaled by ``alpha``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp, ndtr
from scipy.stats import kendalltau

from .cluster import kmeans_pp, sq_dists
from .core import as_labels, as_matrix, derive_seed
from .errors import TooFewSamples

ANOMALY_TYPES = ("local", "global", "dependency", "clustered")
DEFAULT_ALPHA = {"local": 5.0, "global": 1.1, "dependency": 1.0, "clustered": 5.0}


class NonConvergence(UserWarning):
    """EM hit its iteration cap; the best model found so far is returned."""


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    log_likelihood: float = float("nan")
    converged: bool = True
    n_iter: int = 0
    ll_history: tuple = field(default=(), repr=False)

    @property
    def n_components(self) -> int:
        return len(self.weights)

    @property
    def n_features(self) -> int:
        return self.means.shape[1]

    def n_parameters(self) -> int:
        k, d = self.means.shape
        return (k - 1) + k * d + k * d * (d + 1) // 2

    def mixture_mean(self) -> np.ndarray:
        return self.weights @ self.means

    def scaled(self, cov_scale: float = 1.0, mean_scale: float = 1.0) -> "GmmModel":
        return replace(self, means=self.means * mean_scale,
                       covariances=self.covariances * cov_scale)


def _log_gauss(X, means, covs):
    k, d = means.shape
    L = np.linalg.cholesky(covs)
    L_inv = np.linalg.inv(L)
    # one GEMM for all components: z_k = L_k^{-1} x - L_k^{-1} mu_k
    W = L_inv.transpose(2, 0, 1).reshape(d, k * d)
    offset = np.einsum("kij,kj->ki", L_inv, means).reshape(k * d)
    z = (X @ W - offset).reshape(len(X), k, d)
    log_det = np.log(np.diagonal(L, axis1=1, axis2=2)).sum(1)
    return -0.5 * (z * z).sum(2) - log_det - 0.5 * d * math.log(2 * math.pi)


def _m_step(X, outer, resp, reg):
    d = X.shape[1]
    nk = resp.sum(0) + 10 * np.finfo(float).eps
    means = (resp.T @ X) / nk[:, None]
    # second moments of all components in one GEMM; outer holds x x^T per row
    second = (resp.T @ outer).reshape(-1, d, d) / nk[:, None, None]
    covs = second - means[:, :, None] * means[:, None, :]
    covs = 0.5 * (covs + covs.transpose(0, 2, 1)) + reg * np.eye(d)
    return nk / nk.sum(), means, covs


def _em_once(X, k, rng, reg, max_iter, tol):
    centers = kmeans_pp(X, k, rng)
    hard = sq_dists(X, centers).argmin(1)
    resp = np.zeros((len(X), k))
    resp[np.arange(len(X)), hard] = 1.0
    outer = (X[:, :, None] * X[:, None, :]).reshape(len(X), -1)
    weights, means, covs = _m_step(X, outer, resp, reg)
    history = []
    converged = False
    for _ in range(max_iter):
        log_joint = _log_gauss(X, means, covs) + np.log(weights)
        log_norm = logsumexp(log_joint, axis=1)
        ll = float(log_norm.mean())
        history.append(ll)
        if len(history) > 1 and abs(history[-1] - history[-2]) < tol:
            converged = True
            break
        resp = np.exp(log_joint - log_norm[:, None])
        weights, means, covs = _m_step(X, outer, resp, reg)
    return GmmModel(weights, means, covs, ll * len(X), converged, len(history), tuple(history))


def fit_gmm_k(X, k: int, seed: int = 0, n_init: int = 5, max_iter: int = 200,
              tol: float = 1e-6) -> GmmModel:
    """EM fit of a ``k``-component full-covariance mixture, best of ``n_init`` starts."""
    X = as_matrix(X, "X_normal")
    if len(X) < 2 * k:
        raise TooFewSamples(f"{k}-component mixture needs at least {2 * k} rows, got {len(X)}")
    max_var = float(X.var(axis=0).max())
    reg = 1e-6 * (max_var if max_var > 0 else 1.0)
    rng = np.random.default_rng(seed)
    center = X.mean(axis=0)
    best = None
    for _ in range(n_init):
        model = _em_once(X - center, k, rng, reg, max_iter, tol)
        if best is None or model.log_likelihood > best.log_likelihood:
            best = model
    best = replace(best, means=best.means + center)
    if not best.converged:
        warnings.warn(f"EM did not converge in {max_iter} iterations (k={k})", NonConvergence,
                      stacklevel=2)
    return best


def bic(model: GmmModel, n: int) -> float:
    return -2.0 * model.log_likelihood + model.n_parameters() * math.log(n)


def fit_gmm(X_normal, k="auto", seed: int = 0, patience: int | None = 2,
            **em_kwargs) -> GmmModel:
    """Fit the normal-class mixture; ``k="auto"`` picks 1..min(10, n // 20) by lowest BIC.

    The search stops early once BIC has failed to improve for ``patience``
    consecutive component counts; ``patience=None`` scans the whole range.
    """
    X = as_matrix(X_normal, "X_normal")
    if k != "auto":
        return fit_gmm_k(X, int(k), seed, **em_kwargs)
    n = len(X)
    if n < 2:
        raise TooFewSamples("mixture fitting needs at least 2 rows")
    k_max = max(1, min(10, n // 20))
    best, best_bic, worse = None, math.inf, 0
    for kk in range(1, k_max + 1):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonConvergence)
            model = fit_gmm_k(X, kk, derive_seed(seed, [kk]), **em_kwargs)
        b = bic(model, n)
        if b < best_bic:
            best, best_bic, worse = model, b, 0
        else:
            worse += 1
            if patience is not None and worse >= patience:
                break
    if not best.converged:
        warnings.warn(f"EM did not converge for the selected k={best.n_components}",
                      NonConvergence, stacklevel=2)
    return best


def sample_gmm(model: GmmModel, n: int, seed: int = 0) -> np.ndarray:
    """Draw ``n`` i.i.d. rows from the mixture."""
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    comp = rng.choice(model.n_components, size=n, p=model.weights)
    z = rng.standard_normal((n, model.n_features))
    out = np.empty((n, model.n_features))
    for j in range(model.n_components):
        rows = comp == j
        L = np.linalg.cholesky(model.covariances[j])
        out[rows] = model.means[j] + z[rows] @ L.T
    return out


def gen_local(model: GmmModel, n_anomaly: int, alpha: float = 5.0, seed: int = 0) -> np.ndarray:
    """Mixture samples with every component covariance multiplied by ``alpha``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return sample_gmm(model.scaled(cov_scale=alpha), n_anomaly, seed)


def gen_clustered(model: GmmModel, n_anomaly: int, alpha: float = 5.0, seed: int = 0) -> np.ndarray:
    """Mixture samples with every component mean multiplied by ``alpha``."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return sample_gmm(model.scaled(mean_scale=alpha), n_anomaly, seed)


def global_bounds(X_normal, alpha: float = 1.1) -> tuple[np.ndarray, np.ndarray]:
    X = as_matrix(X_normal, "X_normal")
    a, b = alpha * X.min(0), alpha * X.max(0)
    return np.minimum(a, b), np.maximum(a, b)


def gen_global(X_normal, n_anomaly: int, alpha: float = 1.1, seed: int = 0) -> np.ndarray:
    """Uniform draws inside ``[alpha * min, alpha * max]`` of each feature (endpoints ordered)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    lo, hi = global_bounds(X_normal, alpha)
    rng = np.random.default_rng(seed)
    u = rng.random((n_anomaly, len(lo)))
    return np.clip(lo + (hi - lo) * u, lo, hi)


@dataclass(frozen=True)
class MarginalKde:
    """Gaussian KDE per feature with a Silverman bandwidth."""

    data: np.ndarray
    bandwidth: np.ndarray

    @classmethod
    def fit(cls, X) -> "MarginalKde":
        X = as_matrix(X)
        n = len(X)
        std = X.std(axis=0, ddof=1) if n > 1 else np.zeros(X.shape[1])
        q75, q25 = np.percentile(X, [75, 25], axis=0)
        spread = np.where(q75 > q25, np.minimum(std, (q75 - q25) / 1.34), std)
        h = 0.9 * spread * n ** (-0.2)
        h = np.maximum(h, 1e-6 * (std + 1e-12))
        return cls(np.sort(X, axis=0), h)

    def cdf(self, j: int, x: np.ndarray) -> np.ndarray:
        col, h = self.data[:, j], self.bandwidth[j]
        out = np.empty(len(x))
        for start in range(0, len(x), 256):
            out[start:start + 256] = ndtr((x[start:start + 256, None] - col[None, :]) / h).mean(1)
        return out

    def quantile(self, j: int, u: np.ndarray, grid_size: int = 2048) -> np.ndarray:
        """Inverse CDF by monotone interpolation on a grid spanning the data +/- 6 bandwidths."""
        col, h = self.data[:, j], self.bandwidth[j]
        grid = np.linspace(col[0] - 6 * h, col[-1] + 6 * h, grid_size)
        F = np.maximum.accumulate(self.cdf(j, grid))
        F[0], F[-1] = 0.0, 1.0
        keep = np.concatenate([[True], np.diff(F) > 0])
        return np.interp(u, F[keep], grid[keep])

    def sample(self, U: np.ndarray) -> np.ndarray:
        return np.column_stack([self.quantile(j, U[:, j]) for j in range(U.shape[1])])


@dataclass(frozen=True)
class CopulaModel:
    """Gaussian copula: correlation from Kendall's tau via ``sin(pi * tau / 2)``."""

    correlation: np.ndarray

    @classmethod
    def fit(cls, X) -> "CopulaModel":
        X = as_matrix(X)
        d = X.shape[1]
        R = np.eye(d)
        for a in range(d):
            for b in range(a + 1, d):
                tau = kendalltau(X[:, a], X[:, b]).statistic
                R[a, b] = R[b, a] = math.sin(math.pi * (0.0 if np.isnan(tau) else tau) / 2)
        return cls(nearest_correlation(R))

    def sample_uniform(self, n: int, rng: np.random.Generator) -> np.ndarray:
        evals, evecs = np.linalg.eigh(self.correlation)
        root = evecs * np.sqrt(np.clip(evals, 0.0, None))
        Z = rng.standard_normal((n, len(evals))) @ root.T
        return ndtr(Z)


def nearest_correlation(R: np.ndarray) -> np.ndarray:
    """Clip negative eigenvalues and rescale to a unit diagonal."""
    evals, evecs = np.linalg.eigh(0.5 * (R + R.T))
    P = (evecs * np.clip(evals, 0.0, None)) @ evecs.T
    s = np.sqrt(np.clip(np.diag(P), 1e-300, None))
    P = P / np.outer(s, s)
    P = 0.5 * (P + P.T)
    np.fill_diagonal(P, 1.0)
    return P


def gen_dependency(X_normal, n_normal: int, n_anomaly: int, seed: int = 0):
    """Normals with the fitted dependence kept, anomalies with it removed.

    Both share the same KDE marginals; normals feed them copula-coupled
    uniforms, anomalies feed them independent uniforms.
    """
    X = as_matrix(X_normal, "X_normal")
    if len(X) < 10:
        raise TooFewSamples(f"dependency generation needs >= 10 normal rows, got {len(X)}")
    kde = MarginalKde.fit(X)
    copula = CopulaModel.fit(X)
    rng = np.random.default_rng(seed)
    normals = kde.sample(copula.sample_uniform(n_normal, rng)) if n_normal > 0 else np.empty((0, X.shape[1]))
    anomalies = kde.sample(rng.random((n_anomaly, X.shape[1])))
    return normals, anomalies


@dataclass(frozen=True)
class SynthParams:
    anomaly_type: str
    alpha: float | None = None
    n_normal: int | None = None
    n_anomaly: int | None = None
    seed: int = 0
    gmm_components: int | str = "auto"

    def __post_init__(self):
        if self.anomaly_type not in ANOMALY_TYPES:
            raise ValueError(f"anomaly type must be one of {ANOMALY_TYPES}, got {self.anomaly_type!r}")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        for name in ("n_normal", "n_anomaly"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1, got {v}")

    @property
    def effective_alpha(self) -> float:
        return DEFAULT_ALPHA[self.anomaly_type] if self.alpha is None else float(self.alpha)


def fit_normal_model(X, y, seed: int = 0, k="auto") -> GmmModel:
    """Mixture fitted on the normal rows of a labelled dataset."""
    X_normal = as_matrix(X)[as_labels(y) == 0]
    if len(X_normal) < 10:
        raise TooFewSamples(f"synthetic generation needs >= 10 normal rows, got {len(X_normal)}")
    return fit_gmm(X_normal, k, seed)


def assemble_synthetic(X, y, params: SynthParams, model: GmmModel | None = None):
    """Replace a dataset by generated normals plus anomalies of one type.

    Only the normal rows of the seed dataset are used; counts default to the
    seed dataset's own class counts. Output rows are shuffled. ``model`` may
    supply a mixture already fitted on those normal rows, so repeated draws
    skip refitting.
    """
    X = as_matrix(X)
    y = as_labels(y)
    X_normal = X[y == 0]
    if len(X_normal) < 10:
        raise TooFewSamples(f"synthetic generation needs >= 10 normal rows, got {len(X_normal)}")
    n_normal = params.n_normal if params.n_normal is not None else len(X_normal)
    n_anom = params.n_anomaly if params.n_anomaly is not None else max(1, int(y.sum()))
    alpha = params.effective_alpha
    seeds = [derive_seed(params.seed, [i]) for i in range(4)]
    kind = params.anomaly_type
    if kind == "dependency":
        normals, anomalies = gen_dependency(X_normal, n_normal, n_anom, seeds[1])
    else:
        if model is None:
            model = fit_gmm(X_normal, params.gmm_components, seeds[0])
        normals = sample_gmm(model, n_normal, seeds[1])
        if kind == "local":
            anomalies = gen_local(model, n_anom, alpha, seeds[2])
        elif kind == "clustered":
            anomalies = gen_clustered(model, n_anom, alpha, seeds[2])
        else:
            anomalies = gen_global(X_normal, n_anom, alpha, seeds[2])
    Xo = np.vstack([normals, anomalies])
    yo = np.concatenate([np.zeros(len(normals), np.int64), np.ones(len(anomalies), np.int64)])
    order = np.random.default_rng(seeds[3]).permutation(len(yo))
    return Xo[order], yo[order]
