"""Per-observation Gaussian model fitting from metric-space neighborhoods.

Each observation gets its own (mean, covariance) estimate computed from the
feature vectors of its nearest neighbors in the metric space, including the
observation itself. Covariances come from either an L1-penalized sparse
inverse estimate (graphical lasso) or a shrinkage estimate, and are always
repaired to strict positive definiteness before use.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from sklearn.covariance import graphical_lasso as _sk_graphical_lasso
from sklearn.exceptions import ConvergenceWarning

from .errors import ConvergenceFailure, InsufficientSamples, InvalidInput
from .metric import MetricKind, knn_all
from .spd import REPAIR_FLOOR, check_symmetric, make_spd

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Observation:
    """A feature vector paired with a position in the metric space."""

    features: np.ndarray
    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=float))
        object.__setattr__(self, "position", np.atleast_1d(np.asarray(self.position, dtype=float)))
        if not np.all(np.isfinite(self.features)):
            raise InvalidInput("observation features must be finite")


@dataclass(frozen=True)
class FittedGaussian:
    """Estimated Gaussian model for one observation."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass(frozen=True)
class GlassoEstimator:
    """Sparse inverse covariance via L1-penalized log-det (graphical lasso)."""

    lam: float = 0.01

    def __post_init__(self):
        if self.lam < 0:
            raise InvalidInput(f"glasso regularization must be >= 0, got {self.lam}")


@dataclass(frozen=True)
class ShrunkEstimator:
    """Convex shrinkage toward a scaled identity."""

    shrinkage: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.shrinkage <= 1.0:
            raise InvalidInput(f"shrinkage must be in [0, 1], got {self.shrinkage}")


Estimator = Union[GlassoEstimator, ShrunkEstimator]


def features_matrix(dataset: Sequence[Observation]) -> np.ndarray:
    feats = np.stack([obs.features for obs in dataset])
    if feats.ndim != 2:
        raise InvalidInput("observations must share a common feature dimension")
    return feats


def positions_matrix(dataset: Sequence[Observation]) -> np.ndarray:
    return np.stack([obs.position for obs in dataset])


def empirical_cov(samples) -> tuple[np.ndarray, np.ndarray]:
    """Sample mean and biased (1/n) covariance of row-vector samples."""
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    n = x.shape[0]
    if n < 2:
        raise InsufficientSamples(f"need at least 2 samples, got {n}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / n
    return mean, 0.5 * (cov + cov.T)


def graphical_lasso(emp_cov: np.ndarray, lam: float) -> np.ndarray:
    """Covariance whose precision solves the L1-penalized log-det program.

    maximize  log det(P) - tr(S P) - lam * ||P||_1,offdiag

    Solved by block coordinate descent with a duality-gap stopping rule of
    1e-4 and at most 100 sweeps. Non-convergence raises ConvergenceFailure
    carrying the last iterate.
    """
    emp_cov = check_symmetric(emp_cov)
    if lam < 0:
        raise InvalidInput(f"regularization must be >= 0, got {lam}")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            cov, _precision = _sk_graphical_lasso(
                emp_cov, alpha=float(lam), mode="cd", tol=1e-4, max_iter=100
            )
    except FloatingPointError as exc:
        raise ConvergenceFailure(f"graphical lasso diverged: {exc}") from exc
    for w in caught:
        if issubclass(w.category, ConvergenceWarning):
            raise ConvergenceFailure(str(w.message), last_iterate=cov)
    return 0.5 * (cov + cov.T)


def shrunk_cov(emp_cov: np.ndarray, shrinkage: float) -> np.ndarray:
    """(1 - a) * S + a * (tr(S)/d) * I; preserves the trace exactly."""
    emp_cov = check_symmetric(emp_cov)
    if not 0.0 <= shrinkage <= 1.0:
        raise InvalidInput(f"shrinkage must be in [0, 1], got {shrinkage}")
    d = emp_cov.shape[0]
    mu = np.trace(emp_cov) / d
    return (1.0 - shrinkage) * emp_cov + shrinkage * mu * np.eye(d)


def _estimate(emp: np.ndarray, estimator: Estimator) -> np.ndarray:
    if isinstance(estimator, GlassoEstimator):
        return graphical_lasso(emp, estimator.lam)
    if isinstance(estimator, ShrunkEstimator):
        return shrunk_cov(emp, estimator.shrinkage)
    raise InvalidInput(f"unknown estimator {estimator!r}")


def fit_all_models(
    dataset: Sequence[Observation],
    n_neighbors: int,
    estimator: Estimator = GlassoEstimator(),
    kind: MetricKind = MetricKind.EUCLIDEAN,
    spd_floor: float = REPAIR_FLOOR,
) -> list[FittedGaussian]:
    """Fit one Gaussian per observation from its neighborhood features.

    The sample for observation i is its ``n_neighbors`` nearest neighbors
    plus the observation itself (n + 1 rows). A per-observation solver
    failure falls back to shrinkage (a=0.1) with a logged warning so one
    bad neighborhood cannot abort the whole dataset.
    """
    n = len(dataset)
    if n_neighbors >= n:
        raise InvalidInput(f"n_neighbors={n_neighbors} must be < N={n}")
    feats = features_matrix(dataset)
    if n_neighbors < feats.shape[1]:
        log.warning(
            "n_neighbors=%d is below the feature dimension %d; covariance "
            "estimates will be rank-deficient before repair",
            n_neighbors,
            feats.shape[1],
        )
    neighbors = knn_all(positions_matrix(dataset), n_neighbors, kind)

    models = []
    for i in range(n):
        rows = np.concatenate(([i], neighbors[i]))
        mean, emp = empirical_cov(feats[rows])
        try:
            cov = _estimate(emp, estimator)
        except ConvergenceFailure as exc:
            log.warning("observation %d: %s; falling back to shrinkage", i, exc)
            cov = shrunk_cov(emp, 0.1)
        models.append(FittedGaussian(mean=mean, cov=make_spd(cov, spd_floor)))
    return models
