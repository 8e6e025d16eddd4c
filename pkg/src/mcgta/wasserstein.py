"""Closed-form squared Wasserstein-2 distance between Gaussians.

For models (m1, S1) and (m2, S2):

    W2^2 = ||m1 - m2||^2 + tr(S1) + tr(S2) - 2 tr((S1^{1/2} S2 S1^{1/2})^{1/2})

The inner matrix is congruent to an SPD product, so its square-root trace is
the sum of the square roots of its eigenvalues; the symmetric sandwich form
keeps the eigenproblem well conditioned. Tiny negative eigenvalues and
distances from floating point are clipped to zero.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import InvalidInput, NotPositiveSemidefinite
from .estimation import FittedGaussian
from .spd import PSD_TOL

# Pairs per batched eigensolve in pairwise_w2; bounds peak memory at
# roughly chunk * d^2 floats.
_PAIR_CHUNK = 131072


def _batch_roots(covs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Principal square roots and traces for a stack of SPD matrices."""
    w, v = np.linalg.eigh(covs)
    if np.min(w) < -PSD_TOL:
        raise NotPositiveSemidefinite(
            f"covariance eigenvalue {np.min(w):.3e} below -{PSD_TOL:.0e}"
        )
    roots = (v * np.sqrt(np.clip(w, 0.0, None))[..., None, :]) @ np.swapaxes(v, -1, -2)
    traces = np.trace(covs, axis1=-2, axis2=-1)
    return roots, traces


def _cross_trace(roots_i: np.ndarray, covs_j: np.ndarray) -> np.ndarray:
    """tr((Si^{1/2} Sj Si^{1/2})^{1/2}) for stacked pairs."""
    m = roots_i @ covs_j @ roots_i
    m = 0.5 * (m + np.swapaxes(m, -1, -2))
    ev = np.clip(np.linalg.eigvalsh(m), 0.0, None)
    return np.sqrt(ev).sum(axis=-1)


def w2_squared(a: FittedGaussian, b: FittedGaussian) -> float:
    """Squared Wasserstein-2 distance between two fitted Gaussians."""
    if a.mean.shape != b.mean.shape or a.cov.shape != b.cov.shape:
        raise InvalidInput(
            f"dimension mismatch: {a.mean.shape[0]} vs {b.mean.shape[0]}"
        )
    covs = np.stack([a.cov, b.cov])
    roots, traces = _batch_roots(covs)
    cross = _cross_trace(roots[0][None], covs[1][None])[0]
    d2 = float(np.sum((a.mean - b.mean) ** 2))
    return max(0.0, d2 + traces[0] + traces[1] - 2.0 * cross)


def pairwise_w2(models: Sequence[FittedGaussian]) -> np.ndarray:
    """Symmetric (N, N) matrix of squared W2 distances, zero diagonal.

    Each unordered pair is computed exactly once and mirrored, so the
    result is symmetric by construction. Work is done in fixed-size
    batches of pairs to keep memory flat.
    """
    n = len(models)
    if n < 2:
        raise InvalidInput(f"need at least 2 models, got {n}")
    dims = {m.dim for m in models}
    if len(dims) != 1:
        raise InvalidInput(f"models have mixed dimensions: {sorted(dims)}")

    means = np.stack([m.mean for m in models])
    covs = np.stack([m.cov for m in models])
    roots, traces = _batch_roots(covs)

    out = np.zeros((n, n))
    iu, ju = np.triu_indices(n, k=1)
    for start in range(0, iu.shape[0], _PAIR_CHUNK):
        ii = iu[start : start + _PAIR_CHUNK]
        jj = ju[start : start + _PAIR_CHUNK]
        cross = _cross_trace(roots[ii], covs[jj])
        d2 = np.sum((means[ii] - means[jj]) ** 2, axis=1)
        out[ii, jj] = np.maximum(0.0, d2 + traces[ii] + traces[jj] - 2.0 * cross)
    out += out.T
    return out
