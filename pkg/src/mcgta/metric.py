"""Metric distances over observation positions and brute-force kNN queries.

Three metrics cover the 1-D temporal and 2-D spatial settings:

* ``absolute_index`` -- |i - j| on 1-D integer-like coordinates;
* ``euclidean``      -- L2 on coordinates of any supported dimension;
* ``geodesic``       -- great-circle distance in radians on the unit
  sphere, with positions given as (longitude, latitude) in degrees.

Timestamps that are not plain indices can use ``euclidean`` on 1-D
coordinates.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import InvalidInput


class MetricKind(str, Enum):
    ABSOLUTE_INDEX = "absolute_index"
    EUCLIDEAN = "euclidean"
    GEODESIC = "geodesic"


def _positions_array(positions, kind: MetricKind) -> np.ndarray:
    pos = np.atleast_2d(np.asarray(positions, dtype=float))
    if not np.all(np.isfinite(pos)):
        raise InvalidInput("positions contain non-finite values")
    if kind == MetricKind.ABSOLUTE_INDEX and pos.shape[1] != 1:
        raise InvalidInput(
            f"absolute_index expects 1-D positions, got dimension {pos.shape[1]}"
        )
    if kind == MetricKind.GEODESIC:
        if pos.shape[1] != 2:
            raise InvalidInput(
                f"geodesic expects (lon, lat) positions, got dimension {pos.shape[1]}"
            )
        lon, lat = pos[:, 0], pos[:, 1]
        if np.any(np.abs(lon) > 180.0) or np.any(np.abs(lat) > 90.0):
            raise InvalidInput("geodesic positions must have lon in [-180, 180] and lat in [-90, 90]")
    return pos


def _haversine_radians(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # a, b: (..., 2) arrays of (lon, lat) in degrees; result in radians on
    # the unit sphere. Haversine stays accurate near antipodes.
    lon1, lat1 = np.radians(a[..., 0]), np.radians(a[..., 1])
    lon2, lat2 = np.radians(b[..., 0]), np.radians(b[..., 1])
    s1 = np.sin(0.5 * (lat2 - lat1))
    s2 = np.sin(0.5 * (lon2 - lon1))
    h = s1 * s1 + np.cos(lat1) * np.cos(lat2) * s2 * s2
    return 2.0 * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def distance(a, b, kind: MetricKind) -> float:
    """Metric distance between two positions."""
    kind = MetricKind(kind)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if a.shape != b.shape:
        raise InvalidInput(f"position dimensions differ: {a.shape} vs {b.shape}")
    pair = _positions_array([a, b], kind)
    if kind == MetricKind.ABSOLUTE_INDEX:
        return float(abs(pair[0, 0] - pair[1, 0]))
    if kind == MetricKind.EUCLIDEAN:
        return float(np.linalg.norm(pair[0] - pair[1]))
    return float(_haversine_radians(pair[0], pair[1]))


def pairwise_distances(positions, kind: MetricKind) -> np.ndarray:
    """Full (N, N) matrix of pairwise metric distances."""
    kind = MetricKind(kind)
    pos = _positions_array(positions, kind)
    if kind == MetricKind.ABSOLUTE_INDEX:
        d = np.abs(pos[:, 0][:, None] - pos[:, 0][None, :])
    elif kind == MetricKind.EUCLIDEAN:
        diff = pos[:, None, :] - pos[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    else:
        d = _haversine_radians(pos[:, None, :], pos[None, :, :])
    # enforce exact symmetry and a zero diagonal against fp noise
    d = np.maximum(d, d.T)
    np.fill_diagonal(d, 0.0)
    return d


def knn(query_index: int, positions, k: int, kind: MetricKind) -> np.ndarray:
    """Indices of the k nearest neighbors of one observation.

    The query itself is excluded. Ties are broken by ascending index so
    results are deterministic.
    """
    kind = MetricKind(kind)
    pos = _positions_array(positions, kind)
    n = pos.shape[0]
    if not 0 <= query_index < n:
        raise InvalidInput(f"query index {query_index} out of range for {n} positions")
    if k < 1 or k >= n:
        raise InvalidInput(f"k must satisfy 1 <= k < N, got k={k}, N={n}")
    if kind == MetricKind.ABSOLUTE_INDEX:
        d = np.abs(pos[:, 0] - pos[query_index, 0])
    elif kind == MetricKind.EUCLIDEAN:
        d = np.linalg.norm(pos - pos[query_index], axis=1)
    else:
        d = _haversine_radians(pos, pos[query_index])
    d[query_index] = np.inf
    order = np.argsort(d, kind="stable")
    return order[:k]


def knn_all(positions, k: int, kind: MetricKind) -> np.ndarray:
    """(N, k) neighbor indices for every observation at once.

    Row i equals ``knn(i, positions, k, kind)``; computed from one shared
    distance matrix instead of N separate scans.
    """
    kind = MetricKind(kind)
    pos = _positions_array(positions, kind)
    n = pos.shape[0]
    if k < 1 or k >= n:
        raise InvalidInput(f"k must satisfy 1 <= k < N, got k={k}, N={n}")
    d = pairwise_distances(pos, kind)
    np.fill_diagonal(d, np.inf)
    order = np.argsort(d, axis=1, kind="stable")
    return order[:, :k]
