"""Exact K-nearest-neighbor search over embedding windows.

A kd-tree accelerates queries, but the contract is exactness: results must
match an exhaustive linear scan bitwise, with ties at equal distance broken
by ascending training index.  The tree's raw output is therefore passed
through a correction layer that recomputes distances with the reference
formula and re-sorts; queries whose neighbor set could be ambiguous at the
boundary fall back to a radius search over the full tied group.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionError, ParameterError

__all__ = ["NeighborIndex", "build", "query", "query_batch", "linear_scan_query", "worker_count"]

# relative slack when hunting boundary ties; covers float divergence between
# the tree's internal metric and the reference distance formula
_TIE_RTOL = 1e-9


def worker_count() -> int:
    """Worker threads for batched tree queries, from FWF_THREADS (0 = auto)."""
    raw = os.environ.get("FWF_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"FWF_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ParameterError("FWF_THREADS must be >= 0")
    return -1 if n == 0 else n


def _ref_distances(points: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Reference Euclidean distances; every code path must use this formula."""
    d = points - q
    return np.sqrt((d * d).sum(axis=-1))


def linear_scan_query(points: np.ndarray, q, K: int):
    """Brute-force K-NN: the semantics every index must reproduce exactly."""
    points = np.asarray(points, dtype=float)
    q = np.asarray(q, dtype=float)
    dist = _ref_distances(points, q)
    order = np.lexsort((np.arange(len(points)), dist))[:K]
    return order, dist[order]


class NeighborIndex:
    """Immutable kd-tree index over N windows of length L."""

    def __init__(self, points: np.ndarray):
        points = np.ascontiguousarray(points, dtype=float)
        if points.ndim != 2:
            raise DimensionError("index requires an N x L matrix")
        if points.shape[0] < 1:
            raise ParameterError("index requires at least one point")
        self.points = points
        self.tree = cKDTree(points)

    def __len__(self):
        return self.points.shape[0]


def build(points) -> NeighborIndex:
    """Build an index over the rows of ``points``."""
    return NeighborIndex(np.asarray(points, dtype=float))


def _resolve_ties(idx: NeighborIndex, q: np.ndarray, K: int, d_max: float):
    """Exact top-K among all points within the (slackened) Kth radius."""
    radius = d_max * (1.0 + _TIE_RTOL)
    cand = np.array(idx.tree.query_ball_point(q, radius), dtype=np.intp)
    dist = _ref_distances(idx.points[cand], q)
    order = np.lexsort((cand, dist))[:K]
    return cand[order], dist[order]


def query(idx: NeighborIndex, q, K: int):
    """Exact Euclidean K-NN of ``q``: (indices, distances), ties by index.

    Results are bitwise identical to :func:`linear_scan_query`.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (idx.points.shape[1],):
        raise DimensionError(
            f"query length {q.shape} does not match window length {idx.points.shape[1]}"
        )
    ii, dd = query_batch(idx, q[None, :], K)
    return ii[0], dd[0]


def query_batch(idx: NeighborIndex, queries, K: int):
    """Exact K-NN for a batch of queries: (B x K indices, B x K distances)."""
    queries = np.ascontiguousarray(queries, dtype=float)
    if queries.ndim != 2 or queries.shape[1] != idx.points.shape[1]:
        raise DimensionError("queries must be B x L matching the index")
    N = len(idx)
    if not (1 <= K <= N):
        raise ParameterError(f"K must be in 1..{N}, got {K}")

    # over-query by one so boundary ties with the excluded set are visible
    k_probe = min(K + 1, N)
    _, ii = idx.tree.query(queries, k=k_probe, workers=worker_count())
    ii = ii.reshape(len(queries), k_probe)
    dist = _ref_distances(idx.points[ii], queries[:, None, :])

    # lexicographic (distance, index) order: pre-sort by index, then a
    # stable sort by the recomputed distance keeps tied groups index-ascending
    by_idx = np.argsort(ii, axis=1, kind="stable")
    ii = np.take_along_axis(ii, by_idx, axis=1)
    dist = np.take_along_axis(dist, by_idx, axis=1)
    by_dist = np.argsort(dist, axis=1, kind="stable")
    ii = np.take_along_axis(ii, by_dist, axis=1)
    dist = np.take_along_axis(dist, by_dist, axis=1)

    out_i = ii[:, :K].copy()
    out_d = dist[:, :K].copy()

    if k_probe > K:
        # ambiguous rows: the first excluded distance is within slack of the
        # Kth kept distance, so the full tied group must be enumerated
        risky = dist[:, K] <= out_d[:, K - 1] * (1.0 + _TIE_RTOL)
        for r in np.nonzero(risky)[0]:
            out_i[r], out_d[r] = _resolve_ties(idx, queries[r], K, out_d[r, K - 1])
    return out_i, out_d
