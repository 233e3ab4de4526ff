"""Sparse cost graphs over inspection points."""
from __future__ import annotations

from typing import Callable

import numpy as np

from ..core import Instance
from .segment import SegmentationConfig

CostFn = Callable[[np.ndarray], np.ndarray]


def euclidean_costs(points: np.ndarray) -> np.ndarray:
    """Pairwise straight-line distance; exactly symmetric."""
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def knn_mask(dist: np.ndarray, k: int) -> np.ndarray:
    """Directed k-nearest-neighbour relation, ties to the lower index."""
    n = dist.shape[0]
    mask = np.zeros((n, n), dtype=bool)
    if n < 2:
        return mask
    k = min(k, n - 1)
    for i in range(n):
        row = dist[i].copy()
        row[i] = np.inf
        nearest = np.argsort(row, kind="stable")[:k]
        mask[i, nearest] = True
    return mask


def _labels(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    lab = np.full(n, -1, dtype=np.int64)
    for s in range(n):
        if lab[s] >= 0:
            continue
        lab[s] = s
        stack = [s]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(adj[u] & (lab < 0)):
                lab[v] = s
                stack.append(int(v))
    return lab


def build_graph(
    points,
    config: SegmentationConfig | None = None,
    *,
    knn: int | None = None,
    name: str = "graph",
    cost: CostFn = euclidean_costs,
    metadata: dict | None = None,
) -> Instance:
    """Union k-NN graph over ``points`` with connectivity repair.

    Edge (i, j) exists when either endpoint is among the other's ``k`` nearest
    points. While the graph is disconnected, the globally shortest pair of
    points lying in different components is joined; those repair edges are
    listed in ``metadata["repair_edges"]``. Neighbourhoods use Euclidean
    distance; edge weights come from ``cost``.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    n = pts.shape[0]
    if n < 1:
        raise ValueError("need at least one point")
    if knn is None:
        knn = (config or SegmentationConfig()).knn
    dist = euclidean_costs(pts)
    adj = knn_mask(dist, knn)
    adj = adj | adj.T
    repairs = []
    lab = _labels(adj)
    while len(np.unique(lab)) > 1:
        cross = np.where(lab[:, None] != lab[None, :], dist, np.inf)
        i, j = divmod(int(np.argmin(cross)), n)
        i, j = min(i, j), max(i, j)
        adj[i, j] = adj[j, i] = True
        repairs.append([i, j])
        lab[lab == lab[j]] = lab[i]
    W = cost(pts)
    C = np.where(adj, W, np.inf)
    np.fill_diagonal(C, 0.0)
    meta = dict(metadata or {})
    meta["knn"] = int(knn)
    meta["repair_edges"] = repairs
    return Instance(name, pts, C, meta)
