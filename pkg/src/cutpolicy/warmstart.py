"""K-means warm start over the initial node embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .graph import Partitioning

_CHUNK = 4096


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = 100
    seed: int = 0
    metric: str = "linf"
    n_init: int = 25

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.n_init < 1:
            raise ConfigError("n_init must be >= 1")
        if self.max_iters < 1:
            raise ConfigError("max_iters must be >= 1")
        if self.metric not in ("linf", "euclidean"):
            raise ConfigError(f"unknown metric {self.metric!r}")


def pairwise_distance(points, centroids, metric):
    out = np.empty((points.shape[0], centroids.shape[0]))
    for s in range(0, points.shape[0], _CHUNK):
        diff = points[s:s + _CHUNK, None, :] - centroids[None, :, :]
        if metric == "linf":
            out[s:s + _CHUNK] = np.abs(diff).max(axis=2)
        else:
            out[s:s + _CHUNK] = np.sqrt((diff * diff).sum(axis=2))
    return out


def _seed_centroids(points, k, rng):
    return points[rng.choice(points.shape[0], size=k, replace=False)].copy()


def _repair_empty(points, labels, centroids, k, metric):
    """Give each empty cluster the farthest member of the largest cluster."""
    while True:
        counts = np.bincount(labels, minlength=k)
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            return labels, centroids
        big = int(np.argmax(counts))
        members = np.flatnonzero(labels == big)
        d = pairwise_distance(points[members], centroids[[big]], metric)[:, 0]
        far = int(members[np.argmax(d)])
        labels[far] = empty[0]
        centroids[empty[0]] = points[far]


def spread(points, labels, centroids, metric):
    """Within-cluster spread: summed distances to the assigned centroid
    (squared for the Euclidean metric)."""
    d = np.abs(points - centroids[labels])
    if metric == "linf":
        return float(d.max(axis=1).sum())
    return float((d * d).sum())


def _lloyd(points, k, metric, max_iters, rng):
    centroids = _seed_centroids(points, k, rng)
    labels = None
    it = 0
    for it in range(1, max_iters + 1):
        new = np.argmin(pairwise_distance(points, centroids, metric), axis=1)
        new, centroids = _repair_empty(points, new, centroids, k, metric)
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for q in range(k):
            centroids[q] = points[labels == q].mean(axis=0)
    return labels, centroids, it


def kmeans(points, cfg):
    """Lloyd iteration; returns ``(labels, iterations)`` of the best restart.

    Each restart seeds ``k`` distinct points drawn uniformly, then assigns
    points to the nearest centroid under ``cfg.metric`` (ties to the lowest
    index) and moves centroids to the coordinate-wise mean of their
    members, stopping at an assignment fixpoint or after ``cfg.max_iters``.
    The restart with the smallest :func:`spread` wins. Every cluster is
    non-empty on return.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[1] < 1:
        raise ConfigError("points must be a 2-d array with at least one column")
    n = points.shape[0]
    if cfg.k > n:
        raise ConfigError(f"k={cfg.k} exceeds the number of points ({n})")
    rng = np.random.default_rng(cfg.seed)
    best = None
    for _ in range(cfg.n_init):
        labels, centroids, it = _lloyd(points, cfg.k, cfg.metric, cfg.max_iters, rng)
        score = spread(points, labels, centroids, cfg.metric)
        if best is None or score < best[0]:
            best = (score, labels, it)
    return best[1], best[2]


def kmeans_linf(points, cfg):
    """Cluster labels under the L-infinity assignment rule."""
    if cfg.metric != "linf":
        cfg = KMeansConfig(cfg.k, cfg.max_iters, cfg.seed, "linf", cfg.n_init)
    return kmeans(points, cfg)[0]


def warm_start(g, emb, k, seed=0, max_iters=100, n_init=25):
    """Initial partitioning: L-infinity K-means over the embedding rows."""
    if emb.shape[0] != g.num_nodes:
        raise ConfigError("embedding rows do not match the graph")
    labels = kmeans_linf(emb, KMeansConfig(k=k, max_iters=max_iters, seed=seed, n_init=n_init))
    return Partitioning(labels, k)


def random_start(g, k, seed=0):
    """Uniformly random assignment with every partition non-empty."""
    if k > g.num_nodes:
        raise ConfigError(f"k={k} exceeds the number of nodes ({g.num_nodes})")
    rng = np.random.default_rng(seed)
    labels = rng.integers(k, size=g.num_nodes)
    order = rng.permutation(g.num_nodes)
    labels[order[:k]] = np.arange(k)
    return Partitioning(labels, k)
