"""Euclidean K-means on raw node features, as a comparison baseline."""

from __future__ import annotations

from .graph import Partitioning
from .objectives import evaluate_all
from .posenc import PosConfig, lipschitz_embed
from .warmstart import KMeansConfig, kmeans


def kmeans_baseline(g, x, k, seed=0, pos=None):
    """Cluster feature rows with Euclidean Lloyd K-means.

    Featureless graphs (``x is None``) are clustered on their positional
    embeddings instead. Returns ``(partitioning, {kind: CutReport})``.
    """
    if x is None:
        x = lipschitz_embed(g, pos or PosConfig(alpha=min(35, g.num_nodes), seed=seed)).matrix
    labels, _ = kmeans(x, KMeansConfig(k=k, seed=seed, metric="euclidean"))
    p = Partitioning(labels, k)
    return p, evaluate_all(g, p)
