"""Anchor-based positional embeddings from random walks with restart."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError, PreconditionError


@dataclass(frozen=True)
class PosConfig:
    alpha: int = 35
    beta: int = 100
    c: float = 0.85
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.c < 1.0:
            raise ConfigError(f"continuation probability c must lie in (0, 1), got {self.c}")
        if self.alpha < 1:
            raise ConfigError("alpha must be >= 1")
        if self.beta < 1:
            raise ConfigError("beta must be >= 1")


@dataclass(frozen=True)
class PositionalEmbedding:
    matrix: np.ndarray   # (n, alpha); column j belongs to anchors[j]
    anchors: np.ndarray


def _check_degrees(g):
    if g.num_nodes > 1 and (g.degrees == 0).any():
        v = int(np.flatnonzero(g.degrees == 0)[0])
        raise PreconditionError(
            f"node {g.node_ids[v]} is isolated; extract the largest connected component first")


def rwr_iterates(g, anchors, c, beta):
    """Yield ``r^0 .. r^beta`` for each anchor column at once.

    ``r^{t+1} = c * W r^t + (1 - c) * e`` with ``W[i, j] = 1/deg(j)`` on
    edges. ``W r`` is evaluated as ``A @ (r / deg)`` so no dense
    transition matrix is formed.
    """
    _check_degrees(g)
    anchors = np.atleast_1d(np.asarray(anchors, dtype=np.int64))
    n = g.num_nodes
    restart = np.zeros((n, anchors.shape[0]))
    restart[anchors, np.arange(anchors.shape[0])] = 1.0
    r = restart.copy()
    yield r
    if n == 1:
        # Nowhere to walk: all mass stays on the anchor.
        for _ in range(beta):
            yield r
        return
    inv_deg = (1.0 / g.degrees)[:, None]
    adj = g.adjacency_matrix
    for _ in range(beta):
        r = c * (adj @ (r * inv_deg)) + (1.0 - c) * restart
        yield r


def rwr(g, anchor, c=0.85, beta=100):
    """Restart-walk probability vector of ``anchor`` after ``beta`` steps."""
    for r in rwr_iterates(g, [anchor], c, beta):
        pass
    return r[:, 0]


def lipschitz_embed(g, cfg=PosConfig()):
    """Embed every node by its walk probabilities from ``cfg.alpha`` anchors.

    Anchors are drawn uniformly without replacement from a generator
    seeded with ``cfg.seed``.
    """
    if cfg.alpha > g.num_nodes:
        raise ConfigError(f"alpha={cfg.alpha} exceeds the number of nodes ({g.num_nodes})")
    rng = np.random.default_rng(cfg.seed)
    anchors = np.sort(rng.choice(g.num_nodes, size=cfg.alpha, replace=False))
    for r in rwr_iterates(g, anchors, cfg.c, cfg.beta):
        pass
    return PositionalEmbedding(matrix=r, anchors=anchors)


def minmax_normalize(x):
    """Scale each column to [0, 1]; constant columns become 0."""
    x = np.asarray(x, dtype=np.float64)
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    span[span == 0] = 1.0
    return (x - lo) / span


def initial_embeddings(g, x, pe, normalize_features=False):
    """Row ``u`` is ``x[u]`` followed by ``pos(u)``; just ``pos(u)`` without features."""
    pos = pe.matrix
    if pos.shape[0] != g.num_nodes:
        raise DimensionError("positional embedding rows do not match the graph")
    if x is None:
        return pos.copy()
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != g.num_nodes:
        raise DimensionError(f"feature matrix has {x.shape[0]} rows, graph has {g.num_nodes} nodes")
    if normalize_features:
        x = minmax_normalize(x)
    return np.hstack([x, pos])
