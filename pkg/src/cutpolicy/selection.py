"""Choosing which node to perturb next."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import neighbor_counts


class Tier(enum.IntEnum):
    """Selection priority; higher tiers are always served first."""

    ZERO = 0
    FINITE = 1
    INFINITE = 2


@dataclass(frozen=True)
class NodeScoreTable:
    scores: np.ndarray
    tiers: np.ndarray   # Tier values as small ints


def scores_from_counts(counts, assignment, degrees):
    """Vectorized node scores from an ``(n, k)`` neighbor-count table.

    For a node with ``s`` neighbors in its own partition and at most ``m``
    in any single other one the score is ``m / s / degree``. Nodes with
    ``s == 0 < m`` form the infinite tier, ordered among themselves by
    ``m / degree``; nodes with ``m == 0`` (including isolated ones) score 0.
    """
    n = counts.shape[0]
    rows = np.arange(n)
    same = counts[rows, assignment]
    if counts.shape[1] > 1:
        other = counts.copy()
        other[rows, assignment] = -1
        m = other.max(axis=1)
    else:
        m = np.zeros(n, dtype=counts.dtype)
    deg = np.maximum(degrees, 1)
    scores = np.zeros(n)
    tiers = np.full(n, Tier.ZERO, dtype=np.int8)
    live = (m > 0) & (degrees > 0)
    fin = live & (same > 0)
    inf = live & (same == 0)
    scores[fin] = m[fin] / same[fin] / deg[fin]
    scores[inf] = m[inf] / deg[inf]
    tiers[fin] = Tier.FINITE
    tiers[inf] = Tier.INFINITE
    return NodeScoreTable(scores, tiers)


def node_scores(g, p):
    return scores_from_counts(neighbor_counts(g, p), p.assignment, g.degrees)


def select_node(table, visited, min_tier=Tier.ZERO):
    """Highest-priority unvisited node, or ``None`` when the sweep is done.

    Order: tier, then score, then lowest node id. ``visited`` may be a set
    of ids or a boolean mask. Nodes below ``min_tier`` are never returned.
    """
    free = _free_mask(visited, table.scores.shape[0])
    free &= table.tiers >= min_tier
    if not free.any():
        return None
    top = table.tiers[free].max()
    cand = free & (table.tiers == top)
    best = table.scores[cand].max()
    return int(np.flatnonzero(cand & (table.scores == best))[0])


def random_select_node(g, visited, rng):
    """Uniformly random unvisited node, or ``None`` when none is left.

    ``rng`` is a ``numpy.random.Generator`` or an integer seed.
    """
    rng = np.random.default_rng(rng)
    free = np.flatnonzero(_free_mask(visited, g.num_nodes))
    if free.size == 0:
        return None
    return int(free[rng.integers(free.size)])


def _free_mask(visited, n):
    if isinstance(visited, np.ndarray) and visited.dtype == bool:
        return ~visited
    free = np.ones(n, dtype=bool)
    if visited:
        free[list(visited)] = False
    return free


class Sweep:
    """Visited-set sweep over nodes, used by training and inference.

    Each node is handed out at most once per sweep. With the heuristic
    order, nodes in the zero tier are skipped: every neighbor of such a
    node already shares its partition, so the only action open to it is
    to stay put. Random order hands out every node, like the ablation it
    serves.
    """

    def __init__(self, g, mode="heuristic", rng=None):
        if mode not in ("heuristic", "random"):
            raise ValueError(f"unknown node selection mode {mode!r}")
        self.graph = g
        self.mode = mode
        self.rng = rng
        self.visited = np.zeros(g.num_nodes, dtype=bool)
        self.sweeps = 0

    def reset(self):
        self.visited[:] = False
        self.sweeps += 1

    def _pick(self, tracker):
        if self.mode == "random":
            free = np.flatnonzero(~self.visited & (self.graph.degrees > 0))
            if free.size == 0:
                return None
            return int(free[self.rng.integers(free.size)])
        table = scores_from_counts(tracker.neighbor_counts,
                                   tracker.partitioning.assignment, self.graph.degrees)
        return select_node(table, self.visited, min_tier=Tier.FINITE)

    def next(self, tracker):
        """Next node to perturb; ``None`` once the current sweep is exhausted.

        The caller decides whether to :meth:`reset` and continue.
        """
        v = self._pick(tracker)
        if v is not None:
            self.visited[v] = True
        return v
