"""Planted-partition benchmarks and an exhaustive optimum oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SizeGuardError
from .graph import Graph, Partitioning, largest_connected_component
from .objectives import ObjectiveKind, evaluate, value_from_stats

MAX_BRUTE_FORCE_NODES = 12


@dataclass(frozen=True)
class SbmSpec:
    blocks: int = 5
    block_size: int = 100
    p_in: float = 0.2
    p_out: float = 0.002
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_out <= self.p_in <= 1.0:
            raise ConfigError("need 0 <= p_out <= p_in <= 1")
        if self.blocks < 1 or self.block_size < 1:
            raise ConfigError("blocks and block_size must be positive")

    @property
    def expected_edges(self):
        b, s = self.blocks, self.block_size
        intra = b * s * (s - 1) / 2
        inter = b * (b - 1) / 2 * s * s
        return intra * self.p_in + inter * self.p_out


def sbm_generate(spec, extract_component=True):
    """Sample an SBM graph; returns ``(graph, labels)``.

    Every node pair is drawn independently, with probability ``p_in``
    inside a block and ``p_out`` across blocks. Labels give the planted
    block of each surviving node.
    """
    n = spec.blocks * spec.block_size
    labels = np.repeat(np.arange(spec.blocks), spec.block_size)
    rng = np.random.default_rng(spec.seed)
    iu, ju = np.triu_indices(n, k=1)
    prob = np.where(labels[iu] == labels[ju], spec.p_in, spec.p_out)
    hit = rng.random(iu.shape[0]) < prob
    g = Graph.from_edges(n, np.stack([iu[hit], ju[hit]], axis=1))
    if extract_component:
        sub, _ = largest_connected_component(g)
        labels = labels[sub.node_ids]
        g = sub
    return g, labels


def planted_objective(g, labels, kind, edge_mass="edges"):
    labels = np.asarray(labels)
    return evaluate(g, Partitioning(labels, int(labels.max()) + 1), kind, edge_mass).value


def restricted_growth_strings(n, k):
    """All assignments of ``n`` nodes onto exactly ``k`` labels, one per
    set partition, labels numbered by first occurrence, in lex order."""
    a = [0] * n

    def rec(i, used):
        if n - i < k - used:
            return
        if i == n:
            if used == k:
                yield tuple(a)
            return
        for q in range(min(used + 1, k)):
            a[i] = q
            yield from rec(i + 1, max(used, q + 1))

    if n == 0:
        return
    yield from rec(1, 1)


def _batch_values(g, batch, k, kind, edge_mass):
    assign = np.asarray(batch, dtype=np.int64)
    rows = np.arange(assign.shape[0])[:, None]
    size = np.zeros((assign.shape[0], k), dtype=np.int64)
    np.add.at(size, (rows, assign), 1)
    vol = np.zeros((assign.shape[0], k), dtype=np.int64)
    np.add.at(vol, (rows, assign), np.broadcast_to(g.degrees, assign.shape))
    cut = np.zeros((assign.shape[0], k), dtype=np.int64)
    if g.num_edges:
        src = assign[:, g.edges[:, 0]]
        dst = assign[:, g.edges[:, 1]]
        cross = (src != dst).astype(np.int64)
        np.add.at(cut, (np.broadcast_to(rows, src.shape), src), cross)
        np.add.at(cut, (np.broadcast_to(rows, dst.shape), dst), cross)
    return [value_from_stats(kind, cut[b], vol[b], size[b], g.num_nodes, g.num_edges, edge_mass)
            for b in range(assign.shape[0])]


def brute_force(g, k, kind, edge_mass="edges", batch_size=4096):
    """Exact minimum over all partitions into ``k`` non-empty parts.

    Returns ``(value, partitioning)``; ties go to the lexicographically
    smallest canonical assignment. Degenerate assignments are skipped.
    """
    kind = ObjectiveKind.parse(kind)
    n = g.num_nodes
    if n > MAX_BRUTE_FORCE_NODES:
        raise SizeGuardError(f"brute force limited to {MAX_BRUTE_FORCE_NODES} nodes, graph has {n}")
    if not 1 <= k <= n:
        raise ConfigError(f"k must lie in 1..{n}")
    best_val, best = np.inf, None
    batch = []

    def flush():
        nonlocal best_val, best
        for assign, val in zip(batch, _batch_values(g, batch, k, kind, edge_mass)):
            if not np.isnan(val) and val < best_val:
                best_val, best = val, assign
        batch.clear()

    for assign in restricted_growth_strings(n, k):
        batch.append(assign)
        if len(batch) >= batch_size:
            flush()
    if batch:
        flush()
    if best is None:
        return float("nan"), None
    return float(best_val), Partitioning(best, k)
