"""Graph representation, partitionings and text-file ingestion.

Graphs are undirected and simple. Nodes are contiguous integers
``0..n-1``; the ids found in an input file are kept in ``node_ids`` so
results can be written back using the original labels.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, ParseError

log = logging.getLogger(__name__)

_SPLIT = re.compile(r"[,\s]+")


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    ``edges`` is an ``(m, 2)`` array of pairs ``u < v`` in lexicographic
    order. Neighbor lists are stored in CSR form (``indptr``/``indices``),
    each list sorted ascending.
    """

    num_nodes: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    degrees: np.ndarray
    node_ids: np.ndarray
    self_loops_dropped: int = field(default=0)

    @classmethod
    def from_edges(cls, num_nodes, edges, node_ids=None, self_loops_dropped=0):
        """Build a graph from an iterable of node pairs.

        Self-loops are discarded and duplicate or reversed pairs collapse
        to a single edge.
        """
        num_nodes = int(num_nodes)
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                       dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= num_nodes):
            raise ValueError("edge endpoint outside 0..num_nodes-1")
        e = e[e[:, 0] != e[:, 1]]
        e = np.sort(e, axis=1)
        if e.size:
            e = np.unique(e, axis=0)
        both = np.concatenate([e, e[:, ::-1]]) if e.size else e
        degrees = np.bincount(both[:, 0], minlength=num_nodes) if e.size else np.zeros(num_nodes, np.int64)
        order = np.lexsort((both[:, 1], both[:, 0])) if e.size else np.zeros(0, np.int64)
        indices = both[order, 1] if e.size else np.zeros(0, np.int64)
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(degrees, out=indptr[1:])
        if node_ids is None:
            node_ids = np.arange(num_nodes, dtype=np.int64)
        node_ids = np.asarray(node_ids, dtype=np.int64)
        if node_ids.shape != (num_nodes,):
            raise DimensionError("node_ids length must equal num_nodes")
        return cls(
            num_nodes=num_nodes,
            edges=_frozen(e.astype(np.int64)),
            indptr=_frozen(indptr),
            indices=_frozen(indices.astype(np.int64)),
            degrees=_frozen(degrees.astype(np.int64)),
            node_ids=_frozen(node_ids),
            self_loops_dropped=int(self_loops_dropped),
        )

    @property
    def num_edges(self):
        return int(self.edges.shape[0])

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    @property
    def adjacency(self):
        """Per-node sorted neighbor lists."""
        return [self.neighbors(v) for v in range(self.num_nodes)]

    @property
    def edge_set(self):
        return {(int(u), int(v)) for u, v in self.edges}

    @cached_property
    def adjacency_matrix(self):
        n = self.num_nodes
        data = np.ones(self.indices.shape[0])
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(n, n))

    @cached_property
    def mean_operator(self):
        """Row-normalized adjacency; rows of isolated nodes are zero."""
        inv = np.zeros(self.num_nodes)
        nz = self.degrees > 0
        inv[nz] = 1.0 / self.degrees[nz]
        return sp.diags(inv) @ self.adjacency_matrix

    def subgraph(self, nodes):
        """Induced subgraph on ``nodes`` (kept in ascending order)."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.num_nodes, -1, dtype=np.int64)
        remap[nodes] = np.arange(nodes.shape[0])
        e = remap[self.edges] if self.num_edges else self.edges
        keep = (e >= 0).all(axis=1) if self.num_edges else np.zeros(0, bool)
        return Graph.from_edges(nodes.shape[0], e[keep], node_ids=self.node_ids[nodes])


class Partitioning:
    """Assignment of every node to one of ``k`` labeled partitions.

    ``assignment`` and ``members`` are kept mutually inverse by
    :meth:`move`; nothing else should write to them.
    """

    def __init__(self, assignment, k):
        assignment = np.array(assignment, dtype=np.int64)
        if assignment.ndim != 1:
            raise DimensionError("assignment must be one-dimensional")
        k = int(k)
        if k < 1:
            raise ValueError("k must be >= 1")
        if assignment.size and (assignment.min() < 0 or assignment.max() >= k):
            raise ValueError(f"partition index outside 0..{k - 1}")
        self.k = k
        self.assignment = assignment
        self.members = [set() for _ in range(k)]
        for v, q in enumerate(assignment.tolist()):
            self.members[q].add(v)

    @property
    def num_nodes(self):
        return int(self.assignment.shape[0])

    def part(self, v):
        return int(self.assignment[v])

    def sizes(self):
        return np.bincount(self.assignment, minlength=self.k)

    def move(self, v, to):
        i = int(self.assignment[v])
        if i == to:
            return
        self.members[i].discard(v)
        self.members[to].add(v)
        self.assignment[v] = to

    def copy(self):
        return Partitioning(self.assignment.copy(), self.k)

    def relabeled(self):
        """Copy with labels renumbered by first occurrence."""
        mapping = {}
        for q in self.assignment.tolist():
            if q not in mapping:
                mapping[q] = len(mapping)
        for q in range(self.k):
            mapping.setdefault(q, len(mapping))
        return Partitioning([mapping[q] for q in self.assignment.tolist()], self.k)

    def check(self):
        """Raise AssertionError if assignment and members disagree."""
        seen = set()
        for q, mem in enumerate(self.members):
            for v in mem:
                assert self.assignment[v] == q
            assert not (seen & mem)
            seen |= mem
        assert seen == set(range(self.num_nodes))

    def __eq__(self, other):
        return (isinstance(other, Partitioning) and self.k == other.k
                and np.array_equal(self.assignment, other.assignment))

    def __repr__(self):
        return f"Partitioning(k={self.k}, members={[sorted(m) for m in self.members]})"


def neighbor_counts(g, p):
    """``(n, k)`` table: entry ``[v, q]`` counts neighbors of ``v`` in partition ``q``."""
    counts = np.zeros((g.num_nodes, p.k), dtype=np.int64)
    if g.num_edges:
        e = g.edges
        np.add.at(counts, (e[:, 0], p.assignment[e[:, 1]]), 1)
        np.add.at(counts, (e[:, 1], p.assignment[e[:, 0]]), 1)
    return counts


def _ints(tokens, path, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integer node ids, got {' '.join(tokens)!r}",
                         path, lineno) from None


def load_edge_list(path):
    """Read a whitespace-separated ``u v`` edge list.

    Lines starting with ``#`` are comments. Node ids are relabeled to
    ``0..n-1`` in ascending order of the original ids.
    """
    path = Path(path)
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            tokens = s.split()
            if len(tokens) < 2:
                raise ParseError("expected two node ids", path, lineno)
            pairs.append(_ints(tokens[:2], path, lineno))
    if not pairs:
        raise ParseError("edge list is empty", path)
    raw = np.asarray(pairs, dtype=np.int64)
    ids, flat = np.unique(raw, return_inverse=True)
    e = flat.reshape(-1, 2)
    loops = int((e[:, 0] == e[:, 1]).sum())
    if loops:
        log.warning("%s: dropped %d self-loop line(s)", path, loops)
    return Graph.from_edges(ids.shape[0], e, node_ids=ids, self_loops_dropped=loops)


def write_edge_list(g, path):
    with open(path, "w") as fh:
        for u, v in g.edges:
            fh.write(f"{g.node_ids[u]} {g.node_ids[v]}\n")


def load_features(path, graph):
    """Read one feature row per node, comma- or whitespace-separated.

    Row ``j`` belongs to the node with the ``j``-th smallest original id,
    i.e. to relabeled node ``j`` of a graph from :func:`load_edge_list`.
    """
    path = Path(path)
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            tokens = [t for t in _SPLIT.split(s) if t]
            try:
                rows.append([float(t) for t in tokens])
            except ValueError:
                raise ParseError(f"non-numeric feature value in {s!r}", path, lineno) from None
    if len(rows) != graph.num_nodes:
        raise DimensionError(f"{path}: {len(rows)} feature rows for {graph.num_nodes} nodes")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise DimensionError(f"{path}: rows have differing lengths {sorted(widths)}")
    x = np.asarray(rows, dtype=np.float64).reshape(graph.num_nodes, -1)
    if not np.isfinite(x).all():
        raise ParseError("feature values must be finite", path)
    return _frozen(x)


def connected_components(g):
    """Component label per node, numbered in order of smallest member."""
    n = g.num_nodes
    labels = np.full(n, -1, dtype=np.int64)
    comp = 0
    for s in range(n):
        if labels[s] >= 0:
            continue
        labels[s] = comp
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if labels[w] < 0:
                    labels[w] = comp
                    stack.append(w)
        comp += 1
    return labels


def largest_connected_component(g, x=None):
    """Induced subgraph on the largest component, with features filtered.

    Ties go to the component holding the smallest original node id.
    """
    labels = connected_components(g)
    if labels.size == 0:
        return g, x
    sizes = np.bincount(labels)
    best = None
    for c in np.flatnonzero(sizes == sizes.max()):
        low = g.node_ids[labels == c].min()
        if best is None or low < best[0]:
            best = (low, c)
    keep = np.flatnonzero(labels == best[1])
    if keep.shape[0] == g.num_nodes:
        return g, x
    sub = g.subgraph(keep)
    if x is not None:
        x = _frozen(np.asarray(x)[keep])
    return sub, x


def write_partition(g, p, path):
    with open(path, "w") as fh:
        for v in range(g.num_nodes):
            fh.write(f"{g.node_ids[v]} {p.assignment[v]}\n")


def load_partition(path, g, k=None):
    """Read ``node_id partition_id`` lines (original ids) for graph ``g``."""
    path = Path(path)
    index = {int(i): v for v, i in enumerate(g.node_ids.tolist())}
    assignment = np.full(g.num_nodes, -1, dtype=np.int64)
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            tokens = s.split()
            if len(tokens) != 2:
                raise ParseError("expected 'node_id partition_id'", path, lineno)
            node, q = _ints(tokens, path, lineno)
            if node not in index:
                raise ParseError(f"node {node} is not in the graph", path, lineno)
            if q < 0:
                raise ParseError("negative partition id", path, lineno)
            if assignment[index[node]] >= 0:
                raise ParseError(f"node {node} assigned twice", path, lineno)
            assignment[index[node]] = q
    missing = np.flatnonzero(assignment < 0)
    if missing.size:
        shown = ", ".join(str(g.node_ids[v]) for v in missing[:5])
        raise DimensionError(f"{path}: no partition given for node(s) {shown}")
    if k is None:
        k = int(assignment.max()) + 1
    elif assignment.max() >= k:
        raise DimensionError(f"{path}: partition id {assignment.max()} >= k={k}")
    return Partitioning(assignment, k)
