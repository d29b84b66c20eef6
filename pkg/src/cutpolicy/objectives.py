"""The four cut objectives, evaluated exactly, and single-move deltas.

All objectives are minimized. A partitioning where an objective is
undefined (an empty or zero-volume partition, or a side of size zero for
the sparsest cut) is *degenerate*: the value is NaN and the report says so.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError
from .graph import neighbor_counts


class ObjectiveKind(enum.Enum):
    KMinCut = "kmincut"
    NormalizedCut = "ncut"
    BalancedCut = "balanced"
    SparsestCut = "sparsest"

    @classmethod
    def parse(cls, token):
        if isinstance(token, cls):
            return token
        try:
            return cls(token)
        except ValueError:
            raise ValueError(f"unknown objective {token!r}; choose from "
                             f"{', '.join(k.value for k in cls)}") from None


# Denominator of the k-MinCut: "edges" counts each edge once, "incidence"
# counts both endpoints (sum of |e| over 2-element edges).
EDGE_MASS = ("edges", "incidence")


@dataclass(frozen=True)
class CutReport:
    objective: ObjectiveKind
    value: float
    degenerate: bool
    per_partition_cut: tuple
    per_partition_volume: tuple
    per_partition_size: tuple

    def to_text(self):
        """Flat ``key=value`` record, one key per line."""
        def join(xs):
            return ",".join(str(int(x)) for x in xs)
        return (f"objective={self.objective.value}\n"
                f"value={self.value!r}\n"
                f"degenerate={str(self.degenerate).lower()}\n"
                f"k={len(self.per_partition_cut)}\n"
                f"cut={join(self.per_partition_cut)}\n"
                f"volume={join(self.per_partition_volume)}\n"
                f"size={join(self.per_partition_size)}\n")


def partition_stats(g, p):
    """Per-partition crossing-edge counts, volumes and sizes."""
    a = p.assignment
    k = p.k
    cut = np.zeros(k, dtype=np.int64)
    if g.num_edges:
        src = a[g.edges[:, 0]]
        dst = a[g.edges[:, 1]]
        cross = src != dst
        cut += np.bincount(src[cross], minlength=k)
        cut += np.bincount(dst[cross], minlength=k)
    vol = np.bincount(a, weights=g.degrees, minlength=k).astype(np.int64)
    size = np.bincount(a, minlength=k)
    return cut, vol, size


def _require_edges(num_edges):
    if num_edges == 0:
        raise DegenerateInputError("objective undefined on a graph without edges")


def value_from_stats(kind, cut, vol, size, num_nodes, num_edges, edge_mass="edges"):
    """Objective value from per-partition statistics; NaN when degenerate."""
    _require_edges(num_edges)
    k = cut.shape[0]
    if kind is ObjectiveKind.KMinCut:
        mass = num_edges if edge_mass == "edges" else 2 * num_edges
        return float(np.sum(cut / mass))
    if kind is ObjectiveKind.SparsestCut:
        smaller = np.minimum(size, num_nodes - size)
        if (smaller == 0).any():
            return float("nan")
        return float(np.sum(cut / smaller))
    if (vol == 0).any():
        return float("nan")
    ncut = float(np.sum(cut / vol))
    if kind is ObjectiveKind.NormalizedCut:
        return ncut
    if kind is ObjectiveKind.BalancedCut:
        return ncut + float(np.sum((size - num_nodes / k) ** 2)) / num_nodes ** 2
    raise ValueError(kind)


def cut_size(g, p, l):
    """Number of edges with exactly one endpoint in partition ``l``."""
    inside = p.assignment[g.edges] == l
    return int(np.count_nonzero(inside[:, 0] != inside[:, 1]))


def volume(g, p, l):
    return int(g.degrees[p.assignment == l].sum())


def _value(g, p, kind, edge_mass="edges"):
    cut, vol, size = partition_stats(g, p)
    return value_from_stats(kind, cut, vol, size, g.num_nodes, g.num_edges, edge_mass)


def k_mincut(g, p, edge_mass="edges"):
    return _value(g, p, ObjectiveKind.KMinCut, edge_mass)


def normalized_cut(g, p):
    return _value(g, p, ObjectiveKind.NormalizedCut)


def balanced_cut(g, p):
    return _value(g, p, ObjectiveKind.BalancedCut)


def sparsest_cut(g, p):
    return _value(g, p, ObjectiveKind.SparsestCut)


def evaluate(g, p, kind, edge_mass="edges"):
    kind = ObjectiveKind.parse(kind)
    cut, vol, size = partition_stats(g, p)
    value = value_from_stats(kind, cut, vol, size, g.num_nodes, g.num_edges, edge_mass)
    return CutReport(kind, value, bool(np.isnan(value)),
                     tuple(cut.tolist()), tuple(vol.tolist()), tuple(size.tolist()))


def evaluate_all(g, p, edge_mass="edges"):
    return {kind: evaluate(g, p, kind, edge_mass) for kind in ObjectiveKind}


class CutTracker:
    """Incrementally maintained statistics for one partitioning.

    Holds, besides the per-partition cut/volume/size arrays, an ``(n, k)``
    table of neighbor counts per partition so that node scores and move
    deltas never need a pass over the whole edge set. The tracker owns
    ``partitioning``; moves must go through :meth:`move`.
    """

    def __init__(self, g, p, edge_mass="edges"):
        self.graph = g
        self.partitioning = p
        self.edge_mass = edge_mass
        self.cut, self.vol, self.size = partition_stats(g, p)
        self.neighbor_counts = neighbor_counts(g, p)

    @property
    def k(self):
        return self.partitioning.k

    def value(self, kind):
        g = self.graph
        return value_from_stats(kind, self.cut, self.vol, self.size,
                                g.num_nodes, g.num_edges, self.edge_mass)

    def _stats_after(self, v, to):
        i = self.partitioning.part(v)
        deg = int(self.graph.degrees[v])
        c_i = int(self.neighbor_counts[v, i])
        c_j = int(self.neighbor_counts[v, to])
        cut, vol, size = self.cut.copy(), self.vol.copy(), self.size.copy()
        cut[i] += 2 * c_i - deg
        cut[to] += deg - 2 * c_j
        vol[i] -= deg
        vol[to] += deg
        size[i] -= 1
        size[to] += 1
        return cut, vol, size

    def value_after(self, v, to, kind):
        if to == self.partitioning.part(v):
            return self.value(kind)
        g = self.graph
        cut, vol, size = self._stats_after(v, to)
        return value_from_stats(kind, cut, vol, size, g.num_nodes, g.num_edges, self.edge_mass)

    def delta(self, v, to, kind):
        if to == self.partitioning.part(v):
            now = self.value(kind)
            return now - now   # 0, or NaN for a degenerate state
        return self.value_after(v, to, kind) - self.value(kind)

    def move(self, v, to):
        i = self.partitioning.part(v)
        if i == to:
            return
        self.cut, self.vol, self.size = self._stats_after(v, to)
        nbrs = self.graph.neighbors(v)
        self.neighbor_counts[nbrs, i] -= 1
        self.neighbor_counts[nbrs, to] += 1
        self.partitioning.move(v, to)


def move_delta(g, p, v, to, kind, tracker=None):
    """Objective after moving ``v`` to ``to`` minus the objective before.

    With a :class:`CutTracker` for ``p`` the cost is O(k); without one the
    statistics are built first. NaN when either state is degenerate.
    """
    kind = ObjectiveKind.parse(kind)
    if not 0 <= to < p.k:
        raise ValueError(f"partition index {to} outside 0..{p.k - 1}")
    if tracker is None:
        tracker = CutTracker(g, p)
    return tracker.delta(v, to, kind)
