import numpy as np

from cutpolicy.graph import Partitioning
from cutpolicy.objectives import CutTracker
from cutpolicy.selection import (
    NodeScoreTable,
    Sweep,
    Tier,
    node_scores,
    random_select_node,
    scores_from_counts,
    select_node,
)
from tests.conftest import graph, part


def star5():
    return graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


def test_finite_score():
    table = node_scores(star5(), part([0, 0, 1, 1, 1]))
    assert table.tiers[0] == Tier.FINITE
    assert table.scores[0] == 0.75


def test_zero_score_when_surrounded(triangle):
    table = node_scores(triangle, part([0, 0, 0]))
    assert (table.scores == 0).all() and (table.tiers == Tier.ZERO).all()


def test_infinite_tier():
    g = graph(3, [(0, 1), (0, 2)])
    table = node_scores(g, part([0, 1, 1]))
    assert table.tiers[0] == Tier.INFINITE
    assert table.scores[0] == 1.0


def test_degree_normalization():
    counts = np.array([[1, 3, 0], [2, 6, 0]])
    table = scores_from_counts(counts, np.array([0, 0]), np.array([4, 8]))
    assert table.scores[0] == 0.75 and table.scores[1] == 0.375
    # the count ratio is scale free, so doubling the degree halves the score
    double = scores_from_counts(np.array([[2, 6]]), np.array([0]), np.array([4]))
    single = scores_from_counts(np.array([[1, 3]]), np.array([0]), np.array([2]))
    assert double.scores[0] == single.scores[0] / 2


def test_tier_beats_score():
    table = NodeScoreTable(np.array([0.0, 0.5, 3.0]),
                           np.array([Tier.ZERO, Tier.INFINITE, Tier.FINITE], dtype=np.int8))
    assert select_node(table, set()) == 1
    assert select_node(table, {1}) == 2
    assert select_node(table, {1, 2}) == 0
    assert select_node(table, {0, 1, 2}) is None


def test_id_tie_break():
    scores = np.zeros(8)
    scores[[3, 7]] = 2.0
    tiers = np.zeros(8, dtype=np.int8)
    tiers[[3, 7]] = Tier.FINITE
    assert select_node(NodeScoreTable(scores, tiers), set()) == 3


def test_random_select_covers_everything(four_cycle):
    seen = set()
    rng = np.random.default_rng(0)
    while (v := random_select_node(four_cycle, seen, rng)) is not None:
        seen.add(v)
    assert seen == {0, 1, 2, 3}


def test_random_sweep_visits_each_node_once(two_triangles):
    p = part([0, 1, 0, 1, 0, 1])
    sweep = Sweep(two_triangles, "random", np.random.default_rng(1))
    tracker = CutTracker(two_triangles, p)
    order = []
    while (v := sweep.next(tracker)) is not None:
        order.append(v)
    assert sorted(order) == list(range(6))


def test_heuristic_sweep_skips_settled_nodes(two_triangles):
    p = Partitioning([0, 0, 0, 1, 1, 1], 2)
    sweep = Sweep(two_triangles, "heuristic")
    tracker = CutTracker(two_triangles, p)
    order = []
    while (v := sweep.next(tracker)) is not None:
        order.append(v)
    assert sorted(order) == [2, 3]
