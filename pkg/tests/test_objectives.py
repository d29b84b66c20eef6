import math

import numpy as np
import pytest

from cutpolicy.errors import DegenerateInputError
from cutpolicy.objectives import (
    CutTracker,
    ObjectiveKind,
    balanced_cut,
    cut_size,
    evaluate,
    evaluate_all,
    k_mincut,
    move_delta,
    normalized_cut,
    sparsest_cut,
    volume,
)
from tests.conftest import graph, part


def test_cut_size(triangle, four_cycle):
    assert cut_size(triangle, part([0, 1, 1]), 0) == 2
    assert cut_size(four_cycle, part([0, 0, 1, 1]), 0) == 2
    assert cut_size(triangle, part([0, 0, 0]), 0) == 0


def test_volume(triangle, four_cycle):
    assert volume(triangle, part([0, 1, 1]), 0) == 2
    assert volume(triangle, part([0, 0, 0]), 0) == 2 * triangle.num_edges
    assert volume(four_cycle, part([0, 0, 1, 1]), 0) == 4


def test_k_mincut(triangle, four_cycle):
    assert k_mincut(triangle, part([0, 1, 1])) == pytest.approx(4 / 3, abs=1e-15)
    assert k_mincut(four_cycle, part([0, 0, 1, 1])) == 1.0
    assert k_mincut(four_cycle, part([0, 0, 0, 0])) == 0.0
    # counting both endpoints of each edge halves the value
    assert k_mincut(four_cycle, part([0, 0, 1, 1]), edge_mass="incidence") == 0.5


def test_normalized_cut(triangle, two_triangles):
    assert normalized_cut(triangle, part([0, 1, 1])) == pytest.approx(1.5, abs=1e-15)
    assert normalized_cut(two_triangles, part([0, 0, 0, 1, 1, 1])) == pytest.approx(2 / 7)


def test_balanced_cut(triangle, four_cycle):
    assert balanced_cut(four_cycle, part([0, 0, 1, 1])) == 1.0
    assert balanced_cut(triangle, part([0, 1, 1])) == pytest.approx(1.5 + 0.5 / 9, abs=1e-15)
    assert balanced_cut(triangle, part([0, 0, 0])) == 0.0


def test_sparsest_cut(star, four_cycle, triangle):
    assert sparsest_cut(star, part([0, 1, 1, 1])) == 6.0
    assert sparsest_cut(four_cycle, part([0, 0, 1, 1])) == 2.0
    rep = evaluate(triangle, part([0, 0, 0]), ObjectiveKind.SparsestCut)
    assert rep.degenerate and math.isnan(rep.value)


def test_empty_partition_is_degenerate(triangle):
    rep = evaluate(triangle, part([0, 0, 0], k=2), "ncut")
    assert rep.degenerate
    assert not evaluate(triangle, part([0, 0, 0], k=2), "kmincut").degenerate


def test_no_edges_raises():
    with pytest.raises(DegenerateInputError):
        evaluate(graph(2, []), part([0, 1]), "ncut")


def test_report_text(four_cycle):
    text = evaluate(four_cycle, part([0, 0, 1, 1]), "ncut").to_text()
    assert "value=1.0\n" in text and "cut=2,2\n" in text and "size=2,2\n" in text


def test_evaluate_all_keys(four_cycle):
    assert set(evaluate_all(four_cycle, part([0, 0, 1, 1]))) == set(ObjectiveKind)


def test_parse_rejects_unknown():
    with pytest.raises(ValueError):
        ObjectiveKind.parse("modularity")


def test_move_delta_examples(triangle):
    p = part([0, 1, 1])
    assert move_delta(triangle, p, 0, 0, "ncut") == 0.0
    assert move_delta(triangle, p, 0, 1, "kmincut") == pytest.approx(-4 / 3)


def test_tracker_follows_moves(two_triangles):
    rng = np.random.default_rng(3)
    p = part([0, 1, 0, 1, 0, 1])
    tracker = CutTracker(two_triangles, p)
    for _ in range(50):
        v, to = int(rng.integers(6)), int(rng.integers(2))
        tracker.move(v, to)
        for kind in ObjectiveKind:
            full = evaluate(two_triangles, p, kind).value
            got = tracker.value(kind)
            assert (math.isnan(full) and math.isnan(got)) or got == pytest.approx(full, abs=1e-12)
