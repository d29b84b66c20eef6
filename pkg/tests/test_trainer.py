import math

import numpy as np
import pytest

from cutpolicy.errors import ConfigError, DegenerateInputError
from cutpolicy.graph import Partitioning
from cutpolicy.objectives import ObjectiveKind, evaluate
from cutpolicy.pipeline import fit, fit_and_partition, prepare
from cutpolicy.policy import (
    PolicyParameters,
    gnn_forward,
    partition_distribution,
    policy_gradient,
    sample_action,
)
from cutpolicy.posenc import PosConfig
from cutpolicy.synth import brute_force
from cutpolicy.trainer import (
    Adam,
    InferConfig,
    TrainConfig,
    apply_move,
    discounted_returns,
    infer,
    reward,
    train,
)
from tests.conftest import graph, part


def test_apply_move():
    p = part([0, 1, 1])
    apply_move(p, 1, 1)
    assert p == part([0, 1, 1])
    apply_move(p, 0, 1)
    assert p.members == [set(), {0, 1, 2}]
    with pytest.raises(ValueError):
        apply_move(p, 0, 2)


def test_reward_values():
    assert reward(1.5, 1.5) == 0.0
    assert reward(2.0, 1.0, 100.0) == pytest.approx(100 / 3)
    assert reward(2.0, math.nan, 100.0) == -100.0
    assert reward(0.0, 0.0) == 0.0


def test_discounted_returns():
    assert discounted_returns([1.0, 1.0], 0.99) == pytest.approx([1.99, 1.0])
    assert discounted_returns([1.0, 2.0, 3.0], 1.0) == [6.0, 5.0, 3.0]
    assert discounted_returns([0.0, 0.0], 0.5) == [0.0, 0.0]


def test_config_validation():
    with pytest.raises(ConfigError):
        TrainConfig(gamma=0.0)
    with pytest.raises(ConfigError):
        TrainConfig(node_select="greedy")
    with pytest.raises(ValueError):
        TrainConfig(objective="modularity")
    with pytest.raises(ConfigError):
        InferConfig(patience=0)


def bandit(lr, updates=200):
    """One node whose two candidate partitions pay +100 and -100."""
    g = graph(3, [(0, 1), (0, 2)])
    p = part([0, 0, 1])
    emb = np.random.default_rng(0).random((3, 4))
    params = PolicyParameters.init(4, 32, 2, seed=0)
    adam = Adam(params, lr)
    rng = np.random.default_rng(0)
    for _ in range(updates):
        cache = gnn_forward(g, emb, params, return_cache=True)
        dist = partition_distribution(g, cache.embeddings, p, 0, params)
        a = sample_action(dist, rng)
        adam.ascend(params, policy_gradient(g, cache, params, [(dist, a, 100.0 if a else -100.0)]))
    return partition_distribution(g, gnn_forward(g, emb, params), p, 0, params).prob_of(1)


def test_bandit_learns_the_paying_arm():
    assert bandit(1e-3) > 0.9
    assert bandit(1e-4) > 0.5


def two_triangle_setup(two_triangles, seed=0, k=2):
    prep = prepare(two_triangles, None, PosConfig(alpha=6, seed=seed), k, seed=seed)
    params = PolicyParameters.init(6, 32, 2, seed=seed)
    return prep, params


def test_zero_updates_keep_everything(two_triangles):
    prep, params = two_triangle_setup(two_triangles)
    before = params.copy()
    res = train(two_triangles, prep.embeddings, params, TrainConfig(k=2, updates=0), prep.warm)
    assert res.best_partitioning == prep.warm and res.log == []
    for name, t in before.items():
        assert np.array_equal(t, params[name])


def test_settled_graph_never_updates(two_triangles):
    # with a single partition there is never a choice to learn from
    prep, params = two_triangle_setup(two_triangles, k=1)
    before = params.copy()
    train(two_triangles, prep.embeddings, params,
          TrainConfig(objective="kmincut", k=1, updates=20), prep.warm)
    for name, t in before.items():
        assert np.array_equal(t, params[name])


def test_degenerate_start_rejected(two_triangles):
    prep, params = two_triangle_setup(two_triangles)
    with pytest.raises(DegenerateInputError):
        train(two_triangles, prep.embeddings, params, TrainConfig(k=2),
              Partitioning([0] * 6, 2))


def test_two_triangles_reach_optimum(two_triangles):
    opt, _ = brute_force(two_triangles, 2, "ncut")
    _, result = fit(two_triangles, None, 2, "ncut", pos=PosConfig(alpha=6), updates=500,
                    init="random", seed=1)
    assert result.best_value == pytest.approx(opt)


def test_training_is_deterministic(two_triangles):
    runs = [fit(two_triangles, None, 2, "ncut", pos=PosConfig(alpha=6), updates=60,
                init="random", seed=3)[1] for _ in range(2)]
    assert [r.to_line() for r in runs[0].log] == [r.to_line() for r in runs[1].log]
    assert runs[0].partitioning == runs[1].partitioning


def test_log_best_is_monotone(two_triangles):
    _, result = fit(two_triangles, None, 2, "ncut", pos=PosConfig(alpha=6), updates=80,
                    init="random", seed=2)
    best = [r.best_objective for r in result.log]
    assert all(b <= a for a, b in zip(best, best[1:]))


def test_infer_budget_zero_returns_warm(two_triangles):
    prep, params = two_triangle_setup(two_triangles)
    warm = Partitioning([0, 1, 0, 1, 0, 1], 2)
    best, rep = infer(two_triangles, prep.embeddings, params, 2, InferConfig(budget=0), warm)
    assert best == warm
    assert rep.value == evaluate(two_triangles, warm, "ncut").value


def test_infer_never_worse_than_start(two_triangles):
    prep, params = two_triangle_setup(two_triangles)
    for kind in ObjectiveKind:
        warm = Partitioning([0, 1, 0, 1, 0, 1], 2)
        start = evaluate(two_triangles, warm, kind).value
        _, rep = infer(two_triangles, prep.embeddings, params, 2, InferConfig(), warm, kind)
        assert rep.value <= start


def test_infer_at_a_different_k(two_triangles):
    prep, result = fit(two_triangles, None, 2, "ncut", pos=PosConfig(alpha=6), updates=20)
    warm3 = prepare(two_triangles, None, prep.pos, 3).warm
    best, rep = infer(two_triangles, prep.embeddings, result.params, 3, InferConfig(), warm3)
    best.check()
    assert best.k == 3 and (best.sizes() > 0).all()


def test_fit_and_partition_alpha_clamped(two_triangles, caplog):
    _, _, best, rep = fit_and_partition(two_triangles, None, 2, "ncut", updates=5)
    assert "exceeds" in caplog.text
    assert not rep.degenerate
