"""Episode driver: rewards, discounted returns, REINFORCE updates, inference."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateInputError, DimensionError
from .objectives import CutTracker, ObjectiveKind, evaluate
from .policy import (
    argmax_action,
    gnn_forward,
    partition_distribution,
    policy_gradient,
    sample_action,
)
from .selection import Sweep


@dataclass(frozen=True)
class TrainConfig:
    objective: ObjectiveKind = ObjectiveKind.NormalizedCut
    k: int = 2
    gamma: float = 0.99
    T: int = 2
    lam: float = 100.0
    lr: float = 1e-4
    updates: int = 2000
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    node_select: str = "heuristic"
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "objective", ObjectiveKind.parse(self.objective))
        if not 0.0 < self.gamma <= 1.0:
            raise ConfigError("gamma must lie in (0, 1]")
        if self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.lr <= 0:
            raise ConfigError("lr must be positive")
        if self.updates < 0:
            raise ConfigError("updates must be >= 0")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.node_select not in ("heuristic", "random"):
            raise ConfigError(f"unknown node selection {self.node_select!r}")


@dataclass(frozen=True)
class InferConfig:
    budget: int | None = None   # None means 2 * |V|
    patience: int = 1
    node_select: str = "heuristic"
    seed: int = 0

    def __post_init__(self):
        if self.budget is not None and self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")

    def resolved_budget(self, num_nodes):
        return 2 * num_nodes if self.budget is None else self.budget


@dataclass
class Transition:
    node: int
    prior: int
    chosen: int
    reward: float
    distribution: object = field(repr=False, default=None)


@dataclass
class LogRecord:
    update: int
    objective: float
    best_objective: float
    reward_mean: float

    def to_line(self):
        return f"{self.update} {self.objective!r} {self.best_objective!r} {self.reward_mean!r}"


@dataclass
class TrainResult:
    params: object
    log: list
    partitioning: object        # state after the last update
    best_partitioning: object
    best_value: float


def apply_move(p, v, to):
    """Move node ``v`` to partition ``to`` in place and return ``p``."""
    if not 0 <= to < p.k:
        raise ValueError(f"partition index {to} outside 0..{p.k - 1}")
    p.move(v, to)
    return p


def reward(prev, nxt, lam=100.0):
    """Scaled relative improvement ``lam * (prev - nxt) / (prev + nxt)``.

    A degenerate (NaN) successor earns ``-lam``; two zero objectives earn 0.
    """
    if math.isnan(nxt):
        return -lam
    if math.isnan(prev):
        return 0.0
    total = prev + nxt
    if total == 0:
        return 0.0
    return lam * (prev - nxt) / total


def discounted_returns(rewards, gamma):
    """``D[t] = sum_j gamma**j * R[t + j]`` over the rest of the horizon."""
    out = [0.0] * len(rewards)
    acc = 0.0
    for t in reversed(range(len(rewards))):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


class Adam:
    """Adam on a :class:`PolicyParameters`, stepping uphill."""

    def __init__(self, params, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = {n: np.zeros_like(t) for n, t in params.items()}
        self.v = {n: np.zeros_like(t) for n, t in params.items()}
        self.t = 0

    def ascend(self, params, grads):
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for name, g in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            params.tensors[name] += self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def _next_node(sweep, tracker):
    v = sweep.next(tracker)
    if v is None:
        sweep.reset()
        v = sweep.next(tracker)
    return v


def _check_dims(emb, params):
    if emb.shape[1] != params.input_dim:
        raise DimensionError(
            f"embeddings have width {emb.shape[1]} but the policy expects input dim "
            f"{params.input_dim}")


def train(g, emb, params, cfg, warm):
    """REINFORCE over trajectories of ``cfg.T`` node moves.

    ``params`` is updated in place and also returned in the result.
    ``warm`` is copied; moves persist from one update to the next. A move
    into a degenerate state is penalised with ``-lam`` and undone.
    """
    _check_dims(emb, params)
    if warm.k != cfg.k:
        raise ConfigError(f"warm start has k={warm.k}, config says k={cfg.k}")
    kind = cfg.objective
    p = warm.copy()
    tracker = CutTracker(g, p)
    value = tracker.value(kind)
    if math.isnan(value):
        raise DegenerateInputError(
            "the starting partitioning is degenerate for this objective; re-run the warm start")
    rng = np.random.default_rng(cfg.seed)
    sweep = Sweep(g, cfg.node_select, rng)
    adam = Adam(params, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
    best_value, best_assignment = value, p.assignment.copy()
    log = []
    for update in range(cfg.updates):
        cache = gnn_forward(g, emb, params, return_cache=True)
        H = cache.embeddings
        steps = []
        for _ in range(cfg.T):
            v = _next_node(sweep, tracker)
            if v is None:
                break
            dist = partition_distribution(g, H, p, v, params)
            prior = p.part(v)
            chosen = sample_action(dist, rng)
            nxt = tracker.value_after(v, chosen, kind)
            r = reward(value, nxt, cfg.lam)
            if not math.isnan(nxt):
                tracker.move(v, chosen)
                value = nxt
                if value < best_value:
                    best_value, best_assignment = value, p.assignment.copy()
            steps.append(Transition(v, prior, chosen, r, dist))
        rewards = [s.reward for s in steps]
        returns = discounted_returns(rewards, cfg.gamma)
        items = [(s.distribution, s.chosen, d) for s, d in zip(steps, returns)
                 if s.distribution.candidates.size > 1 and d != 0.0]
        if items:
            adam.ascend(params, policy_gradient(g, cache, params, items))
        log.append(LogRecord(update, value, best_value,
                             float(np.mean(rewards)) if rewards else 0.0))
    best = type(p)(best_assignment, p.k)
    return TrainResult(params, log, p, best, best_value)


def infer(g, emb, params, k, icfg, warm, objective=ObjectiveKind.NormalizedCut):
    """Greedy decoding from ``warm``; returns ``(best partitioning, CutReport)``.

    Node embeddings are computed once. Each step selects a node, moves it
    to the most probable partition (unless that would make the objective
    degenerate) and keeps the best partitioning seen. Stops after the
    step budget, after a sweep that changes nothing, or after
    ``icfg.patience`` consecutive sweeps without a new best.
    """
    _check_dims(emb, params)
    if warm.k != k:
        raise ConfigError(f"warm start has k={warm.k}, expected k={k}")
    kind = ObjectiveKind.parse(objective)
    p = warm.copy()
    tracker = CutTracker(g, p)
    value = tracker.value(kind)
    best_value, best_assignment = value, p.assignment.copy()
    budget = icfg.resolved_budget(g.num_nodes)
    H = gnn_forward(g, emb, params)
    sweep = Sweep(g, icfg.node_select, np.random.default_rng(icfg.seed))
    steps = 0
    stale = 0
    while steps < budget:
        changes = 0
        improved = False
        while steps < budget:
            v = sweep.next(tracker)
            if v is None:
                break
            steps += 1
            dist = partition_distribution(g, H, p, v, params)
            to = argmax_action(dist)
            if to == p.part(v):
                continue
            nxt = tracker.value_after(v, to, kind)
            if math.isnan(nxt):
                continue
            tracker.move(v, to)
            changes += 1
            value = nxt
            if math.isnan(best_value) or value < best_value:
                best_value, best_assignment = value, p.assignment.copy()
                improved = True
        sweep.reset()
        if changes == 0:
            break
        stale = 0 if improved else stale + 1
        if stale >= icfg.patience:
            break
    best = type(p)(best_assignment, p.k)
    return best, evaluate(g, best, kind)
