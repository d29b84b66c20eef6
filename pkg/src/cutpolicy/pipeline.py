"""End-to-end helpers shared by the CLI and the benchmark tests."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

from .errors import ConfigError
from .objectives import ObjectiveKind
from .policy import PolicyParameters
from .posenc import PosConfig, initial_embeddings, lipschitz_embed
from .trainer import InferConfig, TrainConfig, infer, train
from .warmstart import random_start, warm_start

log = logging.getLogger(__name__)

HIDDEN_DIM = 32
NUM_LAYERS = 2


@dataclass
class Prepared:
    embeddings: object
    warm: object
    pos: PosConfig


def fit_pos_config(g, pos):
    """Clamp the anchor count to the number of nodes."""
    if pos.alpha > g.num_nodes:
        log.warning("alpha=%d exceeds |V|=%d; using alpha=|V|", pos.alpha, g.num_nodes)
        pos = replace(pos, alpha=g.num_nodes)
    return pos


def prepare(g, x, pos, k, seed=0, init="kmeans", normalize_features=False):
    """Positional embeddings, initial embeddings and the warm-start partitioning."""
    pos = fit_pos_config(g, pos)
    pe = lipschitz_embed(g, pos)
    emb = initial_embeddings(g, x, pe, normalize_features)
    if init == "kmeans":
        warm = warm_start(g, emb, k, seed=seed)
    elif init == "random":
        warm = random_start(g, k, seed=seed)
    else:
        raise ConfigError(f"unknown init {init!r}")
    return Prepared(emb, warm, pos)


def fit(g, x, k, objective=ObjectiveKind.NormalizedCut, pos=None, seed=0,
        updates=2000, init="kmeans", node_select="heuristic", **train_kw):
    """Prepare, initialise a fresh policy and train it; returns ``(prepared, result)``."""
    pos = pos or PosConfig(seed=seed)
    prep = prepare(g, x, pos, k, seed=seed, init=init)
    params = PolicyParameters.init(prep.embeddings.shape[1], HIDDEN_DIM, NUM_LAYERS, seed=seed)
    cfg = TrainConfig(objective=objective, k=k, updates=updates, seed=seed,
                      node_select=node_select, **train_kw)
    result = train(g, prep.embeddings, params, cfg, prep.warm)
    return prep, result


def fit_and_partition(g, x, k, objective=ObjectiveKind.NormalizedCut, seed=0,
                      icfg=None, **kw):
    """Train, then decode greedily from the best training state.

    Returns ``(prepared, train result, best partitioning, report)``.
    """
    prep, result = fit(g, x, k, objective, seed=seed, **kw)
    icfg = icfg or InferConfig(node_select=kw.get("node_select", "heuristic"), seed=seed)
    best, report = infer(g, prep.embeddings, result.params, k, icfg,
                         result.best_partitioning, objective)
    return prep, result, best, report
