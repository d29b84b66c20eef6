"""Partition-choice policy: mean-aggregation GNN plus a pairwise scoring MLP.

Parameter shapes depend only on the input width, the hidden width and the
number of message-passing layers, never on the graph size or on the number
of partitions. A partition is scored for a node ``v`` by averaging an MLP
over the pairs ``(v, u)`` for neighbors ``u`` inside it, and the scores of
all partitions holding a neighbor of ``v`` are softmaxed.

Gradients are derived by hand (reverse mode) in float64.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DimensionError, NoCandidatesError, ParseError

CHECKPOINT_FORMAT = "cutpolicy-checkpoint"
CHECKPOINT_VERSION = 1


class PolicyParameters:
    """Named float64 tensors of the policy.

    ``gnn.{l}.self`` and ``gnn.{l}.neigh`` are the ``(out, in)`` weights of
    layer ``l``; ``mlp.hidden.*`` maps ``2d -> d`` and ``mlp.out.*`` maps
    ``d -> 1``.
    """

    def __init__(self, tensors, input_dim, hidden_dim=32, num_layers=2):
        self.input_dim = int(input_dim)
        self.hidden_dim = int(hidden_dim)
        self.num_layers = int(num_layers)
        self.tensors = {name: np.asarray(t, dtype=np.float64) for name, t in tensors.items()}
        self.validate()

    def expected_shapes(self):
        d, f = self.hidden_dim, self.input_dim
        shapes = {}
        for l in range(self.num_layers):
            fan_in = f if l == 0 else d
            shapes[f"gnn.{l}.self"] = (d, fan_in)
            shapes[f"gnn.{l}.neigh"] = (d, fan_in)
        shapes["mlp.hidden.weight"] = (d, 2 * d)
        shapes["mlp.hidden.bias"] = (d,)
        shapes["mlp.out.weight"] = (d,)
        shapes["mlp.out.bias"] = (1,)
        return shapes

    def validate(self):
        if self.num_layers < 1 or self.hidden_dim < 1 or self.input_dim < 1:
            raise ConfigError("dimensions must be positive")
        shapes = self.expected_shapes()
        if set(shapes) != set(self.tensors):
            raise DimensionError(f"parameter names {sorted(self.tensors)} != {sorted(shapes)}")
        for name, shape in shapes.items():
            if self.tensors[name].shape != shape:
                raise DimensionError(f"{name} has shape {self.tensors[name].shape}, expected {shape}")
            if not np.isfinite(self.tensors[name]).all():
                raise ConfigError(f"{name} holds non-finite values")

    @classmethod
    def init(cls, input_dim, hidden_dim=32, num_layers=2, seed=0):
        """Glorot-uniform weights, zero biases."""
        rng = np.random.default_rng(seed)
        proto = cls.__new__(cls)
        proto.input_dim, proto.hidden_dim, proto.num_layers = input_dim, hidden_dim, num_layers
        tensors = {}
        for name, shape in proto.expected_shapes().items():
            if name.endswith("bias"):
                tensors[name] = np.zeros(shape)
                continue
            fan_out, fan_in = (1, shape[0]) if len(shape) == 1 else shape
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            tensors[name] = rng.uniform(-limit, limit, size=shape)
        return cls(tensors, input_dim, hidden_dim, num_layers)

    def zeros_like(self):
        return PolicyParameters({n: np.zeros_like(t) for n, t in self.tensors.items()},
                                self.input_dim, self.hidden_dim, self.num_layers)

    def copy(self):
        return PolicyParameters({n: t.copy() for n, t in self.tensors.items()},
                                self.input_dim, self.hidden_dim, self.num_layers)

    def __getitem__(self, name):
        return self.tensors[name]

    def __iter__(self):
        return iter(self.tensors)

    def items(self):
        return self.tensors.items()

    def num_parameters(self):
        return sum(t.size for t in self.tensors.values())


@dataclass
class ForwardCache:
    layers: list       # h^0 .. h^L
    aggregated: list   # mean of neighbor h^l, l = 0 .. L-1
    pre: list          # pre-activation z^1 .. z^L

    @property
    def embeddings(self):
        return self.layers[-1]


def gnn_forward(g, emb, params, return_cache=False):
    """Node embeddings after ``params.num_layers`` rounds of message passing.

    ``h^{l+1}_u = W_self h^l_u + W_neigh mean(h^l of neighbors of u)``,
    with ReLU between layers and a linear last layer. An isolated node's
    neighbor mean is the zero vector.
    """
    h = np.asarray(emb, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] != g.num_nodes:
        raise DimensionError(f"embedding matrix must have {g.num_nodes} rows")
    if h.shape[1] != params.input_dim:
        raise DimensionError(f"embedding width {h.shape[1]} != policy input dim {params.input_dim}")
    agg_op = g.mean_operator
    layers, aggregated, pre = [h], [], []
    for l in range(params.num_layers):
        m = agg_op @ h
        z = h @ params[f"gnn.{l}.self"].T + m @ params[f"gnn.{l}.neigh"].T
        h = z if l == params.num_layers - 1 else np.maximum(z, 0.0)
        aggregated.append(m)
        pre.append(z)
        layers.append(h)
    cache = ForwardCache(layers, aggregated, pre)
    return cache if return_cache else cache.embeddings


def _pair_outputs(H, v, nbrs, params):
    """MLP(relu(h_v || h_u)) for every ``u`` in ``nbrs`` plus intermediates."""
    d = H.shape[1]
    pair = np.empty((nbrs.shape[0], 2 * d))
    pair[:, :d] = H[v]
    pair[:, d:] = H[nbrs]
    x = np.maximum(pair, 0.0)
    a = x @ params["mlp.hidden.weight"].T + params["mlp.hidden.bias"]
    z = np.maximum(a, 0.0)
    y = z @ params["mlp.out.weight"] + params["mlp.out.bias"][0]
    return y, (pair, x, a, z)


@dataclass(frozen=True)
class ActionDistribution:
    node: int
    candidates: np.ndarray      # partition indices, ascending
    probabilities: np.ndarray
    scores: np.ndarray          # unnormalized, one per candidate
    neighbors: np.ndarray
    group: np.ndarray           # candidate position of each neighbor

    def prob_of(self, q):
        hit = np.flatnonzero(self.candidates == q)
        return float(self.probabilities[hit[0]]) if hit.size else 0.0


def part_score(g, H, p, v, q, params):
    """Mean MLP output over neighbors of ``v`` that sit in partition ``q``."""
    nbrs = g.neighbors(v)
    inside = nbrs[p.assignment[nbrs] == q]
    if inside.size == 0:
        raise NoCandidatesError(f"node {v} has no neighbor in partition {q}")
    y, _ = _pair_outputs(H, v, inside, params)
    return float(y.mean())


def partition_distribution(g, H, p, v, params):
    """Softmax over the partitions that contain at least one neighbor of ``v``."""
    nbrs = g.neighbors(v)
    if nbrs.size == 0:
        raise NoCandidatesError(f"node {v} has no neighbors")
    candidates, group = np.unique(p.assignment[nbrs], return_inverse=True)
    y, _ = _pair_outputs(H, v, nbrs, params)
    counts = np.bincount(group, minlength=candidates.size)
    scores = np.bincount(group, weights=y, minlength=candidates.size) / counts
    shifted = np.exp(scores - scores.max())
    probs = shifted / shifted.sum()
    return ActionDistribution(int(v), candidates, probs, scores, nbrs, group)


def sample_action(dist, rng):
    """Draw a partition index from ``dist`` with generator ``rng``."""
    if dist.candidates.size == 1:
        return int(dist.candidates[0])
    i = rng.choice(dist.candidates.size, p=dist.probabilities)
    return int(dist.candidates[i])


def argmax_action(dist):
    """Most probable candidate, ties to the lowest partition index."""
    return int(dist.candidates[np.argmax(dist.probabilities)])


def _mlp_backward(H, dist, chosen, weight, params, grads, dH):
    hit = np.flatnonzero(dist.candidates == chosen)
    if hit.size == 0:
        raise ValueError(f"partition {chosen} is not a candidate for node {dist.node}")
    if dist.candidates.size == 1:
        return
    d = H.shape[1]
    ds = -dist.probabilities.copy()
    ds[hit[0]] += 1.0
    counts = np.bincount(dist.group, minlength=dist.candidates.size)
    dy = weight * ds[dist.group] / counts[dist.group]
    _, (pair, x, a, z) = _pair_outputs(H, dist.node, dist.neighbors, params)
    grads["mlp.out.weight"] += dy @ z
    grads["mlp.out.bias"][0] += dy.sum()
    da = np.outer(dy, params["mlp.out.weight"]) * (a > 0)
    grads["mlp.hidden.weight"] += da.T @ x
    grads["mlp.hidden.bias"] += da.sum(axis=0)
    dpair = (da @ params["mlp.hidden.weight"]) * (pair > 0)
    dH[dist.node] += dpair[:, :d].sum(axis=0)
    np.add.at(dH, dist.neighbors, dpair[:, d:])


def policy_gradient(g, cache, params, items):
    """Gradient of ``sum(weight * log pi(chosen))`` over ``items``.

    ``items`` holds ``(distribution, chosen, weight)`` triples whose
    distributions were computed from ``cache.embeddings``. Returns a
    :class:`PolicyParameters` of gradients.
    """
    grads = params.zeros_like()
    H = cache.embeddings
    dH = np.zeros_like(H)
    for dist, chosen, weight in items:
        _mlp_backward(H, dist, chosen, weight, params, grads.tensors, dH)
    agg_t = g.mean_operator.T
    for l in reversed(range(params.num_layers)):
        if l < params.num_layers - 1:
            dz = dH * (cache.pre[l] > 0)
        else:
            dz = dH
        grads.tensors[f"gnn.{l}.self"] += dz.T @ cache.layers[l]
        grads.tensors[f"gnn.{l}.neigh"] += dz.T @ cache.aggregated[l]
        if l > 0:
            dH = dz @ params[f"gnn.{l}.self"] + agg_t @ (dz @ params[f"gnn.{l}.neigh"])
    return grads


def log_prob(g, emb, p, v, chosen, params):
    H = gnn_forward(g, emb, params)
    dist = partition_distribution(g, H, p, v, params)
    pr = dist.prob_of(chosen)
    if pr == 0.0:
        raise ValueError(f"partition {chosen} is not a candidate for node {v}")
    return float(np.log(pr))


def log_prob_grad(g, emb, p, v, chosen, params):
    """Exact gradient of ``log pi(chosen | state)`` for node ``v``."""
    cache = gnn_forward(g, emb, params, return_cache=True)
    dist = partition_distribution(g, cache.embeddings, p, v, params)
    return policy_gradient(g, cache, params, [(dist, chosen, 1.0)])


def save_checkpoint(path, params, hyperparameters=None):
    """Write parameters as a versioned JSON document.

    Floats are written with ``repr`` precision so a reload is exact, and
    key order is fixed so identical parameters give identical bytes.
    """
    doc = {
        "format": CHECKPOINT_FORMAT,
        "version": CHECKPOINT_VERSION,
        "dims": {"input": params.input_dim, "hidden": params.hidden_dim,
                 "layers": params.num_layers},
        "hyperparameters": dict(sorted((hyperparameters or {}).items())),
        "tensors": {name: params[name].tolist() for name in params.expected_shapes()},
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_checkpoint(path):
    """Read a checkpoint; returns ``(params, hyperparameters)``."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"checkpoint is not valid JSON: {exc}", path) from None
    if doc.get("format") != CHECKPOINT_FORMAT:
        raise ParseError("not a policy checkpoint", path)
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ParseError(f"unsupported checkpoint version {doc.get('version')!r}", path)
    try:
        dims = doc["dims"]
        params = PolicyParameters(doc["tensors"], dims["input"], dims["hidden"], dims["layers"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed checkpoint: {exc}", path) from None
    return params, doc.get("hyperparameters", {})
