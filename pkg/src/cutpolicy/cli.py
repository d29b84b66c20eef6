"""Command-line entry point: ``cutpolicy <command> [flags]``.

Every command writes a JSON run manifest next to its outputs. The
manifest records the resolved flags, so ``cutpolicy replay`` can redo
the run and reproduce the outputs byte for byte.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .baseline import kmeans_baseline
from .errors import (
    ConfigError,
    DegenerateInputError,
    DimensionError,
    NoCandidatesError,
    ParseError,
    PreconditionError,
    SizeGuardError,
)
from .graph import (
    Partitioning,
    largest_connected_component,
    load_edge_list,
    load_features,
    load_partition,
    write_edge_list,
    write_partition,
)
from .objectives import ObjectiveKind, evaluate, evaluate_all
from .policy import load_checkpoint, save_checkpoint
from .posenc import PosConfig, lipschitz_embed
from .synth import SbmSpec, brute_force, sbm_generate
from .trainer import InferConfig, infer

log = logging.getLogger("cutpolicy")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_CONFIG = 4
EXIT_SIZE = 5

OBJECTIVES = [k.value for k in ObjectiveKind]


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _config(args):
    return {k: v for k, v in sorted(vars(args).items())
            if k not in ("func", "verbose")}


def write_manifest(path, args, inputs, outputs, seeds):
    doc = {
        "command": args.command,
        "config": _config(args),
        "seeds": seeds,
        "inputs": {str(p): _sha256(p) for p in inputs if p is not None},
        "outputs": [str(p) for p in outputs],
    }
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def _load_graph(path, features=None):
    g = load_edge_list(path)
    x = load_features(features, g) if features else None
    sub, x = largest_connected_component(g, x)
    if sub.num_nodes < g.num_nodes:
        log.warning("kept the largest connected component: %d of %d nodes",
                    sub.num_nodes, g.num_nodes)
    return sub, x


def _pos(args, g):
    return pipeline.fit_pos_config(g, PosConfig(args.alpha, args.beta, args.c, args.seed))


def _write_report(path, reports):
    text = "".join(r.to_text() for r in reports)
    Path(path).write_text(text)
    sys.stdout.write(text)


def cmd_gen_sbm(args):
    spec = SbmSpec(args.blocks, args.block_size, args.p_in, args.p_out, args.seed)
    g, labels = sbm_generate(spec)
    prefix = args.out_prefix
    edges, lab = f"{prefix}.edges", f"{prefix}.labels"
    write_edge_list(g, edges)
    write_partition(g, Partitioning(labels, spec.blocks), lab)
    write_manifest(f"{prefix}.manifest.json", args, [], [edges, lab], {"graph": args.seed})
    print(f"nodes={g.num_nodes} edges={g.num_edges}")


def cmd_embed(args):
    g, _ = _load_graph(args.graph)
    pe = lipschitz_embed(g, _pos(args, g))
    out = f"{args.out}.emb"
    np.savetxt(out, pe.matrix, fmt="%.17g")
    write_manifest(f"{args.out}.manifest.json", args, [args.graph], [out],
                   {"anchors": args.seed})


def cmd_warmstart(args):
    g, x = _load_graph(args.graph, args.features)
    prep = pipeline.prepare(g, x, _pos(args, g), args.k, seed=args.seed, init=args.init)
    part, rep = f"{args.out}.part", f"{args.out}.report"
    write_partition(g, prep.warm, part)
    _write_report(rep, evaluate_all(g, prep.warm).values())
    write_manifest(f"{args.out}.manifest.json", args, [args.graph, args.features],
                   [part, rep], {"anchors": args.seed, "kmeans": args.seed})


def _hyperparameters(args, pos):
    return {"alpha": pos.alpha, "beta": pos.beta, "c": pos.c, "objective": args.objective,
            "gamma": args.gamma, "T": args.T, "lambda": args.lam, "lr": args.lr,
            "updates": args.updates, "seed": args.seed, "init": args.init,
            "node_select": args.node_select}


def cmd_train(args):
    g, x = _load_graph(args.graph, args.features)
    pos = _pos(args, g)
    prep, result = pipeline.fit(
        g, x, args.k, args.objective, pos=pos, seed=args.seed, updates=args.updates,
        init=args.init, node_select=args.node_select, gamma=args.gamma, T=args.T,
        lam=args.lam, lr=args.lr)
    out = args.out
    ckpt, logf, part, rep = (f"{out}.ckpt.json", f"{out}.log", f"{out}.part", f"{out}.report")
    save_checkpoint(ckpt, result.params, _hyperparameters(args, prep.pos))
    with open(logf, "w") as fh:
        for rec in result.log:
            fh.write(rec.to_line() + "\n")
    write_partition(g, result.best_partitioning, part)
    _write_report(rep, [evaluate(g, result.best_partitioning, args.objective)])
    write_manifest(f"{out}.manifest.json", args, [args.graph, args.features],
                   [ckpt, logf, part, rep],
                   {"anchors": args.seed, "kmeans": args.seed, "policy": args.seed})


def cmd_partition(args):
    g, x = _load_graph(args.graph, args.features)
    params, hyper = load_checkpoint(args.checkpoint)
    try:
        pos = PosConfig(int(hyper["alpha"]), int(hyper["beta"]), float(hyper["c"]), args.seed)
        objective = hyper.get("objective", "ncut")
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"checkpoint hyperparameters incomplete: {exc}", args.checkpoint) from None
    prep = pipeline.prepare(g, x, pos, args.k, seed=args.seed)
    if prep.embeddings.shape[1] != params.input_dim:
        raise DimensionError(
            f"checkpoint expects input dim {params.input_dim}, but this graph and "
            f"feature set give {prep.embeddings.shape[1]} (alpha={prep.pos.alpha} plus "
            f"{0 if x is None else x.shape[1]} feature columns)")
    icfg = InferConfig(budget=args.budget, patience=args.patience,
                       node_select=args.node_select, seed=args.seed)
    best, report = infer(g, prep.embeddings, params, args.k, icfg, prep.warm, objective)
    part, rep = f"{args.out}.part", f"{args.out}.report"
    write_partition(g, best, part)
    _write_report(rep, [report])
    write_manifest(f"{args.out}.manifest.json", args,
                   [args.graph, args.features, args.checkpoint], [part, rep],
                   {"anchors": args.seed, "kmeans": args.seed, "sweep": args.seed})


def cmd_eval(args):
    kinds = list(ObjectiveKind) if args.objective == "all" else [ObjectiveKind(args.objective)]
    if args.method == "kmeans":
        if args.k is None:
            raise ConfigError("--method kmeans needs --k")
        g, x = _load_graph(args.graph, args.features)
        p, _ = kmeans_baseline(g, x, args.k, seed=args.seed)
        if args.out:
            write_partition(g, p, f"{args.out}.part")
    else:
        if args.partition_file is None:
            raise ConfigError("--partition-file is required unless --method kmeans")
        g, _ = _load_graph(args.graph)
        p = load_partition(args.partition_file, g, args.k)
    text = "".join(evaluate(g, p, kind).to_text() for kind in kinds)
    sys.stdout.write(text)
    if args.out:
        Path(f"{args.out}.report").write_text(text)
        outputs = [f"{args.out}.report"]
        if args.method == "kmeans":
            outputs.insert(0, f"{args.out}.part")
        write_manifest(f"{args.out}.manifest.json", args,
                       [args.graph, args.partition_file, args.features], outputs,
                       {"kmeans": args.seed})


def cmd_oracle(args):
    g, _ = _load_graph(args.graph)
    value, best = brute_force(g, args.k, args.objective)
    print(f"value={value!r}")
    if best is not None:
        for v in range(g.num_nodes):
            print(f"{g.node_ids[v]} {best.assignment[v]}")


def cmd_replay(args):
    doc = json.loads(Path(args.manifest).read_text())
    cfg = doc["config"]
    ns = build_parser().parse_args([cfg["command"]] + _required_stub(cfg["command"]))
    for key, value in cfg.items():
        setattr(ns, key, value)
    return ns.func(ns)


def _required_stub(command):
    # Satisfies argparse's required flags; real values come from the manifest.
    stubs = {"gen-sbm": ["--p-in", "0"], "embed": ["--graph", "-", "--out", "-"],
             "warmstart": ["--graph", "-", "--k", "1", "--out", "-"],
             "train": ["--graph", "-", "--out", "-"],
             "partition": ["--graph", "-", "--checkpoint", "-", "--k", "1", "--out", "-"],
             "eval": ["--graph", "-"], "oracle": ["--graph", "-", "--k", "1"]}
    if command not in stubs:
        raise ConfigError(f"cannot replay command {command!r}")
    return stubs[command]


def _pos_flags(p):
    p.add_argument("--alpha", type=int, default=35, help="number of anchor nodes")
    p.add_argument("--beta", type=int, default=100, help="random-walk iterations")
    p.add_argument("--c", type=float, default=0.85, help="walk continuation probability")


def build_parser():
    parser = argparse.ArgumentParser(prog="cutpolicy",
                                     description="Learned graph partitioning for cut objectives.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-sbm", help="sample a stochastic block model graph")
    p.add_argument("--blocks", type=int, default=5)
    p.add_argument("--block-size", type=int, default=100)
    p.add_argument("--p-in", type=float, required=True)
    p.add_argument("--p-out", type=float, default=0.002)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-prefix", default="sbm")
    p.set_defaults(func=cmd_gen_sbm)

    p = sub.add_parser("embed", help="write positional embeddings")
    p.add_argument("--graph", required=True)
    _pos_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("warmstart", help="write the initial partitioning")
    p.add_argument("--graph", required=True)
    p.add_argument("--features")
    p.add_argument("--k", type=int, required=True)
    _pos_flags(p)
    p.add_argument("--init", choices=["kmeans", "random"], default="kmeans")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_warmstart)

    p = sub.add_parser("train", help="train a policy on one graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--features")
    p.add_argument("--objective", choices=OBJECTIVES, default="ncut")
    p.add_argument("--k", type=int, default=5)
    _pos_flags(p)
    p.add_argument("--gamma", type=float, default=0.99)
    p.add_argument("--T", type=int, default=2)
    p.add_argument("--lambda", dest="lam", type=float, default=100.0)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--updates", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=["kmeans", "random"], default="kmeans")
    p.add_argument("--node-select", choices=["heuristic", "random"], default="heuristic")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("partition", help="partition a graph with a trained policy")
    p.add_argument("--graph", required=True)
    p.add_argument("--features")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, help="step budget (default 2|V|)")
    p.add_argument("--patience", type=int, default=1)
    p.add_argument("--node-select", choices=["heuristic", "random"], default="heuristic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("eval", help="score a partition file or the K-means baseline")
    p.add_argument("--graph", required=True)
    p.add_argument("--partition-file")
    p.add_argument("--objective", choices=["all"] + OBJECTIVES, default="all")
    p.add_argument("--method", choices=["file", "kmeans"], default="file")
    p.add_argument("--features")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="exact optimum by enumeration (|V| <= 12)")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--objective", choices=OBJECTIVES, default="ncut")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return parser


def _exit_code(exc):
    if isinstance(exc, SizeGuardError):
        return EXIT_SIZE
    if isinstance(exc, (DimensionError, ConfigError, NoCandidatesError)):
        return EXIT_CONFIG
    if isinstance(exc, (ParseError, PreconditionError, DegenerateInputError, OSError)):
        return EXIT_INPUT
    if isinstance(exc, ValueError):
        return EXIT_CONFIG
    raise exc


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ParseError, PreconditionError, DegenerateInputError, OSError, SizeGuardError,
            DimensionError, ConfigError, NoCandidatesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
