"""Command-line entry point: simulate, sweep, bounds, graph."""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import bounds as B
from .channels import ChannelKind, TrialRng
from .codes import CapabilityError
from .graphs import (ConnectivityError, gen_complete, gen_extended_er, gen_grid,
                     gen_random_geometric, gen_star, write_edge_list)
from .harness import (ConfigError, ExperimentConfig, emit_report, run_experiment, scaling_sweep,
                      sweep_trends)

# flag dest -> config key; only flags the user actually passed override the file
_SCHEME_FLAGS = {"gamma": "gamma", "rate": "rate", "rho": "group_density", "p_ch": "p_ch",
                 "c": "er_density", "delta": "delta", "j": "repetitions"}
_TOP_FLAGS = ("scheme", "topology", "n", "trials", "seed", "out", "format", "channel", "epsilon")
_TOPO_FLAGS = ("r", "side", "tails", "tail_len", "clique_size", "kind", "graph")


def _experiment_args(p: argparse.ArgumentParser):
    p.add_argument("--config", help="JSON file mirroring the experiment config")
    p.add_argument("--scheme")
    p.add_argument("--topology")
    p.add_argument("--n", type=int)
    p.add_argument("--channel", choices=[k.value for k in ChannelKind])
    p.add_argument("--epsilon", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--gamma", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--rho", type=float, help="group density")
    p.add_argument("--p-ch", dest="p_ch", type=float)
    p.add_argument("--c", type=float, help="ER density constant")
    p.add_argument("--delta", type=float)
    p.add_argument("--j", type=int, help="repetitions for the naive scheme")
    p.add_argument("--r", type=float, help="connection radius")
    p.add_argument("--side", type=int)
    p.add_argument("--tails", type=int)
    p.add_argument("--tail-len", dest="tail_len", type=int)
    p.add_argument("--clique-size", dest="clique_size", type=int)
    p.add_argument("--kind", choices=("light", "heavy"))
    p.add_argument("--graph", help="edge-list file for --topology file")


def config_from_args(args) -> ExperimentConfig:
    d: dict = {}
    if args.config:
        with open(args.config) as fh:
            d = json.load(fh)
    d.setdefault("topo_params", {})
    for name in _TOP_FLAGS:
        v = getattr(args, name, None)
        if v is not None:
            d["fmt" if name == "format" else name] = v
    for flag, key in _SCHEME_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            d[key] = v
    for name in _TOPO_FLAGS:
        v = getattr(args, name, None)
        if v is not None:
            d["topo_params"]["path" if name == "graph" else name] = v
    n_list = getattr(args, "n_list", None)
    if n_list:
        d["sweep"] = [int(v) for v in n_list.split(",") if v.strip()]
    if d.get("scheme") in ("gc3", "p2p_erasure"):
        d.setdefault("channel", "bec")
    if "n" not in d and d.get("sweep"):
        d["n"] = d["sweep"][0]
    missing = [k for k in ("scheme", "topology", "n") if k not in d]
    if missing:
        raise ConfigError(f"missing required settings: {', '.join(missing)}")
    return ExperimentConfig.from_dict(d)


def _summary(stats) -> str:
    lines = [f"{stats.config.scheme} on {stats.config.topology}, N={stats.extras.get('n_effective', stats.n)}, "
             f"{stats.config.channel.kind.value.upper()}({stats.config.channel.epsilon:g})",
             f"  trials {stats.trials}  failures {stats.failures}  Pe {stats.pe:.4g} "
             f"[{stats.pe_lo:.4g}, {stats.pe_hi:.4g}]",
             f"  broadcasts {stats.broadcasts_mean:.6g}"
             + ("" if stats.broadcasts_exact else f" (range {stats.broadcasts_min}..{stats.broadcasts_max})")
             + "  " + " ".join(f"{k}={v:.6g}" for k, v in stats.phases.items())]
    for chk in stats.bounds:
        lines.append(f"  {chk.report.name:<18} {chk.report.value:<12.5g} {chk.verdict}")
    return "\n".join(lines)


def cmd_simulate(args) -> int:
    cfg = config_from_args(args)
    stats = run_experiment(cfg)
    print(_summary(stats))
    if cfg.out:
        emit_report(stats, cfg.out, cfg.fmt)
    return 0


def cmd_sweep(args) -> int:
    cfg = config_from_args(args)
    rows = scaling_sweep(cfg)
    print(f"{'N':>6} {'broadcasts':>12} {'/N':>9} {'/(N lnlnN)':>11} {'/(N lnN)':>9} {'Pe':>10}")
    for r in rows:
        print(f"{r['N']:>6} {r['broadcasts']:>12.6g} {r['per_node']:>9.4g} {r['per_n_loglog']:>11.4g} "
              f"{r['per_n_log']:>9.4g} {r['pe']:>10.4g}")
    if len(rows) > 1:
        print(json.dumps(sweep_trends(rows)))
    if cfg.out:
        emit_report([r["stats"] for r in rows], cfg.out, cfg.fmt)
    return 0


_BOUND_ARGS = {
    "cutset_bsc": (B.cutset_lower_bsc, ("n", "dbar", "pe", "epsilon")),
    "cutset_bec": (B.cutset_lower_bec, ("n", "dbar", "pe", "epsilon")),
    "gc1_count": (B.gc1_count_upper, ("n", "dbar", "gamma", "rate")),
    "gc1_error": (B.gc1_error_upper, ("n", "gamma", "rate", "epsilon")),
    "goyal": (B.goyal_identity_check, ("beta", "n", "pe", "epsilon")),
    "constant_degree": (B.constant_degree_lower, ("n", "degree", "delta", "epsilon")),
    "gc2_local_error": (B.gc2_local_error_upper, ("n", "rho", "p_ch", "epsilon", "cg")),
    "gc2_counts": (B.gc2_counts, ("n", "rho", "p_ch", "epsilon", "cg", "dbar", "rate")),
    "gc2_routing_error": (B.gc2_routing_error_upper, ("n", "rho", "rate", "epsilon", "b")),
    "gc3_sum": (B.gc3_error_upper_sum, ("n", "c", "p_ch", "epsilon")),
    "gc3_closed": (B.gc3_error_upper_closed, ("n", "c", "p_ch", "epsilon", "delta")),
    "gc3_dominance": (B.gc3_closed_dominates_sum, ("n", "c", "p_ch", "epsilon", "delta")),
    "gc3_best_delta": (B.best_feasible_delta, ("n", "c", "p_ch", "epsilon")),
    "edge_lower": (B.edge_lower_bound, ("n", "pe", "epsilon", "c", "p_ch")),
    "repetition": (B.repetition_bound, ("epsilon", "j")),
}


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer, int)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else str(f)
    return v


def cmd_bounds(args) -> int:
    fn, names = _BOUND_ARGS[args.name]
    values = []
    for name in names:
        v = getattr(args, name)
        if v is None:
            raise ConfigError(f"bound {args.name} needs --{name.replace('_', '-')}")
        values.append(int(v) if name in ("n", "j", "b") else v)
    result = fn(*values)
    if isinstance(result, B.BoundReport):
        out = {"name": result.name, "value": result.value, "applicable": result.applicable,
               "flags": result.flags, "inputs": result.inputs, "derived": result.derived}
    elif result is None:
        out = {"name": args.name, "value": None, "applicable": False}
    elif isinstance(result, tuple):
        out = {"name": args.name, "local": result[0], "routing": result[1]}
    else:
        out = {"name": args.name, "value": result}
    print(json.dumps(_jsonable(out), indent=1))
    return 0


def cmd_graph(args) -> int:
    rng = TrialRng(args.seed, 0).for_purpose("graph")
    if args.gen == "complete":
        net = gen_complete(args.n)
    elif args.gen == "grid":
        net = gen_grid(args.side or math.isqrt(args.n + 1), args.r or 1.0)
    elif args.gen == "geometric":
        if args.r is None:
            raise ConfigError("geometric graphs need --r")
        for _ in range(1000):
            net, ok = gen_random_geometric(args.n, args.r, rng)
            if ok:
                break
        else:
            raise ConnectivityError(net.unreachable(), "no connected draw in 1000 attempts; increase --r")
    elif args.gen == "er":
        net = gen_extended_er(args.n, args.c or 6.0, rng)
    elif args.gen == "star":
        net = gen_star(args.tails or 4, args.tail_len or 4, args.clique_size or 0, args.kind or "light")
    else:
        net = gen_star(1, args.n)
    write_edge_list(net, args.out)
    print(f"wrote {args.out}: {net.size} nodes, {len(net.edges)} links")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphcode", description="Data gathering over noisy broadcast networks")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="Monte Carlo run of one scheme")
    _experiment_args(sim)
    sim.set_defaults(func=cmd_simulate)

    sw = sub.add_parser("sweep", help="scaling sweep over several N")
    _experiment_args(sw)
    sw.add_argument("--n-list", dest="n_list", help="comma separated N values")
    sw.set_defaults(func=cmd_sweep)

    bd = sub.add_parser("bounds", help="evaluate one closed-form bound")
    bd.add_argument("--name", required=True, choices=sorted(_BOUND_ARGS))
    for name in ("n", "j", "b"):
        bd.add_argument(f"--{name}", type=int)
    for name in ("dbar", "pe", "epsilon", "gamma", "rate", "beta", "degree", "delta", "rho",
                 "p_ch", "cg", "c"):
        bd.add_argument(f"--{name.replace('_', '-')}", dest=name, type=float)
    bd.set_defaults(func=cmd_bounds)

    gr = sub.add_parser("graph", help="generate a topology and write it as an edge list")
    gr.add_argument("--gen", required=True, choices=("complete", "grid", "geometric", "er", "star", "path"))
    gr.add_argument("--n", type=int, default=100)
    gr.add_argument("--r", type=float)
    gr.add_argument("--c", type=float)
    gr.add_argument("--side", type=int)
    gr.add_argument("--tails", type=int)
    gr.add_argument("--tail-len", dest="tail_len", type=int)
    gr.add_argument("--clique-size", dest="clique_size", type=int)
    gr.add_argument("--kind", choices=("light", "heavy"))
    gr.add_argument("--seed", type=int, default=0)
    gr.add_argument("--out", required=True)
    gr.set_defaults(func=cmd_graph)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CapabilityError, ConnectivityError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
