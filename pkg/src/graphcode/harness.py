"""Monte Carlo experiments, scaling sweeps, bound verdicts and report files."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.stats import binomtest

from . import bounds as B
from .channels import ChannelKind, ChannelSpec, TrialRng
from .codes import CapabilityError
from .graphs import (GenerationError, Network, avg_distance, backbone, bfs_layering, gen_complete,
                     gen_extended_er, gen_grid, gen_random_geometric, gen_star,
                     read_edge_list, tessellate)
from .schemes import (SchemeConfig, gc2_audit, run_gc1, run_gc2, run_gc3, run_naive,
                      run_p2p_erasure)

SCHEMES = ("naive", "gc1", "gc1_bec", "gc2", "gc2_bec", "gc3", "p2p_erasure")
TOPOLOGIES = ("complete", "grid", "geometric", "random_geometric", "er", "star", "path", "file")
RANDOM_TOPOLOGIES = ("random_geometric", "er")
GEOMETRIC = ("grid", "geometric", "random_geometric")
VERDICTS = ("satisfied", "violated", "vacuous", "infeasible")
REPORT_FIELDS = ("scheme", "N", "topology", "epsilon", "channel", "param_json", "trials",
                 "failures", "pe", "pe_lo", "pe_hi", "broadcasts", "broadcasts_per_node",
                 "bound_name", "bound_value", "verdict", "seed")
CONNECT_ATTEMPTS = 1000
SIGMAS = 3.0


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    scheme: str
    topology: str
    n: int
    channel: ChannelSpec
    scheme_cfg: SchemeConfig | None = None
    topo_params: dict = field(default_factory=dict)
    trials: int = 1000
    seed: int = 0
    sweep: tuple = ()
    p_tar: float | None = None
    out: str | None = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.scheme_cfg is None:
            object.__setattr__(self, "scheme_cfg", SchemeConfig(self.channel))
        elif self.scheme_cfg.channel != self.channel:
            object.__setattr__(self, "scheme_cfg", dataclasses.replace(self.scheme_cfg, channel=self.channel))
        object.__setattr__(self, "sweep", tuple(int(v) for v in self.sweep))
        self.validate()

    def validate(self):
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; choose from {', '.join(SCHEMES)}")
        if self.topology not in TOPOLOGIES:
            raise ConfigError(f"unknown topology {self.topology!r}; choose from {', '.join(TOPOLOGIES)}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("report format must be csv or json")
        bec = self.channel.kind is ChannelKind.BEC
        if self.scheme in ("gc3", "p2p_erasure") and not bec:
            raise ConfigError(f"{self.scheme} runs over a BEC")
        if self.scheme in ("gc1_bec", "gc2_bec") and not bec:
            raise ConfigError(f"{self.scheme} needs a BEC channel")
        if self.scheme in ("gc3", "p2p_erasure") and self.topology != "er":
            raise ConfigError(f"{self.scheme} needs the extended ER topology (--topology er)")
        if self.scheme.startswith("gc2") and self.topology not in GEOMETRIC + ("file",):
            raise ConfigError("gc2 needs a geometric topology (grid, geometric, random_geometric)")
        if self.scheme == "naive" and self.topology not in ("complete", "er", "file"):
            raise ConfigError("naive needs a direct link from every node to the sink (complete or er)")
        if self.topology == "file" and "path" not in self.topo_params:
            raise ConfigError("file topology needs topo_params['path']")
        if self.topology in ("geometric", "random_geometric") and "r" not in self.topo_params:
            raise ConfigError(f"{self.topology} topology needs a radius r")
        if self.topology == "grid":
            side = math.isqrt(self.n + 1)
            if side * side != self.n + 1 and "side" not in self.topo_params:
                raise ConfigError("grid needs N + 1 to be a square (or an explicit side)")
        if self.p_tar is not None and not 0 < self.p_tar < 1:
            raise ConfigError("p_tar must lie in (0, 1)")

    @property
    def randomized_topology(self) -> bool:
        return self.topology in RANDOM_TOPOLOGIES

    def with_n(self, n: int) -> "ExperimentConfig":
        params = dict(self.topo_params)
        params.pop("side", None)
        return dataclasses.replace(self, n=int(n), topo_params=params, sweep=())

    def params(self) -> dict:
        return {**self.scheme_cfg.params(), **self.topo_params}

    def to_dict(self) -> dict:
        return {"scheme": self.scheme, "topology": self.topology, "n": self.n,
                "channel": self.channel.kind.value, "epsilon": self.channel.epsilon,
                **self.scheme_cfg.params(), "topo_params": dict(self.topo_params),
                "trials": self.trials, "seed": self.seed, "sweep": list(self.sweep),
                "p_tar": self.p_tar, "out": self.out, "fmt": self.fmt}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        channel = ChannelSpec(ChannelKind(d.pop("channel", "bsc")), float(d.pop("epsilon", 0.0)))
        known = {f.name for f in dataclasses.fields(SchemeConfig)} - {"channel", "k_max"}
        scheme_kw = {k: d.pop(k) for k in list(d) if k in known}
        if "repetitions" in scheme_kw:
            scheme_kw["repetitions"] = int(scheme_kw["repetitions"])
        unknown = set(d) - {"scheme", "topology", "n", "topo_params", "trials", "seed",
                            "sweep", "p_tar", "out", "fmt"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(scheme=d["scheme"], topology=d["topology"], n=int(d["n"]), channel=channel,
                   scheme_cfg=SchemeConfig(channel, **scheme_kw),
                   topo_params=dict(d.get("topo_params") or {}), trials=int(d.get("trials", 1000)),
                   seed=int(d.get("seed", 0)), sweep=tuple(d.get("sweep") or ()),
                   p_tar=d.get("p_tar"), out=d.get("out"), fmt=d.get("fmt", "csv"))


@dataclass
class BoundCheck:
    report: B.BoundReport
    verdict: str
    compared: float


@dataclass
class TrialStats:
    config: ExperimentConfig
    trials: int
    failures: int
    pe: float
    pe_lo: float
    pe_hi: float
    broadcasts_mean: float
    broadcasts_min: int
    broadcasts_max: int
    phases: dict
    failure_reasons: dict
    extras: dict
    bounds: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def broadcasts_exact(self) -> bool:
        return self.broadcasts_min == self.broadcasts_max

    def bound(self, name: str) -> BoundCheck | None:
        return next((b for b in self.bounds if b.report.name == name), None)

    def comparable(self) -> dict:
        """Everything except wall time, for determinism checks."""
        d = {k: v for k, v in dataclasses.asdict(self).items() if k not in ("wall_time", "config", "bounds")}
        d["bounds"] = [(b.report.name, b.report.value, b.verdict) for b in self.bounds]
        return d


def wilson_interval(failures: int, trials: int) -> tuple[float, float]:
    ci = binomtest(failures, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return max(0.0, float(ci.low)), min(1.0, float(ci.high))


# ------------------------------------------------------------ topologies

def build_topology(cfg: ExperimentConfig, rng: np.random.Generator) -> Network:
    p = cfg.topo_params
    n = cfg.n
    kind = cfg.topology
    if kind == "complete":
        return gen_complete(n)
    if kind == "grid":
        side = int(p.get("side", math.isqrt(n + 1)))
        return gen_grid(side, float(p.get("r", 1.0)))
    if kind in ("geometric", "random_geometric"):
        for _ in range(CONNECT_ATTEMPTS):
            net, ok = gen_random_geometric(n, float(p["r"]), rng)
            if ok:
                return net
        raise GenerationError(range(1, n + 1), f"no connected geometric graph with N={n}, "
                              f"r={p['r']} in {CONNECT_ATTEMPTS} draws; increase r")
    if kind == "er":
        return gen_extended_er(n, cfg.scheme_cfg.er_density, rng)
    if kind == "star":
        return gen_star(int(p.get("tails", 4)), int(p.get("tail_len", max(1, n // 4))),
                        int(p.get("clique_size", 0)), p.get("kind", "light"))
    if kind == "path":
        return gen_star(1, n)
    if kind == "file":
        return read_edge_list(p["path"], require_connected=True)
    raise ConfigError(kind)


@dataclass
class _Prepared:
    net: Network
    layering: object = None
    partition: object = None
    dbar: float = 1.0


def _prepare(cfg: ExperimentConfig, net: Network) -> _Prepared:
    if cfg.scheme == "p2p_erasure":
        return _Prepared(net)
    layering = bfs_layering(net)
    partition = None
    if cfg.scheme.startswith("gc2"):
        partition = tessellate(net, None, cfg.scheme_cfg.group_density, layering)
    return _Prepared(net, layering, partition, avg_distance(layering))


def _fixed_topology(cfg: ExperimentConfig) -> _Prepared | None:
    if cfg.randomized_topology:
        return None
    rng = TrialRng(cfg.seed, 0).for_purpose("fixed-topology")
    net = build_topology(cfg, rng)
    if net.n != cfg.n and cfg.topology not in ("star", "file", "grid"):
        raise ConfigError(f"topology has {net.n} non-sink nodes, expected {cfg.n}")
    return _prepare(cfg, net)


# ----------------------------------------------------------------- trials

def _one_trial(cfg: ExperimentConfig, prep: _Prepared | None, trial: int):
    rng = TrialRng(cfg.seed, trial)
    if prep is None:
        prep = _prepare(cfg, build_topology(cfg, rng.for_purpose("topology")))
    sc = cfg.scheme_cfg
    n = cfg.n if cfg.scheme == "p2p_erasure" else prep.net.n
    x = rng.for_purpose("message").integers(0, 2, n).astype(np.uint8)
    if cfg.scheme == "naive":
        res = run_naive(prep.net, x, sc.repetitions, cfg.channel, rng)
    elif cfg.scheme in ("gc1", "gc1_bec"):
        res = run_gc1(prep.net, prep.layering, x, sc, rng)
    elif cfg.scheme in ("gc2", "gc2_bec"):
        res = run_gc2(prep.net, x, sc, rng, partition=prep.partition)
    elif cfg.scheme == "gc3":
        res = run_gc3(prep.net, x, sc, rng)
    else:
        res = run_p2p_erasure(n, sc.er_density, x, cfg.channel.epsilon, rng)
    return prep, res, res.recovered(x)


def _empty_acc() -> dict:
    return {"trials": 0, "failures": 0, "bsum": 0, "bmin": None, "bmax": None, "phases": {},
            "reasons": {}, "dbar": 0.0, "n": 0, "degree_sum": 0, "degree_min": None,
            "degree_lhs": 0.0, "sparse": 0, "t": None, "j": None, "cells": None,
            "groups": None, "audit_ok": 0}


def _run_chunk(args) -> dict:
    cfg, prep, start, stop = args
    acc = _empty_acc()
    for trial in range(start, stop):
        p, res, ok = _one_trial(cfg, prep, trial)
        total = res.broadcasts_total
        acc["trials"] += 1
        acc["failures"] += 0 if ok else 1
        if not ok:
            reason = res.failure or "wrong_estimate"
            acc["reasons"][reason] = acc["reasons"].get(reason, 0) + 1
        acc["bsum"] += total
        acc["bmin"] = total if acc["bmin"] is None else min(acc["bmin"], total)
        acc["bmax"] = total if acc["bmax"] is None else max(acc["bmax"], total)
        for k, v in res.broadcasts_by_phase.items():
            acc["phases"][k] = acc["phases"].get(k, 0) + int(v)
        acc["dbar"] += p.dbar
        acc["n"] = p.net.n if cfg.scheme != "p2p_erasure" else cfg.n
        ex = res.extras
        if "out_degree" in ex:
            deg = ex["out_degree"]
            s = int(deg.sum())
            acc["degree_sum"] += s
            acc["degree_min"] = s if acc["degree_min"] is None else min(acc["degree_min"], s)
            if cfg.channel.epsilon > 0:
                acc["degree_lhs"] += float(np.sum(ex["t"] * deg + 1))
        if "sparse" in ex:
            acc["sparse"] += int(ex["sparse"])
        for key in ("t", "j", "cells", "groups"):
            if key in ex:
                acc[key] = ex[key]
        if cfg.scheme.startswith("gc2"):
            audit = gc2_audit(p.net, p.partition, backbone(p.net, p.partition, p.layering),
                              ex["j"], cfg.scheme_cfg.group_density, cfg.scheme_cfg.rate)
            acc["audit_ok"] += int(audit == {k: res.broadcasts_by_phase[k] for k in audit})
    return acc


def _fold(parts: list[dict]) -> dict:
    acc = _empty_acc()
    for part in parts:
        for key in ("trials", "failures", "bsum", "dbar", "degree_sum", "degree_lhs", "sparse", "audit_ok"):
            acc[key] += part[key]
        for key, pick in (("bmin", min), ("bmax", max), ("degree_min", min)):
            vals = [v for v in (acc[key], part[key]) if v is not None]
            acc[key] = pick(vals) if vals else None
        for name in ("phases", "reasons"):
            for k, v in part[name].items():
                acc[name][k] = acc[name].get(k, 0) + v
        for key in ("n", "t", "j", "cells", "groups"):
            if part[key] is not None and part[key] != 0:
                acc[key] = part[key]
    return acc


def worker_count(chunks: int) -> int:
    cap = os.environ.get("GRAPHCODE_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, chunks))


def _chunks(trials: int, size: int = 250) -> list[tuple[int, int]]:
    return [(s, min(trials, s + size)) for s in range(0, trials, size)]


def run_experiment(cfg: ExperimentConfig) -> TrialStats:
    """Run ``cfg.trials`` independent trials and attach bound verdicts.

    Random topologies are redrawn every trial so the error estimate is the
    ensemble average; fixed topologies are built once from the seed.
    Results depend only on the config and seed, not on the worker count.
    """
    cfg.validate()
    start = time.perf_counter()
    try:
        prep = _fixed_topology(cfg)
        jobs = [(cfg, prep, a, b) for a, b in _chunks(cfg.trials)]
        workers = worker_count(len(jobs))
        if workers == 1:
            parts = [_run_chunk(j) for j in jobs]
        else:
            with ProcessPoolExecutor(workers) as pool:
                parts = list(pool.map(_run_chunk, jobs))
    except CapabilityError as exc:
        raise CapabilityError(f"{exc} (scheme {cfg.scheme}, N={cfg.n})") from exc
    acc = _fold(parts)
    trials, failures = acc["trials"], acc["failures"]
    lo, hi = wilson_interval(failures, trials)
    extras = {"dbar": acc["dbar"] / trials, "n_effective": acc["n"]}
    for key in ("t", "j", "cells", "groups"):
        if acc[key] is not None:
            extras[key] = acc[key]
    if acc["degree_min"] is not None:
        extras["out_degree_total_mean"] = acc["degree_sum"] / trials
        extras["out_degree_total_min"] = acc["degree_min"]
        extras["density_lhs_mean"] = acc["degree_lhs"] / trials
    if cfg.scheme == "p2p_erasure":
        extras["sparse_fraction"] = acc["sparse"] / trials
    if cfg.scheme.startswith("gc2"):
        extras["audit_matches"] = acc["audit_ok"]
    stats = TrialStats(cfg, trials, failures, failures / trials, lo, hi, acc["bsum"] / trials,
                       int(acc["bmin"]), int(acc["bmax"]),
                       {k: v / trials for k, v in sorted(acc["phases"].items())},
                       dict(sorted(acc["reasons"].items())), extras)
    stats.bounds = attach_bounds(stats)
    stats.wall_time = time.perf_counter() - start
    return stats


# ----------------------------------------------------------------- verdicts

def error_verdict(report: B.BoundReport, failures: int, trials: int) -> str:
    """Compare an upper bound on Pe with the empirical rate at 3 sigma slack."""
    if not report.applicable or not math.isfinite(report.value):
        return "infeasible"
    if report.value >= 1:
        return "vacuous"
    sigma = math.sqrt(report.value * (1 - report.value) / trials)
    return "satisfied" if failures / trials <= report.value + SIGMAS * sigma else "violated"


def count_verdict(report: B.BoundReport, measured: float, lower: bool) -> str:
    if not report.applicable or not math.isfinite(report.value):
        return "infeasible"
    if lower and report.value <= 0:
        return "vacuous"
    ok = measured >= report.value if lower else measured <= report.value
    return "satisfied" if ok else "violated"


def _bound_n(stats: TrialStats) -> int:
    return int(stats.extras.get("n_effective") or stats.n)


def attach_bounds(stats: TrialStats) -> list[BoundCheck]:
    cfg = stats.config
    sc = cfg.scheme_cfg
    eps = cfg.channel.epsilon
    kind = cfg.channel.kind
    n = _bound_n(stats)
    dbar = stats.extras["dbar"]
    out: list[BoundCheck] = []

    def err(report):
        out.append(BoundCheck(report, error_verdict(report, stats.failures, stats.trials), stats.pe))

    def count(report, measured, lower):
        out.append(BoundCheck(report, count_verdict(report, measured, lower), measured))

    if cfg.scheme != "p2p_erasure" and n > 1:
        value = B.cutset_lower(n, dbar, stats.pe_hi, eps, kind)
        count(B.BoundReport("cutset", value, {"noisy_links": eps < (1 if kind is ChannelKind.BEC else 0.5)},
                            {"N": n, "dbar": dbar, "Pe": stats.pe_hi, "epsilon": eps}),
              stats.broadcasts_mean, lower=True)

    if cfg.scheme == "naive":
        j = sc.repetitions
        if kind is ChannelKind.BSC:
            value = n * B.repetition_bound(eps, j)
        else:
            value = -math.expm1(n * math.log1p(-eps ** j)) if eps < 1 else 1.0
        err(B.BoundReport("naive_union", value, {}, {"N": n, "j": j, "epsilon": eps}))
    elif cfg.scheme.startswith("gc1") and n > 1:
        count(B.BoundReport("gc1_count", B.gc1_count_upper(n, dbar, sc.gamma, sc.rate), {},
                            {"N": n, "dbar": dbar, "gamma": sc.gamma, "R": sc.rate}),
              stats.broadcasts_mean, lower=False)
        err(B.gc1_error_upper(n, sc.gamma, sc.rate, eps, kind))
    elif cfg.scheme.startswith("gc2") and n > 1:
        r = cfg.topo_params.get("r_unit") or _radius(cfg)
        cg = r * r * n / math.log(n)
        eq = eps / 2 if kind is ChannelKind.BEC else eps
        local, routing = B.gc2_counts(n, sc.group_density, sc.p_ch, eq, cg, dbar, sc.rate)
        inputs = {"N": n, "rho": sc.group_density, "cg": cg, "dbar": dbar, "R": sc.rate}
        count(B.BoundReport("gc2_local_count", local, {}, inputs), stats.phases.get("local", 0), lower=False)
        count(B.BoundReport("gc2_routing_count", routing, {}, inputs), stats.phases.get("routing", 0), lower=False)
        err(B.gc2_local_error_upper(n, sc.group_density, sc.p_ch, eq, cg))
        err(B.gc2_routing_error_upper(n, sc.group_density, sc.rate, eq, int(math.isqrt(int(stats.extras["cells"])))))
    elif cfg.scheme == "gc3":
        _gc3_bounds(stats, n, sc.er_density, sc.p_ch, eps, sc.delta, err)
        if eps > 0:
            lhs = stats.extras["density_lhs_mean"]
            rhs = n * (math.log(n) - B._loglog_term(stats.pe_hi)) / math.log(1 / eps)
            count(B.BoundReport("erasure_degree", rhs, {}, {"N": n, "Pe": stats.pe_hi, "epsilon": eps},
                                {"lhs": lhs, "t": stats.extras["t"]}), lhs, lower=True)
    elif cfg.scheme == "p2p_erasure":
        _gc3_bounds(stats, n, sc.er_density, 0.0, eps, sc.delta, err)
    return out


def _radius(cfg: ExperimentConfig) -> float:
    p = cfg.topo_params
    if cfg.topology == "grid":
        side = int(p.get("side", math.isqrt(cfg.n + 1)))
        return float(p.get("r", 1.0)) / (side - 1)
    return float(p["r"])


def _gc3_bounds(stats, n, c, p_ch, eps, delta, err):
    closed = B.gc3_error_upper_closed(n, c, p_ch, eps, delta)
    if not closed.applicable:
        best = B.best_feasible_delta(n, c, p_ch, eps)
        closed = best if best is not None else closed
    err(closed)
    err(B.gc3_error_upper_sum(n, c, p_ch, eps))


# ----------------------------------------------------------------- sweeps

def scaling_sweep(cfg: ExperimentConfig) -> list[dict]:
    """One row per N: broadcast ratios and the empirical error."""
    ns = cfg.sweep or (cfg.n,)
    rows = []
    for n in ns:
        stats = run_experiment(cfg.with_n(n))
        eff = _bound_n(stats)
        b = stats.broadcasts_mean
        rows.append({"N": eff, "broadcasts": b, "per_node": b / eff,
                     "per_n_loglog": b / (eff * math.log(math.log(eff))) if eff > 2 else math.nan,
                     "per_n_log": b / (eff * math.log(eff)),
                     "per_dbar_n": b / (stats.extras["dbar"] * eff),
                     "pe": stats.pe, "stats": stats})
    return rows


def sweep_trends(rows: list[dict]) -> dict:
    loglog = [r["per_n_loglog"] for r in rows]
    per_log = [r["per_n_log"] for r in rows]
    per_dbar = [r["per_dbar_n"] for r in rows]
    pe = [r["pe"] for r in rows]
    return {"loglog_spread": max(loglog) / min(loglog),
            "log_strictly_decreasing": all(b < a for a, b in zip(per_log, per_log[1:])),
            "dbar_spread": max(per_dbar) / min(per_dbar),
            "pe_nonincreasing": all(b <= a for a, b in zip(pe, pe[1:])),
            "pe_strictly_decreasing": all(b < a for a, b in zip(pe, pe[1:]))}


# ----------------------------------------------------------------- reports

def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def _round(v):
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return int(v)
    if isinstance(v, (float, np.floating)):
        f = float(format(float(v), ".12g"))
        return f if math.isfinite(f) else str(f)
    return v


def report_rows(stats: TrialStats) -> list[dict]:
    cfg = stats.config
    n = _bound_n(stats)
    base = {"scheme": cfg.scheme, "N": n, "topology": cfg.topology,
            "epsilon": cfg.channel.epsilon, "channel": cfg.channel.kind.value,
            "param_json": json.dumps({k: _round(v) for k, v in cfg.params().items()}, sort_keys=True),
            "trials": stats.trials, "failures": stats.failures, "pe": stats.pe,
            "pe_lo": stats.pe_lo, "pe_hi": stats.pe_hi, "broadcasts": stats.broadcasts_mean,
            "broadcasts_per_node": stats.broadcasts_mean / n, "seed": cfg.seed}
    checks = stats.bounds or [None]
    rows = []
    for chk in checks:
        row = dict(base)
        row["bound_name"] = chk.report.name if chk else ""
        row["bound_value"] = chk.report.value if chk else ""
        row["verdict"] = chk.verdict if chk else ""
        rows.append({k: row[k] for k in REPORT_FIELDS})
    return rows


def emit_report(stats, path=None, fmt: str = "csv") -> str:
    """Write one row per (run, bound); returns the text that was written."""
    if isinstance(stats, TrialStats):
        stats = [stats]
    rows = [r for s in stats for r in report_rows(s)]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_FIELDS)
        for r in rows:
            w.writerow(["" if r[k] == "" else (_num(r[k]) if not isinstance(r[k], str) else r[k])
                        for k in REPORT_FIELDS])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([{k: _round(r[k]) for k in REPORT_FIELDS} for r in rows], indent=1) + "\n"
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path is not None:
        Path(path).write_text(text)
    return text


def read_report(path) -> list[dict]:
    text = Path(path).read_text()
    if text.lstrip().startswith("["):
        return json.loads(text)
    return list(csv.DictReader(io.StringIO(text)))


# ------------------------------------------------------------ default suite

def default_suite(scale: float = 1.0) -> list[ExperimentConfig]:
    """Experiments shipped with the package; ``scale`` shrinks trial counts."""
    def trials(k):
        return max(20, int(k * scale))

    bsc = ChannelSpec.bsc
    bec = ChannelSpec.bec
    suite = [
        ExperimentConfig("naive", "complete", 64, bsc(0.1),
                         SchemeConfig(bsc(0.1), repetitions=25), trials=trials(2000), seed=11),
        ExperimentConfig("naive", "er", 128, bec(0.3),
                         SchemeConfig(bec(0.3), repetitions=12), trials=trials(2000), seed=12),
        ExperimentConfig("gc1", "grid", 63, bsc(0.002), SchemeConfig(bsc(0.002), gamma=1.0, rate=0.5),
                         trials=trials(300), seed=13),
        ExperimentConfig("gc1_bec", "random_geometric", 100, bec(0.005),
                         SchemeConfig(bec(0.005), gamma=1.0, rate=0.5), {"r": 0.25},
                         trials=trials(300), seed=14),
        ExperimentConfig("gc2", "random_geometric", 150, bsc(0.001),
                         SchemeConfig(bsc(0.001), group_density=1.0, rate=0.5, p_ch=0.05),
                         {"r": 0.25}, trials=trials(100), seed=15),
        ExperimentConfig("gc2_bec", "grid", 99, bec(0.002),
                         SchemeConfig(bec(0.002), group_density=1.0, rate=0.5, p_ch=0.05),
                         {"side": 10, "r": 1.5}, trials=trials(100), seed=16),
        ExperimentConfig("gc3", "er", 256, bec(0.1),
                         SchemeConfig(bec(0.1), p_ch=0.01, er_density=6.0, delta=0.01),
                         trials=trials(2000), seed=17),
        ExperimentConfig("gc3", "er", 256, bec(0.45),
                         SchemeConfig(bec(0.45), p_ch=0.1, er_density=6.0, delta=0.01),
                         trials=trials(2000), seed=18),
        ExperimentConfig("p2p_erasure", "er", 256, bec(0.4),
                         SchemeConfig(bec(0.4), er_density=6.0), trials=trials(2000), seed=19),
    ]
    return suite
