"""Command line entry point: ``coevonet {simulate,sweep,heuristic,theory,metrics}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import secrets
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import metrics
from .birth_death import limiting_pmf, steady_state_moments
from .config import ConfigError, config_from_dict, config_to_dict, load_document
from .engine import RunRecord, SimConfig, Simulation, sweep
from .plotting import write_heatmap
from .world import read_edge_list, write_snapshot_files

log = logging.getLogger("coevonet")

TIMESERIES_COLUMNS = ("step", "population", "coop_fraction", "n_c", "transition_ratio")


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:n`` -> ``n`` evenly spaced values from ``lo`` to ``hi`` inclusive."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like lo:hi:n, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"grid needs n >= 1, got {n}")
    return np.linspace(lo, hi, n)


def parse_range(text: str) -> Tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like lo:hi, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"range needs 0 <= lo <= hi, got {text!r}")
    return lo, hi


def resolve_config(path, seed: Optional[int]) -> SimConfig:
    """Load a config; a seed missing from both file and flags is generated and reported."""
    doc = load_document(path)
    if seed is not None:
        doc["seed"] = seed
    cfg = config_from_dict(doc)
    if "seed" not in doc:
        cfg = cfg.replace(seed=secrets.randbelow(2**31))
        print(f"seed: {cfg.seed}", file=sys.stderr)
    return cfg


# --- writers -----------------------------------------------------------------

def write_timeseries(record: RunRecord, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(TIMESERIES_COLUMNS)
        for row in zip(record.steps, record.population, record.coop_fraction, record.n_c, record.transition_ratio):
            wr.writerow([row[0], row[1], repr(row[2]), row[3], repr(row[4])])


def write_json(obj, path: Path) -> None:
    with open(path, "w", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_run(cfg: SimConfig, record: RunRecord, out: Path, mode: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_timeseries(record, out / "timeseries.csv")
    write_json(
        {"mode": mode, "seed": cfg.seed, "config": config_to_dict(cfg), "summary": record.summary(cfg.horizon)},
        out / "summary.json",
    )
    for step in sorted(record.snapshots):
        snap = record.snapshots[step]
        write_snapshot_files(out / "snapshots", step, snap.nodes, snap.edges)


# --- subcommands -------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = resolve_config(args.config, args.seed)
    record = Simulation(cfg).run()
    _write_run(cfg, record, Path(args.out), "rl")
    return 0


def cmd_heuristic(args) -> int:
    cfg = resolve_config(args.config, args.seed)
    record = Simulation(cfg, heuristic=True).run()
    _write_run(cfg, record, Path(args.out), "heuristic")
    return 0


def cmd_sweep(args) -> int:
    cfg = resolve_config(args.config, args.seed)
    deltas = args.delta_grid if args.delta_grid is not None else np.array([cfg.delta])
    rs = args.r_grid if args.r_grid is not None else np.array([cfg.r])
    res = sweep(cfg, deltas, rs, replicas=args.replicas, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "heatmap.csv", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["delta", "r", "mean_coop", "mean_nc"])
        for d, r, c, n in res.rows():
            wr.writerow([repr(d), repr(r), repr(c), repr(n)])
    write_heatmap(out / "heatmap_coop.svg", res.mean_coop, res.deltas, res.rs,
                  title="cooperation fraction", label="mean cooperation fraction", vmin=0.0, vmax=1.0)
    write_heatmap(out / "heatmap_nc.svg", res.mean_nc, res.deltas, res.rs,
                  title="community size", label="mean N_c")
    write_json(
        {
            "seed": cfg.seed,
            "config": config_to_dict(cfg),
            "replicas": args.replicas,
            "deltas": [float(d) for d in res.deltas],
            "rs": [float(r) for r in res.rs],
        },
        out / "summary.json",
    )
    return 0


def cmd_theory(args) -> int:
    cfg = resolve_config(args.config, seed=0)
    mean, var, sojourn = steady_state_moments(cfg.lam, cfg.lifetime)
    if args.range is not None:
        lo, hi = args.range
    else:
        sd = np.sqrt(var)
        lo, hi = max(0, int(np.floor(mean - 5 * sd))), int(np.ceil(mean + 5 * sd))
    support = np.arange(lo, hi + 1)
    pmf = zip(support.tolist(), limiting_pmf(cfg.lam, cfg.lifetime, support).tolist())
    lines = [f"# mean={mean!r} variance={var!r} sojourn={sojourn!r}", "i,pi"]
    lines += [f"{i},{p!r}" for i, p in pmf]
    print("\n".join(lines))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "theory_moments.csv", "w", newline="\n") as fh:
            fh.write(f"mean,variance,sojourn\n{mean!r},{var!r},{sojourn!r}\n")
        with open(out / "theory_pmf.csv", "w", newline="\n") as fh:
            fh.write("\n".join(lines[1:]) + "\n")
    return 0


def graph_report(nodes: List[int], edges) -> dict:
    adj = metrics.adjacency_from_edges(nodes, edges)
    per_node, glob = metrics.clustering_coefficient(adj)
    counts, bins = np.histogram(per_node, bins=10, range=(0.0, 1.0))
    report = {
        "nodes": len(nodes),
        "edges": int(adj.sum() // 2),
        "clustering": {
            "global": glob,
            "histogram": [
                {"lo": float(bins[i]), "hi": float(bins[i + 1]), "count": int(counts[i])} for i in range(10)
            ],
        },
        "degree_distribution": [],
        "joint_degree": [],
        "assortativity": None,
    }
    if nodes:
        k, p = metrics.degree_distribution(adj)
        report["degree_distribution"] = [{"k": int(a), "p": float(b)} for a, b in zip(k, p)]
    if report["edges"]:
        jd = metrics.joint_degree_distribution(adj)
        report["joint_degree"] = [{"j": j, "k": kk, "p": v} for (j, kk), v in sorted(jd.as_dict().items())]
        a = metrics.assortativity(adj)
        report["assortativity"] = None if np.isnan(a) else a
    return report


def cmd_metrics(args) -> int:
    nodes, edges = read_edge_list(args.edges)
    nodes_path = args.nodes
    if nodes_path is None:
        guess = Path(args.edges).with_name(Path(args.edges).name.replace("edges_", "nodes_", 1))
        if guess != Path(args.edges) and guess.exists():
            nodes_path = guess
    if nodes_path is not None:
        with open(nodes_path, newline="") as fh:
            ids = [int(row["id"]) for row in csv.DictReader(fh)]
        nodes = sorted(set(ids) | set(nodes))
    report = graph_report(nodes, edges)
    print(json.dumps(report, indent=2, sort_keys=True))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_json(report, out / "metrics.json")
        with open(out / "degree_distribution.csv", "w", newline="\n") as fh:
            fh.write("k,p\n" + "".join(f"{d['k']},{d['p']!r}\n" for d in report["degree_distribution"]))
        with open(out / "joint_degree.csv", "w", newline="\n") as fh:
            fh.write("j,k,p\n" + "".join(f"{d['j']},{d['k']},{d['p']!r}\n" for d in report["joint_degree"]))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coevonet", description="Co-evolving spatial networks with learning agents.")
    p.add_argument("-q", "--quiet", action="store_true", help="suppress informational logging")
    sub = p.add_subparsers(dest="command", required=True)

    def add_run_args(sp, out_required=True):
        sp.add_argument("--config", required=True, help="TOML config (or a summary.json to replay)")
        sp.add_argument("--out", required=out_required, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="overrides the config seed")

    sp = sub.add_parser("simulate", help="one learning run")
    add_run_args(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("heuristic", help="one run with the decaying-exploration hill climber")
    add_run_args(sp)
    sp.set_defaults(func=cmd_heuristic)

    sp = sub.add_parser("sweep", help="grid over (delta, r) with replicas")
    add_run_args(sp)
    sp.add_argument("--delta-grid", type=parse_grid, default=None, metavar="LO:HI:N")
    sp.add_argument("--r-grid", type=parse_grid, default=None, metavar="LO:HI:N")
    sp.add_argument("--replicas", type=int, default=1)
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("theory", help="steady-state population moments and pmf")
    sp.add_argument("--config", required=True)
    sp.add_argument("--range", type=parse_range, default=None, metavar="LO:HI")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_theory)

    sp = sub.add_parser("metrics", help="structure metrics of an edge-list snapshot")
    sp.add_argument("--edges", required=True)
    sp.add_argument("--nodes", default=None, help="node table (defaults to the matching nodes_ file)")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if getattr(args, "replicas", 1) < 1:
        print("error: --replicas must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ConfigError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
