"""Command line: ``referral-fl run`` and ``referral-fl sweep``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .config import METHODS, ConfigError, SimConfig, dbm_to_watt, load_config
from .sim import SimulationError, run_simulation, summarize, write_csv, write_outputs

SWEEP_PARAMS = ("v", "q", "p-urc", "l-trust")

AGGREGATE_COLUMNS = (
    "param", "value", "seed", "method", "V", "time_avg_cost", "time_avg_objective",
    "time_avg_recommended_trust", "mean_upload_time", "mean_upload_energy", "referrals",
)


def apply_sweep_value(cfg: SimConfig, param: str, value: float) -> SimConfig:
    """Config for one sweep cell. ``p-urc`` is in dBm; ``l-trust`` sets the trust floor to 1/value."""
    if param == "v":
        return cfg.replace(V=value)
    if param == "q":
        return cfg.replace(q_mean=value)
    if param == "p-urc":
        return cfg.replace(p_urc=dbm_to_watt(value))
    if param == "l-trust":
        if value < 1:
            raise ConfigError("l-trust values must be at least 1")
        return cfg.replace(trust_floor=1.0 / value)
    raise ConfigError(f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}")


def _run_cell(job):
    param, value, cfg, out_dir = job
    metrics = run_simulation(cfg)
    tag = f"{param}={value:g}_seed={cfg.seed}"
    if out_dir is not None:
        write_csv(metrics, Path(out_dir) / f"cell_{tag}.csv")
    s = summarize(metrics, cfg)
    return {
        "param": param, "value": value, "seed": cfg.seed, "method": cfg.method, "V": cfg.V,
        "time_avg_cost": s["time_avg_cost"], "time_avg_objective": s["time_avg_objective"],
        "time_avg_recommended_trust": s["time_avg_recommended_trust"],
        "mean_upload_time": s["mean_upload_time"], "mean_upload_energy": s["mean_upload_energy"],
        "referrals": s["referrals"],
    }


def sweep(base: SimConfig, param: str, values: Sequence[float], seeds: int, out_dir=None,
          jobs: int = 1) -> list[dict]:
    """Run every (value, seed) cell; seeds are ``base.seed .. base.seed + seeds - 1``."""
    cells = [(param, float(v), apply_sweep_value(base, param, float(v)).replace(seed=base.seed + k), out_dir)
             for v in values for k in range(seeds)]
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            rows = list(ex.map(_run_cell, cells))
    else:
        rows = [_run_cell(c) for c in cells]
    if out_dir is not None:
        with open(Path(out_dir) / "aggregate.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, AGGREGATE_COLUMNS, lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    return rows


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad value list {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="referral-fl", description="Trust-aided referral client selection simulator")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", type=Path, help="YAML/JSON file with SimConfig fields")
        sp.add_argument("--method", choices=METHODS)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--rounds", type=int)
        sp.add_argument("--v", type=float, dest="V")
        sp.add_argument("--out", type=Path, required=True)

    run = sub.add_parser("run", help="one simulation run")
    common(run)
    sw = sub.add_parser("sweep", help="parameter sweep over several seeds")
    common(sw)
    sw.add_argument("--param", choices=SWEEP_PARAMS, required=True)
    sw.add_argument("--values", type=_floats, required=True, help="comma or space separated")
    sw.add_argument("--seeds", type=int, default=10)
    sw.add_argument("--jobs", type=int, default=1)
    return p


def config_from_args(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    overrides = {k: getattr(args, a) for k, a in
                 (("method", "method"), ("seed", "seed"), ("rounds", "rounds"), ("V", "V"))
                 if getattr(args, a) is not None}
    return cfg.replace(**overrides) if overrides else cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "run":
            summary = write_outputs(run_simulation(cfg), args.out, cfg)
            print(f"{cfg.method}: {summary['rounds']} rounds, time-average cost "
                  f"{summary['time_avg_cost']:.6g} -> {args.out}")
        else:
            if args.seeds < 1:
                raise ConfigError("--seeds must be at least 1")
            rows = sweep(cfg, args.param, args.values, args.seeds, args.out, args.jobs)
            print(json.dumps({"cells": len(rows), "out": str(args.out)}))
    except (ConfigError, SimulationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
