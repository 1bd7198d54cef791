"""Experiment driver: the per-round renewal loop, metrics and file output."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import rng as keyed
from .actions import RoundContext
from .baselines import BaselineKind, baseline_select
from .central import Selection, centralized_select
from .config import SimConfig
from .lyap import LyapConfig, SelectionHistory, VirtualQueues, constraint_residuals, update_queues
from .match import distributed_select
from .net import derive_neighbor_sets, init_topology, sample_channels, sample_round_state, step_mobility
from .sghs import SghsParams

CSV_COLUMNS = (
    "round", "method", "V", "objective", "max_wset", "time_avg_cost", "theta",
    "mean_queue_gamma", "mean_queue_z", "selected_count", "mean_selected_trust",
)


class SimulationError(RuntimeError):
    def __init__(self, round_index: int, cause: BaseException):
        super().__init__(f"round {round_index}: {type(cause).__name__}: {cause}")
        self.round_index = round_index
        self.cause = cause


@dataclass(frozen=True)
class PairRecord:
    rc: int
    client: int
    trust: float  # 1.0 for direct participation
    partial: bool
    r_c2c: float
    t_epoch: float
    e_epoch: float
    t_com: float
    e_com: float


@dataclass(frozen=True)
class RoundMetrics:
    """One round's outcome. No-op rounds report zero cost, theta and trust."""

    round: int
    method: str
    V: float
    objective: float
    max_wset: float
    time_avg_cost: float  # running mean of max_wset over rounds 1..round
    theta: float
    mean_queue_gamma: float
    mean_queue_z: float
    selected_count: int
    mean_selected_trust: float  # over referrals; 0 when none
    tau: float  # renewal instant of this round
    duration: float
    pairs: tuple  # PairRecord per participant
    gamma: tuple  # queues after the update
    z: tuple
    wall_time: float

    def csv_row(self) -> list:
        return [self.round, self.method] + [repr(float(getattr(self, c))) for c in CSV_COLUMNS[2:9]] + [
            self.selected_count, repr(float(self.mean_selected_trust))]

    @property
    def referrals(self) -> list:
        return [p for p in self.pairs if p.client != p.rc]


def select(cfg: SimConfig, ctx: RoundContext, queues: VirtualQueues, lyap: LyapConfig,
           params: SghsParams, seed: int, t: int) -> Selection:
    sghs_seed = keyed.derive_seed(seed, t, keyed.SGHS)
    if cfg.method == "centralized":
        return centralized_select(ctx, queues, lyap, params, sghs_seed)
    if cfg.method == "matching":
        return distributed_select(ctx, queues, lyap, params, sghs_seed)
    kind = BaselineKind.parse(cfg.method)
    return baseline_select(kind, ctx, queues, lyap, params, keyed.stream(seed, t, keyed.BASELINE),
                           sghs_seed, keyed.stream(seed, t, keyed.THETA))


def round_context(state, cfg: SimConfig, seed: int, t: int):
    """Advance the world to round ``t`` and build its selection context."""
    state = step_mobility(state, cfg.mobility, keyed.derive_seed(seed, t, keyed.MOBILITY))
    H, G = sample_channels(state, keyed.derive_seed(seed, t, keyed.CHANNEL), cfg)
    state = replace(state, t=t, H=H, Gc2c=G)
    Q, idle, active, partner = sample_round_state(state, cfg, keyed.derive_seed(seed, t, keyed.ROUND_STATE))
    state = replace(state, Q=Q, idle=idle, active=active, partner=partner)
    return state, RoundContext(state, derive_neighbor_sets(state, cfg.s_max), cfg)


def run_simulation(cfg: SimConfig, trace: Optional[list] = None) -> list[RoundMetrics]:
    """Run ``cfg.rounds`` renewal rounds; deterministic per config.

    When ``trace`` is a list, each round's selector ``info`` dict is appended.
    """
    lyap = LyapConfig.from_config(cfg)
    params = SghsParams.from_config(cfg)
    seed = cfg.seed
    state = init_topology(cfg, seed)
    queues = VirtualQueues.zeros(cfg.M, cfg.N)
    out: list[RoundMetrics] = []
    cost_sum = 0.0
    tau = 0.0
    for t in range(1, cfg.rounds + 1):
        start = time.perf_counter()
        try:
            state, ctx = round_context(state, cfg, seed, t)
            sel = select(cfg, ctx, queues, lyap, params, seed, t)
        except Exception as exc:
            raise SimulationError(t, exc) from exc
        if trace is not None:
            trace.append(sel.info)
        action = sel.action
        pairs = []
        for m, i in action.participants:
            pc = ctx.cost(m, i)
            t_ep, e_ep = pc.epoch(sel.theta)
            pairs.append(PairRecord(m, i, 1.0 if i == m else pc.w, pc.partial, pc.r_c2c,
                                    t_ep, e_ep, pc.parts.t_com, pc.parts.e_com))
        if pairs:
            max_wset = max(ctx.cost(m, i).wset(sel.theta) for m, i in action.participants)
            theta = sel.theta
            duration = max(p.t_epoch for p in pairs)
        else:
            max_wset, theta, duration = 0.0, 0.0, cfg.t_max
        refs = [p.trust for p in pairs if p.client != p.rc]
        queues = update_queues(queues, action, ctx, lyap)
        cost_sum += max_wset
        out.append(RoundMetrics(
            round=t, method=cfg.method, V=cfg.V, objective=float(sel.objective),
            max_wset=float(max_wset), time_avg_cost=float(cost_sum / t), theta=float(theta),
            mean_queue_gamma=float(queues.gamma.mean()), mean_queue_z=float(queues.z.mean()),
            selected_count=len(pairs), mean_selected_trust=float(np.mean(refs)) if refs else 0.0,
            tau=tau, duration=float(duration), pairs=tuple(pairs),
            gamma=tuple(float(g) for g in queues.gamma), z=tuple(float(v) for v in queues.z),
            wall_time=time.perf_counter() - start,
        ))
        tau += duration
    return out


def history_from_metrics(metrics: Sequence[RoundMetrics], M: int, N: int) -> SelectionHistory:
    hist = SelectionHistory()
    for rm in metrics:
        alpha = [0] * M
        ind = [False] * N
        rate = [0.0] * N
        for p in rm.pairs:
            alpha[p.rc] = 1
            if p.partial:
                ind[p.client - M] = True
                rate[p.client - M] = p.r_c2c
        hist.alpha.append(tuple(alpha))
        hist.indicator.append(tuple(ind))
        hist.rate.append(tuple(rate))
    return hist


def summarize(metrics: Sequence[RoundMetrics], cfg: SimConfig) -> dict:
    if not metrics:
        raise ValueError("no metrics to summarise")
    fairness, qos = constraint_residuals(history_from_metrics(metrics, cfg.M, cfg.N), cfg.Delta, cfg.r_min)
    refs = [p for rm in metrics for p in rm.referrals]
    return {
        "config": cfg.to_dict(),
        "rounds": len(metrics),
        "time_avg_cost": metrics[-1].time_avg_cost,
        "time_avg_objective": float(np.mean([rm.objective for rm in metrics])),
        "time_avg_theta": float(np.mean([rm.theta for rm in metrics])),
        "time_avg_selected": float(np.mean([rm.selected_count for rm in metrics])),
        # per-round mean trust of referred UnRCs (0 in rounds without referrals), averaged over rounds
        "time_avg_recommended_trust": float(np.mean([rm.mean_selected_trust for rm in metrics])),
        "mean_trust_per_referral": float(np.mean([p.trust for p in refs])) if refs else 0.0,
        "mean_upload_time": float(np.mean([p.t_com for p in refs])) if refs else None,
        "mean_upload_energy": float(np.mean([p.e_com for p in refs])) if refs else None,
        "referrals": len(refs),
        "final_tau": metrics[-1].tau + metrics[-1].duration,
        "fairness_residuals": [float(v) for v in fairness],
        "qos_residuals": qos,
    }


def write_outputs(metrics: Sequence[RoundMetrics], out_dir, cfg: SimConfig) -> dict:
    """Write ``metrics.csv`` and ``summary.json``; returns the summary."""
    if not metrics:
        raise ValueError("no metrics to write")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(metrics, out / "metrics.csv")
    summary = summarize(metrics, cfg)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, allow_nan=True) + "\n")
    return summary


def write_csv(metrics: Sequence[RoundMetrics], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rm in metrics:
            w.writerow(rm.csv_row())


def read_csv(path) -> list[dict]:
    """Parse ``metrics.csv`` back to typed rows."""
    ints = {"round", "selected_count"}
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.DictReader(fh):
            rows.append({k: (v if k == "method" else int(v) if k in ints else float(v))
                         for k, v in raw.items()})
    return rows


def is_finite_record(rm: RoundMetrics) -> bool:
    values = (rm.objective, rm.max_wset, rm.time_avg_cost, rm.theta, rm.mean_queue_gamma,
              rm.mean_queue_z, rm.mean_selected_trust, rm.tau, rm.duration)
    return all(math.isfinite(v) for v in values)
