"""Distributed selection as a one-to-one RC/UnRC matching game.

Stage I builds utility-ranked preference lists and runs RC-proposing deferred
acceptance; Stage II tunes theta with SGHS for the matched action. The two
stages alternate until the objective stops improving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .actions import RoundContext
from .central import FeasibleSets, Selection, build_action, evaluate_action, feasible_actions_per_rc
from .lyap import LyapConfig, VirtualQueues
from .sghs import SghsParams

UNACCEPTABLE = -math.inf


@dataclass(frozen=True)
class PreferenceList:
    """Partners in non-increasing utility; unacceptable partners trail with -inf."""

    owner: int
    entries: tuple  # ((partner, utility), ...)

    @classmethod
    def build(cls, owner: int, scored: dict) -> "PreferenceList":
        finite = sorted(((p, u) for p, u in scored.items() if u > UNACCEPTABLE),
                        key=lambda e: (-e[1], e[0]))
        rest = sorted((p, UNACCEPTABLE) for p, u in scored.items() if not u > UNACCEPTABLE)
        return cls(owner, tuple(finite) + tuple(rest))

    @property
    def acceptable(self) -> list:
        return [p for p, u in self.entries if u > UNACCEPTABLE]

    def rank(self) -> dict:
        return {p: k for k, (p, u) in enumerate(self.entries) if u > UNACCEPTABLE}


@dataclass
class Matching:
    pairs: dict  # RC id -> UnRC id
    unmatched_rc: frozenset
    unmatched_unrc: frozenset
    proposals: int
    iterations: int
    min_cost_trace: list = field(default_factory=list)  # min over held RCs of -U per iteration

    @property
    def partner_of_unrc(self) -> dict:
        return {n: m for m, n in self.pairs.items()}


def utility(ctx: RoundContext, m: int, i: int, theta: float, queues: VirtualQueues,
            lyap: LyapConfig, candidates=None) -> float:
    """Individual utility of RC ``m`` choosing client ``i`` (itself or an UnRC).

    Returns ``UNACCEPTABLE`` for UnRCs outside the RC's sensing neighbourhood
    (or ``candidates`` when given) and for pairs breaking the latency bound.
    """
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    pool = ctx.sets.sensed[m] if candidates is None else candidates
    if i != m and i not in pool:
        return UNACCEPTABLE
    pc = ctx.cost(m, i)
    if not pc.feasible:
        return UNACCEPTABLE
    penalty = queues.gamma[m] * (lyap.Delta - 1.0)
    if i != m and pc.partial:
        penalty += queues.z[i - ctx.M] * (lyap.R_min_c2c - pc.r_c2c)
    return -(lyap.V * pc.wset(theta) + penalty)


def unmatched_utility(m: int, queues: VirtualQueues, lyap: LyapConfig) -> float:
    return -(queues.gamma[m] * lyap.Delta)


def build_preferences(ctx: RoundContext, fs: FeasibleSets, theta: float, queues: VirtualQueues,
                      lyap: LyapConfig, individually_rational: bool = True):
    """Preference lists for busy RCs and for every UnRC.

    UnRCs rank RCs by the proposing RC's utility. With
    ``individually_rational`` an RC also marks as unacceptable any UnRC it
    values no higher than staying unmatched.
    """
    M, N = ctx.M, ctx.state.N
    unrc_ids = range(M, M + N)
    rc_prefs, scores = {}, {}
    for m in range(M):
        if m in fs.idle:
            continue
        allowed = set(fs.A[m]) - {None}
        floor = unmatched_utility(m, queues, lyap) if individually_rational else UNACCEPTABLE
        row = {}
        for i in unrc_ids:
            u = utility(ctx, m, i, theta, queues, lyap) if i in allowed else UNACCEPTABLE
            scores[(m, i)] = u
            row[i] = u if u > floor else UNACCEPTABLE
        rc_prefs[m] = PreferenceList.build(m, row)
    unrc_prefs = {}
    for i in unrc_ids:
        row = {m: scores.get((m, i), UNACCEPTABLE) if m in ctx.sets.reach.get(i, ()) else UNACCEPTABLE
               for m in range(M) if m not in fs.idle}
        unrc_prefs[i] = PreferenceList.build(i, row)
    return rc_prefs, unrc_prefs


def deferred_acceptance(rc_prefs: dict, unrc_prefs: dict) -> Matching:
    """RC-proposing deferred acceptance over finite entries only."""
    lists = {m: p.acceptable for m, p in rc_prefs.items()}
    utils = {m: dict(p.entries) for m, p in rc_prefs.items()}
    ranks = {n: p.rank() for n, p in unrc_prefs.items()}
    nxt = {m: 0 for m in lists}
    held: dict = {}
    proposals = iterations = 0
    trace = []
    free = sorted(m for m in lists if lists[m])
    while free:
        iterations += 1
        rejected = []
        for m in free:
            n = lists[m][nxt[m]]
            nxt[m] += 1
            proposals += 1
            rank = ranks.get(n, {})
            if m not in rank:
                rejected.append(m)
                continue
            cur = held.get(n)
            if cur is None:
                held[n] = m
            elif rank[m] < rank[cur]:
                held[n] = m
                rejected.append(cur)
            else:
                rejected.append(m)
        free = sorted(m for m in rejected if nxt[m] < len(lists[m]))
        costs = [-utils[m][n] for n, m in held.items()]
        trace.append(min(costs) if costs else math.inf)
    pairs = {m: n for n, m in held.items()}
    return Matching(
        pairs=dict(sorted(pairs.items())),
        unmatched_rc=frozenset(m for m in rc_prefs if m not in pairs),
        unmatched_unrc=frozenset(n for n in unrc_prefs if n not in held),
        proposals=proposals,
        iterations=iterations,
        min_cost_trace=trace,
    )


def is_stable(matching: Matching, rc_prefs: dict, unrc_prefs: dict):
    """(True, None) when no blocking pair exists, else (False, (rc, unrc))."""
    held_by = matching.partner_of_unrc
    unrc_rank = {n: p.rank() for n, p in unrc_prefs.items()}
    for m, plist in rc_prefs.items():
        my_rank = plist.rank()
        cur = matching.pairs.get(m)
        for n in plist.acceptable:
            if cur is not None and my_rank[n] >= my_rank[cur]:
                break
            their = unrc_rank.get(n, {})
            if m not in their:
                continue
            holder = held_by.get(n)
            if holder is None or their[m] < their[holder]:
                return False, (m, n)
    return True, None


def distributed_select(ctx: RoundContext, queues: VirtualQueues, lyap: LyapConfig,
                       params: SghsParams, seed, theta0: float = 0.5, max_iters: Optional[int] = None,
                       tol: Optional[float] = None, individually_rational: Optional[bool] = None) -> Selection:
    cfg = ctx.cfg
    max_iters = cfg.max_outer_iters if max_iters is None else max_iters
    tol = cfg.outer_tol if tol is None else tol
    ir = cfg.individually_rational if individually_rational is None else individually_rational

    fs = feasible_actions_per_rc(ctx)
    theta = theta0
    incumbent: Optional[Selection] = None
    objective_trace, stage1_traces, proposals = [], [], []
    converged = False
    outer = 0
    for outer in range(1, max_iters + 1):
        rc_prefs, unrc_prefs = build_preferences(ctx, fs, theta, queues, lyap, ir)
        matching = deferred_acceptance(rc_prefs, unrc_prefs)
        stage1_traces.append(matching.min_cost_trace)
        proposals.append(matching.proposals)
        assign = [m if m in fs.idle else matching.pairs.get(m) for m in range(ctx.M)]
        action = build_action(assign, fs)
        new_theta, value = evaluate_action(action, ctx, queues, lyap, params, seed)
        if incumbent is not None and value > incumbent.objective:
            converged = True
            break
        prev = incumbent
        incumbent = Selection(action, new_theta, value)
        objective_trace.append(value)
        if not math.isnan(new_theta):
            theta = new_theta
        if prev is not None and abs(value - prev.objective) <= tol * max(abs(prev.objective), 1e-300):
            converged = True
            break
    info = {
        "outer_iterations": outer,
        "converged": converged,
        "objective_trace": objective_trace,
        "stage1_traces": stage1_traces,
        "proposals": proposals,
        "noop": incumbent.action.is_noop,
    }
    return Selection(incumbent.action, incumbent.theta, incumbent.objective, info)
