"""Centralised selector: feasible action sets, joint enumeration, exhaustive argmin."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .actions import ActionPolicy, RoundContext
from .lyap import LyapConfig, VirtualQueues, action_coeffs, queue_penalty
from .sghs import SghsParams, f_objective, sghs_minimize


class EnumerationExplosion(RuntimeError):
    pass


@dataclass(frozen=True)
class FeasibleSets:
    """Per-RC options. Busy RCs list ``None`` first, then candidate ids ascending."""

    idle: frozenset
    A: tuple
    M: int
    active: frozenset  # ids of active UnRCs

    @property
    def bound(self) -> int:
        return math.prod(len(a) for a in self.A)


def feasible_actions_per_rc(ctx: RoundContext, candidates=None) -> FeasibleSets:
    """Step-1 feasibility filter.

    ``candidates`` defaults to each RC's trusted UnRCs within sensing range.
    A candidate is kept when its one-iteration compute time meets ``t_max``
    under the share its Partial/Full mode grants and its uplink rate is
    positive.
    """
    state = ctx.state
    pools = ctx.sets.sensed if candidates is None else candidates
    options = []
    for m in range(state.M):
        if state.idle[m]:
            options.append((m,))
            continue
        ok = sorted(i for i in pools[m] if ctx.cost(m, i).feasible)
        options.append((None, *ok))
    active = frozenset(state.M + n for n in range(state.N) if state.active[n])
    return FeasibleSets(frozenset(ctx.idle), tuple(options), state.M, active)


def build_action(assign, fs: FeasibleSets) -> ActionPolicy:
    assign = tuple(assign)
    phi = tuple(a == m for m, a in enumerate(assign))
    xi = tuple(a is not None and a != m and a in fs.active for m, a in enumerate(assign))
    return ActionPolicy(phi, assign, xi)


def enumerate_joint_actions(fs: FeasibleSets, cap: int = 10_000_000) -> Iterator[ActionPolicy]:
    """Every one-to-one joint action, lexicographic by RC then option."""
    M = len(fs.A)
    assign: list = [None] * M
    used: set = set()
    count = 0

    def rec(m: int):
        nonlocal count
        if m == M:
            count += 1
            if count > cap:
                raise EnumerationExplosion(
                    f"more than {cap} joint actions; use the distributed (matching) selector")
            yield build_action(assign, fs)
            return
        for opt in fs.A[m]:
            if opt is not None and opt != m:
                if opt in used:
                    continue
                used.add(opt)
            assign[m] = opt
            yield from rec(m + 1)
            if opt is not None and opt != m:
                used.discard(opt)
        assign[m] = None

    yield from rec(0)


@dataclass(frozen=True)
class Selection:
    action: ActionPolicy
    theta: float  # nan for a no-op round
    objective: float
    info: Optional[dict] = None


def evaluate_action(action: ActionPolicy, ctx: RoundContext, queues: VirtualQueues,
                    lyap: LyapConfig, params: SghsParams, seed) -> tuple[float, float]:
    """(theta, objective) for a fixed action; theta from SGHS, nan for no-op."""
    if action.is_noop:
        return math.nan, queue_penalty(action, ctx, queues, lyap)
    coeffs = action_coeffs(action, ctx, queues, lyap)
    res = sghs_minimize(lambda th: f_objective(th, coeffs), params, seed)
    return res.theta, res.value


def centralized_select(ctx: RoundContext, queues: VirtualQueues, lyap: LyapConfig,
                       params: SghsParams, seed, cap: Optional[int] = None) -> Selection:
    fs = feasible_actions_per_rc(ctx)
    cap = ctx.cfg.enum_cap if cap is None else cap
    best: Optional[Selection] = None
    evaluated = 0
    for action in enumerate_joint_actions(fs, cap):
        evaluated += 1
        theta, value = evaluate_action(action, ctx, queues, lyap, params, seed)
        if best is None or value < best.objective:
            best = Selection(action, theta, value)
    if best is None:
        raise ValueError("empty action space")
    return Selection(best.action, best.theta, best.objective, {"evaluated": evaluated})
