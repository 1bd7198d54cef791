"""Comparison selectors: Greedy / Random / SQoS picks, each with SGHS or random theta."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .actions import RoundContext
from .central import Selection, build_action, evaluate_action, feasible_actions_per_rc
from .lyap import LyapConfig, VirtualQueues, drift_penalty, queue_penalty
from .sghs import SghsParams


class Picker(enum.Enum):
    GREEDY = "greedy"
    RANDOM = "random"
    SQOS = "sqos"


class ThetaMode(enum.Enum):
    SGHS = "sghs"
    RANDOM = "random"


@dataclass(frozen=True)
class BaselineKind:
    selector: Picker
    theta_mode: ThetaMode

    @classmethod
    def parse(cls, method: str) -> "BaselineKind":
        """``'greedy-sghs'`` style method name to a kind."""
        try:
            sel, th = method.split("-")
            return cls(Picker(sel), ThetaMode(th))
        except ValueError as exc:
            raise ValueError(f"not a baseline method: {method!r}") from exc

    @property
    def name(self) -> str:
        return f"{self.selector.value}-{self.theta_mode.value}"


def pick_assignment(picker: Picker, ctx: RoundContext, fs, gen: np.random.Generator) -> list:
    """Per-RC choice in ascending RC order; later RCs skip taken UnRCs."""
    taken: set = set()
    assign: list = []
    for m in range(ctx.M):
        opts = fs.A[m]
        if m in fs.idle:
            assign.append(m)
            continue
        pool = [i for i in opts if i is not None and i not in taken]
        if picker is Picker.SQOS:
            pool = [i for i in pool if i in fs.active]
        if not pool:
            assign.append(None)
            continue
        if picker is Picker.GREEDY:
            choice = max(pool, key=lambda i: (ctx.state.trust(m, i), -i))
        else:
            choice = pool[int(gen.integers(len(pool)))]
        taken.add(choice)
        assign.append(choice)
    return assign


def baseline_select(kind: BaselineKind, ctx: RoundContext, queues: VirtualQueues, lyap: LyapConfig,
                    params: SghsParams, pick_rng: np.random.Generator, sghs_seed,
                    theta_rng: np.random.Generator) -> Selection:
    fs = feasible_actions_per_rc(ctx)
    action = build_action(pick_assignment(kind.selector, ctx, fs, pick_rng), fs)
    if action.is_noop:
        return Selection(action, math.nan, queue_penalty(action, ctx, queues, lyap))
    if kind.theta_mode is ThetaMode.SGHS:
        theta, value = evaluate_action(action, ctx, queues, lyap, params, sghs_seed)
    else:
        theta = float(theta_rng.uniform(params.theta_min, params.theta_max))
        value = drift_penalty(lyap, action, theta, ctx, queues)
    return Selection(action, theta, value)
