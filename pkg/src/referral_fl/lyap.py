"""Virtual queues and the per-round drift-plus-penalty objective."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .actions import ActionPolicy, RoundContext
from .sghs import ObjectiveCoeffs, f_objective


@dataclass(frozen=True)
class LyapConfig:
    V: float
    Delta: float
    R_min_c2c: float = 1e5

    def __post_init__(self):
        if self.V < 0:
            raise ValueError("V must be non-negative")
        if not self.Delta > 0:
            raise ValueError("Delta must be positive")

    @classmethod
    def from_config(cls, cfg) -> "LyapConfig":
        return cls(cfg.V, cfg.Delta, cfg.r_min)


@dataclass(frozen=True, eq=False)
class VirtualQueues:
    gamma: np.ndarray  # per RC
    z: np.ndarray  # per UnRC

    @classmethod
    def zeros(cls, M: int, N: int) -> "VirtualQueues":
        return cls(np.zeros(M), np.zeros(N))


def update_gamma(gamma_m: float, Delta: float, alpha_sum: float) -> float:
    return max(gamma_m + Delta - alpha_sum, 0.0)


def update_z(z_n: float, recommended_active: bool, R_min: float, R_achieved: float) -> float:
    if not recommended_active:
        return z_n
    return max(z_n + (R_min - R_achieved), 0.0)


def _qos_terms(action: ActionPolicy, ctx: RoundContext):
    """(UnRC local index, achieved C2C rate) for each referred active UnRC."""
    M = ctx.M
    out = []
    for m, i in action.referrals:
        if ctx.state.active[i - M]:
            out.append((i - M, ctx.cost(m, i).r_c2c))
    return out


def queue_penalty(action: ActionPolicy, ctx: RoundContext, queues: VirtualQueues,
                  lyap: LyapConfig) -> float:
    """The queue-weighted constraint terms of the objective (no WSET term)."""
    alpha = np.array([0.0 if a is None else 1.0 for a in action.assign])
    value = float(np.dot(queues.gamma, lyap.Delta - alpha))
    for n, rate in _qos_terms(action, ctx):
        value += queues.z[n] * (lyap.R_min_c2c - rate)
    return value


def action_coeffs(action: ActionPolicy, ctx: RoundContext, queues: VirtualQueues,
                  lyap: LyapConfig) -> ObjectiveCoeffs:
    parts = action.participants
    if not parts:
        raise ValueError("objective undefined: the action has no participants")
    costs = [ctx.cost(m, i) for m, i in parts]
    return ObjectiveCoeffs(A=[c.A for c in costs], B=[c.B for c in costs],
                           C=queue_penalty(action, ctx, queues, lyap), V=lyap.V)


def drift_penalty(lyap: LyapConfig, action: ActionPolicy, theta: float, ctx: RoundContext,
                  queues: VirtualQueues) -> float:
    """V * max participant WSET plus the queue-weighted constraint terms."""
    return f_objective(theta, action_coeffs(action, ctx, queues, lyap))


def update_queues(queues: VirtualQueues, action: ActionPolicy, ctx: RoundContext,
                  lyap: LyapConfig) -> VirtualQueues:
    gamma = np.array([
        update_gamma(g, lyap.Delta, 0.0 if a is None else 1.0)
        for g, a in zip(queues.gamma, action.assign)
    ])
    z = queues.z.copy()
    for n, rate in _qos_terms(action, ctx):
        z[n] = update_z(z[n], True, lyap.R_min_c2c, rate)
    return VirtualQueues(gamma, z)


@dataclass
class SelectionHistory:
    """Append-only per-round record of selections and C2C outcomes."""

    alpha: list = field(default_factory=list)  # per round: tuple of 0/1 per RC
    indicator: list = field(default_factory=list)  # per round: tuple of bool per UnRC
    rate: list = field(default_factory=list)  # per round: tuple of float per UnRC

    def append(self, action: ActionPolicy, ctx: RoundContext) -> None:
        N = ctx.state.N
        ind = [False] * N
        rate = [0.0] * N
        for n, r in _qos_terms(action, ctx):
            ind[n] = True
            rate[n] = r
        self.alpha.append(tuple(0 if a is None else 1 for a in action.assign))
        self.indicator.append(tuple(ind))
        self.rate.append(tuple(rate))

    def __len__(self) -> int:
        return len(self.alpha)


def constraint_residuals(history: SelectionHistory, Delta: float, R_min: float):
    """Per-RC fairness slack and per-UnRC QoS slack (None when never served).

    Positive values mean the long-term constraint is met with margin.
    """
    if not len(history):
        raise ValueError("empty history")
    alpha = np.asarray(history.alpha, dtype=float)
    fairness = alpha.mean(axis=0) - Delta
    ind = np.asarray(history.indicator, dtype=float)
    rate = np.asarray(history.rate, dtype=float)
    served = ind.sum(axis=0)
    qos: list[Optional[float]] = []
    for n in range(ind.shape[1]):
        if served[n] == 0:
            qos.append(None)
        else:
            qos.append(float((ind[:, n] * rate[:, n]).sum() / served[n] - R_min))
    return fairness, qos
