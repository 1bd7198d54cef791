"""Self-adaptive global-best harmony search over the scalar accuracy theta."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np


@dataclass(frozen=True)
class SghsParams:
    HMS: int = 5
    NI: int = 300
    L: int = 100
    BW_min: float = 5e-4
    BW_max: float = 0.5
    mu_HMCR: float = 0.95
    sigma_HMCR: float = 0.01
    mu_PAR: float = 0.3
    sigma_PAR: float = 0.05
    theta_min: float = 1e-6
    theta_max: float = 0.999

    def __post_init__(self):
        if self.HMS < 2:
            raise ValueError("HMS must be at least 2")
        if self.NI < 1 or self.L < 1:
            raise ValueError("NI and L must be positive")
        if not 0 < self.BW_min <= self.BW_max:
            raise ValueError("need 0 < BW_min <= BW_max")
        if not 0 < self.theta_min < self.theta_max < 1:
            raise ValueError("need 0 < theta_min < theta_max < 1")

    @classmethod
    def from_config(cls, cfg) -> "SghsParams":
        return cls(cfg.hms, cfg.ni, cfg.period, cfg.bw_min, cfg.bw_max, cfg.mu_hmcr,
                   cfg.sigma_hmcr, cfg.mu_par, cfg.sigma_par, cfg.theta_min, cfg.theta_max)


@dataclass(frozen=True)
class ObjectiveCoeffs:
    """Coefficients of F(theta). ``A`` and ``B`` hold one entry per participant."""

    A: Union[float, Sequence[float]]
    B: Union[float, Sequence[float]]
    C: float = 0.0
    V: float = 1.0

    def __post_init__(self):
        a, b = _as_tuple(self.A), _as_tuple(self.B)
        if len(a) != len(b) or not a:
            raise ValueError("A and B need the same, non-zero length")
        if min(a) < 0 or min(b) < 0:
            raise ValueError("A and B must be non-negative")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)


def _as_tuple(x) -> tuple:
    if isinstance(x, (int, float)):
        return (float(x),)
    return tuple(float(v) for v in x)


def f_objective(theta: float, coeffs: ObjectiveCoeffs) -> float:
    """V * max_i [ln(1/theta) A_i + B_i] / (1 - theta) + C."""
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    k = math.log(1.0 / theta)
    worst = max(k * a + b for a, b in zip(coeffs.A, coeffs.B))
    return coeffs.V * worst / (1.0 - theta) + coeffs.C


def bw_at(r: int, params: SghsParams) -> float:
    if r < params.NI / 2:
        return params.BW_max - (params.BW_max - params.BW_min) * 2 * r / params.NI
    return params.BW_min


@dataclass
class HarmonyMemory:
    theta: list
    value: list
    hmcr_record: list = field(default_factory=list)
    par_record: list = field(default_factory=list)

    @property
    def best(self) -> int:
        return min(range(len(self.value)), key=self.value.__getitem__)

    @property
    def worst(self) -> int:
        return max(range(len(self.value)), key=self.value.__getitem__)


@dataclass(frozen=True)
class SghsResult:
    theta: float
    value: float
    best_trace: tuple  # best F after each improvisation
    worst_trace: tuple  # worst F in memory after each improvisation
    memory: HarmonyMemory


def sghs_minimize(objective: Callable[[float], float], params: SghsParams, seed) -> SghsResult:
    """Minimise a scalar function of theta on [theta_min, theta_max]."""
    gen = np.random.default_rng(seed)
    lo, hi = params.theta_min, params.theta_max
    span = hi - lo
    NI, HMS = params.NI, params.HMS

    init = lo + span * gen.random(HMS)
    hm = HarmonyMemory([float(x) for x in init], [float(objective(float(x))) for x in init])

    # all per-improvisation draws up front; one stream, fixed layout
    z_hmcr = gen.standard_normal(NI)
    z_par = gen.standard_normal(NI)
    l1, l2, l3 = gen.random((3, NI))
    pick = gen.integers(0, HMS, NI)
    sign = gen.random(NI) < 0.5

    mu_h, mu_p = params.mu_HMCR, params.mu_PAR
    best_trace, worst_trace = [], []
    t_L = 1
    for r in range(NI):
        hmcr = min(1.0, max(0.0, mu_h + params.sigma_HMCR * z_hmcr[r]))
        par = min(1.0, max(0.0, mu_p + params.sigma_PAR * z_par[r]))
        bw = bw_at(r, params)
        if l1[r] < hmcr:
            step = l3[r] * bw
            cand = hm.theta[pick[r]] + (step if sign[r] else -step)
            if l2[r] < par:
                cand = hm.theta[hm.best]
        else:
            cand = lo + l3[r] * span
        cand = min(hi, max(lo, cand))
        value = float(objective(cand))
        worst = hm.worst
        if value < hm.value[worst]:
            hm.theta[worst] = cand
            hm.value[worst] = value
            hm.hmcr_record.append(hmcr)
            hm.par_record.append(par)
        if t_L == params.L:
            if hm.hmcr_record:
                mu_h = sum(hm.hmcr_record) / len(hm.hmcr_record)
                mu_p = sum(hm.par_record) / len(hm.par_record)
            hm.hmcr_record.clear()
            hm.par_record.clear()
            t_L = 1
        else:
            t_L += 1
        best_trace.append(min(hm.value))
        worst_trace.append(max(hm.value))

    b = hm.best
    return SghsResult(hm.theta[b], hm.value[b], tuple(best_trace), tuple(worst_trace), hm)


def grid_minimize(objective: Callable[[float], float], lo: float = 1e-4, hi: float = 1 - 1e-4,
                  step: float = 1e-4) -> tuple[float, float]:
    """Dense-grid reference minimiser (the independent oracle for SGHS)."""
    grid = np.arange(lo, hi + step / 2, step)
    values = np.array([objective(float(x)) for x in grid])
    k = int(np.argmin(values))
    return float(grid[k]), float(values[k])
