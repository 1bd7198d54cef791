"""Per-round physical and learning cost model.

Shannon rates use log base 2 (bit/s); iteration counts use the natural log.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .config import SimConfig

DPARM = "DParM"
LREFM = "LRefM"


class InfeasibleError(ValueError):
    """A zero-rate link or zero resource share makes the cost undefined."""


@dataclass(frozen=True)
class LinkParams:
    bandwidth: float
    noise_density: float
    gain: float
    p_max: float

    def __post_init__(self):
        for name in ("bandwidth", "noise_density", "gain", "p_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")


@dataclass(frozen=True)
class CostBreakdown:
    t_com: float
    e_com: float
    t_cmp: float
    e_cmp: float
    t_epoch: float = math.nan
    e_epoch: float = math.nan


@dataclass(frozen=True)
class WeightPair:
    lambda_t: float
    lambda_e: float

    def __post_init__(self):
        if min(self.lambda_t, self.lambda_e) < 0 or abs(self.lambda_t + self.lambda_e - 1) > 1e-9:
            raise ValueError("weights must be non-negative and sum to 1")


def xi_fraction(w: float, active: bool) -> float:
    """Share of the FL bandwidth left to a referred client."""
    return 1.0 - w if active else 1.0


def pi_fraction(w: float, trust_row_sum: float, active: bool) -> float:
    """Share of power/CPU a referred client spends on FL."""
    if active:
        return w
    if trust_row_sum <= 0:
        raise InfeasibleError("RC has no trusted candidates")
    return w / trust_row_sum


def uplink_rate(mode: str, w: float, link: LinkParams, active: bool = False,
                trust_row_sum: Optional[float] = None) -> float:
    B, N0 = link.bandwidth, link.noise_density
    if mode == DPARM:
        return B * math.log2(1.0 + link.gain * link.p_max / (N0 * B))
    if mode != LREFM:
        raise ValueError(f"unknown mode {mode!r}")
    xi = xi_fraction(w, active)
    if xi <= 0:
        return 0.0
    pi = pi_fraction(w, w if trust_row_sum is None else trust_row_sum, active)
    return xi * B * math.log2(1.0 + link.gain * pi * link.p_max / (N0 * xi * B))


def upload_cost(C: float, rate: float, power_fraction: float, p_max: float) -> tuple[float, float]:
    if rate <= 0:
        raise InfeasibleError("zero uplink rate")
    t_com = C / rate
    return t_com, power_fraction * p_max * t_com


def compute_cost(Q: float, b: float, f: float, fraction: float, rho: float, zeta: float) -> tuple[float, float]:
    """Time and energy of one local iteration at a CPU share ``fraction``."""
    if fraction <= 0:
        raise InfeasibleError("zero CPU share")
    eff = fraction * f
    return Q * b / eff, rho * Q * b * eff ** (zeta - 1.0)


def _check_theta(theta: float) -> None:
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")


def epoch_cost(theta: float, parts: CostBreakdown) -> tuple[float, float]:
    _check_theta(theta)
    k = math.log(1.0 / theta)
    return k * parts.t_cmp + parts.t_com, k * parts.e_cmp + parts.e_com


def c2c_rate(alpha: int, w: float, g: float, p_max: float, B: float, N0: float) -> float:
    if not alpha or w <= 0:
        return 0.0
    return alpha * w * B * math.log2(1.0 + g * (1.0 - w) * p_max / (N0 * w * B))


def wset(theta: float, weights: WeightPair, t_epoch: float, e_epoch: float) -> float:
    if not 0.0 <= theta < 1.0:
        raise ValueError(f"theta must lie in [0, 1), got {theta}")
    return (weights.lambda_t * t_epoch + weights.lambda_e * e_epoch) / (1.0 - theta)


@dataclass(frozen=True)
class PairCost:
    """Cost of RC ``rc`` training itself or referring client ``client``.

    ``A`` and ``B`` are the weighted compute and upload costs, so the WSET at
    accuracy ``theta`` is ``(ln(1/theta) * A + B) / (1 - theta)``.
    """

    rc: int
    client: int
    mode: str
    partial: bool
    w: float
    rate: float
    parts: CostBreakdown
    A: float
    B: float
    r_c2c: float
    feasible: bool

    def wset(self, theta: float) -> float:
        return (math.log(1.0 / theta) * self.A + self.B) / (1.0 - theta)

    def epoch(self, theta: float) -> tuple[float, float]:
        return epoch_cost(theta, self.parts)


def pair_cost(state, m: int, i: int, cfg: SimConfig) -> PairCost:
    B, N0 = cfg.bandwidth, cfg.n0
    lt, le = cfg.lambda_t, cfg.lambda_e
    link = LinkParams(B, N0, float(state.H[i]), float(state.p_max[i]))
    Q, b, f = float(state.Q[i]), float(state.b[i]), float(state.f[i])
    rho, zeta = float(state.rho[i]), cfg.zeta
    if i == m:
        rate = uplink_rate(DPARM, 1.0, link)
        t_com, e_com = upload_cost(float(state.c_bits[i]), rate, 1.0, link.p_max)
        t_cmp, e_cmp = compute_cost(Q, b, f, 1.0, rho, zeta)
        parts = CostBreakdown(t_com, e_com, t_cmp, e_cmp)
        return PairCost(m, i, DPARM, False, 1.0, rate, parts, lt * t_cmp + le * e_cmp,
                        lt * t_com + le * e_com, 0.0, True)

    n = i - state.M
    w = float(state.W[m, n])
    active = bool(state.active[n])
    row_sum = float(state.W[m].sum())
    pi = pi_fraction(w, row_sum, active)
    rate = uplink_rate(LREFM, w, link, active, row_sum)
    t_cmp, e_cmp = compute_cost(Q, b, f, pi, rho, zeta)
    if rate > 0:
        t_com, e_com = upload_cost(float(state.c_bits[i]), rate, pi, link.p_max)
    else:
        t_com = e_com = math.inf
    r_c2c = 0.0
    j = int(state.partner[n])
    if active and j >= 0:
        r_c2c = c2c_rate(1, w, float(state.Gc2c[n, j]), link.p_max, B, N0)
    parts = CostBreakdown(t_com, e_com, t_cmp, e_cmp)
    feasible = rate > 0 and t_cmp <= cfg.t_max
    return PairCost(m, i, LREFM, active, w, rate, parts, lt * t_cmp + le * e_cmp,
                    lt * t_com + le * e_com, r_c2c, feasible)
