"""Simulation configuration and its file format.

Config files are flat YAML (or JSON) mappings whose keys are exactly the
``SimConfig`` field names. Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Optional

import yaml

METHODS = (
    "centralized",
    "matching",
    "greedy-sghs",
    "random-sghs",
    "sqos-sghs",
    "greedy-random",
    "random-random",
    "sqos-random",
)


class ConfigError(ValueError):
    pass


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class MobilityParams:
    memory: float = 0.85
    mean_speed: float = 1.0  # m/s
    speed_std: float = 0.25  # m/s
    heading_std: float = 0.25  # rad
    step: float = 1.0  # s of movement per round

    def __post_init__(self):
        if not 0.0 <= self.memory <= 1.0:
            raise ConfigError(f"mobility memory must lie in [0, 1], got {self.memory}")
        if self.mean_speed <= 0:
            raise ConfigError("mean_speed must be positive")
        if self.speed_std < 0 or self.heading_std < 0 or self.step < 0:
            raise ConfigError("mobility noise and step must be non-negative")


@dataclass(frozen=True)
class SimConfig:
    # population and geometry
    M: int = 10
    N: int = 60
    radius: float = 50.0  # m
    s_max: float = 18.0  # m, RC sensing radius
    d_c2c: float = 5.0  # m, max C2C link distance

    # radio
    bandwidth: float = 2e5  # Hz
    carrier_freq: float = 2.3e9  # Hz, echoed only
    n0_dbm_hz: float = -174.0
    pathloss_ref_db: float = 30.0  # attenuation at 1 m
    pathloss_exp: float = 3.0
    min_distance: float = 1.0  # m
    p_rc: float = 0.5  # W
    p_urc: float = 0.3  # W
    c_bits: float = 1e5  # model update size, bit

    # computation
    f_rc: float = 2e8
    f_urc: float = 2e7
    rho: float = 1e-27
    zeta: float = 3.0
    q_mean: float = 1e4
    b: float = 10.0
    t_max: float = 0.1  # s, one local iteration

    # round randomness
    epsilon: float = 0.5  # P(RC idle)
    p_active: float = 0.5  # P(UnRC has a QoS need)
    link_prob: float = 0.3
    trust_floor: float = 0.0  # trust weights drawn from (trust_floor, 1]

    # mobility
    mob_memory: float = 0.85
    mob_mean_speed: float = 1.0
    mob_speed_std: float = 0.25
    mob_heading_std: float = 0.25

    # objective / Lyapunov
    lambda_t: float = 1.0 / 6.0
    lambda_e: float = 5.0 / 6.0
    V: float = 1.0
    delta: Optional[float] = None  # None -> M / (M + N)
    r_min: float = 1e5  # bit/s

    # SGHS
    hms: int = 5
    ni: int = 300
    period: int = 100
    bw_min: float = 5e-4
    bw_max: float = 0.5
    mu_hmcr: float = 0.95
    sigma_hmcr: float = 0.01
    mu_par: float = 0.3
    sigma_par: float = 0.05
    theta_min: float = 1e-6
    theta_max: float = 0.999

    # selectors
    enum_cap: int = 10_000_000
    max_outer_iters: int = 10
    outer_tol: float = 1e-6
    individually_rational: bool = True

    # run
    rounds: int = 300
    method: str = "matching"
    seed: int = 0

    def __post_init__(self):
        if self.M < 1 or self.N < 1:
            raise ConfigError("M and N must be at least 1")
        positive = (
            "radius", "s_max", "d_c2c", "bandwidth", "carrier_freq", "min_distance",
            "p_rc", "p_urc", "c_bits", "f_rc", "f_urc", "rho", "q_mean", "b", "t_max",
            "bw_min", "bw_max",
        )
        for name in positive:
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be positive and finite, got {value}")
        if self.zeta <= 2:
            raise ConfigError("zeta must exceed 2")
        for name in ("epsilon", "p_active", "link_prob"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if not 0.0 <= self.trust_floor <= 1.0:
            raise ConfigError("trust_floor must lie in [0, 1]")
        if self.lambda_t < 0 or self.lambda_e < 0 or abs(self.lambda_t + self.lambda_e - 1.0) > 1e-9:
            raise ConfigError("lambda_t and lambda_e must be non-negative and sum to 1")
        if self.V < 0:
            raise ConfigError("V must be non-negative")
        if self.delta is not None and not 0 < self.delta <= self.M / (self.M + self.N) + 1e-12:
            raise ConfigError("delta must lie in (0, M/(M+N)]")
        if self.rounds < 1:
            raise ConfigError("rounds must be at least 1")
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.hms < 2 or self.ni < 1 or self.period < 1:
            raise ConfigError("hms >= 2, ni >= 1 and period >= 1 required")
        if not self.bw_min <= self.bw_max:
            raise ConfigError("bw_min must not exceed bw_max")
        if not 0 < self.theta_min < self.theta_max < 1:
            raise ConfigError("need 0 < theta_min < theta_max < 1")
        MobilityParams(self.mob_memory, self.mob_mean_speed, self.mob_speed_std, self.mob_heading_std)

    @property
    def Delta(self) -> float:
        return self.delta if self.delta is not None else self.M / (self.M + self.N)

    @property
    def n0(self) -> float:
        """Noise power spectral density in W/Hz."""
        return dbm_to_watt(self.n0_dbm_hz)

    @property
    def mobility(self) -> MobilityParams:
        return MobilityParams(self.mob_memory, self.mob_mean_speed, self.mob_speed_std, self.mob_heading_std)

    def replace(self, **changes: Any) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)


def load_config(path: str | Path) -> SimConfig:
    text = Path(path).read_text()
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a key/value mapping")
    return SimConfig.from_dict(data)
