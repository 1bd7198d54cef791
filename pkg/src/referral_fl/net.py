"""World generation: topology, trust, mobility, channels and per-round state.

Client ids are global: RCs are ``0..M-1`` and UnRCs are ``M..M+N-1``. The
trust matrix ``W`` is indexed ``W[m, n]`` with the UnRC's local index
``n = id - M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import rng as keyed
from .config import MobilityParams, SimConfig

RC = "RC"
UNRC = "UnRC"


@dataclass(frozen=True)
class Client:
    id: int
    kind: str
    position: tuple[float, float]
    velocity: tuple[float, float]
    p_max: float
    f: float
    rho: float
    b: float


@dataclass(frozen=True, eq=False)
class NetworkState:
    t: int
    M: int
    N: int
    radius: float
    p_max: np.ndarray  # (K,)
    f: np.ndarray
    rho: np.ndarray
    b: np.ndarray
    c_bits: np.ndarray
    positions: np.ndarray  # (K, 2)
    speed: np.ndarray  # (K,)
    heading: np.ndarray  # (K,)
    mean_heading: np.ndarray  # (K,)
    W: np.ndarray  # (M, N)
    H: np.ndarray  # (K,) uplink gains to the server
    Gc2c: np.ndarray  # (N, N) UnRC-to-UnRC gains
    Q: np.ndarray  # (K,) sample counts
    idle: np.ndarray  # (M,) bool, True = member of M_idle
    active: np.ndarray  # (N,) bool, UnRC has a served QoS need this round
    partner: np.ndarray  # (N,) local index of C2C partner, -1 when unpaired

    @property
    def K(self) -> int:
        return self.M + self.N

    @property
    def velocities(self) -> np.ndarray:
        return np.column_stack([self.speed * np.cos(self.heading), self.speed * np.sin(self.heading)])

    @property
    def clients(self) -> tuple[Client, ...]:
        vel = self.velocities
        return tuple(
            Client(
                id=i,
                kind=RC if i < self.M else UNRC,
                position=(float(self.positions[i, 0]), float(self.positions[i, 1])),
                velocity=(float(vel[i, 0]), float(vel[i, 1])),
                p_max=float(self.p_max[i]),
                f=float(self.f[i]),
                rho=float(self.rho[i]),
                b=float(self.b[i]),
            )
            for i in range(self.K)
        )

    @property
    def c2c_pairs(self) -> tuple[tuple[int, int], ...]:
        """Pairs of global UnRC ids, each pair listed once."""
        return tuple(
            (self.M + n, self.M + int(j)) for n, j in enumerate(self.partner) if j > n
        )

    def trust(self, m: int, client: int) -> float:
        return float(self.W[m, client - self.M])

    def distance(self, i: int, j: int) -> float:
        return float(np.hypot(*(self.positions[i] - self.positions[j])))

    def fingerprint(self) -> bytes:
        parts = [
            self.positions, self.speed, self.heading, self.W, self.H, self.Gc2c,
            self.Q, self.idle, self.active, self.partner,
        ]
        return b"".join(np.ascontiguousarray(p).tobytes() for p in parts) + repr(self.t).encode()


@dataclass(frozen=True)
class NeighborSets:
    trusted: tuple[frozenset, ...]
    trusted_active: tuple[frozenset, ...]
    sensed: tuple[frozenset, ...]
    sensed_active: tuple[frozenset, ...]
    reach: dict = field(default_factory=dict)  # UnRC id -> frozenset of RC ids


def _uniform_disc(gen: np.random.Generator, count: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(gen.random(count))
    ang = gen.uniform(0.0, 2.0 * math.pi, count)
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def _trust_weights(gen: np.random.Generator, shape, floor: float) -> np.ndarray:
    # 1 - U[0,1) lies in (0, 1]; rescaled onto (floor, 1]
    return floor + (1.0 - floor) * (1.0 - gen.random(shape))


def generate_trust(gen: np.random.Generator, positions: np.ndarray, M: int, N: int,
                   link_prob: float, floor: float = 0.0) -> np.ndarray:
    """Random trust matrix where every UnRC column has at least one link.

    Columns left without a link are repaired by linking the nearest RC.
    """
    links = gen.random((M, N)) < link_prob
    weights = _trust_weights(gen, (M, N), floor)
    W = np.where(links, weights, 0.0)
    for n in np.flatnonzero(~links.any(axis=0)):
        d = np.hypot(*(positions[:M] - positions[M + n]).T)
        W[int(np.argmin(d)), n] = weights[int(np.argmin(d)), n]
    return W


def init_topology(config: SimConfig, seed: int) -> NetworkState:
    M, N = config.M, config.N
    K = M + N
    gen = keyed.stream(seed, 0, keyed.TOPOLOGY)
    positions = _uniform_disc(gen, K, config.radius)
    heading = gen.uniform(0.0, 2.0 * math.pi, K)
    W = generate_trust(gen, positions, M, N, config.link_prob, config.trust_floor)

    def per_kind(rc_value, urc_value):
        return np.concatenate([np.full(M, float(rc_value)), np.full(N, float(urc_value))])

    state = NetworkState(
        t=0, M=M, N=N, radius=config.radius,
        p_max=per_kind(config.p_rc, config.p_urc),
        f=per_kind(config.f_rc, config.f_urc),
        rho=np.full(K, config.rho),
        b=np.full(K, config.b),
        c_bits=np.full(K, config.c_bits),
        positions=positions,
        speed=np.full(K, config.mob_mean_speed),
        heading=heading,
        mean_heading=heading.copy(),
        W=W,
        H=np.ones(K), Gc2c=np.ones((N, N)),
        Q=np.full(K, int(round(config.q_mean))),
        idle=np.zeros(M, dtype=bool), active=np.zeros(N, dtype=bool),
        partner=np.full(N, -1, dtype=np.int64),
    )
    H, G = sample_channels(state, keyed.derive_seed(seed, 0, keyed.CHANNEL), config)
    Q, idle, active, partner = sample_round_state(
        replace(state, H=H, Gc2c=G), config, keyed.derive_seed(seed, 0, keyed.ROUND_STATE))
    return replace(state, H=H, Gc2c=G, Q=Q, idle=idle, active=active, partner=partner)


def step_mobility(state: NetworkState, params: MobilityParams, seed: int) -> NetworkState:
    """One Gauss-Markov step on speed and heading, reflecting at the disc edge."""
    gen = np.random.default_rng(seed)
    a = params.memory
    scale = math.sqrt(max(0.0, 1.0 - a * a))
    K = state.K
    speed = a * state.speed + (1 - a) * params.mean_speed + scale * params.speed_std * gen.standard_normal(K)
    speed = np.abs(speed)
    heading = a * state.heading + (1 - a) * state.mean_heading + scale * params.heading_std * gen.standard_normal(K)
    mean_heading = state.mean_heading.copy()

    vel = np.column_stack([speed * np.cos(heading), speed * np.sin(heading)])
    pos = state.positions + vel * params.step
    R = state.radius
    r = np.hypot(pos[:, 0], pos[:, 1])
    out = r > R
    if out.any():
        normal = pos[out] / r[out, None]
        new_r = np.clip(2 * R - r[out], 0.0, R)
        pos[out] = normal * new_r[:, None]
        v = vel[out]
        v = v - 2 * np.sum(v * normal, axis=1)[:, None] * normal
        heading[out] = np.arctan2(v[:, 1], v[:, 0])
        mean_heading[out] = heading[out]
    return replace(state, positions=pos, speed=speed, heading=heading, mean_heading=mean_heading)


def pathloss_gain(distance, ref_db: float = 30.0, exponent: float = 3.0, min_distance: float = 1.0):
    """Mean linear power gain: ``ref_db`` attenuation at 1 m, then ``10*exponent`` dB per decade."""
    d = np.maximum(np.asarray(distance, dtype=float), min_distance)
    return 10.0 ** (-(ref_db + 10.0 * exponent * np.log10(d)) / 10.0)


def sample_channels(state: NetworkState, seed: int, config: Optional[SimConfig] = None):
    """Rayleigh-faded gains: uplink ``H`` (K,) and symmetric UnRC-UnRC ``Gc2c`` (N, N)."""
    cfg = config or SimConfig()
    gen = np.random.default_rng(seed)
    kw = dict(ref_db=cfg.pathloss_ref_db, exponent=cfg.pathloss_exp, min_distance=cfg.min_distance)
    d_up = np.hypot(state.positions[:, 0], state.positions[:, 1])
    H = pathloss_gain(d_up, **kw) * gen.exponential(1.0, state.K)

    u = state.positions[state.M:]
    diff = u[:, None, :] - u[None, :, :]
    d_uu = np.hypot(diff[..., 0], diff[..., 1])
    fade = gen.exponential(1.0, (state.N, state.N))
    fade = np.triu(fade, 1)
    fade = fade + fade.T
    G = pathloss_gain(d_uu, **kw) * fade
    np.fill_diagonal(G, pathloss_gain(cfg.min_distance, **kw))
    return H, G


def sample_round_state(state: NetworkState, config: SimConfig, seed: int):
    """Draw ``Q``, RC idle flags, UnRC active flags and the random C2C pairing.

    An UnRC with a QoS need is paired with a random unpaired UnRC within
    ``config.d_c2c``; it counts as active only if such a partner exists.
    """
    gen = np.random.default_rng(seed)
    M, N = state.M, state.N
    Q = gen.poisson(config.q_mean, state.K).astype(np.int64)
    idle = gen.random(M) < config.epsilon
    need = gen.random(N) < config.p_active

    u = state.positions[M:]
    diff = u[:, None, :] - u[None, :, :]
    d_uu = np.hypot(diff[..., 0], diff[..., 1])
    partner = np.full(N, -1, dtype=np.int64)
    for n in gen.permutation(np.flatnonzero(need)):
        if partner[n] >= 0:
            continue
        options = [j for j in range(N) if j != n and partner[j] < 0 and d_uu[n, j] <= config.d_c2c]
        if options:
            j = options[int(gen.integers(len(options)))]
            partner[n], partner[j] = j, n
    return Q, idle, need, partner


def derive_neighbor_sets(state: NetworkState, s_max: float) -> NeighborSets:
    M = state.M
    trusted, trusted_active, sensed, sensed_active = [], [], [], []
    reach: dict[int, set] = {M + n: set() for n in range(state.N)}
    for m in range(M):
        tru = {M + int(n) for n in np.flatnonzero(state.W[m] > 0)}
        near = {i for i in tru if state.distance(m, i) <= s_max}
        act = {i for i in tru if state.active[i - M]}
        trusted.append(frozenset(tru))
        trusted_active.append(frozenset(act))
        sensed.append(frozenset(near))
        sensed_active.append(frozenset(near & act))
        for i in near:
            reach[i].add(m)
    return NeighborSets(
        trusted=tuple(trusted),
        trusted_active=tuple(trusted_active),
        sensed=tuple(sensed),
        sensed_active=tuple(sensed_active),
        reach={i: frozenset(s) for i, s in reach.items()},
    )


def trust_heterogeneity(W: np.ndarray, candidate_sets: Optional[NeighborSets] = None,
                        M: Optional[int] = None) -> float:
    """Smallest row maximum over largest row minimum of the trust matrix.

    Rows are restricted to each RC's candidate set (its trusted UnRCs when no
    sets are given). Raises ``ValueError`` when any restricted row is empty.
    """
    W = np.asarray(W, dtype=float)
    offset = W.shape[0] if M is None else M
    row_max, row_min = [], []
    for m in range(W.shape[0]):
        if candidate_sets is None:
            vals = W[m][W[m] > 0]
        else:
            vals = np.array([W[m, i - offset] for i in sorted(candidate_sets.trusted[m])])
        if vals.size == 0:
            raise ValueError(f"RC {m} has an empty candidate set; L_trust undefined")
        row_max.append(vals.max())
        row_min.append(vals.min())
    return float(min(row_max) / max(row_min))
