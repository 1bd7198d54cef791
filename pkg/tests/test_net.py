import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from referral_fl.config import MobilityParams, SimConfig
from referral_fl.net import (
    derive_neighbor_sets, init_topology, pathloss_gain, sample_channels, sample_round_state,
    step_mobility, trust_heterogeneity,
)


def test_default_topology_shape():
    st_ = init_topology(SimConfig(), 0)
    assert st_.K == 70 and len(st_.clients) == 70
    assert np.all(np.hypot(*st_.positions.T) <= 50.0)
    assert np.all(st_.p_max > 0) and np.all(st_.f > 0)


def test_single_link_coverage():
    st_ = init_topology(SimConfig(M=1, N=1, link_prob=0.0), 3)
    assert st_.W[0, 0] > 0


@given(st.integers(0, 2**32), st.floats(0.0, 1.0))
@settings(max_examples=30, deadline=None)
def test_coverage_invariant(seed, p):
    W = init_topology(SimConfig(M=4, N=12, link_prob=p), seed).W
    assert np.all((W > 0).any(axis=0))
    assert np.all((W >= 0) & (W <= 1))


def test_determinism():
    a = init_topology(SimConfig(M=4, N=12), 11)
    b = init_topology(SimConfig(M=4, N=12), 11)
    assert a.fingerprint() == b.fingerprint()


def test_full_memory_no_noise_keeps_velocity():
    st_ = init_topology(SimConfig(M=2, N=3, radius=1e6), 0)
    p = MobilityParams(memory=1.0, speed_std=0.0, heading_std=0.0)
    nxt = step_mobility(st_, p, 1)
    nxt2 = step_mobility(nxt, p, 2)
    np.testing.assert_allclose(nxt2.velocities, st_.velocities)


def test_reflection_stays_inside():
    st_ = init_topology(SimConfig(M=2, N=3), 0)
    pos = st_.positions.copy()
    pos[0] = (49.9, 0.0)
    st_ = replace(st_, positions=pos, heading=np.zeros(5), mean_heading=np.zeros(5), speed=np.full(5, 3.0))
    nxt = step_mobility(st_, MobilityParams(memory=1.0, speed_std=0, heading_std=0), 0)
    assert np.hypot(*nxt.positions[0]) <= 50.0
    assert nxt.positions[0, 0] < 49.9
    assert math.cos(nxt.heading[0]) < 0


def test_positions_remain_in_disc():
    cfg = SimConfig(M=3, N=10)
    st_ = init_topology(cfg, 0)
    for t in range(200):
        st_ = step_mobility(st_, MobilityParams(mean_speed=5.0, speed_std=2.0), t)
        assert np.all(np.hypot(*st_.positions.T) <= 50.0 + 1e-9)


def test_memoryless_mean_speed():
    cfg = SimConfig(M=1, N=1, radius=1e9)
    st_ = init_topology(cfg, 0)
    p = MobilityParams(memory=0.0, mean_speed=1.0, speed_std=0.25)
    speeds = []
    for t in range(10_000):
        st_ = step_mobility(st_, p, t)
        speeds.append(st_.speed[0])
    assert abs(np.mean(speeds) - 1.0) < 0.05


def _mean_gain_db(distance, n=100_000):
    gen = np.random.default_rng(0)
    return 10 * np.log10(np.mean(pathloss_gain(distance) * gen.exponential(1.0, n)))


def test_pathloss_reference_points():
    assert abs(_mean_gain_db(1.0) + 30) < 0.2
    assert abs(_mean_gain_db(10.0) + 60) < 0.5
    assert pathloss_gain(0.2) == pathloss_gain(1.0)


def test_channel_fading_unit_mean():
    cfg = SimConfig(M=1, N=2, radius=1.0)
    st_ = init_topology(cfg, 0)
    pos = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
    st_ = replace(st_, positions=pos)
    H = np.concatenate([sample_channels(st_, s, cfg)[0] for s in range(40_000)])
    ratio = H / pathloss_gain(1.0)
    assert abs(ratio.mean() - 1) < 0.02
    _, G = sample_channels(st_, 0, cfg)
    assert np.all(G > 0) and np.allclose(G, G.T)


def test_round_state_statistics():
    cfg = SimConfig(M=10, N=40, epsilon=1.0)
    st_ = init_topology(cfg, 0)
    Qs = np.concatenate([sample_round_state(st_, cfg, s)[0] for s in range(200)])
    assert abs(Qs.mean() / 1e4 - 1) < 0.01
    _, idle, _, _ = sample_round_state(st_, cfg, 1)
    assert idle.all()


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_c2c_pairs_valid(seed):
    cfg = SimConfig(M=2, N=40, radius=15.0)
    st_ = init_topology(cfg, seed)
    _, _, active, partner = sample_round_state(st_, cfg, seed)
    st_ = replace(st_, partner=partner, active=active)
    seen = set()
    for i, j in st_.c2c_pairs:
        assert st_.distance(i, j) <= 5.0
        assert i not in seen and j not in seen
        seen |= {i, j}
    for n, j in enumerate(partner):
        if j >= 0:
            assert partner[j] == n


def test_neighbor_set_boundaries():
    cfg = SimConfig(M=1, N=3)
    st_ = init_topology(cfg, 0)
    pos = np.array([[0.0, 0.0], [18.0, 0.0], [18.01, 0.0], [2.0, 0.0]])
    W = np.array([[0.5, 0.5, 0.0]])
    st_ = replace(st_, positions=pos, W=W)
    sets = derive_neighbor_sets(st_, 18.0)
    assert 1 in sets.sensed[0]
    assert 2 not in sets.sensed[0]
    assert 3 not in sets.trusted[0]


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_neighbor_set_consistency(seed):
    cfg = SimConfig(M=4, N=15)
    st_ = init_topology(cfg, seed)
    sets = derive_neighbor_sets(st_, cfg.s_max)
    for m in range(cfg.M):
        assert sets.sensed[m] <= sets.trusted[m]
        assert sets.trusted_active[m] <= sets.trusted[m]
        assert sets.sensed_active[m] == sets.sensed[m] & sets.trusted_active[m]
    for n, rcs in sets.reach.items():
        for m in range(cfg.M):
            assert (m in rcs) == (n in sets.sensed[m])


def test_trust_heterogeneity():
    assert trust_heterogeneity(np.array([[0.5, 1.0], [0.4, 0.8]])) == pytest.approx(1.6)
    assert trust_heterogeneity(np.full((3, 4), 0.7)) == pytest.approx(1.0)
    assert trust_heterogeneity(np.array([[0.2, 0.4]])) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        trust_heterogeneity(np.array([[0.2, 0.4], [0.0, 0.0]]))


def test_trust_floor_raises_minimum():
    W = init_topology(SimConfig(M=5, N=20, trust_floor=0.5), 0).W
    assert W[W > 0].min() > 0.5
