import math

import mpmath
import pytest
from hypothesis import given, strategies as st

from referral_fl.cost import (
    DPARM, LREFM, CostBreakdown, InfeasibleError, LinkParams, WeightPair, c2c_rate,
    compute_cost, epoch_cost, pi_fraction, upload_cost, uplink_rate, wset, xi_fraction,
)

B = 2e5
N0 = 10 ** (-174 / 10) / 1000


def test_xi_fraction():
    assert xi_fraction(0.3, True) == pytest.approx(0.7)
    assert xi_fraction(0.3, False) == 1.0
    assert xi_fraction(1.0, True) == 0.0


def test_pi_fraction():
    assert pi_fraction(0.3, 5.0, True) == 0.3
    assert pi_fraction(0.2, 1.0, False) == pytest.approx(0.2)
    with pytest.raises(InfeasibleError):
        pi_fraction(0.2, 0.0, False)


@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=12))
def test_inactive_fractions_sum_to_one(row):
    assert sum(pi_fraction(w, sum(row), False) for w in row) == pytest.approx(1.0)


def test_dparm_rate_snr_three():
    h = 3 * N0 * B / 0.5
    assert uplink_rate(DPARM, 1.0, LinkParams(B, N0, h, 0.5)) == pytest.approx(4e5)


def test_lrefm_inactive_reduces_to_dparm_with_scaled_power():
    link = LinkParams(B, N0, 1e-7, 0.3)
    pi = 0.4 / 2.0
    scaled = LinkParams(B, N0, 1e-7, 0.3 * pi)
    assert uplink_rate(LREFM, 0.4, link, False, 2.0) == pytest.approx(uplink_rate(DPARM, 1.0, scaled), rel=1e-14)


def test_lrefm_active_matches_high_precision():
    h, p, w = 3.7e-8, 0.3, 0.5
    mpmath.mp.dps = 40
    xi = mpmath.mpf(1) - w
    ref = xi * B * mpmath.log(1 + h * w * p / (mpmath.mpf(N0) * xi * B), 2)
    got = uplink_rate(LREFM, w, LinkParams(B, N0, h, p), True)
    assert got == pytest.approx(float(ref), rel=1e-12)


def test_zero_bandwidth_gives_zero_rate():
    assert uplink_rate(LREFM, 1.0, LinkParams(B, N0, 1e-7, 0.3), True) == 0.0


@given(st.floats(1e-12, 1e-3), st.floats(1.5, 4.0))
def test_rate_increasing_in_gain_and_power(h, k):
    base = uplink_rate(DPARM, 1.0, LinkParams(B, N0, h, 0.3))
    assert uplink_rate(DPARM, 1.0, LinkParams(B, N0, h * k, 0.3)) > base
    assert uplink_rate(DPARM, 1.0, LinkParams(B, N0, h, 0.3 * k)) > base


def test_upload_cost():
    assert upload_cost(1e5, 4e5, 1.0, 0.5) == pytest.approx((0.25, 0.125))
    with pytest.raises(InfeasibleError):
        upload_cost(1e5, 0.0, 1.0, 0.5)


def test_compute_cost():
    t, _ = compute_cost(1e4, 10, 2e7, 1.0, 1e-27, 3)
    assert t == pytest.approx(5e-3)
    _, e = compute_cost(1e4, 10, 2e8, 1.0, 1e-27, 3)
    assert e == pytest.approx(4e-6)
    t1, e1 = compute_cost(1e4, 10, 2e8, 1.0, 1e-27, 3)
    t2, e2 = compute_cost(1e4, 10, 2e8, 0.5, 1e-27, 3)
    assert t2 == pytest.approx(2 * t1) and e2 == pytest.approx(0.25 * e1)
    with pytest.raises(InfeasibleError):
        compute_cost(1e4, 10, 2e8, 0.0, 1e-27, 3)


def test_epoch_cost():
    parts = CostBreakdown(0.25, 0.1, 5e-3, 2e-6)
    t, e = epoch_cost(math.exp(-1), parts)
    assert t == pytest.approx(0.255) and e == pytest.approx(0.100002)
    t, _ = epoch_cost(0.5, parts)
    assert t == pytest.approx(0.253466, abs=1e-6)
    t, _ = epoch_cost(1 - 1e-12, parts)
    assert t == pytest.approx(0.25)
    for bad in (0.0, 1.0):
        with pytest.raises(ValueError):
            epoch_cost(bad, parts)


def test_c2c_rate():
    assert c2c_rate(0, 0.5, 1e-6, 0.3, B, N0) == 0.0
    g = 3 * N0 * 0.5 * B / (0.5 * 0.3)
    assert c2c_rate(1, 0.5, g, 0.3, B, N0) == pytest.approx(B)
    assert c2c_rate(1, 0.0, 1e-6, 0.3, B, N0) == 0.0


def test_wset():
    wp = WeightPair(1 / 6, 5 / 6)
    assert wset(0.5, wp, 0.25, 4e-6) == pytest.approx(0.0833400, rel=1e-6)
    assert wset(0.0, wp, 0.25, 4e-6) == pytest.approx(0.25 / 6 + 4e-6 * 5 / 6)
    assert wset(0.3, wp, 0.5, 8e-6) == pytest.approx(2 * wset(0.3, wp, 0.25, 4e-6))
    with pytest.raises(ValueError):
        wset(1.0, wp, 0.25, 4e-6)
    with pytest.raises(ValueError):
        WeightPair(0.5, 0.6)


@given(st.floats(0.01, 0.99))
def test_resource_split_closure(w):
    assert xi_fraction(w, True) + w == pytest.approx(1.0)
    assert pi_fraction(w, 10.0, True) + (1 - w) == pytest.approx(1.0)


def test_link_params_positive():
    with pytest.raises(ValueError):
        LinkParams(B, N0, 0.0, 0.3)
