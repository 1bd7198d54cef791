import numpy as np
import pytest

from referral_fl.config import SimConfig
from referral_fl.lyap import LyapConfig
from referral_fl.sghs import SghsParams
from referral_fl.net import init_topology
from referral_fl.sim import round_context


@pytest.fixture
def small_cfg():
    return SimConfig(M=3, N=8, rounds=20)


def make_round(cfg, seed=0, t=1):
    """Round-``t`` context for a fresh topology."""
    state = init_topology(cfg, seed)
    _, ctx = round_context(state, cfg, seed, t)
    return ctx


def lyap_params(cfg):
    return LyapConfig.from_config(cfg), SghsParams.from_config(cfg)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(results):
        terminalreporter.write_line(results[k])
