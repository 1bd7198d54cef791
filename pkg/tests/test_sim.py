import json

import numpy as np
import pytest

from referral_fl.config import SimConfig
from referral_fl.lyap import constraint_residuals
from referral_fl.net import init_topology
from referral_fl.sim import (
    CSV_COLUMNS, SimulationError, history_from_metrics, is_finite_record, read_csv, round_context,
    run_simulation, write_outputs,
)


@pytest.fixture(scope="module")
def default_run():
    cfg = SimConfig(rounds=300)
    return cfg, run_simulation(cfg)


def test_record_count_and_indexing(default_run):
    cfg, ms = default_run
    assert len(ms) == 300
    assert [m.round for m in ms] == list(range(1, 301))
    taus = [m.tau for m in ms]
    assert taus[0] == 0.0 and all(b > a for a, b in zip(taus, taus[1:]))
    assert all(is_finite_record(m) for m in ms)
    assert all(m.method == "matching" for m in ms)


def test_time_average_is_running_mean(default_run):
    _, ms = default_run
    w = np.array([m.max_wset for m in ms])
    np.testing.assert_allclose([m.time_avg_cost for m in ms], np.cumsum(w) / np.arange(1, 301), rtol=1e-12)


def test_outputs_shape_and_round_trip(default_run, tmp_path):
    cfg, ms = default_run
    summary = write_outputs(ms, tmp_path, cfg)
    lines = (tmp_path / "metrics.csv").read_text().splitlines()
    assert len(lines) == 301
    assert lines[0].split(",") == list(CSV_COLUMNS)
    rows = read_csv(tmp_path / "metrics.csv")
    for rm, row in zip(ms, rows):
        for col in CSV_COLUMNS:
            assert row[col] == getattr(rm, col)
    on_disk = json.loads((tmp_path / "summary.json").read_text())
    assert on_disk == json.loads(json.dumps(summary))
    fair, qos = constraint_residuals(history_from_metrics(ms, cfg.M, cfg.N), cfg.Delta, cfg.r_min)
    assert on_disk["fairness_residuals"] == pytest.approx(list(fair), rel=0, abs=0)
    assert on_disk["qos_residuals"] == qos
    assert on_disk["config"] == cfg.to_dict()


def test_fairness_residual_from_selected_counts(default_run):
    cfg, ms = default_run
    fair, _ = constraint_residuals(history_from_metrics(ms, cfg.M, cfg.N), cfg.Delta, cfg.r_min)
    sel = np.zeros(cfg.M)
    for rm in ms:
        for p in rm.pairs:
            sel[p.rc] += 1
    np.testing.assert_allclose(fair, sel / len(ms) - cfg.Delta)


def test_byte_identical_reruns(tmp_path):
    cfg = SimConfig(M=4, N=12, rounds=40, method="random-random", seed=5)
    write_outputs(run_simulation(cfg), tmp_path / "a", cfg)
    write_outputs(run_simulation(cfg), tmp_path / "b", cfg)
    for name in ("metrics.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_common_random_numbers_across_v_and_method():
    prints = []
    for V, method in ((0.01, "matching"), (0.1, "centralized"), (1.0, "greedy-sghs")):
        cfg = SimConfig(M=4, N=12, V=V, method=method)
        st_ = init_topology(cfg, 3)
        seq = []
        for t in range(1, 15):
            st_, _ = round_context(st_, cfg, 3, t)
            seq.append(st_.fingerprint())
        prints.append(seq)
    assert prints[0] == prints[1] == prints[2]


def test_selector_error_carries_round():
    cfg = SimConfig(M=6, N=30, s_max=200.0, link_prob=1.0, epsilon=0.0, enum_cap=5,
                    method="centralized", rounds=3)
    with pytest.raises(SimulationError) as info:
        run_simulation(cfg)
    assert info.value.round_index == 1
    assert "distributed" in str(info.value)


def test_noop_rounds_recorded_as_zero():
    cfg = SimConfig(M=2, N=4, s_max=1e-3, epsilon=0.0, rounds=5)
    ms = run_simulation(cfg)
    assert all(m.selected_count == 0 and m.max_wset == 0.0 and m.theta == 0.0 for m in ms)
    assert all(m.duration == cfg.t_max for m in ms)


def test_write_outputs_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        write_outputs([], tmp_path, SimConfig())


def test_unwritable_path(tmp_path):
    cfg = SimConfig(M=2, N=3, rounds=2)
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        write_outputs(run_simulation(cfg), blocker / "sub", cfg)
