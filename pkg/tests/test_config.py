import pytest

from referral_fl.config import ConfigError, SimConfig, dbm_to_watt, load_config


def test_defaults_valid():
    cfg = SimConfig()
    assert cfg.Delta == pytest.approx(10 / 70)
    assert cfg.n0 == pytest.approx(10 ** (-17.4) / 1000)


@pytest.mark.parametrize("change", [
    {"M": 0}, {"p_rc": -1.0}, {"f_urc": 0.0}, {"lambda_t": 0.5, "lambda_e": 0.6},
    {"rounds": 0}, {"method": "oracle"}, {"zeta": 2.0}, {"epsilon": 1.5}, {"theta_max": 1.0},
])
def test_invalid_configs(change):
    with pytest.raises(ConfigError):
        SimConfig(**change)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("M: 4\nN: 12\nV: 0.5\nmethod: greedy-sghs\n")
    cfg = load_config(path)
    assert (cfg.M, cfg.N, cfg.V, cfg.method) == (4, 12, 0.5, "greedy-sghs")
    assert SimConfig.from_dict(cfg.to_dict()) == cfg


def test_unknown_key_rejected(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("M: 4\nbogus: 1\n")
    with pytest.raises(ConfigError, match="bogus"):
        load_config(path)


def test_dbm_to_watt():
    assert dbm_to_watt(30) == pytest.approx(1.0)
    assert dbm_to_watt(0) == pytest.approx(1e-3)
