import pytest

from sapsky.config import ConfigError, ExperimentConfig, config_from_dict, desk_config, load_config


def test_empty_file_gives_full_scale_defaults(tmp_path):
    p = tmp_path / "empty.yaml"
    p.write_text("")
    cfg = load_config(p)
    assert (cfg.total_objects, cfg.k_nodes, cfg.omega_bits, cfg.bandwidth_bps, cfg.m, cfg.d, cfg.w_max) == (
        50_000, 5, 1000.0, 1e6, 3, 3, 500)
    assert cfg == ExperimentConfig()


def test_seed_override_only(tmp_path):
    p = tmp_path / "seed.yaml"
    p.write_text("seed: 42\n")
    cfg = load_config(p)
    assert cfg.seed == 42 and cfg.replace(seed=0) == ExperimentConfig()


@pytest.mark.parametrize("text,key", [("m: 0\n", "m:"), ("w1: 0.7\n", "w1"), ("alpha_min: 0.95\n", "alpha_min"),
                                      ("bogus: 1\n", "bogus"), ("optimizer: rmsprop\n", "optimizer")])
def test_invalid_values_name_the_key(tmp_path, text, key):
    p = tmp_path / "bad.yaml"
    p.write_text(text)
    with pytest.raises(ConfigError, match=key):
        load_config(p)


def test_tuples_and_hash():
    a = config_from_dict({"hidden": [8, 8], "sweep_m": [3, 5]})
    assert a.hidden == (8, 8) and a.sweep_m == (3, 5)
    assert a.hash() == config_from_dict({"hidden": [8, 8], "sweep_m": [3, 5]}).hash()
    assert a.hash() != a.replace(seed=1).hash()


def test_desk_scale():
    cfg = desk_config()
    assert cfg.total_objects == 5000 and cfg.bandwidth_bps == 1e6
    assert cfg.broker_mu == pytest.approx(5 * 200 / 0.9)
