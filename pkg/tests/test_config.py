"""
Tests for run configuration loading, merging and validation.
"""
import json

import pytest

from marginal_pgm.core.errors import ConfigError
from marginal_pgm.core.junction_tree import DEFAULT_PARAMETER_CAP
from marginal_pgm.utils.config import ConfigManager, default_log_level


def write_config(directory, **values):
    path = directory / "run.json"
    settings = {
        "dataset_path": "data.csv",
        "domain_path": "domain.json",
        "measurements": [{"clique": ["A"]}],
    }
    settings.update(values)
    path.write_text(json.dumps(settings))
    return path


def test_defaults_without_a_file():
    manager = ConfigManager()
    assert manager.get("epsilon") == 1.0
    assert manager.get("algorithm") == "alg2"
    assert manager.get("parameter_cap") == DEFAULT_PARAMETER_CAP
    with pytest.raises(ConfigError):
        manager.to_run_config()


def test_file_values_merge_over_defaults(tmp_path):
    config = ConfigManager(write_config(tmp_path, epsilon=0.5, iterations=20)).to_run_config()
    assert config.epsilon == 0.5
    assert config.iterations == 20
    assert config.loss == "l2"
    assert config.tolerance == 1e-9
    assert config.uses_dataset


def test_relative_paths_resolve_against_the_config_file(tmp_path):
    config = ConfigManager(write_config(tmp_path)).to_run_config()
    assert config.dataset_path == (tmp_path / "data.csv").resolve()
    assert config.domain_path == (tmp_path / "domain.json").resolve()
    assert config.output_dir == (tmp_path / "output").resolve()


def test_unknown_keys_and_bad_files_are_rejected(tmp_path):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, learning_rate=0.1))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        ConfigManager(broken)
    with pytest.raises(ConfigError):
        ConfigManager(tmp_path / "missing.json")
    listing = tmp_path / "list.json"
    listing.write_text("[]")
    with pytest.raises(ConfigError):
        ConfigManager(listing)


def test_environment_overrides_the_file(tmp_path, monkeypatch):
    monkeypatch.setenv("PGM_SEED", "7")
    monkeypatch.setenv("PGM_PARAMETER_CAP", "1000")
    config = ConfigManager(write_config(tmp_path, seed=1)).to_run_config()
    assert config.seed == 7
    assert config.parameter_cap == 1000


def test_invalid_environment_value(tmp_path, monkeypatch):
    monkeypatch.setenv("PGM_SEED", "seven")
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path))


def test_explicit_overrides_win(tmp_path, monkeypatch):
    monkeypatch.setenv("PGM_SEED", "7")
    manager = ConfigManager(write_config(tmp_path), {"seed": 9, "output_dir": None})
    config = manager.to_run_config()
    assert config.seed == 9
    assert config.output_dir == (tmp_path / "output").resolve()
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path), {"colour": "red"})


def test_log_level_from_environment(monkeypatch):
    assert default_log_level() == "WARNING"
    monkeypatch.setenv("PGM_LOG_LEVEL", "debug")
    assert default_log_level() == "DEBUG"


@pytest.mark.parametrize("values", [
    {"algorithm": "alg3"},
    {"loss": "huber"},
    {"mode": "adaptive"},
    {"step_rule": "armijo"},
    {"epsilon": 0},
    {"iterations": 0},
    {"rounds": 0},
    {"parameter_cap": 0},
    {"step_size": -1.0},
    {"tolerance": -1e-3},
    {"synthetic_records": -5},
    {"domain_path": None},
    {"measurements": []},
    {"dataset_path": None},
    {"mode": "mwem"},
    {"measurement_file": "ms.json"},
    {"iterations": "many"},
])
def test_invalid_settings(tmp_path, values):
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, **values)).to_run_config()


def test_measurement_file_with_estimated_total_needs_no_dataset(tmp_path):
    config = ConfigManager(write_config(tmp_path, dataset_path=None, measurements=[],
                                        measurement_file="ms.json",
                                        total_mode="estimate")).to_run_config()
    assert not config.uses_dataset
    assert config.measurement_file == (tmp_path / "ms.json").resolve()


def test_lists_can_be_given_inline_or_as_files(tmp_path):
    (tmp_path / "measurements.json").write_text(json.dumps([{"clique": ["A", "B"]}]))
    (tmp_path / "workload.json").write_text(json.dumps([{"clique": ["A"]}]))
    config = ConfigManager(write_config(tmp_path, measurements="measurements.json",
                                        workload="workload.json",
                                        queries=[{"blocks": {"A": "mean"}}])).to_run_config()
    assert config.measurements == [{"clique": ["A", "B"]}]
    assert config.workload == [{"clique": ["A"]}]
    assert config.queries == [{"blocks": {"A": "mean"}}]
    with pytest.raises(ConfigError):
        ConfigManager(write_config(tmp_path, measurements="absent.json")).to_run_config()


def test_mwem_needs_the_known_total(tmp_path):
    workload = [{"clique": ["A"]}]
    config = ConfigManager(write_config(tmp_path, mode="mwem", workload=workload)).to_run_config()
    assert config.total_mode == "known"
    with pytest.raises(ConfigError, match="total_mode"):
        ConfigManager(write_config(tmp_path, mode="mwem", workload=workload,
                                   total_mode="estimate")).to_run_config()
