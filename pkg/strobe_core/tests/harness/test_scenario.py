"""Tests for scenario loading and overrides."""

import json

import pytest
import yaml
from pydantic import ValidationError

from strobe_core.errors import ConfigError
from strobe_core.harness import SweepSpec, apply_overrides, load_scenario, override_keys


def write_scenario(path, data, fmt="json"):
    if fmt == "json":
        path.write_text(json.dumps(data))
    else:
        path.write_text(yaml.safe_dump(data))
    return path


@pytest.fixture
def scenario_data(cs_params):
    return {
        "name": "demo",
        "base": cs_params.model_dump(),
        "sweep": {"variable": "n_at", "values": [1e7, 1e8]},
        "protocol": "single_pulse_noise",
        "n_traj": 1000,
        "schedule": {"duty": 0.15, "n_cycles_a": 20},
    }


class TestLoadScenario:
    """Tests for load_scenario()."""

    def test_json_with_inline_base(self, tmp_path, scenario_data, cs_params):
        """An inline base mapping becomes the parameter set."""
        config = load_scenario(write_scenario(tmp_path / "s.json", scenario_data))
        assert config.params == cs_params
        assert config.sweep.points() == [1e7, 1e8]
        assert config.schedule.n_cycles_a == 20

    def test_yaml(self, tmp_path, scenario_data):
        """YAML scenario files load like JSON ones."""
        config = load_scenario(
            write_scenario(tmp_path / "s.yaml", scenario_data, fmt="yaml")
        )
        assert config.name == "demo"
        assert config.protocol == "single_pulse_noise"

    def test_base_relative_to_scenario_file(self, tmp_path, scenario_data, cs_params):
        """A base path is resolved next to the scenario file."""
        params = cs_params.model_dump() | {"n_at": 3e7}
        (tmp_path / "mine.json").write_text(json.dumps(params))
        scenario_data["base"] = "mine.json"
        config = load_scenario(write_scenario(tmp_path / "s.json", scenario_data))
        assert config.params.n_at == 3e7

    def test_bundled_base(self, tmp_path, scenario_data, cs_params):
        """A bare name refers to a bundled parameter set."""
        scenario_data["base"] = "cs_d2"
        config = load_scenario(write_scenario(tmp_path / "s.json", scenario_data))
        assert config.params == cs_params

    def test_missing_base_uses_default(self, tmp_path, scenario_data, cs_params):
        """Without base the default parameter set is used."""
        del scenario_data["base"]
        config = load_scenario(write_scenario(tmp_path / "s.json", scenario_data))
        assert config.params == cs_params
        assert config.base == "cs_d2"

    def test_missing_file(self, tmp_path):
        """A missing scenario file is a ConfigError on the config key."""
        with pytest.raises(ConfigError, match="not found") as excinfo:
            load_scenario(tmp_path / "nope.json")
        assert excinfo.value.key == "config"

    def test_unsupported_suffix(self, tmp_path):
        """Only JSON and YAML files are accepted."""
        path = tmp_path / "s.toml"
        path.write_text("name = 'x'")
        with pytest.raises(ConfigError, match=".json, .yaml or .yml"):
            load_scenario(path)

    def test_invalid_json(self, tmp_path):
        """Unparsable files name the config key."""
        path = tmp_path / "s.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="cannot parse") as excinfo:
            load_scenario(path)
        assert excinfo.value.key == "config"

    def test_too_few_trajectories(self, tmp_path, scenario_data):
        """n_traj below 100 is rejected with its key."""
        scenario_data["n_traj"] = 50
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(write_scenario(tmp_path / "s.json", scenario_data))
        assert excinfo.value.key == "n_traj"

    def test_unknown_top_level_key(self, tmp_path, scenario_data):
        """Unknown scenario keys are rejected with their name."""
        scenario_data["bogus"] = 1
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(write_scenario(tmp_path / "s.json", scenario_data))
        assert excinfo.value.key == "bogus"

    def test_unknown_sweep_variable(self, tmp_path, scenario_data):
        """The sweep variable must be a recognized key."""
        scenario_data["sweep"]["variable"] = "colour"
        with pytest.raises(ConfigError, match="Unknown sweep variable 'colour'"):
            load_scenario(write_scenario(tmp_path / "s.json", scenario_data))

    def test_invalid_base_value(self, tmp_path, scenario_data):
        """Invalid physics values report the parameter key."""
        scenario_data["base"]["n_at"] = -1.0
        with pytest.raises(ConfigError) as excinfo:
            load_scenario(write_scenario(tmp_path / "s.json", scenario_data))
        assert excinfo.value.key == "n_at"

    def test_series_need_names(self, tmp_path, scenario_data):
        """Every series entry carries a name."""
        scenario_data["series"] = [{"duty": 1.0}]
        with pytest.raises(ConfigError, match="needs a name"):
            load_scenario(write_scenario(tmp_path / "s.json", scenario_data))

    def test_series_unknown_key(self, tmp_path, scenario_data):
        """Series overrides use the sweep-variable vocabulary."""
        scenario_data["series"] = [{"name": "x", "shade": 2}]
        with pytest.raises(ConfigError, match="Unknown series key 'shade'"):
            load_scenario(write_scenario(tmp_path / "s.json", scenario_data))


class TestSweepSpec:
    """Tests for SweepSpec."""

    def test_log_range(self):
        """log_range gives geometrically spaced points."""
        sweep = SweepSpec(
            variable="n_ph_a", log_range={"start": 1e6, "stop": 1e8, "num": 3}
        )
        assert sweep.points() == pytest.approx([1e6, 1e7, 1e8])

    def test_needs_exactly_one_source(self):
        """values and log_range are mutually exclusive."""
        with pytest.raises(ValidationError, match="exactly one"):
            SweepSpec(
                variable="n_at",
                values=[1.0],
                log_range={"start": 1.0, "stop": 2.0, "num": 2},
            )
        with pytest.raises(ValidationError, match="exactly one"):
            SweepSpec(variable="n_at")


class TestApplyOverrides:
    """Tests for apply_overrides()."""

    def test_routes_keys(self, make_scenario):
        """Keys land in the parameter set, schedule, init or top level."""
        config = apply_overrides(
            make_scenario(),
            {"n_at": 2e7, "duty": 1.0, "n_bar": 0.5, "cavity": True},
        )
        assert config.params.n_at == 2e7
        assert config.schedule.duty == 1.0
        assert config.init.n_bar == 0.5
        assert config.cavity is True

    def test_original_unchanged(self, make_scenario):
        """Overrides return a copy."""
        config = make_scenario()
        apply_overrides(config, {"duty": 1.0})
        assert config.schedule.duty == 0.15

    def test_unknown_key(self, make_scenario):
        """Unknown override keys raise ConfigError with the key."""
        with pytest.raises(ConfigError, match="Unknown override 'shade'") as excinfo:
            apply_overrides(make_scenario(), {"shade": 1})
        assert excinfo.value.key == "shade"

    def test_invalid_value(self, make_scenario):
        """Values failing validation raise ConfigError naming the field."""
        with pytest.raises(ConfigError) as excinfo:
            apply_overrides(make_scenario(), {"duty": 2.0})
        assert excinfo.value.key == "schedule.duty"

    def test_override_keys_cover_sweep_vocabulary(self):
        """Physics, schedule and init keys are all available."""
        keys = override_keys()
        for key in ("n_at", "flux_bar", "duty", "n_ph_a", "n_bar", "cavity"):
            assert key in keys
        assert "mode_a" not in keys
