"""Tests for parameter documents and the model validation around them."""

import json
import math

import pytest
from pydantic import ValidationError

from strobe_core.errors import ConfigError
from strobe_core.physics import (
    AtomicTransition,
    EnsembleConfig,
    ProbeConfig,
    bundled_parameter_sets,
    load_parameter_set,
    parameter_set_from_mapping,
)


class TestParameterSet:
    """Tests for ParameterSet loading and conversion."""

    def test_bundled_set_is_listed(self):
        """The Cs D2 set ships with the package."""
        assert "cs_d2" in bundled_parameter_sets()

    def test_hz_fields_convert_to_rad_per_second(self, cs_params):
        """Cyclic frequencies gain 2*pi; gamma_dark_hz stays a plain rate."""
        transition = cs_params.transition()
        assert transition.gamma == pytest.approx(2.0 * math.pi * cs_params.gamma_hz)
        assert transition.delta_45 == pytest.approx(
            2.0 * math.pi * cs_params.delta45_hz
        )
        assert cs_params.probe().detuning == pytest.approx(
            2.0 * math.pi * cs_params.detuning_hz
        )
        assert cs_params.ensemble().gamma_dark == cs_params.gamma_dark_hz

    def test_probe_overrides(self, cs_params):
        """probe() accepts another duration and flux."""
        probe = cs_params.probe(duration=1e-3, flux_bar=1e10)
        assert probe.n_ph == pytest.approx(1e7)

    def test_unknown_key_is_rejected_with_key(self, cs_params):
        """Extra keys fail and the error names the key."""
        data = cs_params.model_dump()
        data["finesse"] = 17
        with pytest.raises(ConfigError) as info:
            parameter_set_from_mapping(data)
        assert info.value.key == "finesse"

    def test_invalid_value_names_key(self, cs_params):
        """Out-of-range values report the offending key."""
        data = cs_params.model_dump()
        data["orientation"] = 1.5
        with pytest.raises(ConfigError) as info:
            parameter_set_from_mapping(data)
        assert info.value.key == "orientation"

    def test_load_from_file(self, tmp_path, cs_params):
        """A JSON file with the external keys loads."""
        data = cs_params.model_dump()
        data["n_at"] = 2.0e7
        path = tmp_path / "custom.json"
        path.write_text(json.dumps(data))
        assert load_parameter_set(path).n_at == 2.0e7

    def test_environment_selects_default(self, tmp_path, monkeypatch, cs_params):
        """STRB_DEFAULT_PARAMS replaces the bundled default."""
        data = cs_params.model_dump()
        data["n_at"] = 3.0e7
        path = tmp_path / "env.json"
        path.write_text(json.dumps(data))
        monkeypatch.setenv("STRB_DEFAULT_PARAMS", str(path))
        assert load_parameter_set().n_at == 3.0e7

    def test_missing_file(self, tmp_path):
        """A missing path is a config error."""
        with pytest.raises(ConfigError, match="not found"):
            load_parameter_set(tmp_path / "nope.json")

    def test_unknown_bundled_name(self):
        """Unknown names list the available sets."""
        with pytest.raises(ConfigError, match="Unknown parameter set 'rb87'"):
            load_parameter_set("rb87")


class TestModelValidation:
    """Constraint checks on the physics models."""

    def test_orientation_bounds(self):
        """Orientation must be in [0, 1]."""
        with pytest.raises(ValidationError):
            EnsembleConfig(n_at=1e8, orientation=1.2)

    def test_jx_is_derived(self):
        """J_x = p * N_at * F and never exceeds N_at * F."""
        ensemble = EnsembleConfig(n_at=1e8, orientation=0.5, F=4)
        assert ensemble.jx == pytest.approx(2e8)

    def test_transition_ordering(self):
        """delta_35 must lie above delta_45."""
        with pytest.raises(ValidationError, match="delta_35"):
            AtomicTransition(gamma=1.0, wavelength=1e-6, delta_35=1.0, delta_45=2.0)

    def test_zero_detuning_rejected(self):
        """A probe on resonance cannot be built."""
        with pytest.raises(ValidationError, match="detuning"):
            ProbeConfig(detuning=0.0, area=1e-8, flux_bar=1.0, duration=1e-3)
