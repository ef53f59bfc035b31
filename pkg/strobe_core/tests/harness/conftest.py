from collections.abc import Callable
from typing import Any

import pytest

from strobe_core.config import StrobeConfig
from strobe_core.harness import ScenarioConfig
from strobe_core.physics import ParameterSet


@pytest.fixture
def quick_settings() -> StrobeConfig:
    """Coarse grid and the minimum bootstrap, for fast harness runs."""
    return StrobeConfig(
        steps_per_period=64, bootstrap_resamples=100, record_runtime=False
    )


@pytest.fixture
def make_scenario(
    cs_params: ParameterSet, tmp_path
) -> Callable[..., ScenarioConfig]:
    """Build a small scenario on the Cs D2 parameters.

    Keyword arguments override top-level fields; ``schedule`` entries are
    merged into the default short schedule.
    """

    def build(**overrides: Any) -> ScenarioConfig:
        schedule = {"n_cycles_a": 10, "kappa_tilde_sq_a": 1.0}
        schedule.update(overrides.pop("schedule", {}))
        data = {
            "name": "test",
            "params": cs_params,
            "sweep": {"variable": "kappa_tilde_sq_a", "values": [0.5, 1.0]},
            "protocol": "single_pulse_noise",
            "n_traj": 400,
            "base_seed": 11,
            "outputs": tmp_path / "outputs",
            "schedule": schedule,
        }
        data.update(overrides)
        return ScenarioConfig.model_validate(data)

    return build
