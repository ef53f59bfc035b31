import json
import os

import pytest


@pytest.fixture(autouse=True)
def _isolated_cli(monkeypatch, tmp_path):
    """No STRB_* variables and no ./strobe.yaml from the developer's shell."""
    for name in [key for key in os.environ if key.upper().startswith("STRB_")]:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def scenario_file(tmp_path):
    """Write a small two-pulse scenario and return its path."""

    def write(**overrides):
        data = {
            "name": "small",
            "base": "cs_d2",
            "protocol": "two_pulse_squeezing",
            "sweep": {"variable": "kappa_tilde_sq_a", "values": [1.0, 2.0]},
            "n_traj": 300,
            "base_seed": 7,
            "outputs": str(tmp_path / "out"),
            "schedule": {"n_cycles_a": 6, "n_cycles_b": 6, "kappa_tilde_sq_a": 1.0},
        }
        data.update(overrides)
        path = tmp_path / "small.json"
        path.write_text(json.dumps(data))
        return path

    return write
