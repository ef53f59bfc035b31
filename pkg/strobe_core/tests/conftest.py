import math
import os

import numpy as np
import pytest

from strobe_core.physics import ParameterSet, load_parameter_set
from strobe_core.physics.models import AtomicTransition, CouplingSet, EnsembleConfig
from strobe_core.sim.models import OscillatorState


@pytest.fixture(autouse=True)
def _isolated_settings(monkeypatch):
    """Keep the developer's STRB_* environment out of the tests."""
    for name in [key for key in os.environ if key.upper().startswith("STRB_")]:
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def cs_params() -> ParameterSet:
    """Bundled Cs D2 parameter set."""
    return load_parameter_set("cs_d2")


@pytest.fixture
def cs_transition(cs_params: ParameterSet) -> AtomicTransition:
    """Cs D2 excited-state structure in rad/s."""
    return cs_params.transition()


@pytest.fixture
def operating_detuning() -> float:
    """Blue detuning of 1.6 GHz from the F'=5 line, in rad/s."""
    return -2.0 * math.pi * 1.6e9


@pytest.fixture
def unit_coupling() -> CouplingSet:
    """Coupling with beta = 1 and no tensor terms; fluxes set kappa_tilde."""
    return CouplingSet(
        a0=1.0,
        a1=1.0,
        a2=0.0,
        beta=1.0,
        kappa=0.0,
        kappa_tilde=0.0,
        w=0.0,
        gamma_sw=0.0,
    )


@pytest.fixture
def unit_ensemble() -> EnsembleConfig:
    """Lossless ensemble, relaxation off."""
    return EnsembleConfig(n_at=1.0, orientation=1.0, F=1)


@pytest.fixture
def unit_ground() -> OscillatorState:
    """Coherent spin state normalized by J_x = 1."""
    return OscillatorState(mean=np.zeros(2), cov=0.5 * np.eye(2), jx=1.0, jx_ref=1.0)
