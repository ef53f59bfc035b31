"""Tests for cavity helper functions."""

import math

import pytest

from strobe_core.errors import DomainError
from strobe_core.physics import (
    CavityConfig,
    enhanced_absorption,
    finesse,
    output_power_factor,
    resonant_transmission,
)


class TestCavityHelpers:
    """Tests for finesse, transmission, absorption and output factor."""

    def test_finesse_matches_model(self):
        """The helper and CavityConfig.finesse agree."""
        cavity = CavityConfig(t_in=0.003, t_out=0.2, loss=0.1666)
        assert finesse(0.003, 0.2, 0.1666) == pytest.approx(cavity.finesse, rel=1e-9)
        assert cavity.finesse == pytest.approx(17.0, rel=1e-3)

    def test_finesse_needs_losses(self):
        """A lossless cavity has no defined finesse."""
        with pytest.raises(DomainError):
            finesse(0.0, 0.0, 0.0)

    def test_matched_lossless_cavity_transmits_fully(self):
        """Symmetric couplers without loss transmit all light."""
        cavity = CavityConfig(t_in=0.1, t_out=0.1)
        assert resonant_transmission(cavity) == pytest.approx(1.0)

    def test_absorption_reduces_transmission(self):
        """Atomic absorption pulls the cavity off impedance matching."""
        clear = CavityConfig(t_in=0.1, t_out=0.1)
        absorbing = CavityConfig(t_in=0.1, t_out=0.1, alpha=0.02)
        assert resonant_transmission(absorbing) < resonant_transmission(clear)

    def test_enhanced_absorption(self):
        """Intracavity absorption scales with 2F/pi."""
        cavity = CavityConfig(t_in=0.003, t_out=0.2, loss=0.1666, alpha=0.01)
        expected = 2.0 * cavity.finesse / math.pi * 0.01
        assert enhanced_absorption(cavity) == pytest.approx(expected)

    def test_output_power_factor(self):
        """2/T_2 - 1, with T_2 = 0 rejected."""
        assert output_power_factor(0.2) == pytest.approx(9.0)
        assert output_power_factor(1.0) == pytest.approx(1.0)
        with pytest.raises(DomainError, match="transmission"):
            output_power_factor(0.0)
