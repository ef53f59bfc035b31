"""Tests for conditional squeezing, decoherence and the cavity optimum."""

import math

import numpy as np
import pytest

from strobe_core.analytics import (
    cavity_squeezing,
    conditional_squeezing,
    conditional_squeezing_from_covariances,
    gaussian_conditional_variance,
    optimal_cavity_squeezing,
    optimal_cavity_squeezing_numeric,
    strobe_profile,
    total_squeezing,
)
from strobe_core.errors import DegenerateError, DomainError
from strobe_core.physics import CavityConfig


class TestConditionalSqueezing:
    """Tests for conditional_squeezing()."""

    def test_no_measurement(self):
        """kappa_tilde = 0 gives no squeezing."""
        assert conditional_squeezing(0.0, strobe_profile(0.15)) == pytest.approx(1.0)

    def test_short_strobe_limit(self):
        """At D -> 0 the result is 1 / (1 + kappa_tilde^2)."""
        profile = strobe_profile(1e-6)
        for kappa_tilde in np.linspace(0.0, 5.0, 26):
            expected = 1.0 / (1.0 + kappa_tilde**2)
            assert conditional_squeezing(kappa_tilde, profile) == pytest.approx(
                expected, rel=1e-4
            )

    def test_three_to_one(self):
        """kappa_tilde^2 = 3 reaches 1/4 for a short strobe."""
        profile = strobe_profile(1e-6)
        assert conditional_squeezing(math.sqrt(3.0), profile) == pytest.approx(
            0.25, rel=1e-4
        )

    @pytest.mark.parametrize("duty", [1e-3, 0.05, 0.1, 0.15, 0.2])
    def test_nonincreasing_in_coupling(self, duty):
        """More measurement never hurts for short duty cycles."""
        profile = strobe_profile(duty)
        values = [conditional_squeezing(k, profile) for k in np.linspace(0, 2.5, 51)]
        assert all(b <= a + 1e-15 for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize(
        "duty", [1e-4, 0.01, 0.05, 0.1, 0.15, 0.2, 0.3, 0.5, 0.75, 1.0]
    )
    def test_matches_gaussian_conditioning(self, duty):
        """The closed form equals conditioning the integrated joint covariance."""
        profile = strobe_profile(duty)
        for kappa_tilde in np.linspace(0.1, 5.0, 10):
            direct = conditional_squeezing(kappa_tilde, profile)
            via_cov = conditional_squeezing_from_covariances(
                kappa_tilde, profile, n_ph=1e8
            )
            assert via_cov == pytest.approx(direct, rel=1e-10)

    def test_covariance_path_integrates_the_windows(self):
        """Only the duty is taken from the profile; b and c are integrated."""
        profile = strobe_profile(0.15)
        scrambled = profile.model_copy(update={"b": 1.0, "c": 1.0})
        assert conditional_squeezing_from_covariances(
            math.sqrt(3.0), scrambled
        ) == pytest.approx(conditional_squeezing(math.sqrt(3.0), profile), rel=1e-10)

    def test_negative_coupling_rejected(self):
        """kappa_tilde is a non-negative strength."""
        with pytest.raises(DomainError):
            conditional_squeezing(-1.0, strobe_profile(0.15))


class TestGaussianConditionalVariance:
    """Tests for gaussian_conditional_variance()."""

    def test_bivariate(self):
        """Var(a | b) = Var(a) (1 - rho^2)."""
        cov = np.array([[2.0, 1.2], [1.2, 1.0]])
        assert gaussian_conditional_variance(cov, 0, [1]) == pytest.approx(2.0 - 1.44)

    def test_nothing_observed(self):
        """Conditioning on nothing returns the marginal variance."""
        cov = np.array([[2.0, 0.5], [0.5, 1.0]])
        assert gaussian_conditional_variance(cov, 1, []) == 1.0

    def test_singular_block(self):
        """A singular observed block is degenerate."""
        cov = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
        with pytest.raises(DegenerateError):
            gaussian_conditional_variance(cov, 0, [1, 2])


class TestTotalSqueezing:
    """Tests for total_squeezing()."""

    def test_no_decoherence(self):
        """zeta = 0 leaves the coherent squeezing."""
        result = total_squeezing(0.4, 0.0, 1.5, d_eff=10.0)
        assert result.xi_sq == pytest.approx(0.4)
        assert result.eta_tau == 0.0

    def test_optical_depth_scaling(self):
        """Doubling the optical depth halves the decoherence term."""
        a = total_squeezing(0.4, 0.8, 1.5, d_eff=10.0)
        b = total_squeezing(0.4, 0.8, 1.5, d_eff=20.0)
        assert b.eta_tau == pytest.approx(a.eta_tau / 2)
        assert a.xi_sq >= a.xi0_sq

    def test_cavity_power_factor(self):
        """T_2 = 1 leaves eta unchanged; T_2 = 0.2 multiplies it by 9."""
        bare = total_squeezing(0.4, 0.8, 1.5, d_eff=10.0)
        open_cavity = total_squeezing(
            0.4, 0.8, 1.5, d_eff=10.0, cavity=CavityConfig(t_out=0.999999999)
        )
        assert open_cavity.eta_tau == pytest.approx(bare.eta_tau, rel=1e-8)
        lossy = total_squeezing(
            0.4, 0.8, 1.5, d_eff=10.0, cavity=CavityConfig(t_out=0.2)
        )
        assert lossy.eta_tau == pytest.approx(9.0 * bare.eta_tau)

    def test_closed_output_coupler(self):
        """T_2 = 0 is a domain error."""
        cavity = CavityConfig(t_in=0.01, t_out=0.0, loss=0.05)
        with pytest.raises(DomainError):
            total_squeezing(0.4, 0.8, 1.5, d_eff=10.0, cavity=cavity)

    def test_invalid_optical_depth(self):
        """d_eff must be positive."""
        with pytest.raises(DomainError, match="d_eff"):
            total_squeezing(0.4, 0.8, 1.5, d_eff=0.0)


class TestOptimalCavity:
    """Tests for the closed-form and numerical cavity optimum."""

    def test_closed_form(self):
        """The optimum sits at T_2 = loss with xi^2 = (2 - sqrt r) sqrt r."""
        loss = 0.05
        xi_sq, t2 = optimal_cavity_squeezing(1.0, 50.0, math.pi / loss, loss)
        r = 1.0 / (2.0 / loss * 50.0)
        assert t2 == loss
        assert xi_sq == pytest.approx((2 - math.sqrt(r)) * math.sqrt(r))

    def test_large_resources_limit(self):
        """Finesse times optical depth to infinity drives xi^2 to zero."""
        xi_sq, _ = optimal_cavity_squeezing(1.0, 1e12, 1e6, 0.01)
        assert xi_sq < 1e-8

    def test_optical_depth_scaling(self):
        """Four times the optical depth halves the leading square-root term."""
        a, _ = optimal_cavity_squeezing(1.0, 1e6, 100.0, 0.05)
        b, _ = optimal_cavity_squeezing(1.0, 4e6, 100.0, 0.05)
        assert b == pytest.approx(a / 2, rel=1e-3)

    def test_regime_violation(self):
        """zeta / ((2F/pi) d0) > 1 is outside the formula."""
        with pytest.raises(DomainError, match="exceeds 1"):
            optimal_cavity_squeezing(10.0, 1.0, 2.0, 0.05)

    @pytest.mark.parametrize("loss", [0.01, 0.03, 0.05])
    def test_numeric_search_agrees(self, loss):
        """Searching photon number and T_2 lands on the closed form."""
        zeta, d0 = 1.0, 50.0
        expected_xi, expected_t2 = optimal_cavity_squeezing(
            zeta, d0, math.pi / loss, loss
        )
        found = optimal_cavity_squeezing_numeric(zeta, d0, loss)
        assert found.xi_sq == pytest.approx(expected_xi, rel=1e-3)
        assert found.t_out == pytest.approx(expected_t2, rel=0.02)

    def test_exact_power_factor_within_ten_percent(self):
        """Using 2/T_2 - 1 moves the optimum by less than 10 %."""
        zeta, d0, loss = 1.0, 50.0, 0.05
        expected_xi, _ = optimal_cavity_squeezing(zeta, d0, math.pi / loss, loss)
        found = optimal_cavity_squeezing_numeric(zeta, d0, loss, exact=True)
        assert found.xi_sq == pytest.approx(expected_xi, rel=0.1)
        assert found.t_out == pytest.approx(loss, rel=0.1)

    def test_evaluator_at_optimum(self):
        """cavity_squeezing reproduces the optimum at the arguments it reports."""
        found = optimal_cavity_squeezing_numeric(1.0, 50.0, 0.05)
        value = cavity_squeezing(found.kappa0_sq, found.t_out, 1.0, 50.0, 0.05)
        assert value == pytest.approx(found.xi_sq)
