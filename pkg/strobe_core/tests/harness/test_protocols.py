"""Tests for sweep-point setup and the protocols."""

import logging
import math

import numpy as np
import pytest

from strobe_core.analytics import conditional_squeezing, predict_oscillator_noise
from strobe_core.errors import ConfigError
from strobe_core.harness import (
    cavity_terms,
    get_protocol,
    prepare_point,
    protocols,
    run_protocol,
)
from strobe_core.physics import CavityConfig
from strobe_core.sim import shot_noise_variance


class TestPreparePoint:
    """Tests for prepare_point()."""

    def test_kappa_target(self, make_scenario, quick_settings):
        """kappa_tilde_sq_a sets the pulse A flux."""
        setup = prepare_point(make_scenario(), seed=1, settings=quick_settings)
        assert setup.kappa_tilde_sq_a == pytest.approx(1.0, rel=1e-9)
        assert setup.kappa_tilde_sq_b == 0.0
        assert setup.schedule.steps_per_period == 64

    def test_photon_number(self, make_scenario, quick_settings):
        """n_ph_a fixes the flux as photons per pulse length."""
        config = make_scenario(schedule={"kappa_tilde_sq_a": None, "n_ph_a": 2e7})
        setup = prepare_point(config, seed=1, settings=quick_settings)
        assert setup.schedule.flux_bar * setup.schedule.tau_a == pytest.approx(2e7)

    def test_default_flux(self, make_scenario, quick_settings, cs_params):
        """Without a target the parameter set's flux is used."""
        config = make_scenario(schedule={"kappa_tilde_sq_a": None})
        setup = prepare_point(config, seed=1, settings=quick_settings)
        assert setup.schedule.flux_bar == cs_params.flux_bar

    def test_pulse_b_photons(self, make_scenario, quick_settings):
        """n_ph_b sets the flux of the second pulse."""
        config = make_scenario(schedule={"n_cycles_b": 5, "n_ph_b": 1e7})
        setup = prepare_point(config, seed=1, settings=quick_settings)
        assert setup.schedule.flux_b * setup.schedule.tau_b == pytest.approx(1e7)
        assert setup.kappa_tilde_sq_b > 0.0

    def test_pulse_b_photons_need_pulse_b(self, make_scenario, quick_settings):
        """n_ph_b without pulse B cycles is a config error."""
        config = make_scenario(schedule={"n_ph_b": 1e7})
        with pytest.raises(ConfigError) as excinfo:
            prepare_point(config, seed=1, settings=quick_settings)
        assert excinfo.value.key == "n_ph_b"

    def test_analytic_shot_noise(self, make_scenario, quick_settings):
        """Analytic PSN is the exact decoupled lock-in variance."""
        setup = prepare_point(make_scenario(), seed=1, settings=quick_settings)
        assert setup.psn_a == shot_noise_variance(setup.schedule, setup.mode_a)
        assert setup.psn_b == 0.0

    def test_mc_shot_noise(self, make_scenario, quick_settings, mocker):
        """psn_mode=mc measures shot noise with a decoupled run."""
        reference = mocker.patch(
            "strobe_core.harness.protocols.shot_noise_reference", return_value=2.0
        )
        settings = quick_settings.model_copy(update={"psn_mode": "mc"})
        setup = prepare_point(make_scenario(), seed=5, settings=settings)
        assert setup.psn_a == 2.0
        assert reference.call_args.args[3] == 5

    def test_cavity(self, make_scenario, quick_settings, cs_params):
        """The cavity enhances the coupling and rescales the decoherence depth."""
        config = make_scenario(cavity=True, schedule={"d_eff": 4.0})
        setup = prepare_point(config, seed=1, settings=quick_settings)
        cavity = cs_params.cavity()
        enhancement = 2.0 * cavity.finesse / math.pi
        assert setup.coupling.enhancement == pytest.approx(enhancement)
        assert setup.d_eff == 4.0
        assert setup.schedule.optical_depth == pytest.approx(
            4.0 * enhancement**2 / (2.0 / cavity.t_out - 1.0)
        )
        assert setup.kappa_tilde_sq_a == pytest.approx(1.0, rel=1e-9)

    def test_thermal_calibration_prepares_unpolarized(
        self, make_scenario, quick_settings
    ):
        """thermal_calibration always starts from the unpolarized ensemble."""
        config = make_scenario(protocol="thermal_calibration")
        setup = prepare_point(config, seed=1, settings=quick_settings)
        assert setup.init.jx == 0.0
        assert setup.init.cov[0, 0] == pytest.approx(0.9375)

    def test_mode_rate_defaults_to_dark_decay(self, make_scenario, quick_settings):
        """A mode without a rate uses the ensemble's dark decay rate."""
        config = make_scenario(schedule={"mode_a": {"kind": "exp_rising"}})
        setup = prepare_point(config, seed=1, settings=quick_settings)
        assert setup.mode_a.kind == "exp_rising"
        assert setup.mode_a.rate == setup.ensemble.gamma_dark


class TestCavityTerms:
    """Tests for the cavity figures attached to protocol results."""

    def test_cavity_run_reports_transmission(self, make_scenario, quick_settings):
        """With the cavity on, the analytic dict carries transmission and absorption."""
        config = make_scenario(cavity=True)
        result = run_protocol(config, seed=1, settings=quick_settings)
        cavity = config.params.cavity()
        total = cavity.t_in + cavity.t_out + cavity.loss
        expected = 4.0 * cavity.t_in * cavity.t_out / total**2
        assert result.analytic["cavity_transmission"] == pytest.approx(expected)
        assert result.analytic["cavity_absorption"] == 0.0
        assert result.run is not None

    def test_free_space_run_has_no_cavity_terms(self, make_scenario, quick_settings):
        """Without the cavity no cavity figures are reported."""
        result = run_protocol(make_scenario(), seed=1, settings=quick_settings)
        assert "cavity_transmission" not in result.analytic

    def test_absorption_lowers_transmission(self):
        """Atomic absorption enters both figures."""
        clear = cavity_terms(CavityConfig(t_in=0.1, t_out=0.1))
        absorbing = cavity_terms(CavityConfig(t_in=0.1, t_out=0.1, alpha=0.02))
        assert clear["cavity_transmission"] == pytest.approx(1.0)
        assert absorbing["cavity_transmission"] < clear["cavity_transmission"]
        assert absorbing["cavity_absorption"] > 0.0


class TestGetProtocol:
    """Tests for get_protocol() resolution."""

    def test_known(self):
        """Registered names resolve to callables."""
        for name in protocols.PROTOCOL_REGISTRY:
            assert callable(get_protocol(name))

    def test_unknown(self):
        """Unknown names list the available protocols."""
        with pytest.raises(ValueError, match="Unknown protocol 'nope'"):
            get_protocol("nope")


class TestSinglePulseNoise:
    """Tests for the single-pulse protocols."""

    def test_prediction_for_ground_state(self, make_scenario, quick_settings):
        """For the coherent spin state the prediction is k + c k^2 / 3."""
        setup = prepare_point(make_scenario(), seed=1, settings=quick_settings)
        expected = predict_oscillator_noise(1.0, setup.profile)
        assert protocols.single_pulse_prediction(setup) == pytest.approx(
            expected, rel=1e-9
        )

    def test_matches_prediction(self, make_scenario, quick_settings):
        """Measured noise agrees with the prediction and has an interval."""
        config = make_scenario(n_traj=4000)
        result = run_protocol(config, seed=3, settings=quick_settings)
        empirical = result.empirical
        # Var(q)/PSN is about 2; relative s.e. of a variance is sqrt(2/n).
        se = 2.0 * math.sqrt(2.0 / 4000)
        assert empirical["var"] == pytest.approx(result.analytic["var"], abs=5 * se)
        assert empirical["ci_lo"] < empirical["var"] < empirical["ci_hi"]
        assert result.run is not None
        assert "run" not in result.model_dump()

    def test_back_action_sweep_in_ground_units(self, make_scenario, quick_settings):
        """back_action_sweep divides both sides by kappa_tilde^2."""
        single = run_protocol(make_scenario(), seed=3, settings=quick_settings)
        config = make_scenario(
            protocol="back_action_sweep", schedule={"kappa_tilde_sq_a": 2.0}
        )
        scaled = run_protocol(config, seed=3, settings=quick_settings)
        plain = run_protocol(
            make_scenario(schedule={"kappa_tilde_sq_a": 2.0}),
            seed=3,
            settings=quick_settings,
        )
        for key in ("var", "ci_lo", "ci_hi"):
            assert scaled.empirical[key] == pytest.approx(plain.empirical[key] / 2.0)
        assert scaled.analytic["var"] == pytest.approx(plain.analytic["var"] / 2.0)
        assert single.analytic["var"] < plain.analytic["var"]


class TestTwoPulseSqueezing:
    """Tests for the two-pulse squeezing protocol."""

    def test_needs_pulse_b(self, make_scenario, quick_settings):
        """Without pulse B cycles the protocol is a config error."""
        config = make_scenario(protocol="two_pulse_squeezing")
        with pytest.raises(ConfigError, match="n_cycles_b") as excinfo:
            run_protocol(config, seed=1, settings=quick_settings)
        assert excinfo.value.key == "schedule.n_cycles_b"

    def test_squeezes_flat_modes(self, make_scenario, quick_settings):
        """Conditioning on pulse A squeezes pulse B's noise as predicted."""
        config = make_scenario(
            protocol="two_pulse_squeezing",
            n_traj=4000,
            schedule={"n_cycles_b": 10},
        )
        result = run_protocol(config, seed=9, settings=quick_settings)
        setup = prepare_point(config, seed=9, settings=quick_settings)
        assert result.analytic["xi0_sq"] == pytest.approx(
            conditional_squeezing(1.0, setup.profile)
        )
        assert result.analytic["eta_tau"] == 0.0
        assert result.empirical["var"] == pytest.approx(result.analytic["var"], abs=0.1)
        assert result.empirical["xi_tilde_db"] < -1.5
        assert result.report is not None
        assert result.report.ci_lo_db < result.report.ci_hi_db
        assert result.empirical["ci_lo"] < result.empirical["ci_hi"]

    def test_decoherence_adds_penalty(self, make_scenario, quick_settings):
        """zeta > 0 adds zeta kappa_tilde^2 / d_eff to the prediction."""
        config = make_scenario(
            protocol="two_pulse_squeezing",
            schedule={"n_cycles_b": 10, "zeta": 0.2, "d_eff": 4.0},
        )
        result = run_protocol(config, seed=9, settings=quick_settings)
        assert result.analytic["eta_tau"] == pytest.approx(0.05)
        assert result.analytic["var"] == pytest.approx(
            result.analytic["xi0_sq"] + 0.05
        )

    def test_mc_ground_reference_runs_both_pulses(
        self, make_scenario, quick_settings, mocker
    ):
        """ground_ref_mode=mc runs one ground-state reference per pulse."""
        spy = mocker.spy(protocols, "run_two_pulse")
        config = make_scenario(
            protocol="two_pulse_squeezing",
            ground_ref_mode="mc",
            schedule={"n_cycles_b": 10},
        )
        result = run_protocol(config, seed=9, settings=quick_settings)
        assert spy.call_count == 3
        assert result.analytic["ground_ref"] > 0.0

    def test_analytic_reference_warns_for_exp_modes(
        self, make_scenario, quick_settings, caplog
    ):
        """The closed-form ground reference only holds for flat modes."""
        config = make_scenario(
            protocol="two_pulse_squeezing",
            schedule={
                "n_cycles_b": 10,
                "mode_a": {"kind": "exp_rising"},
                "mode_b": {"kind": "exp_falling"},
            },
        )
        with caplog.at_level(logging.WARNING, logger="strobe_core.harness.protocols"):
            run_protocol(config, seed=9, settings=quick_settings)
        assert "assumes flat modes" in caplog.text


class TestThermalCalibration:
    """Tests for the thermal calibration protocol."""

    def test_matches_prediction(self, make_scenario, quick_settings, caplog):
        """Thermal noise over shot noise matches the calibration formula."""
        config = make_scenario(protocol="thermal_calibration", n_traj=4000)
        with caplog.at_level(logging.INFO, logger="strobe_core.harness.protocols"):
            result = run_protocol(config, seed=21, settings=quick_settings)
        # ratio - 1 is about 1.9 on top of shot noise
        se = 2.9 * math.sqrt(2.0 / 4000)
        assert result.empirical["var"] == pytest.approx(
            result.analytic["var"], abs=5 * se
        )
        assert result.analytic["var"] == pytest.approx(1.88, rel=0.02)
        assert result.empirical["jz_var"] == pytest.approx(
            result.analytic["jz_var"], rel=0.2
        )
        assert "<J_z^2> estimated" in caplog.text

    def test_rows_carry_no_squeezing_columns(self, make_scenario, quick_settings):
        """Only the two-pulse protocol reports dB squeezing."""
        result = run_protocol(
            make_scenario(protocol="thermal_calibration"),
            seed=21,
            settings=quick_settings,
        )
        assert "xi_tilde_db" not in result.empirical
        assert np.isfinite(result.empirical["ci_lo"])
