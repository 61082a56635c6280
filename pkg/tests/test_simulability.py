import math

import numpy as np
import pytest

from pqsim import DetectorModel, RngStream
from pqsim.errors import UndefinedOperatingPointError
from pqsim.experiment import (
    SCHEME_SINGLE_PHOTON,
    SCHEME_SPDC,
    ExperimentConfig,
    PortSource,
)
from pqsim.linalg import haar_unitary
from pqsim.presets import ScenarioParams, single_photon_config, spdc_config
from pqsim.processes import LossModel, uniform_loss_eta
from pqsim.simulability import (
    check_second_condition,
    mode_mismatch_pd,
    plan_photon_number,
    s_bar_vector,
    t_bar_vector,
    threshold_single_photon,
    threshold_spdc,
)
from pqsim.states import Coherent, MixedSinglePhoton, SpdcPair, Thermal, Vacuum, t_bar

PARAMS = ScenarioParams()  # mu=0.5, eta_b=0.1, eta0=0.98, ell=2, eta_d=0.95


def eta_l(modes: int) -> float:
    return uniform_loss_eta(LossModel(PARAMS.eta0, PARAMS.ell, modes))


class TestCheckSecondCondition:
    def test_classical_inputs_are_always_simulatable(self):
        for seed in range(5):
            transfer = 0.9 * haar_unitary(3, RngStream(seed))
            config = ExperimentConfig(
                modes=3,
                sources=(PortSource(Coherent(1.0), (0,)),
                         PortSource(Thermal(0.5), (1,)),
                         PortSource(Vacuum(), (2,))),
                transfer=transfer,
                detectors=(DetectorModel(0.9, 0.01),) * 3,
            )
            assert check_second_condition(config).simulatable

    @pytest.mark.parametrize("trial", range(20))
    def test_lossless_network_reduces_to_scalar_rule(self, trial):
        # With a unitary network, identical sources, and identical detectors
        # the matrix test collapses to s_bar <= t_bar.
        gen = RngStream(1000 + trial).generator()
        unitary = haar_unitary(3, RngStream(2000 + trial))
        mu, eta_b = gen.uniform(0.1, 1.0), gen.uniform(0.1, 1.0)
        eta_d, p_d = gen.uniform(0.5, 1.0), gen.uniform(0.0, 0.3)
        config = ExperimentConfig(
            modes=3,
            sources=tuple(PortSource(MixedSinglePhoton(mu, eta_b), (k,)) for k in range(3)),
            transfer=unitary,
            detectors=(DetectorModel(eta_d, p_d),) * 3,
        )
        report = check_second_condition(config)
        scalar_rule = (1.0 - 2.0 * p_d / eta_d) <= (1.0 - 2.0 * mu * eta_b) + 1e-10
        assert report.simulatable == scalar_rule

    def test_single_photon_scalar_rule_with_one_photon(self):
        # Lossless network with one photon: simulatable iff p_d >= mu eta_b eta_d.
        unitary = haar_unitary(3, RngStream(77))
        mu, eta_b, eta_d = 0.8, 0.5, 0.9

        def build(p_d):
            return ExperimentConfig(
                modes=3,
                sources=(PortSource(MixedSinglePhoton(mu, eta_b), (0,)),
                         PortSource(Vacuum(), (1,)), PortSource(Vacuum(), (2,))),
                transfer=unitary,
                detectors=(DetectorModel(eta_d, p_d),) * 3,
            )

        critical = mu * eta_b * eta_d
        assert not check_second_condition(build(critical - 1e-4)).simulatable
        assert check_second_condition(build(critical + 1e-4)).simulatable

    def test_paper_scale_network_crosses_at_its_threshold(self):
        threshold = threshold_single_photon(PARAMS.mu, PARAMS.eta_b, eta_l(10), PARAMS.eta_d)
        assert threshold == pytest.approx(0.044, abs=5e-4)
        below = single_photon_config(10, 10, threshold - 1e-3, PARAMS)
        above = single_photon_config(10, 10, threshold + 1e-3, PARAMS)
        assert not check_second_condition(below).simulatable
        assert check_second_condition(above).simulatable

    def test_report_threshold_matches_closed_form(self):
        config = single_photon_config(6, 3, 0.08, PARAMS)
        report = check_second_condition(config)
        closed = threshold_single_photon(PARAMS.mu, PARAMS.eta_b, eta_l(6), PARAMS.eta_d)
        assert report.threshold_p_d == pytest.approx(closed, abs=1e-12)
        assert report.margin == pytest.approx(0.08 - closed, abs=1e-12)

    def test_threshold_crossing_is_single_flip(self):
        config_at = lambda p: single_photon_config(5, 2, p, PARAMS)
        low, high = 0.0, 0.2
        assert not check_second_condition(config_at(low)).simulatable
        assert check_second_condition(config_at(high)).simulatable
        for _ in range(60):
            mid = 0.5 * (low + high)
            if check_second_condition(config_at(mid)).simulatable:
                high = mid
            else:
                low = mid
        closed = threshold_single_photon(PARAMS.mu, PARAMS.eta_b, eta_l(5), PARAMS.eta_d)
        assert abs(high - closed) <= 1e-9

    def test_working_orderings_emitted_only_when_simulatable(self):
        good = check_second_condition(single_photon_config(4, 2, 0.1, PARAMS))
        assert good.simulatable
        assert np.array_equal(good.ordering_s, good.s_bar)
        assert np.array_equal(good.ordering_t, good.t_bar)
        bad = check_second_condition(single_photon_config(4, 2, 0.001, PARAMS))
        assert not bad.simulatable
        assert bad.ordering_s is None and bad.ordering_t is None

    def test_ordering_vectors(self):
        config = spdc_config(2, 0.5, 0.1, PARAMS)
        tbar = t_bar_vector(config)
        sbar = s_bar_vector(config)
        pair_bound = t_bar(config.sources[0].source)
        assert np.allclose(tbar, pair_bound)
        assert np.allclose(sbar, 1.0 - 2.0 * 0.1 / PARAMS.eta_d)

    def test_dead_detector_is_classical_measurement(self):
        config = ExperimentConfig(
            modes=2,
            sources=(PortSource(MixedSinglePhoton(1.0, 1.0), (0,)),
                     PortSource(Vacuum(), (1,))),
            transfer=haar_unitary(2, RngStream(4)),
            detectors=(DetectorModel(0.0, 0.0),) * 2,
        )
        report = check_second_condition(config)
        assert report.simulatable
        assert np.allclose(report.s_bar, -1.0)


class TestClosedFormThresholds:
    def test_single_photon_paper_values(self):
        for modes, expected in [(10, 0.044), (100, 0.042), (1600, 0.038)]:
            value = threshold_single_photon(PARAMS.mu, PARAMS.eta_b, eta_l(modes), PARAMS.eta_d)
            assert round(value, 3) == pytest.approx(expected, abs=1e-3)

    def test_zero_factor_means_always_simulatable(self):
        assert threshold_single_photon(0.0, 0.5, 0.9, 0.9) == 0.0
        assert threshold_single_photon(0.5, 0.5, 0.9, 0.0) == 0.0

    def test_mismatch_paper_values(self):
        cases = [
            (10, 10, 0.046),
            (100, 100, 0.049),
            (1600, 1044, 0.034),
        ]
        for modes, n_photons, printed in cases:
            value = mode_mismatch_pd(
                PARAMS.mu, PARAMS.eta_b, eta_l(modes), PARAMS.eta_d,
                PARAMS.f_b, PARAMS.f_l, n_photons, modes,
            )
            assert abs(round(value, 3) - printed) <= 1e-3 + 1e-12

    def test_mismatch_vanishes_without_leakage(self):
        assert mode_mismatch_pd(0.5, 0.1, 0.9, 0.95, 0.0, 0.0, 10, 10) == 0.0

    def test_spdc_paper_values(self):
        cases = [(10, 1.0, 0.076), (100, 1.0, 0.071), (1600, 0.326, 0.060)]
        for modes, sinh2, expected in cases:
            plan = plan_photon_number(SCHEME_SPDC, modes,
                                      PARAMS.eta_d * eta_l(modes) * PARAMS.eta_b)
            r = math.asinh(math.sqrt(plan.sinh2_r))
            value = threshold_spdc(r, PARAMS.eta_b, eta_l(modes), PARAMS.eta_d)
            assert plan.sinh2_r == pytest.approx(sinh2, abs=5e-3)
            assert round(value, 3) == pytest.approx(expected, abs=1e-3)

    def test_spdc_threshold_vanishes_at_zero_squeezing(self):
        assert threshold_spdc(0.0, 0.1, 0.9, 0.95) == pytest.approx(0.0, abs=1e-15)

    def test_spdc_threshold_equals_ordering_gap(self):
        for r in np.linspace(0.05, 2.0, 10):
            for eta_bl in np.linspace(0.05, 1.0, 10):
                closed = threshold_spdc(r, eta_bl, 1.0, 0.95)
                gap = 0.95 * (1.0 - t_bar(SpdcPair(r, eta_bl))) / 2.0
                assert abs(closed - gap) <= 1e-12


class TestPlanPhotonNumber:
    def test_paper_single_photon_plans(self):
        plan = plan_photon_number(SCHEME_SINGLE_PHOTON, 1600,
                                  PARAMS.mu * PARAMS.eta_b * eta_l(1600) * PARAMS.eta_d)
        assert plan.n_photons == 1044
        small = plan_photon_number(SCHEME_SINGLE_PHOTON, 10,
                                   PARAMS.mu * PARAMS.eta_b * eta_l(10) * PARAMS.eta_d)
        assert small.n_photons == 10  # photon budget capped at the mode count

    def test_paper_spdc_plan(self):
        plan = plan_photon_number(SCHEME_SPDC, 100,
                                  PARAMS.eta_d * eta_l(100) * PARAMS.eta_b)
        assert round(plan.sqrt_m_over_eta) == 120
        assert plan.n_photons == 100
        assert plan.sinh2_r == 1.0

    def test_unit_transmissivity(self):
        plan = plan_photon_number(SCHEME_SINGLE_PHOTON, 4, 1.0)
        assert plan.n_photons == 2

    def test_zero_transmissivity_rejected(self):
        with pytest.raises(UndefinedOperatingPointError):
            plan_photon_number(SCHEME_SINGLE_PHOTON, 4, 0.0)

    def test_rule_of_thumb_regression(self):
        # Counted mismatched photons vs mode-matched photons at threshold:
        # M * p_d(threshold) and N * eta agree within a factor of two.
        for modes in [10, 100, 1600]:
            eta = PARAMS.mu * PARAMS.eta_b * eta_l(modes) * PARAMS.eta_d
            plan = plan_photon_number(SCHEME_SINGLE_PHOTON, modes, eta)
            lhs = modes * threshold_single_photon(PARAMS.mu, PARAMS.eta_b,
                                                  eta_l(modes), PARAMS.eta_d)
            rhs = plan.n_photons * eta
            assert 0.5 <= lhs / rhs <= 2.0
