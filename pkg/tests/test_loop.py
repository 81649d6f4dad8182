"""Tests for the closed-loop algebra, sweeps and phase scans."""

import math

import numpy as np
import pytest

from src.models.cavity import Channel, CompensatorModel, PlantModel, ProportionalCompensator
from src.models.loop import LoopEnvironment, TraceKind
from src.physics.cavity import plant_tf
from src.physics.loop import (
    closed_loop_sweep,
    closed_loop_tf,
    frequency_sweep,
    loop_terms,
    open_loop_sweep,
    phase_scan,
    power_ratio,
    ratio_at_zero,
    rejection_db,
    to_db,
)
from src.utils.exceptions import (
    AlgebraicLoopError,
    ConfigurationError,
    NumericalError,
    PoleEvaluationError,
)


def circular_distance(a: float, b: float) -> float:
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


class TestIdealNulling:
    def test_ratio_vanishes_over_wide_band(self, plant, ideal):
        grid = np.linspace(-5 * plant.gamma_p, 5 * plant.gamma_p, 1001)
        trace = frequency_sweep(plant, ideal, LoopEnvironment(mu=1.0), grid)
        assert trace.array.max() < 1e-10

    def test_closed_loop_vanishes(self, plant, ideal):
        s = 1j * np.linspace(-30, 30, 61)
        values = closed_loop_tf(plant, ideal, LoopEnvironment(mu=1.0), s)
        assert np.abs(values).max() < 1e-12


class TestRatioIdentity:
    def test_ratio_equals_closed_over_open_at_full_mode_matching(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            gamma = rng.uniform(1.0, 20.0)
            k1, k4 = rng.uniform(0.005, 0.15, size=2) * gamma
            plant = PlantModel(gamma_p=gamma, k1=k1, k4=k4)
            comp = CompensatorModel(
                eta_K=rng.uniform(0.0, 1.5),
                eta_gamma=rng.uniform(-0.1, 0.1) * gamma,
                plant_ref=plant,
            )
            env = LoopEnvironment(mu=1.0, phi=rng.uniform(0.0, 2 * math.pi))
            s = 1j * rng.uniform(-3.0, 3.0) * gamma

            ratio = power_ratio(plant, comp, env, s)
            closed = closed_loop_tf(plant, comp, env, s)
            direct = abs(closed) ** 2 / abs(plant_tf(plant, Channel.ZW, s)) ** 2
            assert ratio == pytest.approx(direct, rel=1e-12, abs=1e-14)

    def test_no_feedback_gives_unity(self, plant, env):
        comp = CompensatorModel(eta_K=0.0, eta_gamma=0.3, plant_ref=plant)
        trace = frequency_sweep(plant, comp, env, np.linspace(-20, 20, 201))
        np.testing.assert_allclose(trace.array, 1.0, rtol=1e-14)

    def test_decoupled_plant_handled(self):
        plant = PlantModel(gamma_p=9.3, k1=0.0, k4=0.4)
        comp = CompensatorModel(eta_K=1.0, eta_gamma=0.0, plant_ref=plant)
        ratio = power_ratio(plant, comp, LoopEnvironment(mu=0.9), 0.0)
        assert math.isfinite(ratio)

    def test_mode_matching_floor(self):
        rng = np.random.default_rng(21)
        for _ in range(500):
            gamma = rng.uniform(1.0, 20.0)
            k1, k4 = rng.uniform(0.005, 0.15, size=2) * gamma
            plant = PlantModel(gamma_p=gamma, k1=k1, k4=k4)
            comp = CompensatorModel(
                eta_K=rng.uniform(0.0, 2.0),
                eta_gamma=rng.uniform(-0.1, 0.1) * gamma,
                plant_ref=plant,
            )
            mu = rng.uniform(0.0, 0.99)
            phi = rng.uniform(0.0, 2 * math.pi)

            terms = loop_terms(plant, comp, mu, phi, 0.0)
            floor = (1.0 - mu) * abs(terms.s_u) ** 2
            assert ratio_at_zero(plant, comp, mu, phi) >= floor - 1e-12

    def test_static_compensator_on_decoupled_plant(self):
        plant = PlantModel(gamma_p=9.3, k1=0.0, k4=0.4)
        static = ProportionalCompensator(gain=0.1)
        env = LoopEnvironment(mu=0.84, phi=0.0)
        value = closed_loop_tf(plant, static, env, 0.0)
        assert value == pytest.approx((1.0 - 0.8 / 9.3) * 0.1, rel=1e-12)
        with pytest.raises(NumericalError):
            power_ratio(plant, static, env, 0.0)


class TestReferenceRejection:
    def test_negative_feedback_rejects(self, plant, positive_eta_gamma, env):
        comp = CompensatorModel(eta_K=0.92, eta_gamma=positive_eta_gamma, plant_ref=plant)
        ratio = power_ratio(plant, comp, env, 0.0)
        assert ratio == pytest.approx(0.181, abs=0.003)

    def test_positive_feedback_enhances(self, plant, positive_eta_gamma, mu):
        comp = CompensatorModel(eta_K=0.92, eta_gamma=positive_eta_gamma, plant_ref=plant)
        assert ratio_at_zero(plant, comp, mu, math.pi) > 1.0

    def test_ratio_vectorized_over_phase(self, plant, ideal, mu):
        phases = np.linspace(0.0, 2 * math.pi, 9)
        values = ratio_at_zero(plant, ideal, mu, phases)
        assert values.shape == phases.shape
        assert values[0] == pytest.approx(ratio_at_zero(plant, ideal, mu, 0.0))


class TestErrors:
    def test_singular_loop_raises(self):
        plant = PlantModel(gamma_p=1.0, k1=0.24, k4=0.24)
        # |L| = 1 at s = 0 under positive feedback
        pole = plant.ideal_compensator_pole
        eta_K = (pole * plant.gamma_p / (4 * plant.k1 * plant.k4)) ** 2
        comp = CompensatorModel(eta_K=eta_K, eta_gamma=0.0, plant_ref=plant)
        with pytest.raises(AlgebraicLoopError) as info:
            power_ratio(plant, comp, LoopEnvironment(mu=1.0, phi=math.pi), 0.0)
        assert info.value.magnitude < 1e-9

    def test_pole_on_grid_reports_detuning(self):
        plant = PlantModel(gamma_p=9.3, k1=0.3, k4=0.3)
        comp = CompensatorModel(eta_K=1.0, eta_gamma=0.0, plant_ref=plant)
        s = np.array([0.0, -comp.pole])
        with pytest.raises(PoleEvaluationError):
            power_ratio(plant, comp, LoopEnvironment(), s)

    def test_sweep_error_names_detuning(self, plant, env):
        comp = CompensatorModel(eta_K=1.0, eta_gamma=-plant.ideal_compensator_pole, plant_ref=plant)
        with pytest.raises(PoleEvaluationError) as info:
            frequency_sweep(plant, comp, env, np.array([-1.0, 0.0, 1.0]))
        assert info.value.details["detuning"] == 0.0

    @pytest.mark.parametrize("grid", [[], [0.0, 0.0, 1.0], [1.0, 0.0]])
    def test_bad_grids(self, plant, ideal, env, grid):
        with pytest.raises(ConfigurationError):
            frequency_sweep(plant, ideal, env, grid)


class TestSweeps:
    def test_open_loop_is_lorentzian(self, plant):
        grid = np.linspace(-30, 30, 121)
        trace = open_loop_sweep(plant, grid)
        expected = 4 * plant.k1 * plant.k4 / (plant.gamma_p**2 + grid**2)
        assert trace.kind is TraceKind.POWER
        np.testing.assert_allclose(trace.array, expected, rtol=1e-12)

    def test_sweep_returns_open_loop_companion(self, plant, ideal, env):
        grid = np.linspace(-10, 10, 21)
        ratio, open_loop = frequency_sweep(plant, ideal, env, grid, include_open_loop=True)
        assert ratio.kind is TraceKind.POWER_RATIO
        assert open_loop.grid == ratio.grid

    def test_closed_loop_sweep_is_complex(self, plant, ideal, env):
        grid = np.linspace(-10, 10, 21)
        trace = closed_loop_sweep(plant, ideal, env, grid)
        assert trace.kind is TraceKind.COMPLEX_TF
        np.testing.assert_allclose(
            trace.array, closed_loop_tf(plant, ideal, env, 1j * grid), rtol=1e-12
        )
        frame = trace.to_frame()
        assert list(frame.columns) == ["detuning", "re", "im"]

    def test_proportional_compensator_accepted(self, plant, env):
        static = ProportionalCompensator(gain=0.07)
        trace = frequency_sweep(plant, static, env, np.linspace(-10, 10, 21))
        assert np.all(np.isfinite(trace.array))

    def test_symmetric_in_detuning(self, plant, positive_eta_gamma, env):
        comp = CompensatorModel(eta_K=0.92, eta_gamma=positive_eta_gamma, plant_ref=plant)
        trace = frequency_sweep(plant, comp, env, np.linspace(-25, 25, 501))
        np.testing.assert_allclose(trace.array, trace.array[::-1], rtol=1e-12)


class TestPhaseScan:
    def test_extrema_at_negative_and_positive_feedback(self, plant, positive_eta_gamma, mu):
        comp = CompensatorModel(eta_K=0.92, eta_gamma=positive_eta_gamma, plant_ref=plant)
        scan = phase_scan(plant, comp, mu, np.linspace(0, 2 * math.pi, 181))
        assert circular_distance(scan.phi_min, 0.0) < 1e-4
        assert circular_distance(scan.phi_max, math.pi) < 1e-4
        assert scan.ratio_min <= min(scan.ratio) + 1e-12
        assert scan.ratio_max >= max(scan.ratio) - 1e-12
        assert scan.parametric_point == (scan.ratio_max, scan.ratio_min)

    def test_flat_without_feedback(self, plant, mu):
        comp = CompensatorModel(eta_K=0.0, eta_gamma=0.0, plant_ref=plant)
        scan = phase_scan(plant, comp, mu, np.linspace(0, 2 * math.pi, 37))
        assert scan.ratio_min == pytest.approx(1.0)
        assert scan.ratio_max == pytest.approx(1.0)

    def test_phase_grid_must_stay_in_one_turn(self, plant, ideal, mu):
        with pytest.raises(ConfigurationError):
            phase_scan(plant, ideal, mu, [0.0, 7.0])

    def test_two_pi_periodic(self, plant, positive_eta_gamma, mu):
        comp = CompensatorModel(eta_K=0.92, eta_gamma=positive_eta_gamma, plant_ref=plant)
        phases = np.linspace(0.0, 2 * math.pi, 50)
        np.testing.assert_allclose(
            ratio_at_zero(plant, comp, mu, phases + 2 * math.pi),
            ratio_at_zero(plant, comp, mu, phases),
            rtol=1e-12,
        )
        scan = phase_scan(plant, comp, mu, np.linspace(0.0, 2 * math.pi, 73))
        assert scan.ratio[0] == pytest.approx(scan.ratio[-1], rel=1e-12)

    @pytest.mark.parametrize("eta_K", [0.5, 0.92])
    def test_extremes_follow_matched_loop_response(self, plant, positive_eta_gamma, mu, eta_K):
        comp = CompensatorModel(eta_K=eta_K, eta_gamma=positive_eta_gamma, plant_ref=plant)
        phases = np.linspace(0.0, 2 * math.pi, 720, endpoint=False)
        ratio = ratio_at_zero(plant, comp, mu, phases)
        criterion = np.real(math.sqrt(mu) * loop_terms(plant, comp, mu, phases, 0.0).s_m)
        assert circular_distance(phases[np.argmin(ratio)], phases[np.argmin(criterion)]) < 0.01
        assert circular_distance(phases[np.argmax(ratio)], phases[np.argmax(criterion)]) < 0.01


class TestDecibels:
    def test_conversions(self):
        assert to_db(0.1) == pytest.approx(-10.0)
        assert rejection_db(0.1) == pytest.approx(10.0)
        assert rejection_db(0.0) == math.inf


class TestLoopEnvironment:
    def test_with_phase_keeps_mode_matching(self, env):
        moved = env.with_phase(-math.pi / 2)
        assert moved.mu == env.mu
        assert moved.phi == pytest.approx(1.5 * math.pi)
        assert env.phi == 0.0
