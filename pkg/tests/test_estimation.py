"""Tests for parametric prediction, parameter fitting and consistency checks."""

import math

import numpy as np
import pytest

from src.design.estimation import (
    consistency_report,
    fit_parameters,
    parametric_residual,
    predict_parametric_point,
)
from src.emulators.parametric import emulate_parametric_dataset
from src.models.emulation import EmulationConfig
from src.models.estimation import (
    FitBounds,
    FitParameters,
    FitResult,
    FitWeighting,
    Interval,
    ParametricDataset,
    ParametricPoint,
)
from src.utils.exceptions import ConfigurationError, InsufficientDataError

GAINS = np.linspace(0.06, 2.2, 12).tolist()


@pytest.fixture
def truth(plant, eta_gamma, mu) -> FitParameters:
    return FitParameters(eta_gamma=eta_gamma, mu=mu, k1=plant.k1, k4=plant.k4)


@pytest.fixture
def noiseless(plant, eta_gamma, mu) -> ParametricDataset:
    return emulate_parametric_dataset(plant, eta_gamma, mu, GAINS, EmulationConfig())


class TestPrediction:
    def test_no_gain_gives_unity(self, plant, eta_gamma, mu):
        assert predict_parametric_point(plant, eta_gamma, mu, 0.0) == (1.0, 1.0)

    def test_branches_ordered(self, plant, eta_gamma, mu):
        for eta_K in GAINS:
            high, low = predict_parametric_point(plant, eta_gamma, mu, eta_K)
            assert low <= high

    def test_reference_minimum(self, plant, positive_eta_gamma, mu):
        _, low = predict_parametric_point(plant, positive_eta_gamma, mu, 0.92)
        assert low == pytest.approx(0.181, abs=0.003)

    def test_negative_gain_rejected(self, plant, eta_gamma, mu):
        with pytest.raises(ConfigurationError):
            predict_parametric_point(plant, eta_gamma, mu, -0.1)


class TestResidual:
    def test_vanishes_at_generator(self, noiseless, truth):
        residual = parametric_residual(noiseless, truth)
        assert residual.shape == (2 * noiseless.size,)
        assert np.abs(residual).max() < 1e-10

    def test_relative_residual_divides_by_observation(self, noiseless, truth):
        shifted = truth.model_copy(update={"mu": 0.8})
        absolute = parametric_residual(noiseless, shifted)
        relative = parametric_residual(noiseless, shifted, FitWeighting.RELATIVE)
        frame = noiseless.to_frame()
        observed = np.concatenate([frame["ratio_max"], frame["ratio_min"]])
        np.testing.assert_allclose(relative, absolute / observed, rtol=1e-12)

    def test_infeasible_couplers_rejected(self, noiseless):
        params = FitParameters(eta_gamma=0.0, mu=0.8, k1=3.0, k4=3.0)
        with pytest.raises(ConfigurationError):
            parametric_residual(noiseless, params)


class TestFit:
    def test_symmetric_round_trip(self, noiseless, truth):
        result = fit_parameters(noiseless, symmetric_couplers=True)

        assert result.eta_gamma == pytest.approx(truth.eta_gamma, rel=0.01)
        assert result.mu == pytest.approx(truth.mu, rel=0.01)
        assert result.k1 == pytest.approx(truth.k1, rel=0.01)
        assert result.k1 == result.k4
        assert result.residual < 1e-8
        assert not result.rank_deficient
        assert result.starts == 27

    def test_rms_matches_recomputed_residual(self, noiseless):
        result = fit_parameters(noiseless, symmetric_couplers=True)
        residual = parametric_residual(noiseless, result.parameters)
        assert result.residual == pytest.approx(
            math.sqrt(np.mean(residual**2)), rel=1e-6, abs=1e-12
        )

    def test_relative_weighting_reaches_noise_limit(self, plant, truth):
        # at 1% noise the attainable spread of k is about 12%, so only the
        # well-determined eta_gamma and mu are checked seed by seed
        fits = []
        for seed in range(20):
            cfg = EmulationConfig(detector_noise=0.01, detector_noise_seed=seed)
            data = emulate_parametric_dataset(plant, truth.eta_gamma, truth.mu, GAINS, cfg)
            fits.append(
                fit_parameters(data, symmetric_couplers=True, weighting=FitWeighting.RELATIVE)
            )

        def within(name: str, fit: FitResult) -> bool:
            expected = getattr(truth, name)
            return abs(getattr(fit, name) - expected) <= 0.1 * abs(expected)

        assert sum(within("eta_gamma", f) for f in fits) >= 18
        assert sum(within("mu", f) for f in fits) >= 18
        for name in ("eta_gamma", "mu", "k1"):
            mean = np.mean([getattr(f, name) for f in fits])
            assert mean == pytest.approx(getattr(truth, name), rel=0.1)
        assert all(f.weighting is FitWeighting.RELATIVE for f in fits)

    def test_relative_weighting_recovers_noiseless_data(self, noiseless, truth):
        result = fit_parameters(
            noiseless, symmetric_couplers=True, weighting=FitWeighting.RELATIVE
        )
        assert result.eta_gamma == pytest.approx(truth.eta_gamma, rel=0.01)
        assert result.mu == pytest.approx(truth.mu, rel=0.01)
        assert result.k1 == pytest.approx(truth.k1, rel=0.01)
        assert result.residual < 1e-8

    def test_unconstrained_fit_flags_rank_deficiency(self, noiseless):
        result = fit_parameters(noiseless)
        assert result.rank_deficient
        assert result.starts == 81
        assert any("rank" in message for message in result.warnings)

    def test_gainless_data_determine_nothing(self, plant):
        points = [ParametricPoint(eta_K=0.0, ratio_max=1.0, ratio_min=1.0)] * 4
        data = ParametricDataset(points=points, gamma_p_fixed=plant.gamma_p)
        result = fit_parameters(data, symmetric_couplers=True)
        assert result.rank_deficient
        assert result.residual < 1e-12

    def test_bounds_respected(self, noiseless):
        bounds = FitBounds.default_for(noiseless.gamma_p_fixed).model_copy(
            update={"mu": Interval(low=0.5, high=0.8)}
        )
        result = fit_parameters(noiseless, bounds=bounds, symmetric_couplers=True)
        assert 0.5 <= result.mu <= 0.8

    def test_degenerate_interval_fixes_parameter(self, noiseless, truth):
        bounds = FitBounds.default_for(noiseless.gamma_p_fixed).model_copy(
            update={"mu": Interval(low=truth.mu, high=truth.mu)}
        )
        result = fit_parameters(noiseless, bounds=bounds, symmetric_couplers=True)
        assert result.mu == truth.mu
        assert result.covariance_proxy["mu"] == 0.0
        assert result.starts == 9

    def test_initial_guess_adds_a_start(self, noiseless, truth):
        result = fit_parameters(noiseless, initial_guess=truth, symmetric_couplers=True)
        assert result.starts == 28
        assert result.residual < 1e-8
        assert not any("initial guess" in message for message in result.warnings)

    def test_out_of_bounds_guess_is_reported(self, noiseless, truth):
        guess = truth.model_copy(update={"mu": 0.3})
        result = fit_parameters(noiseless, initial_guess=guess, symmetric_couplers=True)
        assert any("initial guess mu" in message for message in result.warnings)
        assert result.mu == pytest.approx(truth.mu, rel=0.01)

    def test_too_few_points(self, noiseless):
        data = noiseless.model_copy(update={"points": noiseless.points[:3]})
        with pytest.raises(InsufficientDataError):
            fit_parameters(data)

    def test_disjoint_symmetric_bounds(self, noiseless):
        bounds = FitBounds.default_for(noiseless.gamma_p_fixed).model_copy(
            update={"k1": Interval(low=0.1, high=0.2), "k4": Interval(low=0.3, high=0.4)}
        )
        with pytest.raises(ConfigurationError):
            fit_parameters(noiseless, bounds=bounds, symmetric_couplers=True)


class TestConsistency:
    def _fit(self, plant, eta_gamma, mu, **overrides) -> FitResult:
        values = {
            "eta_gamma": eta_gamma,
            "mu": mu,
            "k1": plant.k1,
            "k4": plant.k4,
            "residual": 0.0,
            "gamma_p": plant.gamma_p,
        }
        values.update(overrides)
        return FitResult(**values)

    def test_reference_fit_passes(self, plant, eta_gamma, mu, measured):
        report = consistency_report(self._fit(plant, eta_gamma, mu), measured)
        assert report.all_passed
        assert [c.name for c in report.checks] == ["gamma_c", "coupler_rates", "mu_bound"]

    def test_wrong_sign_fails_controller_decay(self, plant, mu, measured):
        fit = self._fit(plant, plant.gamma_p / 14.0, mu)
        report = consistency_report(fit, measured)
        assert not report.check("gamma_c").passed
        assert report.check("coupler_rates").passed

    def test_shifted_deviation_fails(self, plant, eta_gamma, mu, measured):
        report = consistency_report(self._fit(plant, eta_gamma + 1.0, mu), measured)
        assert not report.check("gamma_c").passed
        assert not report.all_passed

    def test_mode_matching_above_bound(self, plant, eta_gamma, measured):
        report = consistency_report(self._fit(plant, eta_gamma, 0.95), measured)
        assert not report.check("mu_bound").passed

    def test_coupler_mismatch(self, plant, eta_gamma, mu, measured):
        report = consistency_report(self._fit(plant, eta_gamma, mu, k4=0.5), measured)
        check = report.check("coupler_rates")
        assert not check.passed
        assert check.observed == 0.5

    def test_tolerance_override(self, plant, eta_gamma, mu, measured):
        fit = self._fit(plant, eta_gamma + 1.0, mu)
        report = consistency_report(fit, measured, gamma_c_tolerance=2.0)
        assert report.check("gamma_c").passed

    def test_unknown_check_name(self, plant, eta_gamma, mu, measured):
        report = consistency_report(self._fit(plant, eta_gamma, mu), measured)
        with pytest.raises(KeyError):
            report.check("nonexistent")


class TestDatasetFiles:
    def test_csv_round_trip(self, noiseless, tmp_path):
        path = noiseless.to_csv(tmp_path / "data.csv")
        loaded = ParametricDataset.from_csv(path, noiseless.gamma_p_fixed)
        assert loaded.size == noiseless.size
        assert loaded.points[3].eta_K == pytest.approx(noiseless.points[3].eta_K)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(InsufficientDataError):
            ParametricDataset.from_csv(path, 9.3)

    def test_header_only(self, tmp_path):
        path = tmp_path / "header.csv"
        path.write_text("eta_K,ratio_max,ratio_min\n")
        with pytest.raises(InsufficientDataError):
            ParametricDataset.from_csv(path, 9.3)

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("eta_K,ratio_max\n0.5,2.0\n")
        with pytest.raises(ConfigurationError):
            ParametricDataset.from_csv(path, 9.3)
