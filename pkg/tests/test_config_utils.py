"""Tests for settings, logging helpers, validators and error handling."""

import logging
import math

import numpy as np
import pytest
from pydantic import BaseModel

from config import Settings, get_settings
from config.logging import get_logger, setup_logging
from src.models.run import RunConfig
from src.utils import (
    EXIT_INVALID_INPUT,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    ConfigurationError,
    FitConvergenceError,
    InsufficientDataError,
    NumericalError,
    PoleEvaluationError,
    exit_codes,
    log_execution_time,
    normalize_phase,
    parse_model,
    validate_detuning_grid,
    validate_mirror_index,
    validate_phase_grid,
)


class TestSettings:
    def test_defaults(self):
        settings = Settings()
        assert settings.eta_K_max == 4.0
        assert settings.band_min_points == 512
        assert settings.log_level == "INFO"

    def test_environment_override(self, monkeypatch):
        monkeypatch.setenv("COHERENT_FLOW_ETA_K_MAX", "2.5")
        monkeypatch.setenv("COHERENT_FLOW_LOG_LEVEL", "DEBUG")
        get_settings.cache_clear()
        settings = get_settings()
        assert settings.eta_K_max == 2.5
        assert settings.log_level == "DEBUG"

    def test_cached(self):
        assert get_settings() is get_settings()

    def test_invalid_value_rejected(self, monkeypatch):
        monkeypatch.setenv("COHERENT_FLOW_BAND_MIN_POINTS", "16")
        with pytest.raises(ValueError):
            Settings()


class TestLogging:
    def test_module_loggers_share_root(self):
        assert get_logger("x").name == "coherent-flow.x"

    def test_setup_writes_to_stderr(self, capsys):
        logger = setup_logging(logging.INFO)
        get_logger("test").info("sweep started")
        assert logger.name == "coherent-flow"
        assert "sweep started" in capsys.readouterr().err

    def test_file_handler(self, tmp_path):
        log_file = tmp_path / "logs" / "run.log"
        setup_logging(logging.INFO, log_file=log_file)
        get_logger("test").info("to file")
        for handler in logging.getLogger().handlers:
            handler.flush()
        assert "to file" in log_file.read_text()


class TestValidators:
    def test_detuning_grid(self):
        assert validate_detuning_grid([-1, 0, 1]).dtype == np.float64
        with pytest.raises(InsufficientDataError):
            validate_detuning_grid([])
        with pytest.raises(ConfigurationError):
            validate_detuning_grid([0.0, np.nan])

    @pytest.mark.parametrize(
        ("phi", "expected"),
        [(0.0, 0.0), (-math.pi, math.pi), (5 * math.pi, math.pi), (2 * math.pi, 0.0)],
    )
    def test_normalize_phase(self, phi, expected):
        assert normalize_phase(phi) == pytest.approx(expected)

    def test_normalize_phase_rejects_nan(self):
        with pytest.raises(ConfigurationError):
            normalize_phase(float("nan"))

    def test_phase_grid(self):
        with pytest.raises(InsufficientDataError):
            validate_phase_grid([0.0])
        with pytest.raises(ConfigurationError):
            validate_phase_grid([0.0, 7.0])

    def test_mirror_index(self):
        assert validate_mirror_index(np.int64(2)) == 2
        with pytest.raises(ConfigurationError):
            validate_mirror_index(1.0)

    def test_parse_model_names_fields(self):
        with pytest.raises(ConfigurationError) as info:
            parse_model(RunConfig, {"plant": {"k1": 0.3}}, source="run.json")
        assert "run.json" in info.value.message
        assert "gamma_p" in info.value.message
        assert info.value.details["fields"] == ["plant"]

    def test_parse_model_rejects_unknown_sections(self):
        payload = {"plant": {"gamma_p": 9.3, "k1": 0.3, "k4": 0.3}, "extra": 1}
        with pytest.raises(ConfigurationError) as info:
            parse_model(RunConfig, payload)
        assert "extra" in info.value.message


class TestExceptions:
    def test_to_dict(self):
        error = PoleEvaluationError("at pole", pole=9.3, s=-9.3, index=4)
        assert error.to_dict() == {
            "error": "PoleEvaluationError",
            "message": "at pole",
            "details": {"pole": 9.3, "s": "-9.3", "index": 4},
        }

    def test_hierarchy(self):
        assert issubclass(InsufficientDataError, ConfigurationError)
        assert issubclass(FitConvergenceError, NumericalError)

    def test_convergence_error_keeps_best_so_far(self):
        error = FitConvergenceError("no descent converged", best_so_far={"mu": 0.8})
        assert error.best_so_far == {"mu": 0.8}
        assert error.details == {"has_best_so_far": True}


class TestDecorators:
    @pytest.mark.parametrize(
        ("raised", "code"),
        [
            (None, EXIT_OK),
            (ConfigurationError("bad"), EXIT_INVALID_INPUT),
            (InsufficientDataError("empty"), EXIT_INVALID_INPUT),
            (NumericalError("diverged"), EXIT_NUMERICAL_FAILURE),
        ],
    )
    def test_exit_codes(self, raised, code):
        @exit_codes
        def command() -> int:
            if raised is not None:
                raise raised
            return EXIT_OK

        assert command() == code

    def test_raw_validation_error_is_invalid_input(self):
        class Strict(BaseModel):
            value: int

        @exit_codes
        def command() -> int:
            Strict(value="not a number")
            return EXIT_OK

        assert command() == EXIT_INVALID_INPUT

    def test_other_errors_propagate(self):
        @exit_codes
        def command() -> int:
            raise KeyError("bug")

        with pytest.raises(KeyError):
            command()

    def test_log_execution_time_preserves_result_and_errors(self):
        @log_execution_time
        def double(x: float) -> float:
            return 2 * x

        @log_execution_time
        def fail() -> None:
            raise ValueError("boom")

        assert double(2.0) == 4.0
        assert double.__name__ == "double"
        with pytest.raises(ValueError):
            fail()
