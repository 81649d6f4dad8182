"""
Command implementations.

Each command validates its inputs, drives the library, writes its outputs
through OutputWriter and finishes with a manifest. Failures map to exit
codes through the exit_codes decorator: 2 for invalid input, 3 for
numerical failure.
"""

import argparse
import math
from pathlib import Path
from typing import Any

import numpy as np

from config.logging import get_logger
from src.cli.io import OutputWriter, compute_digest, read_bytes, read_model
from src.cli.report import render_report
from src.design.estimation import consistency_report, fit_parameters
from src.design.synthesis import compare_with_proportional, optimize_gain
from src.emulators import get_emulator
from src.emulators.base import resolve_seed
from src.models.emulation import Scenario
from src.models.estimation import FitResult, MeasuredValues, ParametricDataset
from src.models.loop import FrequencyTrace, TraceKind
from src.models.run import FitSpec, GridSection, RunConfig
from src.physics.loop import closed_loop_sweep, frequency_sweep, phase_scan
from src.utils.decorators import EXIT_OK, exit_codes
from src.utils.exceptions import FitConvergenceError
from src.utils.validators import parse_model

logger = get_logger(__name__)

PATH_FLAGS = ("config", "data", "bounds", "fit", "measured")
IGNORED_FLAGS = ("out", "handler", "log_level", "command")
PHASE_SCAN_POINTS = 361


def _flags(args: argparse.Namespace) -> dict[str, Any]:
    """Flags that enter the digest; file paths enter through their bytes."""
    return {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in PATH_FLAGS + IGNORED_FLAGS
    }


def _inputs(args: argparse.Namespace) -> dict[str, Path]:
    return {
        key: getattr(args, key)
        for key in PATH_FLAGS
        if getattr(args, key, None) is not None
    }


def _load_config(args: argparse.Namespace) -> RunConfig:
    """Run config with command-line grid overrides applied."""
    config = read_model(args.config, RunConfig)
    overrides = {
        name: getattr(args, f"grid_{name}")
        for name in ("min", "max", "points")
        if getattr(args, f"grid_{name}", None) is not None
    }
    if overrides:
        grid = parse_model(
            GridSection, {**config.grid.model_dump(), **overrides}, source="grid flags"
        )
        config = config.model_copy(update={"grid": grid})
    return config


def _finish(writer: OutputWriter, args: argparse.Namespace) -> int:
    digest = compute_digest(writer.command, _inputs(args), _flags(args))
    manifest = writer.manifest(digest)
    logger.info(
        "%s: %d outputs, digest %s", writer.command, len(manifest.outputs), digest[:12]
    )
    return EXIT_OK


@exit_codes
def cmd_sweep(args: argparse.Namespace) -> int:
    """Open-loop, closed-loop and ratio traces plus a feedback-phase scan."""
    config = _load_config(args)
    plant = config.plant.to_plant()
    comp = config.compensator.to_compensator(plant)
    env = config.loop
    if not comp.is_stable:
        logger.warning("Compensator pole %.4g MHz is not in the left half-plane", comp.pole)

    ratio, open_loop = frequency_sweep(
        plant, comp, env, config.grid.to_array(), include_open_loop=True
    )
    closed = FrequencyTrace.from_arrays(
        ratio.detuning, ratio.array * open_loop.array, TraceKind.POWER
    )
    transfer = closed_loop_sweep(plant, comp, env, ratio.detuning)
    scan = phase_scan(
        plant, comp, env.mu, np.linspace(0.0, 2.0 * math.pi, PHASE_SCAN_POINTS)
    )

    ratio_frame = ratio.to_frame()
    ratio_frame["value_db"] = 10.0 * np.log10(np.clip(ratio.array, 1e-300, None))

    writer = OutputWriter(args.out, "sweep")
    writer.frame("sweep_open.csv", open_loop.to_frame())
    writer.frame("sweep_closed.csv", closed.to_frame())
    writer.frame("sweep_ratio.csv", ratio_frame)
    writer.frame("sweep_closed_tf.csv", transfer.to_frame())
    writer.frame("sweep_phase_scan.csv", scan.to_frame())
    writer.data("sweep_phase_extrema.json", scan.model_dump(exclude={"phi", "ratio"}))
    return _finish(writer, args)


@exit_codes
def cmd_synthesize(args: argparse.Namespace) -> int:
    """Optimal gain and phase; with a band edge also the static-gain comparison."""
    config = _load_config(args)
    plant = config.plant.to_plant()
    comp = config.compensator.to_compensator(plant)
    band_edge = args.band if args.band is not None else config.synthesis.band_edge

    result = optimize_gain(
        plant,
        comp.eta_gamma,
        config.loop.mu,
        target=config.synthesis.target,
        band_edge=band_edge,
        eta_K_max=config.synthesis.eta_K_max,
    )

    writer = OutputWriter(args.out, "synthesize")
    writer.model("synthesis.json", result)
    if band_edge is not None and plant.k1 * plant.k4 > 0.0:
        comparison = compare_with_proportional(plant, comp.eta_gamma, config.loop.mu, band_edge)
        writer.model("synthesis_comparison.json", comparison)
    return _finish(writer, args)


@exit_codes
def cmd_fit(args: argparse.Namespace) -> int:
    """Least-squares fit of a parametric dataset."""
    fit_spec = read_model(args.bounds, FitSpec)
    read_bytes(args.data)
    data = ParametricDataset.from_csv(args.data, gamma_p_fixed=fit_spec.gamma_p)

    writer = OutputWriter(args.out, "fit")
    try:
        result = fit_parameters(
            data,
            bounds=fit_spec.bounds,
            initial_guess=fit_spec.initial_guess,
            symmetric_couplers=fit_spec.symmetric_couplers,
            weighting=fit_spec.weighting,
        )
    except FitConvergenceError as e:
        if isinstance(e.best_so_far, FitResult):
            writer.model("fit_best_so_far.json", e.best_so_far)
        raise

    writer.model("fit.json", result)
    return _finish(writer, args)


@exit_codes
def cmd_report(args: argparse.Namespace) -> int:
    """Consistency report of a fit against independent measurements."""
    fit = read_model(args.fit, FitResult)
    measured = read_model(args.measured, MeasuredValues)
    report = consistency_report(fit, measured)

    writer = OutputWriter(args.out, "report")
    writer.text("report.txt", render_report(fit, measured, report))
    writer.model("report.json", report)
    return _finish(writer, args)


@exit_codes
def cmd_emulate(args: argparse.Namespace) -> int:
    """Emulated measurement traces for one scenario."""
    config = _load_config(args)
    emulation = config.emulation
    if args.seed is not None:
        emulation = emulation.model_copy(update={"detector_noise_seed": args.seed})
    emulation = emulation.model_copy(update={"detector_noise_seed": resolve_seed(emulation)})
    config = config.model_copy(update={"emulation": emulation})

    scenario = Scenario(args.scenario.lower())
    response = get_emulator(scenario).run(config)

    writer = OutputWriter(args.out, "emulate")
    for name, frame in response.tables.items():
        writer.frame(f"emulate_{name}.csv", frame)
    writer.model("emulate_config.json", config)
    writer.data("emulate_summary.json", response.metadata)
    return _finish(writer, args)
