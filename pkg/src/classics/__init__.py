"""Classic non-normal test matrices with exactly known spectra."""

from src.classics.godunov import (
    GodunovCase,
    GodunovExperiment,
    GodunovRow,
    baseline_spectrum,
    build,
    run_experiment,
    solve_case,
)

__all__ = [
    "GodunovCase",
    "GodunovExperiment",
    "GodunovRow",
    "baseline_spectrum",
    "build",
    "run_experiment",
    "solve_case",
]
