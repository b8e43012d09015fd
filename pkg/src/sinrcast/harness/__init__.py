"""Network generation, experiments and the command line."""

from .experiment import (
    CSV_COLUMNS,
    ExperimentFailure,
    ExperimentResult,
    ExperimentSpec,
    RunRow,
    build_network,
    fit_constant,
    reference_run,
    run_experiment,
    run_one,
    summary,
    to_csv,
    write_csv,
)
from .generate import GENERATORS, GenerationFailure, generate
from .io import read_network, write_network

__all__ = [
    "CSV_COLUMNS",
    "ExperimentFailure",
    "ExperimentResult",
    "ExperimentSpec",
    "GENERATORS",
    "GenerationFailure",
    "RunRow",
    "build_network",
    "fit_constant",
    "generate",
    "read_network",
    "reference_run",
    "run_experiment",
    "run_one",
    "summary",
    "to_csv",
    "write_csv",
    "write_network",
]
