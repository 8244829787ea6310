"""Exact piecewise-LTI switching simulation."""
from .circuit import CircuitState, Stage, StageModel, detect_event, propagate, stage_model
from .kernels import BACKEND
from .sim import (
    CycleReport,
    CycleResult,
    SimResult,
    cycle_map,
    exact_pole_numeric,
    find_fixed_point,
    simulate,
    write_samples_csv,
    write_waveform_csv,
)

__all__ = [
    "BACKEND",
    "CircuitState",
    "CycleReport",
    "CycleResult",
    "SimResult",
    "Stage",
    "StageModel",
    "cycle_map",
    "detect_event",
    "exact_pole_numeric",
    "find_fixed_point",
    "propagate",
    "simulate",
    "stage_model",
    "write_samples_csv",
    "write_waveform_csv",
]
