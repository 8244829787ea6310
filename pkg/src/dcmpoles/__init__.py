"""Discrete-time pole models of DCM boost and buck converters."""
from .discrete_map import boost_map, buck_map, iterate, step
from .errors import ConverterError
from .freq_response import PulseTransfer, bode, dc_gain, make_transfer
from .model import (
    ConverterParams,
    GivenControl,
    GivenDuty,
    GivenOutput,
    OperatingPoint,
    Resistive,
    ResistiveParallelCCL,
    ResistiveParallelCPL,
    Topology,
    effective_resistance,
    solve_operating_point,
    solve_operating_points,
)
from .schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop
from .small_signal import (
    SmallSignal,
    classify,
    closed_form_coefficients,
    closed_loop_pole,
    linearize_numeric,
    open_loop_pole,
)

__version__ = "0.1.0"

__all__ = [
    "BCM",
    "BCMCOT",
    "CMC",
    "ConverterError",
    "ConverterParams",
    "GivenControl",
    "GivenDuty",
    "GivenOutput",
    "OpenLoop",
    "OperatingPoint",
    "PulseTransfer",
    "Resistive",
    "ResistiveParallelCCL",
    "ResistiveParallelCPL",
    "SmallSignal",
    "Topology",
    "VCOTC",
    "VMC",
    "bode",
    "boost_map",
    "buck_map",
    "classify",
    "closed_form_coefficients",
    "closed_loop_pole",
    "dc_gain",
    "effective_resistance",
    "iterate",
    "linearize_numeric",
    "make_transfer",
    "open_loop_pole",
    "solve_operating_point",
    "solve_operating_points",
    "step",
]
