"""Shared operating-point grids for the test suite."""
from __future__ import annotations

import math

from dcmpoles import reproduce
from dcmpoles.errors import ConverterError
from dcmpoles.model import (
    ConverterParams,
    GivenControl,
    GivenOutput,
    Resistive,
    ResistiveParallelCCL,
    ResistiveParallelCPL,
    Topology,
    solve_operating_point,
    solve_operating_points,
)
from dcmpoles.schemes import BCM, BCMCOT, OpenLoop

RC = 0.05
NOMINAL = {
    Topology.BOOST: dict(vs=5.0, L=5e-6, C=40e-6, T=1e-5, R=20.0, M=(2.6, 3.0, 3.4, 3.8, 4.2)),
    Topology.BUCK: dict(vs=5.0, L=5e-6, C=40e-6, T=5e-6, R=10.0, M=(0.3, 0.4, 0.5, 0.6, 0.7)),
}
LOADS = ("resistive", "ccl", "cpl")
SCHEMES = ("open", "vmc", "cmc", "cmc-ramp", "vcotc", "bcm", "bcmcot")


def params_for(topology: Topology, fixed: bool = True, Rc: float = RC) -> ConverterParams:
    n = NOMINAL[topology]
    return ConverterParams(topology, n["vs"], n["L"], n["C"], Rc, n["T"] if fixed else None)


def load_at(kind: str, v: float, R: float):
    """Load whose effective resistance at ``v`` is ``R``."""
    if kind == "resistive":
        return Resistive(R)
    if kind == "ccl":
        return ResistiveParallelCCL(v / (2.0 * R), 2.0 * R)
    if kind == "cpl":
        return ResistiveParallelCPL(v * v / (2.0 * R), 2.0 * R)
    raise ValueError(kind)


def _bcm_control(name, topology, M, vs, L, R):
    # controls that place a boundary-conduction steady state at v = M vs with load R
    boost = topology is Topology.BOOST
    if name == "bcm":
        return BCM(2.0 * M * M * vs / R if boost else 2.0 * M * vs / R)
    return BCMCOT(2.0 * L * M * M / R if boost else 2.0 * L * M / (R * (1.0 - M)))


def grid_cases(topology: Topology, scheme_name: str, load_kind: str):
    """Yield ``(scheme, load, op)`` on the five-point grid; infeasible points are skipped."""
    n = NOMINAL[topology]
    for M in n["M"]:
        v = M * n["vs"]
        load = load_at(load_kind, v, n["R"])
        try:
            if scheme_name in ("bcm", "bcmcot"):
                params = params_for(topology, fixed=False)
                scheme = _bcm_control(scheme_name, topology, M, n["vs"], n["L"], n["R"])
                ops = solve_operating_points(params, load, GivenControl(scheme))
            else:
                params = params_for(topology)
                op = solve_operating_point(params, load, GivenOutput(v))
                scheme = {
                    "open": lambda: OpenLoop(op.D),
                    "vmc": lambda: reproduce.vmc_at(op, 0.02),
                    "cmc": lambda: reproduce.cmc_at(op, 1.0),
                    "cmc-ramp": lambda: reproduce.cmc_at(op, 2.0),
                    "vcotc": lambda: reproduce.vcotc_at(op, 2e4),
                }[scheme_name]()
                ops = [op]
        except ConverterError:
            continue
        for op in ops:
            if op.in_dcm or op.regime.value == "BCM":
                yield scheme, load, op


def rel_close(a: float, b: float, rtol: float, floor: float = 0.0) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b)) + floor


def finite(x) -> bool:
    return x is not None and math.isfinite(x)
