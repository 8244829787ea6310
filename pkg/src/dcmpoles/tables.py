"""Closed-form pole and DC-gain entries, as commonly tabulated.

Each :class:`Entry` carries the expression as it is usually printed and,
where that printed form is wrong or drops a factor, the corrected
expression that agrees with the linearized map.  ``corrected`` is ``None``
when the printed form is exact.

The composed one-shot pole formulas (``composed_pole``) expand
``p0 + dpc + dpl`` directly in terms of ``M``, ``R0`` and ``m_c``; they are
an independent evaluation path used to cross-check the decomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    OperatingPoint,
    Resistive,
    ResistiveParallelCCL,
    ResistiveParallelCPL,
    Topology,
)
from .schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop


@dataclass(frozen=True)
class Entry:
    table: int
    topology: Topology
    quantity: str
    printed: float
    corrected: float | None = None

    @property
    def value(self) -> float:
        return self.printed if self.corrected is None else self.corrected


def _a(op: OperatingPoint) -> float:
    return op.rho * op.T / (op.R * op.params.C)


def _inv_R0(load) -> float:
    if isinstance(load, Resistive):
        return 0.0  # no separate resistor: R0 enters only through R
    return 0.0 if math.isinf(load.R0) else 1.0 / load.R0


def table2(op: OperatingPoint, mc: float = 1.0) -> list[Entry]:
    """Power stage and CMC with a resistive load."""
    M, D, rho, R, a = op.M, op.D, op.rho, op.R, _a(op)
    vs, v = op.vs, op.v
    t = op.topology
    if t is Topology.BOOST:
        return [
            Entry(2, t, "p0", 1 - a * (2 * M - 1) / (M - 1)),
            Entry(2, t, "Toc0(1)", 2 * rho * v / D * (M - 1) / (2 * M - 1)),
            Entry(2, t, "Tos0(1)", rho * M),
            Entry(2, t, "dpc CMC", 0.0),
            Entry(2, t, "p CMC", 1 - a * (2 * M - 1) / (M - 1)),
            Entry(2, t, "Toc(1) CMC", rho * R * D / ((2 * M - 1) * mc)),
            Entry(2, t, "Tos(1) CMC", rho * M * (1 - 2 * (M - 1) / ((2 * M - 1) * mc))),
        ]
    lead = 2 - M - 2 * M / mc
    return [
        Entry(2, t, "p0", 1 - a * (2 - M) / (1 - M)),
        Entry(2, t, "Toc0(1)", 2 * rho * M * vs / D * (1 - M) / (2 - M)),
        Entry(2, t, "Tos0(1)", M, rho * M),
        Entry(2, t, "dpc CMC", a / mc * 2 * M / (1 - M)),
        Entry(2, t, "p CMC", 1 - a * lead / (1 - M)),
        Entry(2, t, "Toc(1) CMC", R * (1 - M) / (M * mc * lead), rho * R * D * (1 - M) / (M * mc * lead)),
        Entry(2, t, "Tos(1) CMC", M * (2 - M - 2 / mc) / lead, rho * M * (2 - M - 2 / mc) / lead),
    ]


def table3(op: OperatingPoint, load, mc: float = 1.0) -> list[Entry]:
    """Poles with a pure constant-power or constant-current load."""
    M, a = op.M, _a(op)
    t = op.topology
    if isinstance(load, ResistiveParallelCPL):
        if t is Topology.BOOST:
            p = 1 - a / (M - 1)
            return [Entry(3, t, "p CPL", p), Entry(3, t, "p CPL CMC", p)]
        return [
            Entry(3, t, "p CPL", 1 - a * M / (1 - M)),
            Entry(3, t, "p CPL CMC", 1 - a * (M - 2 * M / mc) / (1 - M)),
        ]
    if isinstance(load, ResistiveParallelCCL):
        if t is Topology.BOOST:
            p = 1 - a * M / (M - 1)
            return [Entry(3, t, "p CCL", p), Entry(3, t, "p CCL CMC", p)]
        return [
            Entry(3, t, "p CCL", 1 - a / (1 - M)),
            Entry(3, t, "p CCL CMC", 1 - a * (1 - 2 * M / mc) / (1 - M)),
        ]
    raise TypeError("table 3 covers constant-power and constant-current loads only")


def table4(op: OperatingPoint, scheme) -> list[Entry]:
    """Variable-frequency schemes with a resistive load."""
    M, rho, R, a, K = op.M, op.rho, op.R, _a(op), op.K
    t = op.topology
    boost = t is Topology.BOOST
    if isinstance(scheme, VCOTC):
        p0 = 1 - a * ((2 * M - 1) / (M - 1) if boost else (2 - M) / (1 - M))
        x = rho * op.v / (R * op.params.C)
        ma = scheme.ma
        # the usual printed form carries the wrong sign in the denominator
        return [Entry(4, t, "p VCOTC", ma / (ma - x) * p0, ma / (ma + x) * p0)]
    if isinstance(scheme, BCM):
        if boost:
            return [
                Entry(4, t, "p BCM", 1 - 2 * a),
                Entry(4, t, "Toc(1) BCM", R / (4 * M), rho * R / (4 * M)),
                Entry(4, t, "Tos(1) BCM", M / 2, rho * M / 2),
            ]
        return [
            Entry(4, t, "p BCM", 1 - a),
            Entry(4, t, "Toc(1) BCM", R / 2, rho * R / 2),
            Entry(4, t, "Tos(1) BCM", 0.0),
        ]
    if isinstance(scheme, BCMCOT):
        if boost:
            # printed audio gain M^2/(M-1) follows from an on-time/period mix-up
            return [
                Entry(4, t, "p BCM-COT", 1 - 2 * a),
                Entry(4, t, "Tos(1) BCM-COT", M * M / (M - 1), rho * M),
            ]
        return [
            Entry(4, t, "p BCM-COT", 1 - op.beta),
            Entry(4, t, "Tos(1) BCM-COT", K * M / (1 - M), rho * K * M / (1 - M)),
        ]
    raise TypeError("table 4 covers VCOTC, BCM and BCM-COT")


def composed_pole(scheme, load, op: OperatingPoint, mc: float = 1.0) -> float:
    """Closed-loop pole written out in one expression per configuration.

    ``mc`` is the CMC slope factor.  Loads enter through ``R`` and
    ``1/R0`` only.
    """
    M, a, rho, C, T = op.M, _a(op), op.rho, op.params.C, op.T
    boost = op.topology is Topology.BOOST
    g0 = _inv_R0(load)
    # load shift is lk * (rho T / C) * (1/R - 1/R0)
    if isinstance(load, ResistiveParallelCPL):
        lk = 2.0
    elif isinstance(load, ResistiveParallelCCL):
        lk = 1.0
    else:
        lk = 0.0
    tail = -lk * rho * T * g0 / C

    if isinstance(scheme, (OpenLoop, VMC, CMC, VCOTC)):
        if boost:
            base = 1 - a * ((2 * M - 1) / (M - 1) - lk) + tail
        else:
            ctl = 2 * M / mc if isinstance(scheme, CMC) else 0.0
            base = 1 - a * ((2 - M - ctl) / (1 - M) - lk) + tail
        if isinstance(scheme, VMC):
            return base - scheme.g * 2 * a * op.v / (op.D * scheme.Vh)
        if isinstance(scheme, VCOTC):
            x = rho * op.v / (op.R * C)
            return scheme.ma / (scheme.ma + x) * base
        return base
    if isinstance(scheme, (BCM, BCMCOT)):
        dpl = lk * a + tail
        if boost:
            return 1 - 2 * a + dpl
        if isinstance(scheme, BCM):
            return 1 - a + dpl
        return 1 - op.beta + dpl
    raise TypeError(f"unknown scheme {scheme!r}")


def pole_entries(scheme, load, op: OperatingPoint, mc: float = 1.0) -> list[Entry]:
    """All tabulated entries that apply to ``(scheme, load)`` at ``op``."""
    if isinstance(scheme, (VCOTC, BCM, BCMCOT)):
        return table4(op, scheme) if isinstance(load, Resistive) else []
    if isinstance(load, Resistive):
        return table2(op, mc)
    if not math.isinf(load.R0):
        return []
    return table3(op, load, mc)

