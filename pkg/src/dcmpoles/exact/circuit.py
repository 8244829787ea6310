"""Piecewise-LTI circuit stages of the ideal-switch converter.

State ``x = (iL, v)`` with ``v`` the capacitor voltage.  The load is
represented at its output node by a conductance ``G`` in parallel with a
current sink ``Is``; resistive, constant-current and (locally linearised)
constant-power loads all fit this form.  With ``k = 1 / (1 + Rc G)`` the
output voltage is ``vo = k (v + Rc i_in - Rc Is)`` where ``i_in`` is the
inductor current fed to the output node during the stage.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from ..errors import NoEvent
from ..model import ConverterParams, Resistive, ResistiveParallelCCL, ResistiveParallelCPL, Topology
from . import kernels

EVENT_RTOL = 1e-13
_MIN_SCAN = 64
_MAX_SCAN = 200_000


class Stage(enum.IntEnum):
    SWITCH_ON = 1
    DIODE_ON = 2
    IDLE = 3


@dataclass(frozen=True)
class CircuitState:
    iL: float
    v: float
    t: float = 0.0


@dataclass(frozen=True)
class StageModel:
    """``dx/dt = A x + b`` with output voltage ``vo = w . x + w0``."""

    A: tuple[tuple[float, float], tuple[float, float]]
    b: tuple[float, float]
    stage: Stage
    w: tuple[float, float]
    w0: float

    @property
    def coeffs(self):
        (a11, a12), (a21, a22) = self.A
        return a11, a12, a21, a22, self.b[0], self.b[1]

    def output_voltage(self, iL: float, v: float) -> float:
        return self.w[0] * iL + self.w[1] * v + self.w0

    def oscillation_rate(self) -> float:
        """Imaginary part of the eigenvalues (rad/s), zero when real."""
        (a11, a12), (a21, a22) = self.A
        tr = a11 + a22
        det = a11 * a22 - a12 * a21
        disc = 0.25 * tr * tr - det
        return math.sqrt(-disc) if disc < 0 else 0.0


def _stage_topology(topology: Topology, stage: Stage, vs: float):
    # (voltage driving the inductor, whether iL feeds the output node)
    if stage is Stage.IDLE:
        return 0.0, 0
    if topology is Topology.BOOST:
        return vs, 0 if stage is Stage.SWITCH_ON else 1
    return (vs if stage is Stage.SWITCH_ON else 0.0), 1


def stage_model(topology: Topology, stage: Stage, params: ConverterParams, G: float, Is: float = 0.0,
                vs: float | None = None) -> StageModel:
    """LTI model of one conduction stage with the load ``(G, Is)``.

    ``G`` is the load conductance (``1/R`` for a resistor) and ``Is`` a
    constant current drawn from the output node.
    """
    vs = params.vs if vs is None else vs
    L, C, Rc = params.L, params.C, params.Rc
    k = 1.0 / (1.0 + Rc * G)
    u, s_in = _stage_topology(topology, stage, vs)
    a11 = -s_in * k * Rc / L
    a12 = -s_in * k / L
    a21 = s_in * k / C
    a22 = -G * k / C
    b1 = u / L + s_in * k * Rc * Is / L
    b2 = -k * Is / C
    return StageModel(
        A=((a11, a12), (a21, a22)),
        b=(b1, b2),
        stage=stage,
        w=(s_in * k * Rc, k),
        w0=-k * Rc * Is,
    )


def feeds_output(topology: Topology, stage: Stage) -> bool:
    return _stage_topology(topology, stage, 1.0)[1] == 1


def output_voltage_nonlinear(load, params: ConverterParams, v: float, i_in: float) -> float:
    """Exact output-node voltage for the (possibly nonlinear) load."""
    Rc = params.Rc
    if isinstance(load, Resistive):
        G, Is = 1.0 / load.R0, 0.0
    elif isinstance(load, ResistiveParallelCCL):
        G, Is = (0.0 if math.isinf(load.R0) else 1.0 / load.R0), load.Io
    else:
        g0 = 0.0 if math.isinf(load.R0) else 1.0 / load.R0
        if Rc == 0.0:
            return v
        a = 1.0 + Rc * g0
        bb = v + Rc * i_in
        disc = bb * bb - 4.0 * a * Rc * load.P
        return (bb + math.sqrt(max(disc, 0.0))) / (2.0 * a)
    return (v + Rc * i_in - Rc * Is) / (1.0 + Rc * G)


def load_companion(load, vo: float | None = None) -> tuple[float, float]:
    """Load as ``(G, Is)``; a constant-power sink is linearised about ``vo``."""
    if isinstance(load, Resistive):
        return 1.0 / load.R0, 0.0
    g0 = 0.0 if math.isinf(load.R0) else 1.0 / load.R0
    if isinstance(load, ResistiveParallelCCL):
        return g0, load.Io
    if isinstance(load, ResistiveParallelCPL):
        if vo is None or vo <= 0:
            raise ValueError("constant-power load needs a positive linearisation voltage")
        return g0 - load.P / (vo * vo), 2.0 * load.P / vo
    raise TypeError(f"unknown load {load!r}")


def propagate(state: CircuitState, model: StageModel, dt: float) -> CircuitState:
    """Exact solution of the stage's affine ODE after ``dt`` seconds."""
    if dt < 0:
        raise ValueError("dt must be non-negative")
    iL, v = kernels.propagate(*model.coeffs, state.iL, state.v, dt)
    if model.stage is Stage.IDLE:
        iL = 0.0
    return CircuitState(iL, v, state.t + dt)


def scan_count(model: StageModel, t_max: float) -> int:
    # keep scan steps below a quarter oscillation so no crossing pair is missed
    w = model.oscillation_rate()
    n = _MIN_SCAN
    if w > 0:
        n = max(n, int(math.ceil(4.0 * w * t_max / math.pi)))
    return min(n, _MAX_SCAN)


def detect_event(state: CircuitState, model: StageModel, event, t_max: float,
                 rtol: float = EVENT_RTOL) -> tuple[float, CircuitState]:
    """First time the event function ``w . x + w0 + wt * t`` reaches zero.

    ``event`` is ``(w1, w2, w0, wt)`` with ``t`` counted from ``state.t``;
    it must be positive before the event.  Returns the elapsed time and the
    state there, located to ``rtol * t_max``.

    Raises
    ------
    NoEvent
        The event does not fire within ``t_max``.
    """
    w1, w2, w0, wt = event
    found, t, iL, v = kernels.find_event(
        *model.coeffs, state.iL, state.v, w1, w2, w0, wt, t_max, scan_count(model, t_max), rtol
    )
    if not found:
        raise NoEvent(f"event did not fire within {t_max:.6g} s")
    if model.stage is Stage.IDLE:
        iL = 0.0
    return t, CircuitState(iL, v, state.t + t)


def advance(state: CircuitState, model: StageModel, event, t_max: float,
            rtol: float = EVENT_RTOL) -> tuple[bool, float, CircuitState]:
    """Propagate up to ``t_max``, stopping early if ``event`` fires.

    Like :func:`detect_event` but reports a missing event through the
    returned flag instead of raising.  ``event=None`` propagates the full
    ``t_max``.
    """
    if event is None:
        return False, t_max, propagate(state, model, t_max)
    w1, w2, w0, wt = event
    found, t, iL, v = kernels.find_event(
        *model.coeffs, state.iL, state.v, w1, w2, w0, wt, t_max, scan_count(model, t_max), rtol
    )
    if model.stage is Stage.IDLE:
        iL = 0.0
    return found, t, CircuitState(iL, v, state.t + t)
