"""Cycle-by-cycle switching simulation on the exact piecewise-LTI circuit."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from ..discrete_map import DUTY_MAX
from ..errors import (
    ConverterError,
    CycleError,
    LeftDCM,
    NoConvergence,
    SchemeInfeasible,
    SchemeMismatch,
)
from ..model import ConverterParams, ResistiveParallelCPL
from ..schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop
from .circuit import (
    CircuitState,
    Stage,
    advance,
    feeds_output,
    load_companion,
    output_voltage_nonlinear,
    propagate,
    stage_model,
)

_SEGMENTS_PER_PERIOD = 64
_LONG = 1000.0  # variable-frequency stage caps, in units of the on-time
_DENSE_POINTS = 8


@dataclass(frozen=True)
class CycleReport:
    d1: float  # end of the switch-on stage (s)
    d2: float  # end of the diode stage (s)
    T: float  # cycle period (s)


@dataclass(frozen=True)
class CycleResult:
    v_end: float
    iL_end: float
    report: CycleReport
    waveform: list = field(default_factory=list, repr=False)


class _Cycle:
    """Runs the stages of one switching cycle and records waveforms."""

    def __init__(self, params, load, vs, hmax, dense):
        self.params = params
        self.load = load
        self.vs = vs
        self.hmax = hmax
        self.dense = dense
        self.waveform = []
        self.cpl = isinstance(load, ResistiveParallelCPL)

    def _model(self, stage, state):
        topo = self.params.topology
        if self.cpl:
            i_in = state.iL if feeds_output(topo, stage) else 0.0
            vo = output_voltage_nonlinear(self.load, self.params, state.v, i_in)
            G, Is = load_companion(self.load, vo)
        else:
            G, Is = load_companion(self.load)
        return stage_model(topo, stage, self.params, G, Is, self.vs)

    def run(self, stage, state, duration, event=None):
        """Advance through ``stage`` for at most ``duration`` seconds.

        ``event(model, t)`` builds the event tuple for a segment starting at
        cycle time ``t``.  Returns ``(fired, elapsed, state)``.
        """
        elapsed = 0.0
        while True:
            remaining = duration - elapsed
            seg = min(remaining, self.hmax) if self.cpl else remaining
            last = seg >= remaining
            model = self._model(stage, state)
            ev = None if event is None else event(model, state.t)
            start = state
            fired, dt, state = advance(state, model, ev, seg)
            if self.dense:
                self._record(start, model, dt, stage)
            elapsed += dt
            if fired or last:
                if last and not fired:
                    elapsed = duration
                return fired, elapsed, state

    def _record(self, start, model, dt, stage):
        for k in range(_DENSE_POINTS):
            s = propagate(start, model, dt * k / _DENSE_POINTS)
            self.waveform.append((s.t, s.iL, s.v, int(stage)))


def _iL_zero(model, t):
    return (1.0, 0.0, 0.0, 0.0)


def cycle_map(scheme, load, params: ConverterParams, v_start: float, iL_start: float = 0.0, *,
              vs: float | None = None, vc: float | None = None, dense: bool = False) -> CycleResult:
    """Simulate one switching cycle from capacitor voltage ``v_start``.

    ``vs`` and ``vc`` override the source voltage and the scheme's control
    input for this cycle.  The cycle ends at the next turn-on instant.

    Raises
    ------
    LeftDCM
        Fixed-frequency cycle whose inductor current is still positive at ``T``.
    SchemeInfeasible
        A scheme event (turn-off or valley) never fires.
    """
    vs = params.vs if vs is None else vs
    fixed = isinstance(scheme, (OpenLoop, VMC, CMC))
    if fixed:
        T = params.T
        base = T
    elif isinstance(scheme, (VCOTC, BCMCOT)):
        base = scheme.d
    elif isinstance(scheme, BCM):
        base = (scheme.vc if vc is None else vc) * params.L / vs
    else:
        raise SchemeMismatch(f"unknown scheme {scheme!r}")
    cyc = _Cycle(params, load, vs, base / _SEGMENTS_PER_PERIOD, dense)
    state = CircuitState(iL_start, v_start, 0.0)

    # stage 1: switch on
    if isinstance(scheme, OpenLoop):
        D = scheme.D if vc is None else vc
        _, d1, state = cyc.run(Stage.SWITCH_ON, state, min(max(D, 0.0), DUTY_MAX) * T)
    elif isinstance(scheme, VMC):
        ref = scheme.vc if vc is None else vc
        D = min(max(scheme.g * (ref - v_start) / scheme.Vh, 0.0), DUTY_MAX)
        _, d1, state = cyc.run(Stage.SWITCH_ON, state, D * T)
    elif isinstance(scheme, CMC):
        peak = scheme.vc if vc is None else vc
        ma = scheme.ma

        def off(model, t):
            return (-1.0, 0.0, peak - ma * t, -ma)

        _, d1, state = cyc.run(Stage.SWITCH_ON, state, DUTY_MAX * T, off)
    elif isinstance(scheme, BCM):
        peak = scheme.vc if vc is None else vc
        fired, d1, state = cyc.run(Stage.SWITCH_ON, state, _LONG * base, lambda m, t: (-1.0, 0.0, peak, 0.0))
        if not fired:
            raise SchemeInfeasible("inductor current never reached the peak level")
    else:
        _, d1, state = cyc.run(Stage.SWITCH_ON, state, scheme.d)

    # stage 2: diode conducts until the inductor current returns to zero
    t2_max = (T - d1) if fixed else _LONG * base
    fired, dt2, state = cyc.run(Stage.DIODE_ON, state, t2_max, _iL_zero)
    if not fired:
        if fixed:
            raise LeftDCM(f"iL = {state.iL:.4g} A still positive at the end of the period")
        raise SchemeInfeasible("inductor current never returned to zero")
    d2 = d1 + dt2
    state = CircuitState(0.0, state.v, state.t)

    # stage 3: idle
    if fixed:
        _, _, state = cyc.run(Stage.IDLE, state, T - d2)
        Tn = T
    elif isinstance(scheme, VCOTC):
        ref = scheme.vc if vc is None else vc
        ma = scheme.ma

        def valley(model, t):
            return (model.w[0], model.w[1], model.w0 - ref - ma * t, -ma)

        fired, dt3, state = cyc.run(Stage.IDLE, state, _LONG * base, valley)
        if not fired:
            raise SchemeInfeasible("output never fell to the valley threshold")
        Tn = d2 + dt3
    else:
        Tn = d2
    return CycleResult(state.v, state.iL, CycleReport(d1, d2, Tn), cyc.waveform)


def find_fixed_point(scheme, load, params: ConverterParams, v_guess: float, *, tol: float = 1e-12,
                     maxiter: int = 60) -> float:
    """Period-one orbit of the exact cycle map, stable or not.

    Newton iteration on ``F(v) - v`` with a central-difference slope.
    """
    v = v_guess
    for _ in range(maxiter):
        h = 1e-6 * abs(v)
        g = cycle_map(scheme, load, params, v).v_end - v
        if abs(g) <= tol * abs(v):
            return v
        slope = (cycle_map(scheme, load, params, v + h).v_end - cycle_map(scheme, load, params, v - h).v_end) / (2 * h)
        dg = slope - 1.0
        if dg == 0.0:
            raise NoConvergence("flat residual in fixed-point search")
        step = -g / dg
        limit = 0.2 * abs(v)
        if abs(step) > limit:
            step = math.copysign(limit, step)
        v += step
    g = cycle_map(scheme, load, params, v).v_end - v
    if abs(g) <= 1e-10 * abs(v):
        return v
    raise NoConvergence(f"fixed point not located: residual {g:.3g} V after {maxiter} iterations")


def exact_pole_numeric(scheme, load, params: ConverterParams, v_star: float, h_rel: float = 1e-5) -> float:
    """Slope of the exact cycle map at a fixed point.

    Central difference with step ``h_rel * v_star`` and one Richardson
    refinement.
    """

    def slope(h):
        return (cycle_map(scheme, load, params, v_star + h).v_end
                - cycle_map(scheme, load, params, v_star - h).v_end) / (2.0 * h)

    h = h_rel * abs(v_star)
    return (4.0 * slope(0.5 * h) - slope(h)) / 3.0


@dataclass(frozen=True)
class Sample:
    n: int
    v: float
    d1: float
    T: float


@dataclass
class SimResult:
    samples: list
    waveform: list

    @property
    def v(self):
        return [s.v for s in self.samples]


def simulate(scheme, load, params: ConverterParams, state0=(0.0, None), n_cycles: int = 1,
             dense: bool = False) -> SimResult:
    """Run ``n_cycles`` switching cycles from ``state0 = (iL0, v0)``.

    ``samples[n]`` holds the capacitor voltage at the start of cycle ``n``
    with that cycle's on-time ``d1`` and period ``T``; the final sample
    (index ``n_cycles``) repeats the last cycle's timing.  With ``dense``
    the in-cycle waveform ``(t, iL, v, stage)`` is recorded too.
    """
    iL, v = state0
    samples = []
    waveform = []
    t0 = 0.0
    rep = None
    for n in range(n_cycles):
        try:
            res = cycle_map(scheme, load, params, v, iL, dense=dense)
        except ConverterError as exc:
            raise CycleError(n, exc) from exc
        rep = res.report
        samples.append(Sample(n, v, rep.d1, rep.T))
        if dense:
            waveform.extend((t0 + t, i, x, s) for t, i, x, s in res.waveform)
        t0 += rep.T
        iL, v = res.iL_end, res.v_end
    samples.append(Sample(n_cycles, v, rep.d1 if rep else float("nan"), rep.T if rep else float("nan")))
    if dense:
        waveform.append((t0, iL, v, int(Stage.SWITCH_ON)))
    return SimResult(samples, waveform)


def write_samples_csv(result: SimResult, fh) -> None:
    """Per-cycle samples as CSV ``n, v_n, d1_s, Tn_s``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["n", "v_n", "d1_s", "Tn_s"])
    for s in result.samples:
        w.writerow([s.n, f"{s.v:.12g}", f"{s.d1:.12g}", f"{s.T:.12g}"])


def write_waveform_csv(result: SimResult, fh) -> None:
    """Dense waveform as CSV ``t_s, iL_A, v_V, stage_id``."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["t_s", "iL_A", "v_V", "stage_id"])
    for t, i, v, st in result.waveform:
        w.writerow([f"{t:.12g}", f"{i:.12g}", f"{v:.12g}", st])
