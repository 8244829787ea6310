"""Linearized one-cycle dynamics ``v[n+1] = p v[n] + Gs vs[n] + Gc vc[n]``.

The pole splits as ``p = p0 + dpc + dpl``: the open-loop power-stage pole,
the shift caused by the control law, and the shift caused by a
voltage-dependent load.  Every closed form here has a finite-difference
counterpart in :func:`linearize_numeric`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import discrete_map, tables
from .errors import NoRealOrbit, NotAFixedPoint, SchemeMismatch
from .model import (
    ConverterParams,
    OperatingPoint,
    Resistive,
    ResistiveParallelCCL,
    ResistiveParallelCPL,
    Topology,
    slope_factor,
)
from .schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop

COMPOSED_RTOL = 1e-12


@dataclass(frozen=True)
class SmallSignal:
    """Pole decomposition and input coefficients at an operating point.

    ``gamma_c`` is in output volts per unit of the scheme's control input
    (duty for open loop, volts for VMC and V-COTC, amperes for CMC and
    BCM) and is ``None`` for BCM-COT, which has no control input.  ``T``
    is the steady period used to map the pole onto frequency.
    """

    p0: float
    dpc: float
    dpl: float
    p: float
    gamma_s: float
    gamma_c: float | None
    gamma_s0: float
    gamma_c0: float
    T: float

    def as_dict(self) -> dict:
        return {
            "p0": self.p0,
            "dpc": self.dpc,
            "dpl": self.dpl,
            "p": self.p,
            "gamma_s": self.gamma_s,
            "gamma_c": self.gamma_c,
            "gamma_s0": self.gamma_s0,
            "gamma_c0": self.gamma_c0,
            "T": self.T,
        }


class Bifurcation(enum.Enum):
    STABLE = "stable"
    SADDLE_NODE = "saddle-node"
    SUBHARMONIC = "subharmonic"


@dataclass(frozen=True)
class BifurcationReport:
    kind: Bifurcation
    margin: float


def classify(p: float) -> BifurcationReport:
    """Stability of a real pole and its distance from the nearest boundary."""
    if p >= 1.0:
        return BifurcationReport(Bifurcation.SADDLE_NODE, p - 1.0)
    if p <= -1.0:
        return BifurcationReport(Bifurcation.SUBHARMONIC, -1.0 - p)
    return BifurcationReport(Bifurcation.STABLE, 1.0 - abs(p))


# --------------------------------------------------------------------------
# open loop


def _a(op: OperatingPoint) -> float:
    return op.rho * op.T / (op.R * op.params.C)


def open_loop_pole(op: OperatingPoint) -> float:
    """Power-stage pole with the duty held fixed."""
    a, M = _a(op), op.M
    if op.topology is Topology.BOOST:
        return 1.0 - a * (2.0 * M - 1.0) / (M - 1.0)
    return 1.0 - a * (2.0 - M) / (1.0 - M)


def open_loop_coefficients(op: OperatingPoint) -> tuple[float, float]:
    """``(Gamma_s0, Gamma_c0)``: source and duty coefficients of the power stage."""
    a, M = _a(op), op.M
    gc0 = 2.0 * a * op.v / op.D
    if op.topology is Topology.BOOST:
        return a * M * (2.0 * M - 1.0) / (M - 1.0), gc0
    return a * M * (2.0 - M) / (1.0 - M), gc0


def exact_pole_closed_form(op: OperatingPoint) -> float:
    """Slope of the exact switching map of the open-loop power stage.

    Uses the stage instants ``d1 = D T`` and ``d2 = (D + D2) T`` together
    with ``wc = 1/RC``, ``wl = Rc/L`` and ``w0 = 1/sqrt(LC)``.  An
    overdamped second stage (``w**2 < 0``) switches to hyperbolic
    functions.
    """
    p = op.params
    rho, T = op.rho, op.T
    wc = 1.0 / (op.R * p.C)
    wl = p.Rc / p.L
    w0sq = 1.0 / (p.L * p.C)
    tau = op.D2 * T
    w2 = w0sq - 0.25 * (wc - wl) ** 2
    h = 0.5 * (wl - wc)
    x = rho * tau
    if w2 > 0:
        w = math.sqrt(w2)
        osc = h * math.sin(w * x) / w + math.cos(w * x)
    elif w2 < 0:
        w = math.sqrt(-w2)
        osc = h * math.sinh(w * x) / w + math.cosh(w * x)
    else:
        osc = h * x + 1.0
    return math.exp(-rho * wc * (T - 0.5 * tau)) * math.exp(-rho * wl * 0.5 * tau) * osc


# --------------------------------------------------------------------------
# shifts


def load_pole_shift(load, op: OperatingPoint) -> float:
    """Pole shift from a voltage-dependent load; zero for a resistor."""
    rho, T, C, v = op.rho, op.T, op.params.C, op.v
    if isinstance(load, Resistive):
        return 0.0
    if isinstance(load, ResistiveParallelCPL):
        return 2.0 * rho * T * load.P / (v * v * C)
    if isinstance(load, ResistiveParallelCCL):
        return rho * T * load.Io / (v * C)
    raise TypeError(f"unknown load {load!r}")


def _cmc_slope(op: OperatingPoint) -> float:
    p = op.params
    return p.vs / p.L if op.topology is Topology.BOOST else (p.vs - op.v) / p.L


def _decompose(scheme, load, op: OperatingPoint) -> SmallSignal:
    p0 = open_loop_pole(op)
    gs0, gc0 = open_loop_coefficients(op)
    dpl = load_pole_shift(load, op)
    a, M, rho = _a(op), op.M, op.rho
    C, T = op.params.C, op.T
    boost = op.topology is Topology.BOOST

    if isinstance(scheme, OpenLoop):
        dpc, gs, gc = 0.0, gs0, gc0
    elif isinstance(scheme, VMC):
        k = scheme.g / scheme.Vh
        dpc, gs, gc = -k * gc0, gs0, k * gc0
    elif isinstance(scheme, CMC):
        mc = slope_factor(op.params, scheme, op.v)
        m1 = _cmc_slope(op)
        if boost:
            dpc = 0.0
            gs = a * M * ((2.0 * M - 1.0) / (M - 1.0) - 2.0 / mc)
            gc = rho * T * op.D / (C * (M - 1.0) * mc)
        else:
            dpc = a / mc * 2.0 * M / (1.0 - M)
            gs = a * M * (2.0 - M - 2.0 / mc) / (1.0 - M)
            gc = gc0 / (T * m1 * mc)
    elif isinstance(scheme, VCOTC):
        x = rho * op.v / (op.R * C)
        frac = scheme.ma / (scheme.ma + x)
        dpc = -(p0 + dpl) * (1.0 - frac)
        gs, gc = frac * gs0, x / (x + scheme.ma)
    elif isinstance(scheme, BCM):
        if boost:
            p_res, gs, gc = 1.0 - 2.0 * a, a * M, rho * T / (2.0 * C * M)
        else:
            p_res, gs, gc = 1.0 - a, 0.0, rho * T / (2.0 * C)
        dpc = p_res - p0
    elif isinstance(scheme, BCMCOT):
        if boost:
            p_res, gs = 1.0 - 2.0 * a, 2.0 * a * M
        else:
            p_res, gs = 1.0 - op.beta, a * M / (1.0 - M)
        dpc, gc = p_res - p0, None
    else:
        raise SchemeMismatch(f"unknown scheme {scheme!r}")
    return SmallSignal(p0, dpc, dpl, p0 + dpc + dpl, gs, gc, gs0, gc0, T)


def control_pole_shift(scheme, op: OperatingPoint, load=None) -> float:
    """Shift of the pole caused by the control law.

    For the boundary-conduction schemes this is the difference between the
    scheme's pole and the fixed-period power-stage pole at the same point.
    """
    return _decompose(scheme, Resistive(op.R) if load is None else load, op).dpc


def closed_loop_pole(scheme, load, op: OperatingPoint) -> SmallSignal:
    """Decomposed closed-loop pole, cross-checked against the composed form.

    Raises
    ------
    ArithmeticError
        The decomposition and the one-expression composed pole disagree
        beyond rounding; this indicates an internal inconsistency.
    """
    ss = _decompose(scheme, load, op)
    mc = slope_factor(op.params, scheme, op.v) if isinstance(scheme, CMC) else 1.0
    direct = tables.composed_pole(scheme, load, op, mc)
    scale = max(1.0, abs(ss.p0), abs(ss.dpc), abs(ss.dpl))
    if abs(direct - ss.p) > COMPOSED_RTOL * scale * 8:
        raise ArithmeticError(f"pole decomposition {ss.p!r} disagrees with composed form {direct!r}")
    return ss


def closed_form_coefficients(scheme, load, op: OperatingPoint) -> SmallSignal:
    """Closed-form ``(p, Gamma_s, Gamma_c)`` with the full decomposition."""
    return closed_loop_pole(scheme, load, op)


def vmc_critical_gain(op: OperatingPoint, Vh: float = 1.0, load=None) -> float:
    """Feedback gain at which the VMC pole reaches -1."""
    _, gc0 = open_loop_coefficients(op)
    dpl = 0.0 if load is None else load_pole_shift(load, op)
    return (open_loop_pole(op) + dpl + 1.0) * Vh / gc0


@dataclass(frozen=True)
class BuckCCLOrbits:
    M_low: float
    M_high: float
    vc_star: float


def buck_ccl_fixed_points(params: ConverterParams, vc: float, Io: float) -> BuckCCLOrbits:
    """Coexisting steady states of a peak-current buck on a pure current sink.

    Without a ramp the duty ``vc L / (T (vs - v))`` turns the steady-state
    balance into ``M**2 - M + vc**2 L / (2 T Io vs) = 0``.

    Raises
    ------
    NoRealOrbit
        ``vc`` lies beyond the saddle-node value ``sqrt(T Io vs / 2L)``.
    """
    T, L, vs = params.T, params.L, params.vs
    if Io <= 0:
        raise NoRealOrbit("a positive sink current is required")
    disc = 0.25 - vc * vc * L / (2.0 * T * Io * vs)
    vc_star = math.sqrt(T * Io * vs / (2.0 * L))
    if disc < 0:
        raise NoRealOrbit(f"vc = {vc:.6g} A exceeds the saddle-node value {vc_star:.6g} A")
    r = math.sqrt(disc)
    return BuckCCLOrbits(0.5 - r, 0.5 + r, vc_star)


# --------------------------------------------------------------------------
# numeric oracle


@dataclass(frozen=True)
class NumericLinearization:
    p: float
    gamma_s: float
    gamma_c: float | None


def _control_value(scheme):
    if isinstance(scheme, OpenLoop):
        return scheme.D
    if isinstance(scheme, BCMCOT):
        return None
    return scheme.vc


def _richardson(fun, x):
    def central(h):
        return (fun(x + h) - fun(x - h)) / (2.0 * h)

    h = max(1e-6 * abs(x), 1e-9)
    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def linearize_numeric(scheme, load, params: ConverterParams, v_star: float, fp_rtol: float = 1e-9) -> NumericLinearization:
    """Finite-difference partial derivatives of the one-cycle map.

    Central differences with step ``max(1e-6 |x|, 1e-9)`` and one
    Richardson extrapolation, taken with respect to ``v[n]``, ``vs[n]`` and
    the control input.

    Raises
    ------
    NotAFixedPoint
        ``v_star`` is not a fixed point of the map to ``fp_rtol``.
    """
    vs = params.vs
    vc = _control_value(scheme)

    def f(vn, vsn, vcn):
        return discrete_map.step(scheme, load, params, vn, vsn, vcn).v_next

    resid = f(v_star, vs, vc) - v_star
    if abs(resid) > fp_rtol * abs(v_star):
        raise NotAFixedPoint(f"|f(v) - v| = {abs(resid):.3g} V at v = {v_star:.12g} V")
    p = _richardson(lambda x: f(x, vs, vc), v_star)
    gs = _richardson(lambda x: f(v_star, x, vc), vs)
    gc = None if vc is None else _richardson(lambda x: f(v_star, vs, x), vc)
    return NumericLinearization(p, gs, gc)
