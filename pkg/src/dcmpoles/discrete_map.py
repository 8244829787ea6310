"""Large-signal one-dimensional maps ``v[n+1] = f(v[n], ...)``.

Every quantity is sampled at the start of a cycle.  Non-resistive loads are
frozen at the cycle-start voltage, ``R[n] = R(v[n])``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ConverterError, CycleError, DenominatorUnderflow, NoValidPeriod, SchemeMismatch
from .model import (
    ConverterParams,
    LoadModel,
    Topology,
    bcm_on_time,
    bcm_period,
    effective_resistance,
)
from .schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop, is_fixed_frequency

DUTY_MAX = 0.999
_UNDERFLOW = 1e-9


@dataclass(frozen=True)
class CycleInput:
    vn: float
    vsn: float
    vcn: float | None = None


@dataclass(frozen=True)
class Step:
    """Outcome of one cycle of the map."""

    v_next: float
    duty: float  # D[n] for fixed frequency, on-time d[n] (s) otherwise
    T: float
    R: float
    clamped: bool = False


def _check_denominator(topology, vn, vsn):
    if topology is Topology.BOOST:
        if abs(vn - vsn) < _UNDERFLOW * vsn:
            raise DenominatorUnderflow(f"v[n] - vs[n] = {vn - vsn:.3g} V")
    elif abs(vn) < _UNDERFLOW * vsn:
        raise DenominatorUnderflow(f"v[n] = {vn:.3g} V")


def duty_constraint(scheme, params: ConverterParams, vn: float, vsn: float, vcn=None) -> tuple[float, bool]:
    """Duty ``D[n]`` imposed by a fixed-frequency scheme, with a clamp flag.

    ``vcn`` overrides the scheme's control input for this cycle (the duty
    itself for :class:`OpenLoop`).  The duty is clamped to ``[0, 0.999]``;
    the flag reports when the clamp was active.
    """
    if isinstance(scheme, OpenLoop):
        D = scheme.D if vcn is None else vcn
    elif isinstance(scheme, VMC):
        vc = scheme.vc if vcn is None else vcn
        D = scheme.g * (vc - vn) / scheme.Vh
    elif isinstance(scheme, CMC):
        vc = scheme.vc if vcn is None else vcn
        if params.topology is Topology.BOOST:
            m1 = vsn / params.L
        else:
            m1 = (vsn - vn) / params.L
        slope = m1 + scheme.ma
        D = vc / (params.T * slope) if slope > 0 else DUTY_MAX
    else:
        raise SchemeMismatch(f"{type(scheme).__name__} has no fixed-period duty constraint")
    if D < 0.0:
        return 0.0, True
    if D > DUTY_MAX:
        return DUTY_MAX, True
    return D, False


def boost_map(vn: float, vsn: float, Dn: float, Rn: float, params: ConverterParams, T: float | None = None) -> float:
    """``(1 - beta K) v + beta vs^2 D^2 / (v - vs)`` with groups taken at ``Rn``."""
    T = params.T if T is None else T
    _check_denominator(Topology.BOOST, vn, vsn)
    rho = Rn / (Rn + params.Rc)
    betaK = rho * T / (Rn * params.C)
    beta = rho * T * T / (2.0 * params.L * params.C)
    return (1.0 - betaK) * vn + beta * vsn * vsn * Dn * Dn / (vn - vsn)


def buck_map(vn: float, vsn: float, Dn: float, Rn: float, params: ConverterParams, T: float | None = None) -> float:
    """``(1 - beta K) v - beta vs D^2 (1 - vs / v)`` with groups taken at ``Rn``."""
    T = params.T if T is None else T
    _check_denominator(Topology.BUCK, vn, vsn)
    rho = Rn / (Rn + params.Rc)
    betaK = rho * T / (Rn * params.C)
    beta = rho * T * T / (2.0 * params.L * params.C)
    return (1.0 - betaK) * vn - beta * vsn * Dn * Dn * (1.0 - vsn / vn)


def power_stage_map(params, vn, vsn, Dn, Rn, T=None):
    if params.topology is Topology.BOOST:
        return boost_map(vn, vsn, Dn, Rn, params, T)
    return buck_map(vn, vsn, Dn, Rn, params, T)


def _on_time_term(params, vn, vsn, d, Rn):
    # part of the map that depends on the on-time only (not on the period)
    rho = Rn / (Rn + params.Rc)
    k = rho * d * d / (2.0 * params.L * params.C)
    if params.topology is Topology.BOOST:
        return k * vsn * vsn / (vn - vsn)
    return -k * vsn * (1.0 - vsn / vn)


def vcotc_step(params: ConverterParams, scheme: VCOTC, vn: float, vsn: float, vcn: float | None = None,
               Rn: float | None = None) -> tuple[float, float]:
    """One valley-voltage constant-on-time cycle; returns ``(v[n+1], T[n])``.

    The power-stage map is affine in the period, so the valley constraint
    ``v[n+1] = vc + ma T[n]`` is solved for ``T[n]`` exactly.
    """
    vc = scheme.vc if vcn is None else vcn
    if Rn is None:
        raise ValueError("vcotc_step needs the cycle's load resistance Rn")
    R = Rn
    _check_denominator(params.topology, vn, vsn)
    d = scheme.d
    rho = R / (R + params.Rc)
    slope = rho * vn / (R * params.C)  # -df/dT
    c = vn + _on_time_term(params, vn, vsn, d, R)
    denom = scheme.ma + slope
    if denom <= 0:
        raise NoValidPeriod("valley constraint has no positive solution for T[n]")
    Tn = (c - vc) / denom
    if params.topology is Topology.BOOST:
        t2 = d * vsn / (vn - vsn)
    else:
        t2 = d * (vsn - vn) / vn
    if not Tn >= (d + t2) * (1.0 - 1e-12):
        raise NoValidPeriod(f"T[n] = {Tn:.6g} s ends before the diode stage ({d + t2:.6g} s)")
    return vc + scheme.ma * Tn, Tn


def bcm_step(params: ConverterParams, scheme, vn: float, vsn: float, vcn: float | None = None,
             Rn: float | None = None) -> tuple[float, float, float]:
    """One boundary-conduction cycle; returns ``(v[n+1], d[n], T[n])``."""
    if Rn is None:
        raise ValueError("bcm_step needs the cycle's load resistance Rn")
    _check_denominator(params.topology, vn, vsn)
    if isinstance(scheme, BCM):
        vc = scheme.vc if vcn is None else vcn
        if params.topology is Topology.BUCK and vsn - vn <= 0:
            raise DenominatorUnderflow("buck BCM needs v[n] < vs[n]")
        dn = bcm_on_time(params, vc, vn, vsn)
    elif isinstance(scheme, BCMCOT):
        dn = scheme.d
    else:
        raise SchemeMismatch(f"{type(scheme).__name__} is not a boundary-conduction scheme")
    Tn = bcm_period(params.topology, dn, vn, vsn)
    rho = Rn / (Rn + params.Rc)
    v_next = (1.0 - rho * Tn / (Rn * params.C)) * vn + _on_time_term(params, vn, vsn, dn, Rn)
    return v_next, dn, Tn


def step(scheme, load: LoadModel, params: ConverterParams, vn: float, vsn: float | None = None,
         vcn: float | None = None) -> Step:
    """Advance the map one cycle under any scheme."""
    vsn = params.vs if vsn is None else vsn
    Rn, _ = effective_resistance(load, vn)
    if is_fixed_frequency(scheme):
        Dn, clamped = duty_constraint(scheme, params, vn, vsn, vcn)
        return Step(power_stage_map(params, vn, vsn, Dn, Rn), Dn, params.T, Rn, clamped)
    if isinstance(scheme, VCOTC):
        v_next, Tn = vcotc_step(params, scheme, vn, vsn, vcn, Rn)
        return Step(v_next, scheme.d, Tn, Rn)
    if isinstance(scheme, (BCM, BCMCOT)):
        v_next, dn, Tn = bcm_step(params, scheme, vn, vsn, vcn, Rn)
        return Step(v_next, dn, Tn, Rn)
    raise SchemeMismatch(f"unknown scheme {scheme!r}")


@dataclass(frozen=True)
class MapSample:
    n: int
    v: float
    duty: float
    T: float
    R: float


def iterate(scheme, load: LoadModel, params: ConverterParams, v0: float, n_cycles: int) -> list[MapSample]:
    """Sampled trajectory ``v[0..n_cycles]``.

    Entry ``n`` holds ``v[n]`` together with the duty, period and load
    resistance used during cycle ``n``; the final entry only carries the
    final voltage (its other fields repeat the last cycle).
    """
    out = []
    v = v0
    last = None
    for n in range(n_cycles):
        try:
            s = step(scheme, load, params, v)
        except ConverterError as exc:
            raise CycleError(n, exc) from exc
        out.append(MapSample(n, v, s.duty, s.T, s.R))
        v = s.v_next
        last = s
    if last is None:
        R, _ = effective_resistance(load, v)
        out.append(MapSample(0, v, float("nan"), params.T or float("nan"), R))
    else:
        out.append(MapSample(n_cycles, v, last.duty, last.T, last.R))
    return out
