"""Converter parameters, load models, and steady-state solving.

All quantities are SI.  The dimensionless groups used throughout are

``K = 2 L / (R T)``, ``beta = rho T**2 / (2 L C)``, ``rho = R / (R + Rc)``,

so that ``beta * K = rho T / (R C)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import partial
from typing import Union

from scipy.optimize import brentq

from .errors import (
    MultipleOperatingPoints,
    NoConvergence,
    NonPositiveResistance,
    NotInDCM,
    RatioOutOfRange,
)
from .schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop

BCM_TOL = 1e-9


class Topology(enum.Enum):
    BOOST = "boost"
    BUCK = "buck"


class Regime(enum.Enum):
    DCM = "DCM"
    BCM = "BCM"


@dataclass(frozen=True)
class ConverterParams:
    """Power-stage parameters.

    ``T`` is the fixed switching period; it may be left ``None`` for the
    variable-frequency schemes, whose period follows from the on-time.
    """

    topology: Topology
    vs: float
    L: float
    C: float
    Rc: float = 0.0
    T: float | None = None

    def __post_init__(self):
        if not isinstance(self.topology, Topology):
            object.__setattr__(self, "topology", Topology(self.topology))
        if self.vs <= 0 or self.L <= 0 or self.C <= 0:
            raise ValueError("vs, L and C must be positive")
        if self.Rc < 0:
            raise ValueError("Rc must be non-negative")
        if self.T is not None and self.T <= 0:
            raise ValueError("T must be positive")

    @property
    def fs(self) -> float:
        return 1.0 / self.T

    @property
    def ws(self) -> float:
        return 2.0 * math.pi / self.T

    def with_vs(self, vs: float) -> "ConverterParams":
        return ConverterParams(self.topology, vs, self.L, self.C, self.Rc, self.T)


# --------------------------------------------------------------------------
# loads


@dataclass(frozen=True)
class Resistive:
    R0: float

    def __post_init__(self):
        if not self.R0 > 0:
            raise ValueError(f"R0 must be positive, got {self.R0}")


@dataclass(frozen=True)
class ResistiveParallelCPL:
    """``R0`` in parallel with a constant-power sink ``P``.

    ``R0 = math.inf`` gives a pure CPL.
    """

    P: float
    R0: float = math.inf

    def __post_init__(self):
        if not self.R0 > 0:
            raise ValueError(f"R0 must be positive, got {self.R0}")


@dataclass(frozen=True)
class ResistiveParallelCCL:
    """``R0`` in parallel with a constant-current sink ``Io`` (may be negative)."""

    Io: float
    R0: float = math.inf

    def __post_init__(self):
        if not self.R0 > 0:
            raise ValueError(f"R0 must be positive, got {self.R0}")


LoadModel = Union[Resistive, ResistiveParallelCPL, ResistiveParallelCCL]


def _conductance(R0: float) -> float:
    return 0.0 if math.isinf(R0) else 1.0 / R0


def effective_resistance(load: LoadModel, v: float) -> tuple[float, float]:
    """Effective load resistance ``R(v)`` and its derivative ``dR/dv``."""
    if isinstance(load, Resistive):
        return load.R0, 0.0
    if v <= 0:
        raise NonPositiveResistance(f"load voltage must be positive, got {v}")
    g0 = _conductance(load.R0)
    if isinstance(load, ResistiveParallelCPL):
        G = g0 + load.P / (v * v)
        dGdv = -2.0 * load.P / v**3
    elif isinstance(load, ResistiveParallelCCL):
        G = g0 + load.Io / v
        dGdv = -load.Io / (v * v)
    else:
        raise TypeError(f"unknown load {load!r}")
    if not G > 0:
        raise NonPositiveResistance(f"effective conductance {G:.6g} S at v = {v:.6g} V")
    R = 1.0 / G
    return R, -dGdv * R * R


def load_current(load: LoadModel, vo: float) -> float:
    """Instantaneous current drawn by the load at output voltage ``vo``."""
    if isinstance(load, Resistive):
        return vo / load.R0
    g0 = _conductance(load.R0)
    if isinstance(load, ResistiveParallelCPL):
        return g0 * vo + load.P / vo
    return g0 * vo + load.Io


# --------------------------------------------------------------------------
# steady-state relations


def conversion_ratio(topology: Topology, D: float, K: float) -> float:
    """Steady-state conversion ratio for duty ``D`` and load group ``K``."""
    if K <= 0:
        raise ValueError(f"K must be positive, got {K}")
    if D == 0.0:
        return 1.0 if topology is Topology.BOOST else 0.0
    if topology is Topology.BOOST:
        return 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * D * D / K))
    # positive root of K M^2 + D^2 M - D^2 = 0, in cancellation-free form
    return 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * K / (D * D)))


def duty_from_ratio(topology: Topology, M: float, K: float) -> tuple[float, float]:
    """Duty ``D`` and diode duty ``D2`` that produce conversion ratio ``M``."""
    if K <= 0:
        raise ValueError(f"K must be positive, got {K}")
    if topology is Topology.BOOST:
        if not M > 1:
            raise RatioOutOfRange(f"boost requires M > 1, got {M}")
        D = math.sqrt(K * M * (M - 1.0))
        return D, K * M / D
    if not 0 < M < 1:
        raise RatioOutOfRange(f"buck requires 0 < M < 1, got {M}")
    D = math.sqrt(K * M * M / (1.0 - M))
    return D, D * (1.0 - M) / M


def dcm_valid(topology: Topology, D: float, M: float) -> bool:
    """Discontinuous-conduction limit on the map's input space.

    Boost: ``1/(1 - D) < M``; buck: ``D < M``.  Both are ``D + D2 < 1``.
    """
    if topology is Topology.BOOST:
        return D < 1.0 and 1.0 / (1.0 - D) < M
    return D < M


def bcm_boundary(topology: Topology, *, D: float | None = None, M: float | None = None) -> float:
    """Value of ``K`` that puts the converter on the CCM/DCM boundary."""
    if (D is None) == (M is None):
        raise TypeError("give exactly one of D or M")
    if topology is Topology.BOOST:
        if D is not None:
            return D * (1.0 - D) ** 2
        return (M - 1.0) / M**3
    return 1.0 - (D if D is not None else M)


# --------------------------------------------------------------------------
# operating point


@dataclass(frozen=True)
class OperatingPoint:
    """A steady state of the converter and its derived groups.

    ``T`` is the steady switching period (the fixed period for fixed-frequency
    schemes) and ``D = d1 / T`` the on-time fraction.
    """

    params: ConverterParams
    M: float
    D: float
    D2: float
    R: float
    T: float
    dRdv: float = 0.0
    v: float = field(init=False)
    K: float = field(init=False)
    beta: float = field(init=False)
    rho: float = field(init=False)
    regime: Regime = field(init=False)

    def __post_init__(self):
        p = self.params
        rho = self.R / (self.R + p.Rc)
        object.__setattr__(self, "v", self.M * p.vs)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "K", 2.0 * p.L / (self.R * self.T))
        object.__setattr__(self, "beta", rho * self.T**2 / (2.0 * p.L * p.C))
        span = self.D + self.D2
        regime = Regime.BCM if abs(span - 1.0) <= BCM_TOL else Regime.DCM
        object.__setattr__(self, "regime", regime)

    @property
    def topology(self) -> Topology:
        return self.params.topology

    @property
    def vs(self) -> float:
        return self.params.vs

    @property
    def a(self) -> float:
        """``rho T / (R C)``, the per-cycle RC discharge fraction."""
        return self.beta * self.K

    @property
    def in_dcm(self) -> bool:
        return self.D + self.D2 < 1.0 - BCM_TOL

    def as_dict(self) -> dict:
        return {
            "topology": self.topology.value,
            "M": self.M,
            "D": self.D,
            "D2": self.D2,
            "v": self.v,
            "R": self.R,
            "T": self.T,
            "K": self.K,
            "beta": self.beta,
            "rho": self.rho,
            "regime": self.regime.value,
            "dcm_valid": self.in_dcm,
        }


def diode_duty(topology: Topology, D: float, M: float, K: float) -> float:
    if D == 0.0:
        return 0.0
    if topology is Topology.BOOST:
        return K * M / D
    return D * (1.0 - M) / M


def _make_point(params, load, v, D, T, bcm=False):
    R, dRdv = effective_resistance(load, v)
    M = v / params.vs
    K = 2.0 * params.L / (R * T)
    D2 = diode_duty(params.topology, D, M, K)
    op = OperatingPoint(params, M, D, D2, R, T, dRdv)
    if not bcm and D + D2 > 1.0 + BCM_TOL:
        raise NotInDCM(f"D + D2 = {D + D2:.6g} >= 1 at v = {v:.6g} V")
    return op


# --------------------------------------------------------------------------
# operating-point solver


@dataclass(frozen=True)
class GivenDuty:
    D: float


@dataclass(frozen=True)
class GivenOutput:
    v: float


@dataclass(frozen=True)
class GivenControl:
    scheme: object


def _v_grid(params: ConverterParams, n: int = 600) -> list[float]:
    vs = params.vs
    if params.topology is Topology.BOOST:
        return [vs * (1.0 + 10.0 ** (-8.0 + 12.0 * k / (n - 1))) for k in range(n)]
    half = n // 2
    lo = [10.0 ** (-8.0 + (8.0 - math.log10(2.0)) * k / (half - 1)) for k in range(half)]
    hi = [1.0 - m for m in reversed(lo[:-1])]
    return [vs * m for m in lo + hi]


def _bracket_roots(fun, grid):
    """Brent-refined roots of ``fun`` between sign changes on ``grid``.

    ``fun`` may return ``None`` where it is undefined; brackets never span
    such points.
    """
    values = []
    for x in grid:
        try:
            values.append(fun(x))
        except (NonPositiveResistance, ZeroDivisionError, ValueError):
            values.append(None)
    roots = []
    for (xa, fa), (xb, fb) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if fa is None or fb is None:
            continue
        if fa == 0.0:
            roots.append(xa)
        elif fa * fb < 0.0:
            try:
                x = brentq(lambda x: fun(x), xa, xb, xtol=1e-300, rtol=1e-15, maxiter=200)
            except RuntimeError as exc:
                raise NoConvergence(str(exc)) from exc
            roots.append(x)
    return roots


def _require_T(params):
    if params.T is None:
        raise ValueError("fixed-frequency scheme requires a switching period T")
    return params.T


def cmc_duty(params: ConverterParams, scheme: CMC, v: float, vs: float | None = None) -> float:
    """Unclamped CMC duty: peak current ``vc`` reached under ramp ``ma``."""
    vs = params.vs if vs is None else vs
    T = _require_T(params)
    m1 = vs / params.L if params.topology is Topology.BOOST else (vs - v) / params.L
    return scheme.vc / (T * (m1 + scheme.ma))


def slope_factor(params: ConverterParams, scheme: CMC, v: float) -> float:
    """``m_c = 1 + m_a / m_1`` with ``m_1`` the on-stage current slope."""
    m1 = params.vs / params.L if params.topology is Topology.BOOST else (params.vs - v) / params.L
    return 1.0 + scheme.ma / m1


def bcm_on_time(params: ConverterParams, vc: float, v: float, vs: float | None = None) -> float:
    vs = params.vs if vs is None else vs
    if params.topology is Topology.BOOST:
        return vc * params.L / vs
    return vc * params.L / (vs - v)


def bcm_period(topology: Topology, d: float, v: float, vs: float) -> float:
    if topology is Topology.BOOST:
        return d * v / (v - vs)
    return d * vs / v


def _fixed_duty_residual(params, load, duty_of_v):
    # v/vs - M(D(v), K(R(v))) on the fixed period
    T = params.T

    def r(v):
        D = duty_of_v(v)
        if D is None or not 0.0 < D < 1.0:
            return None
        R, _ = effective_resistance(load, v)
        K = 2.0 * params.L / (R * T)
        return v / params.vs - conversion_ratio(params.topology, D, K)

    return r


def solve_operating_points(params: ConverterParams, load: LoadModel, spec) -> list[OperatingPoint]:
    """Every DCM steady state compatible with ``spec``, sorted by output voltage.

    ``spec`` is :class:`GivenDuty`, :class:`GivenOutput` or
    :class:`GivenControl`.  Voltage-dependent loads are handled by solving
    the scalar self-consistency condition between ``R(v)`` and the
    topology's steady-state relation.  Roots that violate the DCM limit are
    dropped; if every root does, :class:`NotInDCM` is raised.
    """
    points, rejected = [], None
    for make in _candidate_points(params, load, spec):
        try:
            points.append(make())
        except NotInDCM as exc:
            rejected = exc
    if not points and rejected is not None:
        raise rejected
    return sorted(points, key=lambda op: op.v)


def _candidate_points(params: ConverterParams, load: LoadModel, spec):
    # deferred constructors, one per root of the steady-state residual
    topo = params.topology
    if isinstance(spec, GivenControl) and isinstance(spec.scheme, OpenLoop):
        spec = GivenDuty(spec.scheme.D)

    if isinstance(spec, GivenOutput):
        T = _require_T(params)
        R, _ = effective_resistance(load, spec.v)
        K = 2.0 * params.L / (R * T)
        D, _ = duty_from_ratio(topo, spec.v / params.vs, K)
        return [partial(_make_point, params, load, spec.v, D, T)]

    if isinstance(spec, GivenDuty):
        T = _require_T(params)
        if isinstance(load, Resistive):
            K = 2.0 * params.L / (load.R0 * T)
            M = conversion_ratio(topo, spec.D, K)
            if spec.D == 0.0:
                raise RatioOutOfRange("zero duty has no DCM operating point")
            return [partial(_make_point, params, load, M * params.vs, spec.D, T)]
        fun = _fixed_duty_residual(params, load, lambda v: spec.D)
        roots = _bracket_roots(fun, _v_grid(params))
        return [partial(_make_point, params, load, v, spec.D, T) for v in roots]

    if not isinstance(spec, GivenControl):
        raise TypeError(f"unknown operating-point spec {spec!r}")
    scheme = spec.scheme
    L = params.L

    if isinstance(scheme, VMC):
        T = _require_T(params)

        def duty(v):
            return scheme.g * (scheme.vc - v) / scheme.Vh

        fun = _fixed_duty_residual(params, load, lambda v: duty(v) if 0 < duty(v) < 0.999 else None)
        roots = _bracket_roots(fun, _v_grid(params))
        return [partial(_make_point, params, load, v, duty(v), T) for v in roots]

    if isinstance(scheme, CMC):
        T = _require_T(params)

        def duty(v):
            m1 = params.vs / L if topo is Topology.BOOST else (params.vs - v) / L
            if m1 + scheme.ma <= 0:
                return None
            return scheme.vc / (T * (m1 + scheme.ma))

        fun = _fixed_duty_residual(params, load, duty)
        roots = _bracket_roots(fun, _v_grid(params))
        return [partial(_make_point, params, load, v, duty(v), T) for v in roots]

    if isinstance(scheme, VCOTC):
        d = scheme.d

        def v_of_T(T):
            return scheme.vc + scheme.ma * T

        def fun(T):
            v = v_of_T(T)
            if v <= 0:
                return None
            R, _ = effective_resistance(load, v)
            K = 2.0 * L / (R * T)
            return v / params.vs - conversion_ratio(topo, d / T, K)

        grid = [d * (1.0 + 10.0 ** (-6.0 + 10.0 * k / 599)) for k in range(600)]
        roots = _bracket_roots(fun, grid)
        return [partial(_make_point, params, load, v_of_T(T), d / T, T) for T in roots]

    if isinstance(scheme, (BCM, BCMCOT)):

        def on_time(v):
            if isinstance(scheme, BCMCOT):
                return scheme.d
            return bcm_on_time(params, scheme.vc, v)

        def fun(v):
            d = on_time(v)
            if d <= 0:
                return None
            R, _ = effective_resistance(load, v)
            M = v / params.vs
            if topo is Topology.BOOST:
                return M - math.sqrt(d * R / (2.0 * L))
            return M / (1.0 - M) - d * R / (2.0 * L)

        roots = _bracket_roots(fun, _v_grid(params))
        points = []
        for v in roots:
            d = on_time(v)
            T = bcm_period(topo, d, v, params.vs)
            points.append(partial(_make_point, params, load, v, d / T, T, bcm=True))
        return points

    raise TypeError(f"unknown scheme {scheme!r}")


def solve_operating_point(params: ConverterParams, load: LoadModel, spec) -> OperatingPoint:
    """The unique steady state for ``spec``.

    Raises
    ------
    NoConvergence
        No steady state was found.
    MultipleOperatingPoints
        Several coexist (e.g. a CMC buck feeding a constant-current load);
        the exception carries all of them.
    """
    points = solve_operating_points(params, load, spec)
    if not points:
        raise NoConvergence("no operating point found")
    if len(points) > 1:
        raise MultipleOperatingPoints(points)
    return points[0]
