"""Reference configurations and numeric checks for the worked examples.

Each ``example_N`` / ``table_N`` function returns a list of :class:`Check`
records comparing a computed value with its reference value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import discrete_map, tables
from .exact import sim
from .freq_response import dc_gain, gain_margin_db, make_transfer
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
    solve_operating_point,
    solve_operating_points,
)
from .schemes import BCM, BCMCOT, CMC, VCOTC, VMC, OpenLoop
from .small_signal import (
    buck_ccl_fixed_points,
    closed_form_coefficients,
    exact_pole_closed_form,
    linearize_numeric,
    open_loop_pole,
    vmc_critical_gain,
)


@dataclass(frozen=True)
class Check:
    name: str
    expected: float
    computed: float
    tol: float

    @property
    def error(self) -> float:
        return abs(self.computed - self.expected)

    @property
    def passed(self) -> bool:
        return self.error <= self.tol

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return (f"{tag}  {self.name}: expected {self.expected:.12g}, computed {self.computed:.12g}, "
                f"|err| {self.error:.3g} <= {self.tol:.3g}")


# --------------------------------------------------------------------------
# reference configurations (key = value form understood by the CLI)

PRESETS: dict[str, dict[str, str]] = {
    "ex1": dict(topology="boost", vs="5", L="5e-6", C="40e-6", Rc="0", fs="100e3", R0="20", scheme="open", D="0.7"),
    "ex2": dict(topology="boost", vs="16", L="208e-6", C="222e-6", Rc="0", fs="3e3", R0="12.5", scheme="open", v="25"),
    "ex3": dict(topology="boost", vs="12", L="1e-6", C="125e-6", Rc="0", fs="700e3", R0="24", scheme="open", v="24"),
    "ex4": dict(topology="boost", vs="5", L="5e-6", C="40e-6", Rc="0", fs="100e3", Io="0.9175", scheme="open", D="0.7"),
    "ex5": dict(topology="boost", vs="5", L="5e-6", C="40e-6", Rc="0", fs="100e3", R0="10", Io="-0.9175",
                scheme="open", D="0.7"),
    "ex6": dict(topology="buck", vs="5", L="5e-6", C="40e-6", Rc="0", fs="200e3", Io="0.4", scheme="cmc", vc="0.9",
                ma="0"),
    "ex7": dict(topology="boost", vs="5", L="5e-6", C="40e-6", Rc="0", R0="20", scheme="bcmcot", d="7e-6"),
}


def _boost1(Rc=0.0):
    return ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, Rc, 1e-5)


def _buck6(Rc=0.0):
    return ConverterParams(Topology.BUCK, 5.0, 5e-6, 40e-6, Rc, 5e-6)


def cmc_at(op: OperatingPoint, mc: float = 1.0) -> CMC:
    """Peak-current scheme whose steady state is ``op`` with slope factor ``mc``."""
    p = op.params
    m1 = p.vs / p.L if op.topology is Topology.BOOST else (p.vs - op.v) / p.L
    ma = (mc - 1.0) * m1
    return CMC(op.D * op.T * (m1 + ma), ma)


def vmc_at(op: OperatingPoint, g: float, Vh: float = 1.0) -> VMC:
    return VMC(g, Vh, op.v + op.D * Vh / g)


def vcotc_at(op: OperatingPoint, ma: float) -> VCOTC:
    return VCOTC(op.D * op.T, op.v - ma * op.T, ma)


def _decay_rate(vs_, v_star, n=None):
    # least-squares slope of log|v_n - v*|
    pts = [(k, math.log(abs(v - v_star))) for k, v in enumerate(vs_[:n]) if v != v_star]
    k_mean = sum(k for k, _ in pts) / len(pts)
    y_mean = sum(y for _, y in pts) / len(pts)
    num = sum((k - k_mean) * (y - y_mean) for k, y in pts)
    den = sum((k - k_mean) ** 2 for k, _ in pts)
    return math.exp(num / den)


# --------------------------------------------------------------------------
# examples


def example_1() -> list[Check]:
    params = _boost1()
    load = Resistive(20.0)
    op = solve_operating_point(params, load, GivenDuty(0.7))
    vstar = sim.find_fixed_point(OpenLoop(0.7), load, params, op.v)
    return [
        Check("ex1 open-loop pole p0", 0.9703, open_loop_pole(op), 1e-4),
        Check("ex1 exact pole (closed form)", 0.9707, exact_pole_closed_form(op), 1e-4),
        Check("ex1 exact pole (simulator)", 0.9707, sim.exact_pole_numeric(OpenLoop(0.7), load, params, vstar), 5e-4),
    ]


def _ex2():
    params = ConverterParams(Topology.BOOST, 16.0, 208e-6, 222e-6, 0.0, 1.0 / 3000.0)
    load = Resistive(12.5)
    return params, load, solve_operating_point(params, load, GivenOutput(25.0))


def example_2() -> list[Check]:
    params, load, op = _ex2()
    g = 0.08
    ss = closed_form_coefficients(vmc_at(op, g), load, op)
    ss0 = closed_form_coefficients(OpenLoop(op.D), load, op)
    loop = make_transfer(ss0, 1.0)  # g = 1, Vh = 1 reference loop
    return [
        Check("ex2 critical VMC gain g*", 0.076, vmc_critical_gain(op, 1.0), 1e-3),
        Check("ex2 closed-loop pole at g = 0.08", -1.08, ss.p, 1e-2),
        Check("ex2 gain margin at ws/2 (dB)", -22.4, gain_margin_db(loop), 0.2),
    ]


def example_3() -> list[Check]:
    params = ConverterParams(Topology.BOOST, 12.0, 1e-6, 125e-6, 0.0, 1.0 / 700e3)
    load = Resistive(24.0)
    op = solve_operating_point(params, load, GivenOutput(24.0))
    p0 = open_loop_pole(op)
    out = []
    for mc in (1.0, 2.0, 5.0):
        ss = closed_form_coefficients(cmc_at(op, mc), load, op)
        out.append(Check(f"ex3 CMC pole equals p0 (mc = {mc:g})", p0, ss.p, 0.0))
    scheme = cmc_at(op, 1.0)
    ss = closed_form_coefficients(scheme, load, op)
    toc = dc_gain(make_transfer(ss, op.rho))
    num = linearize_numeric(scheme, load, params, op.v)
    out.append(Check("ex3 CMC control DC gain", 2.733, toc, 0.01 * 2.733))
    out.append(Check("ex3 CMC control DC gain vs numeric", toc, op.rho * num.gamma_c / (1.0 - num.p), 1e-6 * toc))
    return out


def _ccl_example(Io, R0, ref_dpl, ref_p, ref_exact, tag):
    params = _boost1()
    load = ResistiveParallelCCL(Io, R0)
    scheme = OpenLoop(0.7)
    op = solve_operating_point(params, load, GivenDuty(0.7))
    ss = closed_form_coefficients(scheme, load, op)
    vstar = sim.find_fixed_point(scheme, load, params, op.v)
    checks = [
        Check(f"{tag} load pole shift", ref_dpl, ss.dpl, 1e-4),
        Check(f"{tag} composed pole", ref_p, ss.p, 1e-4),
        Check(f"{tag} exact pole (simulator)", ref_exact, sim.exact_pole_numeric(scheme, load, params, vstar), 5e-4),
    ]
    return checks, params, load, scheme, vstar


def example_4() -> list[Check]:
    checks, params, load, scheme, vstar = _ccl_example(0.9175, math.inf, 0.0125, 0.9828, 0.9829, "ex4")
    traj = sim.simulate(scheme, load, params, (0.0, 19.0), 20)
    checks.insert(2, Check("ex4 exact fixed point", 18.4175, vstar, 0.01))
    checks.append(Check("ex4 v20 from v0 = 19", 18.83, traj.v[-1], 0.01))
    return checks


def example_5() -> list[Check]:
    checks, *_ = _ccl_example(-0.9175, 10.0, -0.0125, 0.9578, 0.9586, "ex5")
    return checks


def example_6() -> list[Check]:
    params = _buck6()
    load = ResistiveParallelCCL(0.4)
    scheme = CMC(0.9)
    orbits = buck_ccl_fixed_points(params, 0.9, 0.4)
    ops = solve_operating_points(params, load, GivenControl(scheme))
    out = [
        Check("ex6 stable orbit M", 0.282, orbits.M_low, 5e-3),
        Check("ex6 unstable orbit M", 0.718, orbits.M_high, 5e-3),
        Check("ex6 saddle-node control vc*", 1.0, orbits.vc_star, 1e-6),
    ]
    for op, ref in zip(ops, (0.9785, 1.0215)):
        p = closed_form_coefficients(scheme, load, op).p
        vstar = sim.find_fixed_point(scheme, load, params, op.v)
        pe = sim.exact_pole_numeric(scheme, load, params, vstar)
        out.append(Check(f"ex6 pole at M = {op.M:.3f}", ref, p, 5e-4))
        out.append(Check(f"ex6 exact pole at M = {op.M:.3f}", p, pe, 1e-3))
    stable = sim.simulate(scheme, load, params, (0.0, 1.5), 200)
    out.append(Check("ex6 |v200 - 1.4| from v0 = 1.5 (bound 0.002)", 0.0, abs(stable.v[-1] - 1.4), 0.002))
    traj = discrete_map.iterate(scheme, load, params, 3.7, 50)
    out.append(Check("ex6 |v50 - 3.6| from v0 = 3.7", 0.029, abs(traj[-1].v - 3.6), 0.005))
    return out


def example_7() -> list[Check]:
    params = ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, 0.0)
    load = Resistive(20.0)
    scheme = BCMCOT(7e-6)
    op = solve_operating_point(params, load, GivenControl(scheme))
    vstar = sim.find_fixed_point(scheme, load, params, op.v)
    traj = sim.simulate(scheme, load, params, (0.0, 19.0), 150)
    gap = abs(vstar - op.v) / vstar
    return [
        Check("ex7 exact fixed point", 18.787, vstar, 0.02),
        Check("ex7 fitted decay rate", 0.975, _decay_rate(traj.v, vstar), 2e-3),
        Check("ex7 map fixed point vs sqrt(dR/2L)", 18.708, op.v, 1e-3),
        Check("ex7 map-vs-exact gap (bound 0.5%)", 0.0, gap, 5e-3),
    ]


# --------------------------------------------------------------------------
# tables


def _rel(x):
    return 1e-12 * max(1.0, abs(x))


def _module_value(quantity, scheme, load, op, mc):
    ss = closed_form_coefficients(scheme, load, op)
    if quantity.startswith("p0"):
        return ss.p0
    if quantity.startswith("dpc"):
        return ss.dpc
    if quantity.startswith("p "):
        return ss.p
    which = "control" if quantity.startswith("Toc") else "source"
    return dc_gain(make_transfer(ss, op.rho, which))


def _entry_scheme(entry, op, mc, table_scheme=None):
    if table_scheme is not None:
        return table_scheme
    return cmc_at(op, mc) if "CMC" in entry.quantity else OpenLoop(op.D)


def _table_checks(label, entries, op, load, mc, table_scheme=None, printed=True):
    out = []
    for e in entries:
        scheme = _entry_scheme(e, op, mc, table_scheme)
        got = _module_value(e.quantity, scheme, load, op, mc)
        ref = e.printed if printed else e.value
        kind = "printed" if printed else "corrected"
        out.append(Check(f"{label} {e.topology.value} {e.quantity} [{kind}]", ref, got, _rel(ref)))
    return out


def _oracle_checks(label, scheme, load, op):
    ss = closed_form_coefficients(scheme, load, op)
    num = linearize_numeric(scheme, load, op.params, op.v)
    return [Check(f"{label} {op.topology.value} pole vs numeric oracle", ss.p, num.p, 1e-6 * max(1.0, abs(ss.p)))]


def table_2() -> list[Check]:
    out = []
    for Rc in (0.0, 0.05):
        printed = Rc == 0.0
        for params, load, D in ((_boost1(Rc), Resistive(20.0), 0.7), (_buck6(Rc), Resistive(10.0), 0.3)):
            op = solve_operating_point(params, load, GivenDuty(D))
            for mc in (1.0, 2.0):
                out += _table_checks(f"table2 Rc={Rc:g} mc={mc:g}", tables.table2(op, mc), op, load, mc,
                                     printed=printed)
                if printed:
                    out += _oracle_checks(f"table2 mc={mc:g} CMC", cmc_at(op, mc), load, op)
    return out


def _pure_loads():
    boost = _boost1()
    buck = _buck6()
    return [
        (boost, ResistiveParallelCCL(0.9175), GivenDuty(0.7)),
        (boost, ResistiveParallelCPL(18.35**2 / 20.0), GivenDuty(0.7)),
        (buck, ResistiveParallelCCL(0.1), GivenDuty(0.3)),
        (buck, ResistiveParallelCPL(0.25), GivenDuty(0.3)),
    ]


def table_3() -> list[Check]:
    out = []
    for params, load, spec in _pure_loads():
        op = solve_operating_point(params, load, spec)
        for mc in (1.0, 3.0):
            out += _table_checks(f"table3 mc={mc:g}", tables.table3(op, load, mc), op, load, mc)
            out += _oracle_checks(f"table3 {type(load).__name__} mc={mc:g} CMC", cmc_at(op, mc), load, op)
        out += _oracle_checks(f"table3 {type(load).__name__} open loop", OpenLoop(op.D), load, op)
    return out


def _variable_frequency_points():
    boost = ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, 0.0)
    buck = ConverterParams(Topology.BUCK, 5.0, 5e-6, 40e-6, 0.0)
    yield boost, Resistive(20.0), BCM(6.0)
    yield boost, Resistive(20.0), BCMCOT(7e-6)
    yield buck, Resistive(10.0), BCM(0.6)
    yield buck, Resistive(10.0), BCMCOT(1e-6)


def table_4() -> list[Check]:
    out = []
    params = _boost1()
    for p, load, D in ((params, Resistive(20.0), 0.7), (_buck6(), Resistive(10.0), 0.3)):
        op = solve_operating_point(p, load, GivenDuty(D))
        for ma in (0.0, 2e4, 1e5):
            scheme = vcotc_at(op, ma)
            out += _table_checks(f"table4 ma={ma:g}", tables.table4(op, scheme), op, load, 1.0, scheme)
            out += _oracle_checks(f"table4 VCOTC ma={ma:g}", scheme, load, op)
    for p, load, scheme in _variable_frequency_points():
        op = solve_operating_point(p, load, GivenControl(scheme))
        out += _table_checks("table4", tables.table4(op, scheme), op, load, 1.0, scheme)
        out += _oracle_checks(f"table4 {type(scheme).__name__}", scheme, load, op)
    return out


TARGETS = {
    "1": example_1,
    "2": example_2,
    "3": example_3,
    "4": example_4,
    "5": example_5,
    "6": example_6,
    "7": example_7,
    "table2": table_2,
    "table3": table_3,
    "table4": table_4,
}


def run(target: str) -> list[Check]:
    if target == "all":
        return [c for fn in TARGETS.values() for c in fn()]
    key = target.replace(" ", "").lower()
    if key not in TARGETS:
        raise KeyError(f"unknown reproduction target {target!r}; choose from {', '.join(TARGETS)} or all")
    return TARGETS[key]()
