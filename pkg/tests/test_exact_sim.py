import io
import math

import pytest

from dcmpoles import reproduce
from dcmpoles.errors import CycleError, LeftDCM, SchemeInfeasible
from dcmpoles.exact import sim
from dcmpoles.model import (
    ConverterParams,
    GivenControl,
    GivenDuty,
    Resistive,
    ResistiveParallelCCL,
    ResistiveParallelCPL,
    Topology,
    solve_operating_point,
    solve_operating_points,
)
from dcmpoles.schemes import BCM, BCMCOT, CMC, OpenLoop
from dcmpoles.small_signal import closed_form_coefficients, exact_pole_closed_form

BOOST = ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, 0.0, 1e-5)
BUCK = ConverterParams(Topology.BUCK, 5.0, 5e-6, 40e-6, 0.0, 5e-6)
VF_BOOST = ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, 0.0)
VF_BUCK = ConverterParams(Topology.BUCK, 5.0, 5e-6, 40e-6, 0.0)


def _example_points():
    load = Resistive(20.0)
    op = solve_operating_point(BOOST, load, GivenDuty(0.7))
    yield "open", OpenLoop(0.7), load, BOOST, op
    yield "vmc", reproduce.vmc_at(op, 0.01), load, BOOST, op
    yield "cmc", reproduce.cmc_at(op, 1.5), load, BOOST, op
    yield "vcotc", reproduce.vcotc_at(op, 3e4), load, BOOST, op
    ccl = ResistiveParallelCCL(0.9175)
    yield "ccl", OpenLoop(0.7), ccl, BOOST, solve_operating_point(BOOST, ccl, GivenDuty(0.7))
    cpl = ResistiveParallelCPL(15.0)
    yield "cpl", OpenLoop(0.7), cpl, BOOST, solve_operating_point(BOOST, cpl, GivenDuty(0.7))
    yield "buck-cmc", CMC(0.9), ResistiveParallelCCL(0.4), BUCK, \
        solve_operating_points(BUCK, ResistiveParallelCCL(0.4), GivenControl(CMC(0.9)))[0]
    for scheme, params, R in ((BCM(6.0), VF_BOOST, 20.0), (BCMCOT(7e-6), VF_BOOST, 20.0),
                              (BCM(0.6), VF_BUCK, 10.0), (BCMCOT(1e-6), VF_BUCK, 10.0)):
        yield type(scheme).__name__, scheme, Resistive(R), params, \
            solve_operating_point(params, Resistive(R), GivenControl(scheme))


class TestCycleMap:
    def test_open_loop_dcm_invariant(self):
        res = sim.cycle_map(OpenLoop(0.7), Resistive(20.0), BOOST, 18.4)
        r = res.report
        assert r.d1 == pytest.approx(7e-6, rel=1e-14)
        assert r.d1 < r.d2 < r.T == 1e-5
        assert res.iL_end == 0.0

    def test_cmc_turn_off_residual(self):
        scheme = CMC(6.0, 2e5)
        res = sim.cycle_map(scheme, Resistive(20.0), BOOST, 18.0, dense=True)
        d1 = res.report.d1
        iL_at_off = max(i for t, i, v, s in res.waveform if t <= d1 + 1e-15)
        assert d1 == pytest.approx(6.0 / (1e6 + 2e5), rel=1e-9)
        assert iL_at_off <= 6.0 - 2e5 * d1 + 1e-9

    def test_vcotc_valley_residual(self):
        op = solve_operating_point(BOOST, Resistive(20.0), GivenDuty(0.7))
        scheme = reproduce.vcotc_at(op, 3e4)
        res = sim.cycle_map(scheme, Resistive(20.0), BOOST, op.v)
        assert abs(res.v_end - (scheme.vc + scheme.ma * res.report.T)) <= 1e-9

    def test_bcm_ends_at_zero_current(self):
        res = sim.cycle_map(BCM(6.0), Resistive(20.0), VF_BOOST, 18.0)
        assert res.report.T == res.report.d2
        assert res.iL_end == 0.0

    def test_left_dcm(self):
        with pytest.raises(LeftDCM):
            sim.cycle_map(OpenLoop(0.9), Resistive(20.0), BOOST, 6.0)

    def test_never_reaches_peak(self):
        with pytest.raises(SchemeInfeasible):
            sim.cycle_map(BCM(6.0), Resistive(20.0), ConverterParams(Topology.BUCK, 5.0, 5e-6, 40e-6), 5.5)


class TestFixedPoints:
    @pytest.mark.parametrize("name, scheme, load, params, op", list(_example_points()),
                             ids=[c[0] for c in _example_points()])
    def test_map_vs_exact_pole(self, name, scheme, load, params, op):
        vstar = sim.find_fixed_point(scheme, load, params, op.v)
        pe = sim.exact_pole_numeric(scheme, load, params, vstar)
        p = closed_form_coefficients(scheme, load, op).p
        assert abs(p - pe) <= 0.01

    @pytest.mark.parametrize("R", [20.0, 40.0])
    @pytest.mark.parametrize("D", [0.3, 0.4, 0.5, 0.6, 0.7])
    def test_closed_form_exact_pole(self, R, D):
        load = Resistive(R)
        op = solve_operating_point(BOOST, load, GivenDuty(D))
        vstar = sim.find_fixed_point(OpenLoop(D), load, BOOST, op.v)
        pe = sim.exact_pole_numeric(OpenLoop(D), load, BOOST, vstar)
        assert pe == pytest.approx(exact_pole_closed_form(op), abs=5e-4)

    @pytest.mark.parametrize("scheme, load, params, spec", [
        (OpenLoop(0.7), Resistive(20.0), BOOST, GivenDuty(0.7)),
        (BCMCOT(7e-6), Resistive(20.0), VF_BOOST, GivenControl(BCMCOT(7e-6))),
    ])
    def test_decay_rate(self, scheme, load, params, spec):
        op = solve_operating_point(params, load, spec)
        vstar = sim.find_fixed_point(scheme, load, params, op.v)
        pe = sim.exact_pole_numeric(scheme, load, params, vstar)
        traj = sim.simulate(scheme, load, params, (0.0, vstar * 1.02), 20)
        rate = reproduce._decay_rate(traj.v, vstar)
        assert math.log(rate) == pytest.approx(math.log(pe), rel=0.02)

    def test_unstable_orbit_located(self):
        load = ResistiveParallelCCL(0.4)
        vstar = sim.find_fixed_point(CMC(0.9), load, BUCK, 3.59)
        assert vstar == pytest.approx(3.595, abs=0.01)
        assert sim.exact_pole_numeric(CMC(0.9), load, BUCK, vstar) > 1


class TestSimulate:
    def test_samples_layout(self):
        res = sim.simulate(OpenLoop(0.7), Resistive(20.0), BOOST, (0.0, 18.0), 5)
        assert [s.n for s in res.samples] == list(range(6))
        assert res.v[0] == 18.0

    def test_dense_waveform(self):
        res = sim.simulate(OpenLoop(0.7), Resistive(20.0), BOOST, (0.0, 18.0), 2, dense=True)
        ts = [w[0] for w in res.waveform]
        assert ts == sorted(ts)
        assert ts[-1] == pytest.approx(2e-5)
        assert {w[3] for w in res.waveform} == {1, 2, 3}

    def test_cycle_error_index(self):
        with pytest.raises(CycleError) as info:
            sim.simulate(OpenLoop(0.95), Resistive(20.0), BOOST, (0.0, 120.0), 200)
        assert info.value.index > 0
        assert isinstance(info.value.error, LeftDCM)

    def test_csv_writers(self):
        res = sim.simulate(OpenLoop(0.7), Resistive(20.0), BOOST, (0.0, 18.0), 2, dense=True)
        buf = io.StringIO()
        sim.write_samples_csv(res, buf)
        assert buf.getvalue().splitlines()[0] == "n,v_n,d1_s,Tn_s"
        buf = io.StringIO()
        sim.write_waveform_csv(res, buf)
        lines = buf.getvalue().splitlines()
        assert lines[0] == "t_s,iL_A,v_V,stage_id"
        assert len(lines) == len(res.waveform) + 1
