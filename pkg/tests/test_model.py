import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcmpoles.errors import NonPositiveResistance, NotInDCM, RatioOutOfRange
from dcmpoles.model import (
    ConverterParams,
    GivenControl,
    GivenDuty,
    GivenOutput,
    Regime,
    Resistive,
    ResistiveParallelCCL,
    ResistiveParallelCPL,
    Topology,
    bcm_boundary,
    conversion_ratio,
    dcm_valid,
    duty_from_ratio,
    effective_resistance,
    load_current,
    solve_operating_point,
    solve_operating_points,
)
from dcmpoles.schemes import BCMCOT, CMC

BOOST = ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, 0.0, 1e-5)
BUCK = ConverterParams(Topology.BUCK, 5.0, 5e-6, 40e-6, 0.0, 5e-6)


class TestConversionRatio:
    def test_example_boost_point(self):
        assert conversion_ratio(Topology.BOOST, 0.7, 0.05) == pytest.approx(3.6702, abs=1e-4)

    @pytest.mark.parametrize("topology, expected", [(Topology.BOOST, 1.0), (Topology.BUCK, 0.0)])
    def test_zero_duty(self, topology, expected):
        assert conversion_ratio(topology, 0.0, 0.1) == expected

    def test_rejects_nonpositive_K(self):
        with pytest.raises(ValueError):
            conversion_ratio(Topology.BOOST, 0.5, 0.0)

    @given(D=st.floats(1e-3, 0.99), K=st.floats(1e-4, 10.0))
    @settings(max_examples=1000)
    def test_round_trip_boost(self, D, K):
        M = conversion_ratio(Topology.BOOST, D, K)
        D_back, _ = duty_from_ratio(Topology.BOOST, M, K)
        assert D_back == pytest.approx(D, rel=1e-12)

    @given(D=st.floats(1e-3, 0.99), K=st.floats(1e-4, 10.0))
    @settings(max_examples=1000)
    def test_round_trip_buck(self, D, K):
        M = conversion_ratio(Topology.BUCK, D, K)
        D_back, _ = duty_from_ratio(Topology.BUCK, M, K)
        assert D_back == pytest.approx(D, rel=1e-12)

    @given(D=st.floats(1e-3, 0.98), dD=st.floats(1e-4, 1e-2), K=st.floats(1e-3, 1.0))
    def test_boost_monotone_in_duty(self, D, dD, K):
        assert conversion_ratio(Topology.BOOST, D + dD, K) > conversion_ratio(Topology.BOOST, D, K)

    @pytest.mark.parametrize("topology, M", [(Topology.BOOST, 1.0), (Topology.BOOST, 0.5), (Topology.BUCK, 1.0),
                                             (Topology.BUCK, 0.0)])
    def test_ratio_out_of_range(self, topology, M):
        with pytest.raises(RatioOutOfRange):
            duty_from_ratio(topology, M, 0.1)


class TestBoundaries:
    def test_dcm_valid_boost(self):
        assert dcm_valid(Topology.BOOST, 0.7, 3.67)
        assert not dcm_valid(Topology.BOOST, 0.7, 3.0)

    def test_dcm_valid_buck(self):
        assert dcm_valid(Topology.BUCK, 0.3, 0.5)
        assert not dcm_valid(Topology.BUCK, 0.6, 0.5)

    @pytest.mark.parametrize("D", [0.2, 0.5, 0.8])
    def test_boost_boundary_consistent(self, D):
        K = bcm_boundary(Topology.BOOST, D=D)
        M = conversion_ratio(Topology.BOOST, D, K)
        assert M == pytest.approx(1 / (1 - D), rel=1e-12)
        assert bcm_boundary(Topology.BOOST, M=M) == pytest.approx(K, rel=1e-12)

    def test_needs_exactly_one(self):
        with pytest.raises(TypeError):
            bcm_boundary(Topology.BUCK)


class TestLoads:
    def test_resistive(self):
        assert effective_resistance(Resistive(10.0), 3.0) == (10.0, 0.0)

    def test_cpl(self):
        R, dR = effective_resistance(ResistiveParallelCPL(10.0), 10.0)
        assert R == pytest.approx(10.0)
        assert dR == pytest.approx(2.0)

    def test_ccl_current(self):
        assert load_current(ResistiveParallelCCL(0.5, 10.0), 5.0) == pytest.approx(1.0)

    def test_cpl_needs_positive_voltage(self):
        with pytest.raises(NonPositiveResistance):
            effective_resistance(ResistiveParallelCPL(10.0), 0.0)

    def test_net_source_is_not_a_load(self):
        with pytest.raises(NonPositiveResistance):
            effective_resistance(ResistiveParallelCCL(-2.0, 10.0), 5.0)

    @pytest.mark.parametrize("cls", [Resistive, lambda R: ResistiveParallelCPL(1.0, R)])
    def test_rejects_nonpositive_R0(self, cls):
        with pytest.raises(ValueError):
            cls(0.0)


class TestParams:
    @pytest.mark.parametrize("kw", [dict(vs=0.0), dict(L=-1.0), dict(C=0.0), dict(Rc=-0.1), dict(T=0.0)])
    def test_validation(self, kw):
        base = dict(topology=Topology.BOOST, vs=5.0, L=5e-6, C=40e-6, Rc=0.0, T=1e-5)
        base.update(kw)
        with pytest.raises(ValueError):
            ConverterParams(**base)

    def test_topology_from_string(self):
        assert ConverterParams("buck", 5.0, 1e-6, 1e-6).topology is Topology.BUCK


class TestOperatingPoint:
    def test_example_boost(self):
        op = solve_operating_point(BOOST, Resistive(20.0), GivenDuty(0.7))
        assert op.M == pytest.approx(3.6702, abs=1e-4)
        assert op.K == pytest.approx(0.05)
        assert op.a == pytest.approx(0.0125)
        assert op.regime is Regime.DCM and op.in_dcm

    def test_given_output(self):
        op = solve_operating_point(BOOST, Resistive(20.0), GivenOutput(15.0))
        assert op.v == 15.0
        check = solve_operating_point(BOOST, Resistive(20.0), GivenDuty(op.D))
        assert check.v == pytest.approx(15.0, rel=1e-12)

    def test_ccm_rejected(self):
        with pytest.raises(NotInDCM):
            solve_operating_point(BOOST, Resistive(1.0), GivenDuty(0.7))

    def test_both_buck_ccl_orbits(self):
        pts = solve_operating_points(BUCK, ResistiveParallelCCL(0.4), GivenControl(CMC(0.9)))
        assert [round(p.M, 3) for p in pts] == [0.282, 0.718]

    def test_bcm_cot_boost(self):
        params = ConverterParams(Topology.BOOST, 5.0, 5e-6, 40e-6, 0.0)
        op = solve_operating_point(params, Resistive(20.0), GivenControl(BCMCOT(7e-6)))
        assert op.v == pytest.approx(5.0 * math.sqrt(14.0), rel=1e-10)
        assert op.regime is Regime.BCM

    @pytest.mark.parametrize("P, R0", [(4.0, 20.0), (4.0, 40.0), (12.0, math.inf)])
    def test_cpl_load_consistency(self, P, R0):
        load = ResistiveParallelCPL(P, R0)
        op = solve_operating_point(BOOST, load, GivenDuty(0.6))
        g0 = 0.0 if math.isinf(R0) else 1 / R0
        assert abs(1 / op.R - g0 - P / op.v**2) <= 1e-12

    @pytest.mark.parametrize("Io", [0.5, -0.2])
    def test_ccl_load_consistency(self, Io):
        load = ResistiveParallelCCL(Io, 30.0)
        op = solve_operating_point(BOOST, load, GivenDuty(0.6))
        assert abs(1 / op.R - 1 / 30.0 - Io / op.v) <= 1e-12

    @given(D=st.floats(0.05, 0.9), R=st.floats(5.0, 200.0))
    def test_steady_state_residual(self, D, R):
        try:
            op = solve_operating_point(BOOST, Resistive(R), GivenDuty(D))
        except NotInDCM:
            return
        assert abs(op.M**2 - op.M - op.D**2 / op.K) <= 1e-10

    def test_as_dict_keys(self):
        d = solve_operating_point(BUCK, Resistive(10.0), GivenDuty(0.3)).as_dict()
        assert {"M", "D", "D2", "v", "R", "K", "beta", "rho", "dcm_valid"} <= set(d)
