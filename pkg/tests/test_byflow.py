import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from modgen import byflow, lcgeom
from modgen.byflow import FlowKind, FlowSpec, ThermalFlowParams
from modgen.errors import DomainError
from modgen.lcgeom import LightConePoint

betas = st.sampled_from([0.5, 1.0, 2.0, 7.5])


def test_nu_plus_multiprecision_values():
    # values from 30-digit mpmath evaluation of the defining logarithm
    assert byflow.nu_plus(0.1, 0.5, 1.0) == pytest.approx(0.405903402892922258070734550349, rel=1e-14)
    assert byflow.nu_plus(-0.3, 2.0, 0.5) == pytest.approx(2.14999999999917915306916545328, rel=1e-14)
    assert byflow.nu_minus(-0.3, -0.7, 2.0) == pytest.approx(-0.25346303136233520388919794674, rel=1e-14)


def test_zero_time_and_apex_are_fixed():
    x = np.linspace(-3, 3, 13)
    assert np.array_equal(byflow.nu_plus(0.0, x, 1.0), x) or np.allclose(byflow.nu_plus(0.0, x, 1.0), x, rtol=1e-15)
    assert byflow.nu_plus(0.8, 0.0, 1.0) == 0.0
    assert byflow.nu_minus(-0.8, 0.0, 1.0) == 0.0


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(0.01, 3), betas)
def test_nu_plus_group_law_on_positive_half_line(s, t, x, beta):
    a = byflow.nu_plus(s, byflow.nu_plus(t, x, beta), beta)
    assert a == pytest.approx(byflow.nu_plus(s + t, x, beta), rel=1e-12)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-3, -0.01), betas)
def test_nu_minus_group_law_on_negative_half_line(s, t, x, beta):
    a = byflow.nu_minus(s, byflow.nu_minus(t, x, beta), beta)
    assert a == pytest.approx(byflow.nu_minus(s + t, x, beta), rel=1e-12)


@given(st.floats(-2, 2), st.floats(-2, 2), betas)
def test_minus_is_mirror_of_plus(t, x, beta):
    assume(byflow.admissible_plus(-t, -x, beta))
    assert byflow.nu_minus(t, x, beta) == -byflow.nu_plus(-t, -x, beta)


@given(st.floats(-1, 1), st.floats(0.0, 3), betas)
def test_positive_half_line_is_invariant(t, x, beta):
    assert byflow.nu_plus(t, x, beta) >= 0.0


def test_inadmissible_point_reports_t_and_x():
    assert not byflow.admissible_plus(-1.0, -2.0, 1.0)
    with pytest.raises(DomainError, match=r"t=-1\.0, x=-2\.0"):
        byflow.nu_plus(-1.0, -2.0, 1.0)
    with pytest.raises(DomainError, match="nu_minus"):
        byflow.nu_minus(1.0, 2.0, 1.0)


@pytest.mark.parametrize("beta", [0.0, -1.0, np.inf, np.nan])
def test_beta_validation(beta):
    with pytest.raises(DomainError):
        byflow.nu_plus(0.1, 0.2, beta)
    with pytest.raises(DomainError):
        ThermalFlowParams(beta)


def test_velocity_matches_time_derivative():
    h = 1e-5
    for nu, vel, x in ((byflow.nu_plus, byflow.nu_plus_velocity, np.linspace(-0.5, 2, 11)),
                       (byflow.nu_minus, byflow.nu_minus_velocity, np.linspace(-2, 0.5, 11))):
        fd = (nu(h, x, 1.3) - nu(-h, x, 1.3)) / (2 * h)
        assert np.allclose(fd, vel(x, 1.3), rtol=1e-6, atol=1e-8)


def test_large_beta_approaches_dilation():
    x = np.linspace(-1, 1, 21)
    for t in (-0.2, 0.0, 0.4):
        assert np.max(np.abs(byflow.nu_plus(t, x, 1e6) - np.exp(-2 * np.pi * t) * x)) < 1e-4


def test_thermal_spec_needs_params():
    with pytest.raises(DomainError):
        FlowSpec(FlowKind.THERMAL_PLUS)


def test_flow_region_axis_assignment():
    q = LightConePoint(0.4, -0.3)
    p = ThermalFlowParams(1.0)
    wedge = byflow.flow_region(FlowSpec(FlowKind.THERMAL_PLUS, lcgeom.RIGHT_WEDGE, p), 0.2, q)
    assert wedge.xp == byflow.nu_plus(0.2, 0.4, 1.0)
    assert wedge.xm == byflow.nu_minus(0.2, -0.3, 1.0)
    cone = byflow.flow_region(FlowSpec(FlowKind.THERMAL_PLUS, lcgeom.FORWARD_CONE, p), 0.2, LightConePoint(0.4, 0.3))
    assert cone.xm == byflow.nu_plus(0.2, 0.3, 1.0)
    back = byflow.flow_region(FlowSpec(FlowKind.THERMAL_MINUS, lcgeom.BACKWARD_CONE, p), 0.2, LightConePoint(-0.4, -0.3))
    assert back.xp == byflow.nu_minus(0.2, -0.4, 1.0)


def test_flow_region_names_failing_coordinate():
    spec = FlowSpec(FlowKind.THERMAL_PLUS, lcgeom.RIGHT_WEDGE, ThermalFlowParams(1.0))
    with pytest.raises(DomainError, match="^x_- coordinate"):
        byflow.flow_region(spec, 1.0, LightConePoint(0.5, 2.0))
    with pytest.raises(DomainError, match="^x_\\+ coordinate"):
        byflow.flow_region(spec, -1.0, LightConePoint(-2.0, -0.5))


def test_reference_flows_through_flow_region():
    q = LightConePoint(0.5, -0.25)
    b = byflow.flow_region(FlowSpec(FlowKind.BOOST, lcgeom.RIGHT_WEDGE), 0.1, q)
    assert b == lcgeom.boost_flow(0.1, q)
    c = byflow.flow_region(FlowSpec(FlowKind.CONFORMAL_DC), 1.0, LightConePoint(0.0, 0.0))
    assert c.xp == pytest.approx(np.tanh(0.5), rel=1e-15)
