import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from debranges_extremal.extremal import (
    KINDS,
    build_extremal,
    closed_form_coincidence,
    closed_form_optimal,
    closed_form_value,
    eval_pair,
    eval_pair_real,
    gap_integrand,
    gap_localization,
    interpolation_check,
    optimal_value_check,
    quadrature_optimal,
    scaled_asymptotics_check,
    target,
    verify_heaviside_constraints,
    verify_isometry,
    verify_sampling_identity,
)
from debranges_extremal.hb import HBParams, kernel, kernel_diag, zeros_of_B

CF_1 = 1.4643931013063549  # pi/(pi - tanh pi), mpmath
CF_HALF = 2.4031374083085585  # (pi/2)/(pi/2 - tanh(pi/2)), mpmath


def mp_closed_form(a, delta=1.0):
    with mp.workdps(40):
        a, delta = mp.mpf(a), mp.mpf(delta)
        b = a / delta
        x = mp.pi * b * delta
        return mp.pi * b / (x - mp.tanh(x))


def test_closed_form_values():
    assert closed_form_value(1.0) == pytest.approx(CF_1, rel=1e-15)
    assert closed_form_value(1.0, "de_branges") == pytest.approx(CF_1, rel=1e-13)
    assert closed_form_value(1.0, "de-branges") == pytest.approx(CF_1, rel=1e-13)
    assert closed_form_value(0.5) == pytest.approx(CF_HALF, rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(1e-4, 50), st.floats(1e-3, 1e3))
def test_closed_form_against_mpmath(a, delta):
    assert closed_form_value(a, "heaviside", delta) == pytest.approx(float(mp_closed_form(a, delta)), rel=1e-12)


def test_closed_form_contract():
    with pytest.raises(ValueError):
        closed_form_value(1.0, "de_branges", 2.0)
    with pytest.raises(ValueError):
        closed_form_value(-1.0)
    with pytest.raises(ValueError):
        closed_form_value(1.0, "heaviside", 0.0)
    with pytest.raises(ValueError):
        closed_form_value(1.0, "gaussian")


def test_closed_form_coincidence():
    rep = closed_form_coincidence((0.25, 0.5, 1.0, 2.0, 4.0))
    assert rep.overall_pass
    for e in rep.entries:
        assert e.abs_err <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 20))
def test_closed_form_coincidence_property(a):
    prod = closed_form_value(a) * a * a * float(kernel_diag(HBParams(a), 0.0))
    assert prod == pytest.approx(1.0, abs=1e-12)


def test_build_contract():
    with pytest.raises(ValueError):
        build_extremal(1.0, delta=0.0)
    with pytest.raises(ValueError):
        build_extremal(1.0, kind="triangle")
    assert set(KINDS) == {"heaviside", "de_branges"}


def test_pair_metadata(pair1):
    assert pair1.hb.tau == pytest.approx(1.2894554862191198, rel=1e-14)
    assert complex(pair1.F(1j)).real == pytest.approx(-31.915746413610971, rel=1e-13)
    assert pair1.b == 1.0
    scaled = pair1.with_delta(2.0)
    assert scaled.b == 0.5 and scaled.G is pair1.G
    assert closed_form_optimal(pair1) == pytest.approx(CF_1, rel=1e-15)


def test_pair_values(pair1):
    assert eval_pair(pair1, "+", 0.0) == 1.0
    assert eval_pair(pair1, "-", 0.0) == 0.0
    assert eval_pair(pair1, "+", 1j) == 0
    assert eval_pair(pair1, "-", 1j) == 0
    xi = pair1.hb.tau
    assert eval_pair_real(pair1, "+", xi) == pytest.approx(1.0, abs=1e-6)
    assert eval_pair_real(pair1, "-", xi) == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(ValueError):
        eval_pair(pair1, "up", 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 20), st.floats(-30, 30))
def test_scaling_covariance(pair1, delta, x):
    scaled = pair1.with_delta(delta)
    for sign in "+-":
        assert eval_pair(scaled, sign, x) == eval_pair(pair1, sign, delta * x)
    assert target(scaled, x) == target(pair1, delta * x)


@pytest.mark.parametrize("kind", ["heaviside", "de_branges"])
def test_optimal_value(pair1, kind):
    P = pair1.with_kind(kind)
    val, tail = quadrature_optimal(P, 500.0)
    cf = closed_form_optimal(P)
    assert abs(val - cf) <= 5e-3 * cf
    e = optimal_value_check(P, 500.0)
    assert e.passed and e.details["within_tail_bound"]


def test_optimal_value_converges_with_X(pair1):
    P = pair1
    cf = closed_form_optimal(P)
    errs = [abs(quadrature_optimal(P, X)[0] - cf) for X in (250.0, 500.0, 1000.0)]
    assert errs[1] <= 0.55 * errs[0]
    assert errs[2] <= 0.55 * errs[1]


def test_optimal_value_scaled(pair1):
    P = pair1.with_delta(0.5)
    val, tail = quadrature_optimal(P, 1000.0)
    cf = closed_form_optimal(P)
    assert abs(val - cf) <= tail


def test_quadrature_contract(pair1):
    with pytest.raises(ValueError):
        quadrature_optimal(pair1, 10.0)
    with pytest.raises(ValueError):
        quadrature_optimal(pair1.with_kind("de_branges").with_delta(2.0), 100.0)


def test_gap_integrand_nonnegative(pair1):
    x = np.linspace(-100, 100, 20001)
    assert np.all(gap_integrand(pair1, x) >= 0)
    assert np.all(gap_integrand(pair1.with_kind("de_branges"), x) >= 0)


def test_gap_localization(pair1):
    rep = gap_localization(pair1)
    assert rep.overall_pass, [e.summary() for e in rep.entries]


def test_interpolation(pair1):
    rep = interpolation_check(pair1)
    assert rep.overall_pass, [e.summary() for e in rep.entries]


def test_asymptotics():
    rep = scaled_asymptotics_check(1.0, [0.01, 0.1, 1.0, 10.0, 100.0])
    assert rep.overall_pass
    small = next(e for e in rep.entries if "delta=0.01" in e.check_name)
    assert small.details["value"] == pytest.approx(3.041e5, rel=1e-3)
    assert small.measured == pytest.approx(1.0004, abs=1e-4)


def test_sampling_identity(p1):
    for w in (0.0, 0.3):
        rep = verify_sampling_identity(p1, w)
        assert rep.overall_pass, [e.summary() for e in rep.entries]
    rep = verify_sampling_identity(p1, 0.0)
    zs = next(e for e in rep.entries if "zero_sum" in e.check_name)
    assert zs.target == pytest.approx(0.68287674881008426, rel=1e-12)
    with pytest.raises(ValueError):
        verify_sampling_identity(p1, 0.0, N=3)


def test_sampling_origin_term(p1):
    w = 0.3
    k0w = float(np.real(kernel(p1, w, 0.0)))
    assert k0w**2 / float(kernel_diag(p1, 0.0)) <= float(kernel_diag(p1, w))


def test_isometry():
    rep = verify_isometry(1.0)
    assert rep.overall_pass, [e.summary() for e in rep.entries]


def test_isometry_bracket_periodic():
    q = math.exp(-2 * math.pi)
    c = lambda x: np.cos(2 * math.pi * x)
    bracket = lambda x: (2 * q * c(x) - 2 * q * q) / ((1 - q) ** 2 + 2 * q * (1 - c(x)))
    x = np.linspace(-3, 3, 101)
    np.testing.assert_allclose(bracket(x), bracket(x + 1), atol=1e-15)
    # mean zero over a period
    assert abs(np.mean(bracket(np.linspace(0, 1, 4096, endpoint=False)))) < 1e-15


@pytest.mark.parametrize("a", [0.5, 2.0])
def test_isometry_other_a(a):
    assert verify_isometry(a).overall_pass


def test_heaviside_constraints(pair1):
    rep = verify_heaviside_constraints(pair1, np.linspace(-40, 40, 10_000))
    assert rep.overall_pass, [e.summary() for e in rep.entries]
    left = eval_pair_real(pair1, "-", -1e-9)
    assert left <= 1e-9
    assert eval_pair_real(pair1, "+", 0.0) >= 1.0
    with pytest.raises(ValueError):
        verify_heaviside_constraints(pair1.with_kind("de_branges"), [0.0])


def test_heaviside_constraints_scaled(pair1):
    P = pair1.with_delta(3.0)
    rep = verify_heaviside_constraints(P, np.linspace(-20, 20, 4001))
    assert rep.overall_pass, [e.summary() for e in rep.entries]


def test_de_branges_pair_touches_t_at_zeros(pair1):
    P = pair1.with_kind("de_branges")
    xi = zeros_of_B(P.hb, 6)[1:]
    np.testing.assert_allclose(eval_pair_real(P, "+", xi), 1.0 / (xi**2 + 1), atol=1e-7)
