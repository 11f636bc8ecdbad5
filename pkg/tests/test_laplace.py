import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from debranges_extremal.hb import HBParams, zeros_of_B
from debranges_extremal.laplace import (
    LPDescriptor,
    bromwich_eval,
    build_g_tables,
    cosine_transform_check,
    laplace_identity_check,
    sine_transform_check,
    verify_g_shape,
)
from debranges_extremal.numerics import QuadratureSpec

G1_AT_0_1 = 0.10823396423947806  # 1/(2 B'(0)^2), mpmath
F_I_1 = -31.915746413610971  # B_1(i)^2, mpmath


def residue_series(p, t, order, count=400):
    """g^(order)(t) for t < 0 from the double poles of 1/B^2 at the positive zeros."""
    a = p.a
    xi = zeros_of_B(p, count)[1:]
    c, s = p.cosh_scaled, p.sinh_scaled
    sn, cs = np.sin(math.pi * xi), np.cos(math.pi * xi)
    d = xi * xi + a * a
    n1 = a * math.pi * c * cs - s * cs + xi * math.pi * s * sn
    n2 = -a * math.pi**2 * c * sn + 2 * math.pi * s * sn + xi * math.pi**2 * s * cs
    b1 = n1 / d
    b2 = (n2 - 2.0 * n1 * 2.0 * xi / d) / d
    r = b2 / b1
    t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
    e = np.exp(xi * t) / b1**2
    poly = (t - r, xi * (t - r) + 1.0, xi * xi * (t - r) + 2.0 * xi)[order]
    return -np.sum(e * poly, axis=1)


@pytest.fixture(scope="module")
def G1(pair1):
    return pair1.G


@pytest.fixture(scope="module")
def F1(pair1):
    return pair1.F


def test_descriptor_from_hb(F1):
    p = HBParams(1.0)
    assert F1.tau == p.tau and F1.exp_type == pytest.approx(2 * math.pi)
    assert complex(F1(1j)).real == pytest.approx(F_I_1, rel=1e-13)
    assert F1.validate().overall_pass
    assert complex(F1.ratio_z2(0.0)).real == pytest.approx(F1.kappa0, rel=1e-14)
    z = np.array([1e-3, 0.3 + 0.2j, 2.0])
    np.testing.assert_allclose(F1.ratio_z2(z), F1(z) / z**2, rtol=1e-9)


def test_descriptor_contract():
    f = lambda z: z * z
    with pytest.raises(ValueError):
        LPDescriptor(eval=f, tau=1.0, exp_type=0.0, kappa0=1.0, even=False)
    with pytest.raises(ValueError):
        LPDescriptor(eval=f, tau=0.0, exp_type=0.0, kappa0=1.0)
    with pytest.raises(ValueError):
        LPDescriptor(eval=f, tau=1.0, exp_type=0.0, kappa0=0.0)


def test_descriptor_validate_flags_odd_function():
    F = LPDescriptor(eval=lambda z: z * z * (1 + 0.1 * z), tau=1.0, exp_type=0.0, kappa0=1.0)
    rep = F.validate()
    assert not rep.overall_pass
    assert any(e.check_name == "lp.even" and not e.passed for e in rep.entries)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("order", [0, 1, 2])
def test_g_against_residue_series(a, order):
    p = HBParams(a)
    F = LPDescriptor.from_hb(p)
    t = np.array([-0.5, -2.0, -8.0, -20.0])
    got = bromwich_eval(F, t, order)
    ref = residue_series(p, t, order)
    np.testing.assert_allclose(got, ref, rtol=1e-8)


def test_g_table_against_residue_series_far_left(G1):
    p = HBParams(1.0)
    t = np.array([-23.5, -27.0, -30.0])  # the last two come from the tail model
    np.testing.assert_allclose(G1.g(t), residue_series(p, t, 0), rtol=1e-6)


def test_g_basic_values(G1):
    assert G1.g1_at_0 == pytest.approx(G1_AT_0_1, rel=1e-9)
    assert G1.g1_at_0 > 0
    assert G1.g(0.0) > 0
    assert G1.imag_health < 1e-6


def test_g_contour_independence(F1):
    t = np.array([-3.0, -1.0, 0.0, 0.5, 2.0])
    lo = bromwich_eval(F1, t, 0, contour=0.3 * F1.tau)
    hi = bromwich_eval(F1, t, 0, contour=0.7 * F1.tau)
    default = bromwich_eval(F1, t, 0)
    np.testing.assert_allclose(lo, hi, rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(default, hi, rtol=1e-8, atol=1e-10)


def test_g_mirror_relation(F1):
    # evenness of F: g(t) - g(-t) = t/k0, g' (t) + g'(-t) = 1/k0, g'' even
    t = np.array([0.3, 1.0, 4.0, 9.0])
    g0 = bromwich_eval(F1, np.concatenate([t, -t]), 0)
    g1 = bromwich_eval(F1, np.concatenate([t, -t]), 1)
    np.testing.assert_allclose(g0[:4] - g0[4:], t / F1.kappa0, rtol=1e-9)
    np.testing.assert_allclose(g1[:4] + g1[4:], 1.0 / F1.kappa0, rtol=1e-9)


def test_bromwich_contract(F1):
    with pytest.raises(ValueError):
        bromwich_eval(F1, 0.0, 3)
    val, imag = bromwich_eval(F1, np.array([-1.0, 1.0]), 0, full_output=True)
    assert imag < 1e-6 and val.shape == (2,)
    assert isinstance(bromwich_eval(F1, -1.0), float)


def test_build_contract(F1):
    with pytest.raises(ValueError):
        build_g_tables(F1, 1.0, 5.0, 256)
    with pytest.raises(ValueError):
        build_g_tables(F1, -5.0, 5.0, 64)


def test_small_grid_example(F1):
    G = build_g_tables(F1, -12.0, 30.0, 2048)
    grid = G.g2.grid
    pos = grid[grid > 0]
    even = np.max(np.abs(G.g2(pos) - G.g2(-pos)))
    assert even <= 1e-6
    # tail model diagnostic at the left edge
    model = G.g.left_tail(-12.0)
    assert 0.5 * model <= G.g(-12.0) <= 2.0 * model


def test_g2_growth_ratio_bounded(G1, F1):
    t = np.linspace(-8, -4, 200)
    ratio = G1.g2(t) / np.exp(F1.tau * t)
    # (p0 + p1 t) e^{tau t}: the ratio is at most linear in |t|
    assert np.all(np.isfinite(ratio))
    scaled = ratio / (1.0 + np.abs(t))
    assert scaled.max() / scaled.min() < 2.0
    # and it is close to the linear factor of the tail model
    fit = np.polyval(np.polyfit(t, ratio, 1), t)
    assert np.max(np.abs(ratio - fit)) < 0.05 * ratio.max()


def test_g_shape(G1):
    rep = verify_g_shape(G1)
    assert rep.overall_pass, [e.summary() for e in rep.entries if not e.passed]
    assert G1.g2(5.0) <= G1.g2(1.0)
    assert np.all(G1.g.values >= 0)
    grid = G1.g2.grid
    assert abs(grid[np.argmax(G1.g2.values)]) <= 2 * (grid[1] - grid[0])


@pytest.mark.parametrize("z", [0.21, 0.5, 0.79, 0.4 + 0.5j, 0.6 - 0.8j, 0.5 + 1.0j])
def test_reciprocal_identity(G1, F1, z):
    e = laplace_identity_check(F1, G1, z * F1.tau, 0)
    assert e.passed, e.summary()


@pytest.mark.parametrize("order", [1, 2])
def test_moment_identity(G1, F1, order):
    e = laplace_identity_check(F1, G1, 0.5 * F1.tau, order, tol=1e-5)
    assert e.passed, e.summary()


def test_reciprocal_identity_strip_contract(G1, F1):
    with pytest.raises(ValueError):
        laplace_identity_check(F1, G1, 1.1 * F1.tau)


@pytest.mark.parametrize("zeta", [0.5, 1.0])
def test_cosine_transform(G1, F1, zeta):
    e = cosine_transform_check(F1, G1, zeta)
    assert e.passed, e.summary()


def test_cosine_transform_values(G1, F1):
    e = cosine_transform_check(F1, G1, 1.0)
    assert e.target == pytest.approx(-1.0 / F_I_1, rel=1e-12)
    assert e.target == pytest.approx(0.0313, abs=1e-4)
    # small-zeta limit: int g'' = 2 g'(0)
    small = cosine_transform_check(F1, G1, 1e-3)
    assert small.target == pytest.approx(2 * G1.g1_at_0, rel=1e-5)
    assert small.measured == pytest.approx(2 * G1.g1_at_0, rel=1e-5)


@pytest.mark.parametrize("zeta", [0.5, 1.0])
@pytest.mark.parametrize("w", [0.0, 0.7])
def test_sine_transform(G1, F1, zeta, w):
    e = sine_transform_check(F1, G1, zeta, w)
    assert e.passed, e.summary()


def test_sine_transform_values(G1, F1):
    e = sine_transform_check(F1, G1, 1.0, 0.7)
    assert e.target == pytest.approx(math.sin(0.7) / F_I_1, rel=1e-12)
    assert e.target == pytest.approx(-0.0202, abs=1e-4)
    zero = sine_transform_check(F1, G1, 1.0, 0.0)
    assert zero.target == 0.0 and abs(zero.measured) < 1e-8
    minus = sine_transform_check(F1, G1, 1.0, -0.7)
    assert abs(e.measured + minus.measured) <= 1e-8


@settings(max_examples=15, deadline=None)
@given(st.floats(0.22, 0.78), st.floats(-1.0, 1.0))
def test_reciprocal_identity_property(G1, F1, re, im):
    e = laplace_identity_check(F1, G1, complex(re, im) * F1.tau, 0)
    assert e.passed, e.summary()


@pytest.mark.parametrize("a", [0.25, 0.5, 2.0, 4.0])
def test_engine_across_a(a):
    F = LPDescriptor.from_hb(HBParams(a))
    G = build_g_tables(F)
    assert G.g1_at_0 == pytest.approx(1.0 / (2.0 * F.kappa0), rel=1e-8)
    assert verify_g_shape(G).overall_pass
    for z in (0.3, 0.5 + 0.5j, 0.7):
        assert laplace_identity_check(F, G, z * F.tau, 0).passed


def test_inner_spec_tightening_changes_little(F1):
    t = np.array([-5.0, 0.0, 5.0])
    loose = bromwich_eval(F1, t, 2)
    tight = bromwich_eval(F1, t, 2, QuadratureSpec(1e-13, 1e-12, 14, 16))
    np.testing.assert_allclose(loose, tight, rtol=1e-8, atol=1e-10)
