"""Acceptance criteria 1-10, each printing one PASS/FAIL line."""
import math
import time

import numpy as np
import pytest

from debranges_extremal.extremal import (
    build_extremal,
    closed_form_optimal,
    closed_form_value,
    eval_pair_real,
    gap_localization,
    quadrature_optimal,
    verify_isometry,
    verify_sampling_identity,
)
from debranges_extremal.hb import HBParams, kernel_diag, zeros_of_B
from debranges_extremal.interpolation import (
    h_prime0_identity_check,
    h_second_reflection_check,
    heaviside,
    seam_check,
    t_a,
)
from debranges_extremal.laplace import cosine_transform_check, laplace_identity_check, sine_transform_check
from debranges_extremal.suites import RECIPROCAL_POINTS, seam_points


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance] criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def timed_pair1():
    start = time.perf_counter()
    P = build_extremal(1.0, "heaviside")
    return P, time.perf_counter() - start


def test_criterion_01_heaviside_optimal_value(timed_pair1, report):
    P, build_seconds = timed_pair1
    start = time.perf_counter()
    val, tail = quadrature_optimal(P, 500.0)
    seconds = build_seconds + time.perf_counter() - start
    cf = closed_form_optimal(P)
    direct = math.pi / (math.pi - math.tanh(math.pi))
    rel = abs(val - cf) / cf
    ok = rel <= 5e-3 and abs(cf - direct) <= 1e-12 and seconds <= 300
    report(1, ok, f"quadrature={val:.8f} closed_form={cf:.10f} rel_err={rel:.2e} (tol 5e-3) tail_bound={tail:.2e} time={seconds:.1f}s")


def test_criterion_02_de_branges_optimal_value(timed_pair1, report):
    P = timed_pair1[0].with_kind("de_branges")
    val, tail = quadrature_optimal(P, 500.0)
    cf = 1.0 / (P.a**2 * float(kernel_diag(P.hb, 0.0)))
    rel = abs(val - cf) / cf
    loc = gap_localization(P, n_zeros=10, tol=1e-8, origin_tol=1e-10)
    at_zeros, origin = loc.entries
    ok = rel <= 5e-3 and at_zeros.measured <= 1e-8 and origin.abs_err <= 1e-10
    report(
        2,
        ok,
        f"quadrature={val:.8f} 1/(a^2K(0,0))={cf:.10f} rel_err={rel:.2e}; max|T+-T-| at zeros={at_zeros.measured:.1e}; "
        f"origin term err={origin.abs_err:.1e}",
    )


def test_criterion_03_closed_form_coincidence(report):
    errs = {}
    for a in (0.25, 0.5, 1.0, 2.0, 4.0):
        errs[a] = abs(closed_form_value(a) * a * a * float(kernel_diag(HBParams(a), 0.0)) - 1.0)
    worst = max(errs.values())
    report(3, worst <= 1e-12, f"max |product - 1| = {worst:.1e} over a in {sorted(errs)} (tol 1e-12)")


def test_criterion_04_interpolation(timed_pair1, report):
    P = timed_pair1[0]
    xi = zeros_of_B(P.hb, 11)[1:]
    ta = t_a(1.0, xi)
    dp = float(np.max(np.abs(P.plus.real(xi) - ta)))
    dm = float(np.max(np.abs(P.minus.real(xi) - ta)))
    m0p, m0m = complex(P.plus(0.0)), complex(P.minus(0.0))
    ok = dp <= 1e-6 and dm <= 1e-6 and m0p == 1.0 / P.a**2 and m0m == 0.0
    report(4, ok, f"max|M+ - t| = {dp:.1e}, max|M- - t| = {dm:.1e} (tol 1e-6); M+(0) = {m0p.real!r}, M-(0) = {m0m.real!r}")


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_criterion_05_one_sidedness(a, timed_pair1, report):
    P = timed_pair1[0] if a == 1.0 else build_extremal(a, "heaviside")
    assert complex(P.F(1j * a)).real < 0
    xs = np.linspace(-50, 50, 10_000)
    ta = t_a(a, xs)
    hv = heaviside(xs)
    slack = 1e-9
    worst = max(
        float(np.max(ta - P.plus.real(xs))),
        float(np.max(P.minus.real(xs) - ta)),
        float(np.max(hv - eval_pair_real(P, "+", xs))),
        float(np.max(eval_pair_real(P, "-", xs) - hv)),
    )
    report(5, worst <= slack, f"a={a:g}: worst one-sided violation {max(worst, 0.0):.1e} on 1e4 points (slack 1e-9)")


def test_criterion_06_laplace_identities(timed_pair1, report):
    P = timed_pair1[0]
    F, G, H = P.F, P.G, P.H
    recip = [laplace_identity_check(F, G, complex(r, i) * F.tau, 0, tol=1e-6) for r, i in RECIPROCAL_POINTS]
    assert all(0.2 < r < 0.8 for r, _ in RECIPROCAL_POINTS) and len(recip) == 5
    trans = [cosine_transform_check(F, G, z, tol=1e-4) for z in (0.5, 1.0)]
    trans += [sine_transform_check(F, G, z, w, tol=1e-4) for z in (0.5, 1.0) for w in (0.0, 0.7)]
    hid = [h_prime0_identity_check(H, F, G, tol=1e-5)]
    hid += [h_second_reflection_check(H, G, F, w, tol=1e-5) for w in (0.7, math.pi / 2)]
    entries = recip + trans + hid
    failed = [e.check_name for e in entries if not e.passed]
    detail = (
        f"reciprocal max rel {max(e.rel_err for e in recip):.1e} (1e-6); transforms max rel {max(e.rel_err for e in trans):.1e} (1e-4); "
        f"h identities max rel {max(e.rel_err for e in hid):.1e} (1e-5)"
    )
    report(6, not failed, detail + (f"; failed: {failed}" if failed else ""))


def test_criterion_07_seam(timed_pair1, report):
    P = timed_pair1[0]
    z = seam_points(P.F.tau)
    assert z.size == 20 and np.all(np.abs(z.real - P.F.tau / 2) <= 0.1 + 1e-15)
    e = seam_check(P.F, P.G, P.H, 1.0, z, tol=1e-7)
    report(7, e.passed, f"max |A1 - A2| = {e.measured:.1e} at 20 points (tol 1e-7)")


def test_criterion_08_sampling_identity(report):
    p = HBParams(1.0)
    entries = []
    for w in (0.0, 0.3):
        entries += [e for e in verify_sampling_identity(p, w, N=40, tol=1e-3).entries if e.details.get("mode") == "rel"]
    worst = max(e.rel_err for e in entries)
    ok = all(e.passed for e in entries) and len(entries) == 4
    report(8, ok, f"max rel err {worst:.1e} over quadrature and N=40 zero-sum sides at w in {{0, 0.3}} (tol 1e-3)")


def test_criterion_09_isometry(report):
    rep = verify_isometry(1.0, mean_tol=1e-6, norm_tol=1e-4)
    mean, norms = rep.entries
    ok = mean.abs_err <= 1e-6 and norms.rel_err <= 1e-4
    report(9, ok, f"zero-mean |value| = {mean.abs_err:.1e} (1e-6); norm rel err {norms.rel_err:.1e} (1e-4)")


def test_criterion_10_scaling_asymptotics(report):
    b = 1.0
    small = closed_form_value(b * 0.01, "heaviside", 0.01) / (3.0 / ((math.pi * b) ** 2 * 0.01**3))
    large = closed_form_value(b * 100.0, "heaviside", 100.0) / (1.0 / 100.0)
    ok = abs(small - 1) <= 0.01 and abs(large - 1) <= 0.01
    report(10, ok, f"ratio to asymptote: delta=0.01 -> {small:.6f}, delta=100 -> {large:.6f} (tol 1%)")
