"""Extremal majorant/minorant pairs and their verification.

For F = B_a^2 the interpolants M+- of :mod:`interpolation` give

* T_a+- = M+-, one-sided approximations of t_a whose gap has de Branges
  measure 1/(a^2 K(0, 0));
* S_a+-(z) = M+-(z)(z^2 + a^2), one-sided approximations of the Heaviside
  step vanishing at z = +-ia, with L^1 gap pi a/(pi a - tanh pi a).

A scaled pair evaluates F+-(delta z); with b = a/delta the Heaviside pair
vanishes at ib and its gap is pi b/(pi b delta - tanh(pi b delta)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.special import polygamma

from . import hb
from .hb import HBParams, kernel, kernel_diag, weight, zeros_of_B
from .interpolation import (
    HTable,
    InterpolantM,
    build_h_table,
    build_interpolants,
    heaviside,
    t_a,
)
from .laplace import GTables, LPDescriptor, build_g_tables
from .numerics import (
    INNER_SPEC,
    OUTER_SPEC,
    ConstructionError,
    QuadratureSpec,
    integrate_finite,
)
from .report import ReportEntry, VerificationReport

KINDS = ("de_branges", "heaviside")


def _normalize_kind(kind: str) -> str:
    k = str(kind).replace("-", "_").lower()
    if k not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    return k


@dataclass(frozen=True, eq=False)
class ExtremalPair:
    """A constructed (majorant, minorant) pair for E_a with F = B_a^2."""

    a: float
    kind: str
    delta: float
    hb: HBParams
    F: LPDescriptor
    G: GTables
    H: HTable
    plus: InterpolantM
    minus: InterpolantM

    @property
    def b(self) -> float:
        """Vanishing height of the scaled pair: a / delta."""
        return self.a / self.delta

    def __call__(self, sign: str, z):
        return eval_pair(self, sign, z)

    def with_delta(self, delta: float) -> "ExtremalPair":
        """The same tables, rescaled to ``delta``."""
        delta = _check_delta(delta)
        return ExtremalPair(self.a, self.kind, delta, self.hb, self.F, self.G, self.H, self.plus, self.minus)

    def with_kind(self, kind: str) -> "ExtremalPair":
        return ExtremalPair(self.a, _normalize_kind(kind), self.delta, self.hb, self.F, self.G, self.H, self.plus, self.minus)


def _check_delta(delta):
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be positive, got {delta!r}")
    return delta


def build_extremal(
    a: float,
    kind: str = "heaviside",
    delta: float = 1.0,
    spec: Optional[QuadratureSpec] = None,
    *,
    t_min: float = -24.0,
    t_max: float = 36.0,
    n: int = 8192,
) -> ExtremalPair:
    """Build the tables and interpolants for E_a and wrap them as a pair.

    ``spec`` applies to the Bromwich integrals (default: inner tolerances).
    Any failed structural check raises :class:`ConstructionError`.
    """
    kind = _normalize_kind(kind)
    delta = _check_delta(delta)
    p = HBParams(a)
    F = LPDescriptor.from_hb(p)
    rep = F.validate()
    if not rep.overall_pass:
        bad = [e.check_name for e in rep.entries if not e.passed]
        raise ConstructionError(f"F = B_a^2 failed checks: {', '.join(bad)}")
    Fia = complex(F(1j * p.a)).real
    if not Fia < 0:
        raise ConstructionError(f"F(ia) = {Fia:.6g} must be negative")
    G = build_g_tables(F, t_min, t_max, n, spec or INNER_SPEC)
    H = build_h_table(G, p.a)
    plus, minus = build_interpolants(F, G, H, OUTER_SPEC)
    return ExtremalPair(p.a, kind, delta, p, F, G, H, plus, minus)


@lru_cache(maxsize=8)
def cached_extremal(a: float) -> ExtremalPair:
    """Heaviside pair with default settings, memoized by ``a``."""
    return build_extremal(a, "heaviside")


def _sign(sign):
    if sign in ("+", "plus", 1):
        return "+"
    if sign in ("-", "minus", -1):
        return "-"
    raise ValueError("sign must be '+' or '-'")


def eval_pair(P: ExtremalPair, sign: str, z):
    """T+-(delta z) or S+-(delta z) = M+-(delta z)((delta z)^2 + a^2)."""
    I = P.plus if _sign(sign) == "+" else P.minus
    w = P.delta * np.asarray(z, dtype=complex)
    val = I(w)
    if P.kind == "heaviside":
        val = val * (w * w + P.a * P.a)
    return val


def eval_pair_real(P: ExtremalPair, sign: str, x):
    return np.real(eval_pair(P, sign, np.asarray(x, dtype=float)))


def target(P: ExtremalPair, x):
    """The approximated function at delta x: t_a or the Heaviside step."""
    x = P.delta * np.asarray(x, dtype=float)
    return heaviside(x) if P.kind == "heaviside" else t_a(P.a, x)


def closed_form_optimal(P: ExtremalPair) -> float:
    """Optimal gap in closed form.

    heaviside: pi b/(pi b delta - tanh(pi b delta)) with b = a/delta;
    de_branges: 1/(a^2 K(0, 0)), defined for delta = 1 only.
    """
    return closed_form_value(P.a, P.kind, P.delta)


def closed_form_value(a: float, kind: str = "heaviside", delta: float = 1.0) -> float:
    kind = _normalize_kind(kind)
    delta = _check_delta(delta)
    if not a > 0:
        raise ValueError("a must be positive")
    if kind == "heaviside":
        b = a / delta
        x = math.pi * b * delta
        return math.pi * b / _x_minus_tanh(x)
    if delta != 1.0:
        raise ValueError("the de Branges optimal value is only defined for delta = 1")
    return 1.0 / (a * a * float(kernel_diag(HBParams(a), 0.0)))


def _x_minus_tanh(x: float) -> float:
    """x - tanh x, by its Taylor series for small x to avoid cancellation."""
    if x < 0.1:
        # tanh series through x^15; the first omitted term is below 1e-16 relative at x = 0.1
        c = (1 / 3, -2 / 15, 17 / 315, -62 / 2835, 1382 / 155925, -21844 / 6081075, 929569 / 638512875)
        x2 = x * x
        return x * x2 * float(np.polynomial.polynomial.polyval(x2, c))
    return x - math.tanh(x)


def gap_integrand(P: ExtremalPair, x):
    """The nonnegative optimal-value integrand at real x, from the closed-form gap."""
    x = np.asarray(x, dtype=float)
    w = P.delta * x
    g = (2.0 * P.plus.g1_at_0 / P.a**2) * np.real(P.F.ratio_z2(w))
    if P.kind == "heaviside":
        return g * (w * w + P.a * P.a)
    return g * weight(P.hb, w)


def quadrature_optimal(P: ExtremalPair, X: float = 500.0, spec: QuadratureSpec = INNER_SPEC, full_output: bool = False):
    """Integrate the gap over [-X, X]; return (value, tail_bound).

    The gap M+ - M- is the closed form (2 g'(0)/a^2) F(x)/x^2, so nothing is
    subtracted numerically.  The integrand is O(1/x^2): with C the supremum
    of x^2 times the integrand over X/2 <= |x| <= X, the neglected part is
    bounded by 2C/X.
    """
    X = float(X)
    if X < 50:
        raise ValueError("X must be at least 50")
    if P.kind == "de_branges" and P.delta != 1.0:
        raise ValueError("de Branges quadrature is only defined for delta = 1")
    step = 1.0 / P.delta
    bps = np.arange(-X, X + 0.5 * step, step)
    val, err = integrate_finite(lambda x: gap_integrand(P, x), -X, X, spec, breakpoints=bps, full_output=True)
    env_x = np.concatenate([np.linspace(-X, -X / 2, 4001), np.linspace(X / 2, X, 4001)])
    C = float(np.max(env_x**2 * gap_integrand(P, env_x)))
    tail = 2.0 * C / X
    if full_output:
        return float(val), tail, float(err)
    return float(val), tail


def optimal_value_check(P: ExtremalPair, X: float = 500.0, tol: float = 5e-3, spec: QuadratureSpec = INNER_SPEC) -> ReportEntry:
    """Quadrature value against the closed form, relative tolerance ``tol``."""
    val, tail, err = quadrature_optimal(P, X, spec, full_output=True)
    cf = closed_form_optimal(P)
    ent = ReportEntry.compare(
        f"extremal.optimal_value[{P.kind}]", cf, val, tol, mode="rel", X=X, tail_bound=tail, quadrature_error=err
    )
    ent.details["within_tail_bound"] = bool(abs(val - cf) <= tail + err)
    return ent


def scaled_asymptotics_check(b: float, deltas, tol: float = 0.01) -> VerificationReport:
    """Closed form against 3/((pi b)^2 delta^3) for delta <= 0.01 and 1/delta for delta >= 100."""
    rep = VerificationReport()
    deltas = np.asarray(deltas, dtype=float)
    values = []
    for d in deltas:
        v = closed_form_value(b * d, "heaviside", d)
        values.append(v)
        if d <= 0.01:
            asym = 3.0 / ((math.pi * b) ** 2 * d**3)
        elif d >= 100:
            asym = 1.0 / d
        else:
            continue
        rep.add(ReportEntry.compare(f"extremal.asymptotics[b={b:g},delta={d:g}]", 1.0, v / asym, tol, mode="abs", value=v, asymptote=asym))
    values = np.array(values)
    srt = np.argsort(deltas)
    mono = bool(np.all(np.diff(values[srt]) < 0))
    rep.add(ReportEntry.flag(f"extremal.asymptotics_monotone[b={b:g}]", mono))
    return rep


def _periodic_tail(f, X, w, period=1.0, samples=2048):
    """Estimate int_X^inf f by c/(X - w), c the mean of (x - w)^2 f over the last period."""
    x = np.linspace(X - period, X, samples, endpoint=False)
    c = float(np.mean((x - w) ** 2 * f(x)))
    return c / (X - w)


def verify_sampling_identity(
    p: HBParams,
    w: float,
    N: int = 40,
    spec: QuadratureSpec = INNER_SPEC,
    X: float = 2000.0,
    tol: float = 1e-3,
) -> VerificationReport:
    """The sampling identity for U = K(w, .): both sides against K(w, w).

    Quadrature side: int |K(w, x)|^2 / |E(x)|^2 over [-X, X] plus a tail
    estimated from the mean of (x - w)^2 |K|^2/|E|^2 over the last period.
    Zero side: sum over 0 and +-xi_1..xi_N of K(w, xi)^2 / K(xi, xi), plus
    the tail B(w)^2 coth(pi a)/pi^2 [psi_1(N + 3/2 - w) + psi_1(N + 3/2 + w)]
    from xi_k ~ k + 1/2.
    """
    if N < 5:
        raise ValueError("N must be at least 5")
    w = float(w)
    kww = float(np.real(kernel(p, w, w)))

    def f(x):
        k = np.real(kernel(p, w, x))
        return k * k * weight(p, x)

    bps = np.arange(-math.floor(X), math.floor(X) + 1)
    inner = integrate_finite(f, -X, X, spec, breakpoints=bps)
    tail = _periodic_tail(f, X, w) + _periodic_tail(lambda x: f(-x), X, -w)
    quad = float(inner + tail)

    xi = zeros_of_B(p, N + 1)
    pts = np.concatenate([[0.0], xi[1:], -xi[1:]])
    kw = np.real(kernel(p, w, pts))
    terms = kw * kw / kernel_diag(p, pts)
    bw = float(np.real(hb.eval_B(p, w)))
    zero_tail = bw * bw / (math.tanh(math.pi * p.a) * math.pi**2) * float(
        polygamma(1, N + 1.5 - w) + polygamma(1, N + 1.5 + w)
    )
    zsum = float(np.sum(terms) + zero_tail)
    rep = VerificationReport()
    rep.add(ReportEntry.compare(f"extremal.sampling_quadrature[w={w:g}]", kww, quad, tol, mode="rel", X=X, tail=tail))
    rep.add(ReportEntry.compare(f"extremal.sampling_zero_sum[w={w:g}]", kww, zsum, tol, mode="rel", N=N, tail=zero_tail))
    origin = float(terms[0])
    rep.add(ReportEntry.flag(f"extremal.sampling_origin_term[w={w:g}]", origin <= kww * (1 + 1e-12), measured=origin, tol=kww))
    return rep


def _sinc_over_shift(x):
    """sin(pi x)/(pi x (x - 1)), evaluated stably near x = 0 and x = 1."""
    x = np.asarray(x, dtype=float)
    near1 = np.abs(x - 1.0) < 0.5
    out = np.empty_like(x)
    out[~near1] = np.sinc(x[~near1]) / (x[~near1] - 1.0)
    out[near1] = -np.sinc(x[near1] - 1.0) / x[near1]
    return out


def verify_isometry(a: float, spec: QuadratureSpec = INNER_SPEC, X: float = 1000.0, mean_tol: float = 1e-6, norm_tol: float = 1e-4) -> VerificationReport:
    """Checks that |E_a|^-2 dx and (x^2 + a^2) dx give the same norm on the space.

    (i) int sinc(x)^2 [sinh 2 pi a/(cosh 2 pi a - cos 2 pi x) - 1] dx = 0,
        the bracket being a mean-zero Poisson kernel in e^{-2 pi a};
    (ii) for F(x) = sin(pi x)/(pi x (x - 1)), the two weighted L^2 norms agree.
    Integrals run over [-X, X]; tails use the leading 1/X asymptotics.
    """
    p = HBParams(a)
    q = math.exp(-2.0 * math.pi * a)
    bps = np.arange(-math.floor(X), math.floor(X) + 1)

    def bracket(x):
        # (1 - q^2)/(1 + q^2 - 2q cos 2 pi x) - 1
        c = np.cos(2.0 * math.pi * x)
        return (2.0 * q * c - 2.0 * q * q) / ((1.0 - q) ** 2 + 2.0 * q * (1.0 - c))

    mean_inner = integrate_finite(lambda x: np.sinc(x) ** 2 * bracket(x), -X, X, spec, breakpoints=bps)
    # sin^2(pi x) * bracket has period mean -q/2; both tails together give -q/(pi^2 X)
    mean_val = float(mean_inner - q / (math.pi**2 * X))

    def lhs_f(x):
        v = _sinc_over_shift(x)
        return v * v * (x * x + a * a)

    def rhs_f(x):
        v = _sinc_over_shift(x)
        return v * v * weight(p, x)

    lhs = integrate_finite(lhs_f, -X, X, spec, breakpoints=bps) + 1.0 / (math.pi**2 * X)
    rhs = integrate_finite(rhs_f, -X, X, spec, breakpoints=bps) + (1.0 - q) / (math.pi**2 * X)
    rep = VerificationReport()
    rep.add(ReportEntry.compare("extremal.isometry_zero_mean", 0.0, mean_val, mean_tol, mode="abs", X=X))
    rep.add(ReportEntry.compare("extremal.isometry_norms", float(lhs), float(rhs), norm_tol, mode="rel", X=X))
    return rep


def verify_heaviside_constraints(P: ExtremalPair, xs, slack: float = 1e-9) -> VerificationReport:
    """S- <= x_+^0 <= S+ on ``xs``, S+-(ib) = 0 with finite M+-(ia)."""
    if P.kind != "heaviside":
        raise ValueError("pair must be of kind 'heaviside'")
    xs = np.asarray(xs, dtype=float)
    H = target(P, xs)
    sp = eval_pair_real(P, "+", xs)
    sm = eval_pair_real(P, "-", xs)
    rep = VerificationReport()
    vp = H - sp
    vm = sm - H
    kp, km = int(np.argmax(vp)), int(np.argmax(vm))
    rep.add(ReportEntry.bound("extremal.heaviside_majorant", max(0.0, float(vp[kp])), slack, worst_at=float(xs[kp])))
    rep.add(ReportEntry.bound("extremal.heaviside_minorant", max(0.0, float(vm[km])), slack, worst_at=float(xs[km])))
    rep.add(ReportEntry.bound("extremal.heaviside_order", max(0.0, float(np.max(sm - sp))), slack))
    zb = 1j * P.b
    s_at = max(abs(complex(eval_pair(P, "+", zb))), abs(complex(eval_pair(P, "-", zb))))
    rep.add(ReportEntry.bound("extremal.vanishing_at_ib", s_at, 0.0))
    m_at = max(abs(complex(P.plus(1j * P.a))), abs(complex(P.minus(1j * P.a))))
    rep.add(ReportEntry.flag("extremal.M_finite_at_ia", math.isfinite(m_at), measured=m_at))
    return rep


def gap_localization(P: ExtremalPair, n_zeros: int = 10, tol: float = 1e-8, origin_tol: float = 1e-10) -> VerificationReport:
    """The gap T+ - T- vanishes at the nonzero zeros of B_a; the origin term is 1/(a^2 K(0,0))."""
    pair = P.with_kind("de_branges").with_delta(1.0)
    xi = zeros_of_B(P.hb, n_zeros + 1)[1:]
    pts = np.concatenate([xi, -xi])
    d = np.abs(eval_pair(pair, "+", pts) - eval_pair(pair, "-", pts))
    rep = VerificationReport()
    rep.add(ReportEntry.bound("extremal.gap_at_zeros", float(d.max()), tol, n_zeros=n_zeros))
    t0 = complex(eval_pair(pair, "+", 0.0) - eval_pair(pair, "-", 0.0)).real / float(np.real(kernel(P.hb, 0.0, 0.0)))
    cf = 1.0 / (P.a**2 * float(kernel_diag(P.hb, 0.0)))
    rep.add(ReportEntry.compare("extremal.gap_origin_term", cf, t0, origin_tol, mode="abs"))
    return rep


def interpolation_check(P: ExtremalPair, n_zeros: int = 10, tol: float = 1e-6) -> VerificationReport:
    """M+-(xi_k) = t_a(xi_k) at the first positive zeros, and the values at 0."""
    xi = zeros_of_B(P.hb, n_zeros + 1)[1:]
    ta = t_a(P.a, xi)
    rep = VerificationReport()
    for I in (P.plus, P.minus):
        d = np.abs(I.real(xi) - ta)
        rep.add(ReportEntry.bound(f"extremal.interpolation[{I.kind}]", float(d.max()), tol, n_zeros=n_zeros))
        v0 = complex(I(0.0))
        rep.add(ReportEntry.flag(f"extremal.value_at_0[{I.kind}]", v0 == I.value_at_0, measured=v0.real, tol=I.value_at_0))
    return rep


def closed_form_coincidence(a_values=(0.25, 0.5, 1.0, 2.0, 4.0), tol: float = 1e-12) -> VerificationReport:
    """pi a/(pi a - tanh pi a) * a^2 K_a(0, 0) = 1."""
    rep = VerificationReport()
    for a in a_values:
        prod = closed_form_value(a, "heaviside") * a * a * float(kernel_diag(HBParams(a), 0.0))
        rep.add(ReportEntry.compare(f"extremal.closed_form_coincidence[a={a:g}]", 1.0, prod, tol, mode="abs"))
    return rep
