"""Numerical Bromwich inversion of 1/F for an even Laguerre-Polya F.

F is even, real entire, has a double zero at 0 and is positive on (0, tau),
where tau is its first positive zero.  Then 1/F is the two-sided Laplace
transform of a function g on the strip 0 < Re s < tau, and

    g^(j)(t) = (1/2 pi) int Re[ s^j e^{st} / F(s) ] du,   s = c + iu,

for any c in (0, tau); the function defined this way is g = g_{tau/2}.  For
t <= 0 the line c = 0.75 tau is used.  For t > 0 the factor e^{ct} grows, so
the line is moved to Re s = -c and the residue at the double pole s = 0 is
added back: t/k0 for j = 0, 1/k0 for j = 1 and 0 for j = 2, where
k0 = lim F(s)/s^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .numerics import (
    INNER_SPEC,
    ConsistencyError,
    ConvergenceError,
    ExpTail,
    PolyTail,
    QuadratureSpec,
    SampledFunction,
    TailModelError,
    integrate_finite,
    integrate_sampled,
)
from .report import ReportEntry, VerificationReport

IMAG_HEALTH_LIMIT = 1e-6
# Evaluation line as a fraction of tau.  Any line in (0, tau) gives the same
# g; one close to tau keeps g(t) e^{-ct} of moderate size for t << 0, so an
# absolute quadrature tolerance becomes nearly relative there.
EVAL_CONTOUR_FRACTION = 0.75
_CALIBRATION_U = (5.0, 10.0, 20.0)
_T_CHUNK = 384


@dataclass(frozen=True, eq=False)
class LPDescriptor:
    """An even Laguerre-Polya function F with a double zero at the origin.

    ``eval`` is a vectorized complex callback.  ``over_z2`` optionally gives
    F(z)/z^2 without cancellation near 0; otherwise it is formed by division
    away from the origin and replaced by ``kappa0`` there.  ``product_data``
    holds descriptive Hadamard-product metadata and is never used.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    tau: float
    exp_type: float
    kappa0: float
    over_z2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    even: bool = True
    double_zero_at_origin: bool = True
    contour_re: float = field(default=None)
    name: str = "F"
    product_data: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.even or not self.double_zero_at_origin:
            raise ValueError("only even F with a double zero at the origin are supported")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if not self.exp_type >= 0:
            raise ValueError("exp_type must be non-negative")
        if not self.kappa0 > 0:
            raise ValueError("kappa0 = lim F(z)/z^2 must be positive")
        if self.contour_re is None:
            object.__setattr__(self, "contour_re", 0.5 * self.tau)

    def __call__(self, z):
        return self.eval(np.asarray(z, dtype=complex))

    def ratio_z2(self, z):
        """F(z)/z^2, continuous at 0."""
        z = np.asarray(z, dtype=complex)
        if self.over_z2 is not None:
            return self.over_z2(z)
        out = np.full(z.shape, self.kappa0, dtype=complex)
        nz = np.abs(z) >= 1e-4
        out[nz] = self.eval(z[nz]) / z[nz] ** 2
        return out

    def validate(self, samples: int = 64, seed: int = 0) -> VerificationReport:
        """Sampled checks of the structural hypotheses on F."""
        rep = VerificationReport()
        fc = complex(self(self.contour_re))
        rep.add(ReportEntry.flag("lp.F_at_contour_nonzero", fc != 0 and math.isfinite(abs(fc)), measured=abs(fc)))
        xs = np.linspace(0.0, self.tau, samples + 2)[1:-1]
        vals = self(xs)
        rep.add(
            ReportEntry.flag(
                "lp.positive_on_0_tau",
                bool(np.all(vals.real > 0)),
                measured=float(vals.real.min()),
            )
        )
        rng = np.random.default_rng(seed)
        z = rng.uniform(-5, 5, 16) + 1j * rng.uniform(-2, 2, 16)
        fz = self(z)
        sym = np.max(np.abs(self(np.conj(z)) - np.conj(fz)) / (1 + np.abs(fz)))
        rep.add(ReportEntry.bound("lp.real_entire", sym, 1e-10))
        par = np.max(np.abs(self(-z) - fz) / (1 + np.abs(fz)))
        rep.add(ReportEntry.bound("lp.even", par, 1e-10))
        return rep

    @classmethod
    def from_hb(cls, p) -> "LPDescriptor":
        """F = B_a^2 for the Hermite-Biehler data ``p`` (type 2 pi)."""
        from .hb import eval_B, eval_B_over_z

        def F(z):
            b = eval_B(p, z)
            return b * b

        def over_z2(z):
            q = eval_B_over_z(p, z)
            return q * q

        return cls(
            eval=F,
            tau=p.tau,
            exp_type=2.0 * math.pi,
            kappa0=p.b_prime0**2,
            over_z2=over_z2,
            name=f"B_{p.a:g}^2",
        )


def _residue(order, t, kappa0):
    if order == 0:
        return t / kappa0
    if order == 1:
        return np.full_like(t, 1.0 / kappa0)
    return np.zeros_like(t)


def _truncation_point(F: LPDescriptor, c: float, order: int, tol: float) -> float:
    """Smallest U on a geometric search whose tail bound is below ``tol``.

    |1/F(c+iu)| <= C u^2 e^{-k u} with k = exp_type and C calibrated at
    u in {5, 10, 20}; with e^{ct} factored out, the neglected part of the
    integral is at most (1/pi) C (|c|+U)^j U^2 e^{-kU} / k, doubled for safety.
    """
    k = F.exp_type
    if k <= 0:
        raise ConvergenceError("exp_type must be positive for a truncated Bromwich integral")
    cal = []
    for u in _CALIBRATION_U:
        f = abs(complex(F(c + 1j * u)))
        f2 = abs(complex(F(c - 1j * u)))
        cal.append(max(1.0 / f, 1.0 / f2) * math.exp(k * u) / u**2)
    C = max(cal)
    if not math.isfinite(C):
        raise ConvergenceError("could not calibrate the decay of 1/F on the contour")

    def bound(U):
        return 2.0 / math.pi * C * (abs(c) + U) ** order * U**2 * math.exp(-k * U) / k

    U = 1.0
    while bound(U) > tol:
        U *= 1.25
        if U > 1e4:
            raise ConvergenceError(f"Bromwich truncation bound not met (bound {bound(U):.3e})")
    return U


def _bromwich_line(F, t, orders, c, spec):
    """(1/2 pi) int over the line Re s = c, for each order in ``orders``.

    The factor e^{ct} is pulled out of the integrand, so the quadrature
    tolerance applies to g(t) e^{-ct}.  Returns the real parts, shape
    (len(orders), len(t)), and the largest imaginary part.
    """
    t = np.asarray(t, dtype=float)
    U = max(_truncation_point(F, c, j, spec.abs_tol) for j in orders)
    orders = tuple(orders)

    def integrand(u):
        s = c + 1j * u
        sb = c - 1j * u
        inv = 1.0 / F(s)
        invb = 1.0 / F(sb)
        e = np.exp(1j * np.outer(t, u))
        eb = np.conj(e)
        rows = []
        for j in orders:
            rows.append(e * (s**j * inv) + eb * (sb**j * invb))
        return np.stack(rows)

    n_panels = max(4, int(math.ceil(U * (1.0 + np.abs(t).max(initial=0.0)) / (2.0 * math.pi))))
    bps = np.linspace(0.0, U, n_panels + 1)
    total = integrate_finite(integrand, 0.0, U, spec, breakpoints=bps) / (2.0 * math.pi)
    scale = np.exp(c * t)
    return total.real * scale, np.abs(total.imag) * scale


def bromwich_eval(
    F: LPDescriptor,
    t,
    order: int = 0,
    spec: QuadratureSpec = INNER_SPEC,
    *,
    contour: Optional[float] = None,
    full_output: bool = False,
):
    """g^(order)(t) for g the inverse two-sided Laplace transform of 1/F.

    Vectorized over ``t``.  With ``contour=None`` the line Re s = 0.75 tau
    is used for t <= 0 and the mirrored line plus the pole residue for t > 0.
    An explicit ``contour`` in (0, tau) integrates that line for every t (this
    exists for contour-independence checks and loses accuracy for large t).
    ``full_output`` adds the maximal imaginary part, a realness diagnostic.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    res, imag = _evaluate_orders(F, t, (order,), spec, contour)
    out = res[0]
    if np.ndim(t) == 0:
        out = float(out[0])
    return (out, imag) if full_output else out


def _evaluate_orders(F, t, orders, spec, contour=None):
    t_arr = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    out = np.empty((len(orders), t_arr.size))
    imag = 0.0
    if contour is not None:
        if not 0 < contour < F.tau:
            raise ValueError("contour must lie in (0, tau)")
        groups = [(np.arange(t_arr.size), contour, False)]
    else:
        c = EVAL_CONTOUR_FRACTION * F.tau
        groups = [(np.flatnonzero(t_arr <= 0), c, False), (np.flatnonzero(t_arr > 0), -c, True)]
    for idx, c, add_residue in groups:
        for start in range(0, idx.size, _T_CHUNK):
            sel = idx[start : start + _T_CHUNK]
            tt = t_arr[sel]
            vals, im = _bromwich_line(F, tt, orders, c, spec)
            if add_residue:
                vals = vals + np.stack([_residue(j, tt, F.kappa0) for j in orders])
            out[:, sel] = vals
            imag = max(imag, float(im.max()))
    if imag > IMAG_HEALTH_LIMIT:
        raise ConsistencyError(f"Bromwich integral has imaginary part {imag:.3e}; F is probably not real entire")
    return out, imag


@dataclass(frozen=True, eq=False)
class GTables:
    """Tabulated g, g', g'' with tail models and cached constants."""

    F: LPDescriptor
    g: SampledFunction
    g1: SampledFunction
    g2: SampledFunction
    g1_at_0: float
    spec: QuadratureSpec
    imag_health: float = 0.0

    def table(self, order: int) -> SampledFunction:
        return (self.g, self.g1, self.g2)[order]

    @property
    def t_min(self) -> float:
        return self.g.lo

    @property
    def t_max(self) -> float:
        return self.g.hi


def _fit_tails(grid, values, tau, abs_tol, name):
    n = grid.size
    m = max(8, n // 10)
    left, res_l = ExpTail.fit(grid[:m], values[:m], tau, degree=1)
    right, res_r = PolyTail.fit(grid[-m:], values[-m:], degree=1)
    for side, res, window in (("left", res_l, values[:m]), ("right", res_r, values[-m:])):
        scale = float(np.max(np.abs(window)))
        if res > 0.1 * scale + abs_tol:
            raise TailModelError(f"{name}: {side} tail model residual {res:.3e} exceeds 10% of {scale:.3e}")
    return left, right


def build_g_tables(
    F: LPDescriptor,
    t_min: float = -24.0,
    t_max: float = 36.0,
    n: int = 8192,
    spec: QuadratureSpec = INNER_SPEC,
) -> GTables:
    """Tabulate g, g', g'' on a uniform grid over [t_min, t_max].

    The left tail is modelled as (p0 + p1 t) e^{tau t}, the shape forced by
    the double zeros of F at +-tau; the right tail as a linear polynomial,
    since g(t) - t/k0 decays like e^{-tau t}.
    """
    if not t_min < 0 < t_max:
        raise ValueError("need t_min < 0 < t_max")
    if n < 128:
        raise ValueError("need n >= 128")
    grid = np.linspace(t_min, t_max, n)
    vals, imag = _evaluate_orders(F, grid, (0, 1, 2), spec)
    tables = []
    for j, name in enumerate(("g", "g1", "g2")):
        v = vals[j]
        bad = np.flatnonzero(~np.isfinite(v))
        if bad.size:
            from .numerics import TabulationError

            k = int(bad[0])
            raise TabulationError(f"{name}: non-finite sample at node {k}", node=k, value=v[k])
        left, right = _fit_tails(grid, v, F.tau, spec.abs_tol, name)
        tables.append(SampledFunction(grid, v, left, right, name))
    g1_0 = float(bromwich_eval(F, 0.0, 1, spec))
    return GTables(F, tables[0], tables[1], tables[2], g1_0, spec, imag)


def _integrate_table_against(G: GTables, order: int, weight, spec):
    """Integral over (-inf, t_max] of g^(order) times ``weight``, plus a bound on the neglected right part."""
    sf = G.table(order)
    val = integrate_sampled(sf, weight, -math.inf, sf.hi, spec, left_decay=G.F.tau)
    edge = abs(float(sf.values[-1]))
    return val, edge / G.F.tau


def cosine_transform_check(F: LPDescriptor, G: GTables, zeta: float, spec: QuadratureSpec = INNER_SPEC, tol: float = 1e-4):
    """int g''(l) cos(zeta l) dl against -zeta^2/F(i zeta) = 1/(F(iz)/(iz)^2)."""
    zeta = float(zeta)
    lhs, neglected = _integrate_table_against(G, 2, lambda t: np.cos(zeta * t), spec)
    rhs = 1.0 / complex(F.ratio_z2(1j * zeta)).real
    return ReportEntry.compare(
        f"laplace.cosine_transform[zeta={zeta:g}]", rhs, lhs, tol, mode="rel", neglected_right_tail=neglected
    )


def sine_transform_check(
    F: LPDescriptor, G: GTables, zeta: float, w: float, spec: QuadratureSpec = INNER_SPEC, tol: float = 1e-4
):
    """int g''(l + w) sin(zeta l) dl against zeta^2 sin(zeta w)/F(i zeta).

    Relative errors are measured against the amplitude zeta^2/|F(i zeta)|,
    so the check stays meaningful at w = 0 where both sides vanish.
    """
    zeta, w = float(zeta), float(w)
    lhs, neglected = _integrate_table_against(G, 2, lambda s: np.sin(zeta * (s - w)), spec)
    amp = -1.0 / complex(F.ratio_z2(1j * zeta)).real
    rhs = amp * math.sin(zeta * w)
    return ReportEntry.compare(
        f"laplace.sine_transform[zeta={zeta:g},w={w:g}]",
        rhs,
        lhs,
        tol,
        mode="rel",
        scale=abs(amp),
        neglected_right_tail=neglected,
    )


def laplace_identity_check(F: LPDescriptor, G: GTables, z: complex, order: int = 0, spec: QuadratureSpec = INNER_SPEC, tol: float = 1e-6):
    """int e^{-zt} g^(order)(t) dt against z^order / F(z) for 0 < Re z < tau."""
    z = complex(z)
    if not 0 < z.real < F.tau:
        raise ValueError("z must lie in the strip 0 < Re z < tau")
    sf = G.table(order)

    def wr(t):
        return np.exp(-z.real * t) * np.cos(z.imag * t)

    def wi(t):
        return -np.exp(-z.real * t) * np.sin(z.imag * t)

    # the right tail of g^(j) is polynomial, so e^{-Re z t} makes it integrable
    re = integrate_sampled(sf, wr, -math.inf, math.inf, spec, left_decay=F.tau - z.real, right_decay=z.real)
    im = integrate_sampled(sf, wi, -math.inf, math.inf, spec, left_decay=F.tau - z.real, right_decay=z.real)
    lhs = complex(re, im)
    rhs = complex(z**order / F(z))
    err = abs(lhs - rhs)
    ent = ReportEntry.compare(f"laplace.reciprocal[order={order},z={z:g}]", 0.0, err, tol, mode="rel", scale=abs(rhs))
    ent.target = abs(rhs)
    ent.measured = abs(lhs)
    return ent


def verify_g_shape(G: GTables, tol: float = 1e-9) -> VerificationReport:
    """Nonnegativity of g, g', g'' and monotonicity of g'' on each side of 0."""
    rep = VerificationReport()
    for name, sf in (("g", G.g), ("g1", G.g1), ("g2", G.g2)):
        rep.add(ReportEntry.bound(f"laplace.shape.{name}_nonnegative", max(0.0, -float(sf.values.min())), tol))
    grid, v = G.g2.grid, G.g2.values
    d = np.diff(v)
    mid = 0.5 * (grid[1:] + grid[:-1])
    rise_right = float(np.max(d[mid > 0], initial=0.0))
    fall_left = float(np.max(-d[mid < 0], initial=0.0))
    rep.add(ReportEntry.bound("laplace.shape.g2_nonincreasing_right", max(rise_right, 0.0), tol))
    rep.add(ReportEntry.bound("laplace.shape.g2_nondecreasing_left", max(fall_left, 0.0), tol))
    k = int(np.argmax(v))
    rep.add(ReportEntry.bound("laplace.shape.g2_argmax_at_origin", abs(float(grid[k])), 2 * float(grid[1] - grid[0])))
    even = G.g2(-grid[grid > 0]) - G.g2(grid[grid > 0])
    rep.add(ReportEntry.bound("laplace.shape.g2_even", float(np.max(np.abs(even))) / float(v.max()), 1e-6))
    return rep
