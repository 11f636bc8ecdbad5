"""The kernel h_a, the entire function A(F, a, z) and the interpolants M+-.

With g the Bromwich inverse of 1/F (see :mod:`laplace`),

    h_a(w) = (1/a) int_{-inf}^0 g'(l + w) (1 - cos a l) dl  >= 0,

and A(F, a, .) is the entire function given on the two overlapping
half-planes by

    A1(z) = (F(z)/a) int_{-inf}^0 h_a(w) e^{-zw} dw                 (Re z < tau)
    A2(z) = 1/(z^2 + a^2) - (F(z)/a) int_0^inf h_a(w) e^{-zw} dw     (Re z > 0).

The one-sided interpolants of t_a are

    M-(z) = A(z) + (h_a(0)/a) F(z)/z,
    M+(z) = M-(z) + (2 g'(0)/a^2) F(z)/z^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .laplace import GTables, LPDescriptor
from .numerics import (
    OUTER_SPEC,
    ConstructionError,
    DomainError,
    ExpTail,
    PolyTail,
    QuadratureSpec,
    SampledFunction,
    cell_nodes,
    integrate_sampled,
)
from .report import ReportEntry, VerificationReport

BRANCH_MARGIN_FRACTION = 0.05
_NODES_PER_CELL = 6
_Z_CHUNK = 64
# integrand magnitude below which table nodes are dropped from A's integrals
_CUTOFF = 1e-18


def t_a(a: float, x):
    """1/(x^2 + a^2) for x >= 0 and 0 for x < 0 (right-continuous at 0)."""
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, 1.0 / (x * x + a * a), 0.0)


def heaviside(x):
    """1 for x >= 0, else 0."""
    x = np.asarray(x, dtype=float)
    return np.where(x >= 0, 1.0, 0.0)


@dataclass(frozen=True, eq=False)
class HTable:
    """Tabulated h_a and h_a' with the scalars h_a(0), h_a'(0)."""

    h: SampledFunction
    h1: SampledFunction
    h_at_0: float
    h1_at_0: float
    a: float
    G: GTables
    nodes: np.ndarray
    weighted: np.ndarray

    @property
    def w_min(self) -> float:
        return self.h.lo

    @property
    def w_max(self) -> float:
        return self.h.hi


def _cumulative_trig(sf: SampledFunction, a: float, points: np.ndarray):
    """C(w) = int_{-inf}^w f cos(as) ds and S(w) = int_{-inf}^w f sin(as) ds at ``points``.

    Cell integrals of the cubic interpolant are summed cumulatively and the
    final partial cell is added separately; the part left of the grid comes
    from the tail model.
    """
    grid = sf.grid
    x, wts = cell_nodes(grid, _NODES_PER_CELL)
    fv = sf(x) * wts
    cos_cell = (fv * np.cos(a * x)).reshape(-1, _NODES_PER_CELL).sum(axis=1)
    sin_cell = (fv * np.sin(a * x)).reshape(-1, _NODES_PER_CELL).sum(axis=1)

    # int_{-inf}^{lo} f(s) e^{ias} ds in closed form from the tail model
    left = complex(sf.left_tail.laplace(-1j * a, sf.lo))
    cum_c = np.concatenate([[0.0], np.cumsum(cos_cell)]) + left.real
    cum_s = np.concatenate([[0.0], np.cumsum(sin_cell)]) + left.imag

    points = np.asarray(points, dtype=float)
    k = np.clip(np.searchsorted(grid, points, side="right") - 1, 0, grid.size - 2)
    lo = grid[k]
    xg, wg = np.polynomial.legendre.leggauss(_NODES_PER_CELL)
    half = 0.5 * (points - lo)
    s = (lo + half)[:, None] + half[:, None] * xg[None, :]
    fs = sf(s.ravel()).reshape(s.shape) * (half[:, None] * wg[None, :])
    part_c = (fs * np.cos(a * s)).sum(axis=1)
    part_s = (fs * np.sin(a * s)).sum(axis=1)
    return cum_c[k] + part_c, cum_s[k] + part_s


def _h_from_g(G: GTables, a: float, w: np.ndarray, order: int):
    """h_a^(order)(w) = (1/a)[g^(order)(w) - cos(aw) C(w) - sin(aw) S(w)] with C, S built on g^(order+1)."""
    base = G.table(order)
    deriv = G.table(order + 1)
    C, S = _cumulative_trig(deriv, a, w)
    return (base(w) - np.cos(a * w) * C - np.sin(a * w) * S) / a


def build_h_table(
    G: GTables,
    a: float,
    w_min: Optional[float] = None,
    w_max: Optional[float] = None,
    n: Optional[int] = None,
    spec: QuadratureSpec = OUTER_SPEC,
) -> HTable:
    """Tabulate h_a (and h_a') on a uniform grid.

    Expanding 1 - cos a(s - w) turns the defining integral into running
    integrals of g' against cos(as) and sin(as), so the whole table costs
    one pass over the cells of the g grid.  The integrand is nonnegative, so
    no cancellation-prone oscillatory sum is involved.  Defaults reuse the g
    grid.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    w_min = G.t_min if w_min is None else float(w_min)
    w_max = G.t_max if w_max is None else float(w_max)
    n = G.g.grid.size if n is None else int(n)
    if w_min < G.t_min or w_max > G.t_max or not w_min < 0 < w_max:
        raise ValueError("h grid must satisfy t_min <= w_min < 0 < w_max <= t_max")
    grid = np.linspace(w_min, w_max, n)
    pts = np.concatenate([grid, [0.0]])
    hv = _h_from_g(G, a, pts, 0)
    h1v = _h_from_g(G, a, pts, 1)
    h0, h10 = float(hv[-1]), float(h1v[-1])
    hv, h1v = hv[:-1], h1v[:-1]

    tau = G.F.tau
    m = max(8, n // 10)
    tails = []
    for vals, name in ((hv, "h"), (h1v, "h1")):
        left, res_l = ExpTail.fit(grid[:m], vals[:m], tau, degree=1)
        right, res_r = PolyTail.fit(grid[-m:], vals[-m:], degree=1, freq=a)
        for side, res, window in (("left", res_l, vals[:m]), ("right", res_r, vals[-m:])):
            if res > 0.1 * float(np.max(np.abs(window))) + spec.abs_tol:
                from .numerics import TailModelError

                raise TailModelError(f"{name}: {side} tail residual {res:.3e}")
        tails.append((left, right))
    h = SampledFunction(grid, hv, tails[0][0], tails[0][1], "h")
    h1 = SampledFunction(grid, h1v, tails[1][0], tails[1][1], "h1")

    nodes, wts = cell_nodes(grid, _NODES_PER_CELL)
    weighted = h(nodes) * wts
    table = HTable(h, h1, h0, h10, float(a), G, nodes, weighted)
    rep = h_table_invariants(table)
    if not rep.overall_pass:
        bad = [e.check_name for e in rep.entries if not e.passed]
        raise ConstructionError(f"h table invariants failed: {', '.join(bad)}")
    return table


def h_table_invariants(H: HTable, slack: float = 1e-9, mono_slack: float = 1e-8) -> VerificationReport:
    """Sign, monotonicity and the bounds 0 <= h <= 2g/a, 0 <= h' <= 2g'/a on the grid."""
    rep = VerificationReport()
    grid = H.h.grid
    hv, h1v = H.h.values, H.h1.values
    G = H.G
    rep.add(ReportEntry.bound("interp.h_nonnegative", max(0.0, -float(hv.min())), slack))
    rep.add(ReportEntry.bound("interp.h_nondecreasing", max(0.0, -float(np.diff(hv).min())), mono_slack))
    rep.add(ReportEntry.bound("interp.h_le_2g_over_a", max(0.0, float(np.max(hv - 2.0 * G.g(grid) / H.a))), slack))
    rep.add(ReportEntry.bound("interp.h1_nonnegative", max(0.0, -float(h1v.min())), slack))
    rep.add(ReportEntry.bound("interp.h1_le_2g1_over_a", max(0.0, float(np.max(h1v - 2.0 * G.g1(grid) / H.a))), slack))
    return rep


def h_prime0_identity_check(H: HTable, F: LPDescriptor, G: GTables, tol: float = 1e-5) -> ReportEntry:
    """h_a'(0) against g'(0)/a + a/(2 F(ia))."""
    a = H.a
    Fia = complex(F(1j * a)).real
    rhs = G.g1_at_0 / a + a / (2.0 * Fia)
    return ReportEntry.compare("interp.h_prime0_identity", rhs, H.h1_at_0, tol, mode="rel", F_ia=Fia)


def h_second(G: GTables, a: float, w, spec: QuadratureSpec = OUTER_SPEC):
    """h_a''(w) = -int_{-inf}^w g''(s) sin(a(s - w)) ds by direct quadrature."""
    w = np.atleast_1d(np.asarray(w, dtype=float))
    out = np.empty_like(w)
    for i, wi in enumerate(w):
        if wi > G.t_max:
            raise DomainError("w beyond the g table")
        out[i] = -integrate_sampled(
            G.g2, lambda s, wi=wi: np.sin(a * (s - wi)), -math.inf, wi, spec, left_decay=G.F.tau
        )
    return out


def h_second_reflection_check(
    H: HTable, G: GTables, F: LPDescriptor, w: float, spec: QuadratureSpec = OUTER_SPEC, tol: float = 1e-5
) -> ReportEntry:
    """h_a''(w) - h_a''(-w) against -a^2 sin(aw)/F(ia); relative to a^2/|F(ia)|."""
    a = H.a
    Fia = complex(F(1j * a)).real
    hp, hm = h_second(G, a, [w, -w], spec)
    rhs = -a * a * math.sin(a * w) / Fia
    return ReportEntry.compare(
        f"interp.h_second_reflection[w={w:g}]", rhs, hp - hm, tol, mode="rel", scale=a * a / abs(Fia)
    )


# --- the entire function A ---------------------------------------------------


def _laplace_h(H: HTable, z: np.ndarray, side: str) -> np.ndarray:
    """int h(w) e^{-zw} dw over (-inf, 0] (side='left') or [0, inf) (side='right')."""
    nodes, weighted = H.nodes, H.weighted
    out = np.empty(z.shape, dtype=complex)
    order = np.argsort(z.real, kind="stable")
    # split the cell containing 0 so both halves are exact cell integrals
    k0 = int(np.searchsorted(H.h.grid, 0.0, side="right") - 1)
    g0, g1 = H.h.grid[k0], H.h.grid[k0 + 1]
    xg, wg = np.polynomial.legendre.leggauss(_NODES_PER_CELL)
    if side == "left":
        keep = nodes < g0
        lo_, hi_ = g0, 0.0
    else:
        keep = nodes > g1
        lo_, hi_ = 0.0, g1
    extra_x = 0.5 * (lo_ + hi_) + 0.5 * (hi_ - lo_) * xg
    extra_w = H.h(extra_x) * 0.5 * (hi_ - lo_) * wg
    nx = np.concatenate([nodes[keep], extra_x])
    nw = np.concatenate([weighted[keep], extra_w])
    srt = np.argsort(nx)
    nx, nw = nx[srt], nw[srt]
    mag = np.abs(nw)
    for start in range(0, order.size, _Z_CHUNK):
        sel = order[start : start + _Z_CHUNK]
        zz = z[sel]
        if side == "left":
            r = float(zz.real.max())
            env = mag * np.exp(-r * nx)
            big = np.flatnonzero(env > _CUTOFF)
            i0 = int(big[0]) if big.size else nx.size - 1
            use_tail = i0 == 0
            xs, ws = nx[i0:], nw[i0:]
        else:
            r = float(zz.real.min())
            env = mag * np.exp(-r * nx)
            big = np.flatnonzero(env > _CUTOFF)
            i1 = int(big[-1]) + 1 if big.size else 1
            use_tail = i1 == nx.size
            xs, ws = nx[:i1], nw[:i1]
        vals = np.exp(-np.outer(zz, xs)) @ ws
        if use_tail:
            if side == "left":
                vals = vals + H.h.left_tail.laplace(zz, H.w_min)
            else:
                vals = vals + H.h.right_tail.laplace(zz, H.w_max)
        out[sel] = vals
    return out


def eval_A_interp(
    F: LPDescriptor,
    G: GTables,
    H: HTable,
    a: float,
    z,
    branch: str = "auto",
    spec: QuadratureSpec = OUTER_SPEC,
):
    """A(F, a, z) from the left (A1) or right (A2) integral representation.

    ``branch='auto'`` picks A1 where Re z <= tau/2.  An explicit branch must
    stay a margin of 0.05 tau inside its half-plane.  The integrals run over
    the h table cell by cell (6-point Gauss-Legendre on each cubic piece)
    and the closed-form Laplace transforms of the tail models.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z).ravel()
    tau = F.tau
    margin = BRANCH_MARGIN_FRACTION * tau
    if branch == "auto":
        left = z.real <= 0.5 * tau
    elif branch == "left":
        if np.any(z.real >= tau - margin):
            raise DomainError("left branch needs Re z < tau - margin")
        left = np.ones(z.shape, dtype=bool)
    elif branch == "right":
        if np.any(z.real <= margin):
            raise DomainError("right branch needs Re z > margin")
        left = np.zeros(z.shape, dtype=bool)
    else:
        raise ValueError("branch must be 'auto', 'left' or 'right'")
    out = np.empty(z.shape, dtype=complex)
    Fz = F(z)
    if np.any(left):
        zl = z[left]
        out[left] = Fz[left] / a * _laplace_h(H, zl, "left")
    if np.any(~left):
        zr = z[~left]
        out[~left] = 1.0 / (zr * zr + a * a) - Fz[~left] / a * _laplace_h(H, zr, "right")
    return out[0] if scalar else out


@dataclass(frozen=True, eq=False)
class InterpolantM:
    """M+ (kind='plus') or M- (kind='minus') for F and a."""

    kind: str
    F: LPDescriptor
    G: GTables
    H: HTable
    a: float
    g1_at_0: float
    spec: QuadratureSpec = OUTER_SPEC

    def __post_init__(self):
        if self.kind not in ("plus", "minus"):
            raise ValueError("kind must be 'plus' or 'minus'")

    @property
    def value_at_0(self) -> float:
        return 1.0 / self.a**2 if self.kind == "plus" else 0.0

    def __call__(self, z):
        return eval_M(self, z, self.spec)

    def real(self, x):
        """Values on the real axis (imaginary parts vanish there)."""
        return np.real(eval_M(self, np.asarray(x, dtype=float), self.spec))


def build_interpolants(F: LPDescriptor, G: GTables, H: HTable, spec: QuadratureSpec = OUTER_SPEC):
    """(M+, M-) for the tables; M+ needs F(ia) < 0."""
    a = H.a
    Fia = complex(F(1j * a)).real
    if not Fia < 0:
        raise ConstructionError(f"F(ia) = {Fia:.6g} is not negative; the majorant would fail")
    plus = InterpolantM("plus", F, G, H, a, G.g1_at_0, spec)
    minus = InterpolantM("minus", F, G, H, a, G.g1_at_0, spec)
    return plus, minus


def eval_M(I: InterpolantM, z, spec: QuadratureSpec = OUTER_SPEC):
    """M+-(z); exactly 1/a^2 (plus) or 0 (minus) at z = 0."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    zf = np.atleast_1d(z).ravel()
    a = I.a
    r2 = I.F.ratio_z2(zf)  # F(z)/z^2
    out = eval_A_interp(I.F, I.G, I.H, a, zf, "auto", spec) + (I.H.h_at_0 / a) * zf * r2
    if I.kind == "plus":
        out = out + (2.0 * I.g1_at_0 / a**2) * r2
    out[zf == 0] = I.value_at_0
    out = out.reshape(np.shape(z))
    return out[()] if scalar else out


def gap(I_plus: InterpolantM, x):
    """M+ - M- = (2 g'(0)/a^2) F(x)/x^2, evaluated in closed form."""
    x = np.asarray(x, dtype=complex)
    return (2.0 * I_plus.g1_at_0 / I_plus.a**2) * I_plus.F.ratio_z2(x)


def check_sign(I: InterpolantM, xs, slack: float = 1e-9) -> ReportEntry:
    """M- <= t_a (kind='minus') or t_a <= M+ (kind='plus') at the points ``xs``."""
    xs = np.asarray(xs, dtype=float)
    diff = I.real(xs) - t_a(I.a, xs)
    viol = -diff if I.kind == "plus" else diff
    k = int(np.argmax(viol))
    worst = max(0.0, float(viol[k]))
    return ReportEntry.bound(
        f"interp.sign[{I.kind}]",
        worst,
        slack,
        worst_at=float(xs[k]),
        n_points=int(xs.size),
        n_violations=int(np.sum(viol > slack)),
    )


def check_growth_bound(I: InterpolantM, xs, zeros=None, exclusion: float = 1e-3, limit: float = math.inf) -> ReportEntry:
    """sup |M(x) - t_a(x)| (1 + x^2) / F(x) over ``xs`` minus neighbourhoods of F's zeros.

    ``zeros`` lists the nonnegative zeros of F (mirrored automatically); the
    origin is always excluded.
    """
    xs = np.asarray(xs, dtype=float)
    z = np.array([0.0] if zeros is None else zeros, dtype=float)
    z = np.concatenate([z, -z])
    keep = np.min(np.abs(xs[:, None] - z[None, :]), axis=1) > exclusion
    x = xs[keep]
    Fx = np.real(I.F(x))
    ratio = np.abs(I.real(x) - t_a(I.a, x)) * (1.0 + x * x) / Fx
    k = int(np.argmax(ratio))
    sup = float(ratio[k])
    return ReportEntry(
        f"interp.growth_bound[{I.kind}]",
        None,
        sup,
        math.nan,
        math.nan,
        float(limit),
        bool(math.isfinite(sup) and sup <= limit),
        {"mode": "bound", "sup_at": float(x[k]), "n_points": int(x.size)},
    )


def seam_check(F: LPDescriptor, G: GTables, H: HTable, a: float, z, tol: float = 1e-7) -> ReportEntry:
    """max |A1(z) - A2(z)| at points of the overlap strip."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    d = np.abs(eval_A_interp(F, G, H, a, z, "left") - eval_A_interp(F, G, H, a, z, "right"))
    k = int(np.argmax(d))
    return ReportEntry.bound("interp.seam", float(d[k]), tol, worst_at=str(complex(z[k])), n_points=int(z.size))
