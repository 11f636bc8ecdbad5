"""Quadrature, bracketed root finding and tabulated functions.

Everything here is deterministic: node layouts are fixed by the inputs, and
refinement happens by doubling the panel count, never by data-dependent
bisection of individual panels.  Integrands are vectorized: ``f`` receives a
1-D array of nodes and returns an array whose *last* axis runs over those
nodes, so one call can integrate a whole batch of related functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence, Union

import numpy as np

ArrayLike = Union[float, complex, np.ndarray]


class NumericsError(ArithmeticError):
    """Base class for failures of the numerical substrate."""


class ConvergenceError(NumericsError):
    """Tolerance was not reached within the allowed work.

    ``estimate`` and ``error_bound`` hold the best result obtained.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class DivergenceError(ConvergenceError):
    pass


class BracketError(NumericsError, ValueError):
    pass


class TabulationError(NumericsError, ValueError):
    def __init__(self, message, node=None, value=None):
        super().__init__(message)
        self.node = node
        self.value = value


class DomainError(NumericsError, ValueError):
    pass


class TailModelError(NumericsError):
    pass


class ConsistencyError(NumericsError):
    """A computed quantity violates a structural property (e.g. realness)."""


class ConstructionError(NumericsError):
    """An invariant check failed while building a table or interpolant."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and work limits for the composite Gauss-Legendre rules."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_panel_doublings: int = 12
    nodes_per_panel: int = 16

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0:
            raise ValueError("tolerances must be non-negative")
        if self.abs_tol == 0 and self.rel_tol == 0:
            raise ValueError("at least one of abs_tol, rel_tol must be positive")
        if self.max_panel_doublings < 1:
            raise ValueError("max_panel_doublings must be >= 1")
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")

    def tolerance(self, value):
        return np.maximum(self.abs_tol, self.rel_tol * np.abs(value))


# Inner (Bromwich) and outer (h, A) defaults; inner errors are amplified once
# per nesting level.
INNER_SPEC = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-9)
OUTER_SPEC = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-7)


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_nodes(edges: np.ndarray, n: int):
    x, w = _gauss_legendre(n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


def _rule(f, edges, n):
    nodes, weights = _panel_nodes(edges, n)
    values = np.asarray(f(nodes))
    if values.shape[-1] != nodes.size:
        raise ValueError("integrand must return an array whose last axis matches the nodes")
    return values @ weights


def _split(edges: np.ndarray) -> np.ndarray:
    out = np.empty(2 * edges.size - 1, dtype=float)
    out[0::2] = edges
    out[1::2] = 0.5 * (edges[1:] + edges[:-1])
    return out


def integrate_finite(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    spec: QuadratureSpec = INNER_SPEC,
    *,
    breakpoints: Optional[Sequence[float]] = None,
    full_output: bool = False,
):
    """Integrate ``f`` over ``[lo, hi]`` with composite Gauss-Legendre panels.

    The initial panels are delimited by ``lo``, ``hi`` and any ``breakpoints``
    strictly inside; every refinement halves all panels.  Iteration stops when
    two successive levels agree within ``max(abs_tol, rel_tol*|I|)`` for every
    component of a batched integrand.

    Returns the integral (same shape as ``f``'s output minus the last axis),
    or ``(integral, error_estimate)`` when ``full_output`` is set.
    """
    lo = float(lo)
    hi = float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("integrate_finite needs finite limits")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    edges = np.array([lo, hi])
    if breakpoints is not None:
        bp = np.asarray(breakpoints, dtype=float).ravel()
        bp = bp[(bp > lo) & (bp < hi)]
        edges = np.unique(np.concatenate([edges, bp]))
    n = spec.nodes_per_panel
    previous = _rule(f, edges, n)
    err = np.inf
    for _ in range(spec.max_panel_doublings):
        edges = _split(edges)
        current = _rule(f, edges, n)
        err = np.abs(current - previous)
        if np.all(err <= spec.tolerance(current)):
            return (current, err) if full_output else current
        previous = current
    raise ConvergenceError(
        f"no convergence on [{lo}, {hi}] after {spec.max_panel_doublings} doublings "
        f"(max error estimate {np.max(err):.3e})",
        estimate=previous,
        error_bound=err,
    )


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    origin: float,
    direction: str,
    decay_rate_hint: float,
    spec: QuadratureSpec = INNER_SPEC,
    *,
    full_output: bool = False,
    grace: int = 4,
    max_panels: int = 64,
):
    """Integrate ``f`` from ``origin`` to +inf (``direction='+'``) or -inf.

    Panels start at width ``1/decay_rate_hint`` and double in width, so both
    exponential and algebraic decay are handled.  Each panel is integrated by
    :func:`integrate_finite`; extension stops once a panel contributes less
    than a quarter of the running tolerance.  If panel contributions fail to
    decrease for ``grace`` consecutive panels a :class:`DivergenceError` is
    raised.
    """
    if direction not in ("+", "-"):
        raise ValueError("direction must be '+' or '-'")
    if not decay_rate_hint > 0:
        raise ValueError("decay_rate_hint must be positive")
    sign = 1.0 if direction == "+" else -1.0
    width = 1.0 / decay_rate_hint
    start = 0.0
    total = 0.0
    err_total = 0.0
    last = np.inf
    rising = 0
    for _ in range(max_panels):
        a, b = origin + sign * start, origin + sign * (start + width)
        lo, hi = (a, b) if sign > 0 else (b, a)
        part, err = integrate_finite(f, lo, hi, spec, full_output=True)
        total = total + part
        err_total = err_total + err
        size = float(np.max(np.abs(part)))
        if np.all(np.abs(part) <= 0.25 * spec.tolerance(total)):
            return (total, err_total) if full_output else total
        if size >= last:
            rising += 1
            if rising >= grace:
                raise DivergenceError(
                    f"panel contributions stopped decreasing beyond {origin}{direction}{start}",
                    estimate=total,
                    error_bound=size,
                )
        else:
            rising = 0
        last = size
        start += width
        width *= 2.0
    raise ConvergenceError(
        f"semi-infinite integral from {origin} did not settle within {max_panels} panels",
        estimate=total,
        error_bound=last,
    )


@dataclass(frozen=True)
class RootResult:
    root: float
    lo: float
    hi: float
    iterations: int


def bracket_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    *,
    max_iter: int = 200,
    full_output: bool = False,
):
    """Find a root of ``f`` inside ``[lo, hi]``.

    Uses the Illinois variant of regula falsi, which keeps a sign change at
    every step, with a bisection step whenever an iteration fails to halve the
    bracket.  Stops when the bracket is no wider than ``tol``; with
    ``full_output`` the final bracket is returned alongside the root.
    """
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")
    flo = float(f(lo))
    fhi = float(f(hi))
    if flo == 0.0 or fhi == 0.0:
        r = lo if flo == 0.0 else hi
        return RootResult(r, r, r, 0) if full_output else r
    if not flo * fhi < 0:
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo:.3e}, {fhi:.3e}")
    side = 0
    it = 0
    while hi - lo > tol:
        if it >= max_iter:
            raise ConvergenceError(f"bracket [{lo}, {hi}] still wider than {tol}", estimate=0.5 * (lo + hi))
        it += 1
        width = hi - lo
        x = (lo * fhi - hi * flo) / (fhi - flo)
        if not lo < x < hi:
            x = lo + 0.5 * width
        fx = float(f(x))
        if fx == 0.0:
            return RootResult(x, x, x, it) if full_output else x
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo *= 0.5
            side = 1
        if hi - lo > 0.5 * width and hi - lo > tol:
            m = lo + 0.5 * (hi - lo)
            fm = float(f(m))
            if fm == 0.0:
                return RootResult(m, m, m, it) if full_output else m
            if (fm < 0) == (flo < 0):
                lo, flo = m, fm
            else:
                hi, fhi = m, fm
            side = 0
    root = lo - flo * (hi - lo) / (fhi - flo)
    root = min(max(root, lo), hi)
    return RootResult(root, lo, hi, it) if full_output else root


# --- tail models -------------------------------------------------------------


@dataclass(frozen=True)
class ExpTail:
    """``poly(t) * exp(rate * t)``; ``coeffs`` are lowest degree first."""

    coeffs: tuple
    rate: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.polynomial.polynomial.polyval(t, self.coeffs) * np.exp(self.rate * t)

    def laplace(self, z, edge):
        """Integral of model(w) e^{-zw} over (-inf, edge]; needs Re z < rate."""
        z = np.asarray(z, dtype=complex)
        lam = self.rate - z
        if np.any(lam.real <= 0):
            raise DomainError("left-tail Laplace integral diverges for Re z >= rate")
        total = np.zeros_like(z)
        for k, c in enumerate(self.coeffs):
            # int_{-inf}^W w^k e^{lam w} dw = e^{lam W} sum_j (-1)^j k!/(k-j)! W^{k-j} / lam^{j+1}
            acc = np.zeros_like(z)
            for j in range(k + 1):
                acc = acc + (-1) ** j * math.perm(k, j) * edge ** (k - j) / lam ** (j + 1)
            total = total + c * acc
        return total * np.exp(lam * edge)

    @classmethod
    def fit(cls, t, y, rate, degree=1):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        # least squares on the unscaled values, so noise far out is not amplified
        e = np.exp(rate * t)
        design = np.stack([t**k * e for k in range(degree + 1)], axis=1)
        coeffs, *_ = np.linalg.lstsq(design, y, rcond=None)
        model = cls(tuple(float(c) for c in coeffs), float(rate))
        return model, float(np.max(np.abs(model(t) - y)))


@dataclass(frozen=True)
class PolyTail:
    """``poly(t) + s*sin(freq*t) + c*cos(freq*t)``; ``coeffs`` lowest first."""

    coeffs: tuple
    freq: float = 0.0
    sin_coeff: float = 0.0
    cos_coeff: float = 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.polynomial.polynomial.polyval(t, self.coeffs)
        if self.freq:
            out = out + self.sin_coeff * np.sin(self.freq * t) + self.cos_coeff * np.cos(self.freq * t)
        return out

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def laplace(self, z, edge):
        """Integral of model(w) e^{-zw} over [edge, inf); needs Re z > 0."""
        z = np.asarray(z, dtype=complex)
        if np.any(z.real <= 0):
            raise DomainError("right-tail Laplace integral diverges for Re z <= 0")
        total = np.zeros_like(z)
        for k, c in enumerate(self.coeffs):
            # int_W^inf w^k e^{-zw} dw = e^{-zW} sum_j k!/(k-j)! W^{k-j} / z^{j+1}
            acc = np.zeros_like(z)
            for j in range(k + 1):
                acc = acc + math.perm(k, j) * edge ** (k - j) / z ** (j + 1)
            total = total + c * acc
        total = total * np.exp(-z * edge)
        if self.freq:
            f = self.freq
            up = np.exp(-(z - 1j * f) * edge) / (z - 1j * f)
            down = np.exp(-(z + 1j * f) * edge) / (z + 1j * f)
            total = total + self.sin_coeff * (up - down) / 2j + self.cos_coeff * (up + down) / 2
        return total

    @classmethod
    def fit(cls, t, y, degree=1, freq=None):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        cols = [t**k for k in range(degree + 1)]
        if freq:
            cols += [np.sin(freq * t), np.cos(freq * t)]
        design = np.stack(cols, axis=1)
        sol, *_ = np.linalg.lstsq(design, y, rcond=None)
        if freq:
            model = cls(tuple(float(c) for c in sol[: degree + 1]), float(freq), float(sol[-2]), float(sol[-1]))
        else:
            model = cls(tuple(float(c) for c in sol))
        return model, float(np.max(np.abs(model(t) - y)))


TailModel = Union[ExpTail, PolyTail]


# --- sampled functions -------------------------------------------------------


def _lagrange4(x, nodes, vals):
    """Cubic through four (node, value) columns, evaluated at ``x``."""
    x0, x1, x2, x3 = nodes
    f0, f1, f2, f3 = vals
    d0, d1, d2, d3 = x - x0, x - x1, x - x2, x - x3
    return (
        f0 * (d1 * d2 * d3) / ((x0 - x1) * (x0 - x2) * (x0 - x3))
        + f1 * (d0 * d2 * d3) / ((x1 - x0) * (x1 - x2) * (x1 - x3))
        + f2 * (d0 * d1 * d3) / ((x2 - x0) * (x2 - x1) * (x2 - x3))
        + f3 * (d0 * d1 * d2) / ((x3 - x0) * (x3 - x1) * (x3 - x2))
    )


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Samples of a real function with a local piecewise-cubic interpolant.

    Each grid cell uses the cubic through its two end nodes and one neighbour
    on each side (shifted inward at the boundary cells).  Outside the grid
    the optional tail models take over; without one, evaluation raises
    :class:`DomainError`.
    """

    grid: np.ndarray
    values: np.ndarray
    left_tail: Optional[TailModel] = None
    right_tail: Optional[TailModel] = None
    name: str = field(default="")

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        values = np.array(self.values, dtype=float)
        if grid.ndim != 1 or grid.size < 4:
            raise ValueError("grid needs at least 4 nodes")
        if values.shape != grid.shape:
            raise ValueError("values and grid must have the same length")
        if not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        grid.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def lo(self) -> float:
        return float(self.grid[0])

    @property
    def hi(self) -> float:
        return float(self.grid[-1])

    def _interp(self, x):
        g, v = self.grid, self.values
        n = g.size
        i = np.searchsorted(g, x, side="right") - 1
        i = np.clip(i, 0, n - 2)
        base = np.clip(i - 1, 0, n - 4)
        idx = base[None, :] + np.arange(4)[:, None]
        out = _lagrange4(x, g[idx], v[idx])
        hit = g[i] == x
        out[hit] = v[i[hit]]
        last = x == g[-1]
        out[last] = v[-1]
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        flat = np.atleast_1d(x).ravel()
        out = np.empty_like(flat)
        inside = (flat >= self.grid[0]) & (flat <= self.grid[-1])
        if np.any(inside):
            out[inside] = self._interp(flat[inside])
        left = flat < self.grid[0]
        right = flat > self.grid[-1]
        if np.any(left):
            if self.left_tail is None:
                raise DomainError(f"{self.name or 'sampled function'}: x={flat[left].min()} below grid and no left tail")
            out[left] = self.left_tail(flat[left])
        if np.any(right):
            if self.right_tail is None:
                raise DomainError(f"{self.name or 'sampled function'}: x={flat[right].max()} above grid and no right tail")
            out[right] = self.right_tail(flat[right])
        if np.any(~np.isfinite(flat)):
            raise DomainError("cannot evaluate a sampled function at a non-finite point")
        out = out.reshape(np.shape(x)) if not scalar else out[0]
        return float(out) if scalar else out

    @property
    def spacing(self) -> float:
        return float(np.max(np.diff(self.grid)))


def tabulate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    n: int,
    left_tail: Optional[TailModel] = None,
    right_tail: Optional[TailModel] = None,
    name: str = "",
) -> SampledFunction:
    """Sample vectorized ``f`` on ``n`` uniform nodes spanning ``[lo, hi]``."""
    if n < 4:
        raise ValueError("need n >= 4")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    grid = np.linspace(lo, hi, n)
    values = np.asarray(f(grid), dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        k = int(bad[0])
        raise TabulationError(f"non-finite sample {values[k]} at node {k} (x={grid[k]})", node=k, value=values[k])
    return SampledFunction(grid, values, left_tail, right_tail, name)


def cell_nodes(grid: np.ndarray, n: int = 6):
    """Gauss-Legendre nodes and weights, ``n`` per cell of ``grid``."""
    return _panel_nodes(np.asarray(grid, dtype=float), n)


def integrate_sampled(
    sf: SampledFunction,
    weight: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    spec: QuadratureSpec,
    *,
    left_decay: Optional[float] = None,
    right_decay: Optional[float] = None,
):
    """Integrate ``sf(t) * weight(t)`` over ``[lo, hi]`` (limits may be infinite).

    On the tabulated range the panels are the grid cells, so each panel sees
    a single cubic piece.  Beyond the grid the tail models are integrated;
    infinite limits need the matching decay-rate hint.  ``weight`` may return
    a batch ``(..., len(t))``.
    """

    def integrand(t):
        return weight(t) * sf(t)

    total = 0.0
    g_lo, g_hi = sf.lo, sf.hi
    a, b = max(lo, g_lo), min(hi, g_hi)
    if a < b:
        total = total + integrate_finite(integrand, a, b, spec, breakpoints=sf.grid)
    if lo < g_lo:
        end = min(hi, g_lo)
        if math.isinf(lo):
            if left_decay is None:
                raise ValueError("left_decay needed for an infinite lower limit")
            total = total + integrate_semi_infinite(integrand, end, "-", left_decay, spec)
        else:
            total = total + integrate_finite(integrand, lo, end, spec)
    if hi > g_hi:
        start = max(lo, g_hi)
        if math.isinf(hi):
            if right_decay is None:
                raise ValueError("right_decay needed for an infinite upper limit")
            total = total + integrate_semi_infinite(integrand, start, "+", right_decay, spec)
        else:
            total = total + integrate_finite(integrand, start, hi, spec)
    return total
