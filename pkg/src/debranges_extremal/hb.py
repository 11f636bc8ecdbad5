"""The Hermite-Biehler function E_a and its de Branges structure.

E_a(z) = sqrt(2/sinh 2 pi a) * sin(pi(z + ia)) / (z + ia), with companions
A_a = (E + E*)/2 (even) and B_a = i(E - E*)/2 (odd), so that E = A - iB.
Writing A and B through E and E* keeps every evaluation free of removable
singularities: both are scaled sinc functions, which are entire and are
evaluated without cancellation by ``numpy.sinc``.  The only quotient left is
B(z)/z at the origin, handled by a short even power series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import INNER_SPEC, QuadratureSpec, bracket_root, integrate_finite
from .report import ReportEntry

# |z| below which B(z)/z switches to its power series
B_OVER_Z_RADIUS = 1e-2
# |z - conj(w)| below which the kernel uses its Cauchy-integral form
KERNEL_CONFLUENT_RADIUS = 0.1
_CAUCHY_RADIUS = 0.5
_CAUCHY_POINTS = 64
_SERIES_TERMS = 8


def _stable_hyperbolics(a):
    """Return tanh(pi a), coth(2 pi a), csch(2 pi a) without overflow."""
    x = 2.0 * math.pi * a
    em = math.exp(-x)
    csch = -2.0 * em / math.expm1(-2.0 * x)
    coth = 1.0 / math.tanh(x)
    return math.tanh(math.pi * a), coth, csch


@dataclass(frozen=True)
class HBParams:
    """Hermite-Biehler data for E_a.

    ``tau`` is the first positive zero of B_a.  It is found when the object
    is created, so instances are immutable and safe to share.
    """

    a: float
    norm_const: float = field(init=False)
    tau: float = field(init=False)

    def __post_init__(self):
        a = float(self.a)
        if not (math.isfinite(a) and a > 0):
            raise ValueError(f"a must be a positive finite number, got {self.a!r}")
        object.__setattr__(self, "a", a)
        x = 2.0 * math.pi * a
        # 2/sinh(x) = -4 e^{-x} / expm1(-2x), finite for every a > 0
        object.__setattr__(self, "norm_const", math.sqrt(-4.0 * math.exp(-x) / math.expm1(-2.0 * x)))
        object.__setattr__(self, "tau", _positive_zero(self, 1))

    @property
    def cosh_scaled(self) -> float:
        """norm_const * cosh(pi a) = sqrt(coth(pi a))."""
        return math.sqrt(1.0 / math.tanh(math.pi * self.a))

    @property
    def sinh_scaled(self) -> float:
        """norm_const * sinh(pi a) = sqrt(tanh(pi a))."""
        return math.sqrt(math.tanh(math.pi * self.a))

    @property
    def b_prime0(self) -> float:
        """B_a'(0) = norm_const * (pi a cosh(pi a) - sinh(pi a)) / a^2."""
        a = self.a
        return (math.pi * a * self.cosh_scaled - self.sinh_scaled) / a**2

    @property
    def zero_slope(self) -> float:
        """m = tanh(pi a)/a: nonzero zeros of B_a solve tan(pi x) = m x."""
        return math.tanh(math.pi * self.a) / self.a


def _asarray_c(z):
    return np.asarray(z, dtype=complex)


def _sinc(w):
    """sin(pi w)/(pi w) for complex w, by its Taylor series near 0.

    np.sinc only special-cases w == 0 exactly; complex division overflows for
    subnormal |w|.
    """
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w) < 1e-3
    ws = w[~small]
    pw = math.pi * ws
    out[~small] = np.sin(pw) / pw
    u = (math.pi * w[small]) ** 2
    out[small] = 1.0 - u / 6.0 * (1.0 - u / 20.0 * (1.0 - u / 42.0))
    return out


def eval_E(p: HBParams, z):
    """E_a(z); vectorized over ``z``."""
    z = _asarray_c(z)
    return p.norm_const * math.pi * _sinc(z + 1j * p.a)


def eval_E_star(p: HBParams, z):
    """E_a*(z) = conj(E_a(conj z))."""
    z = _asarray_c(z)
    return p.norm_const * math.pi * _sinc(z - 1j * p.a)


def eval_A(p: HBParams, z):
    """A_a(z) = (E + E*)/2."""
    return 0.5 * (eval_E(p, z) + eval_E_star(p, z))


def eval_B(p: HBParams, z):
    """B_a(z) = i(E - E*)/2."""
    return 0.5j * (eval_E(p, z) - eval_E_star(p, z))


def eval_AB(p: HBParams, z):
    e = eval_E(p, z)
    es = eval_E_star(p, z)
    return 0.5 * (e + es), 0.5j * (e - es)


def _b_over_z_coeffs(p: HBParams, terms=_SERIES_TERMS):
    """Coefficients d_k with B(z)/z = sum_k d_k z^{2k} / (z^2 + a^2)."""
    a = p.a
    ch, sh = p.cosh_scaled, p.sinh_scaled
    k = np.arange(terms)
    fact_odd = np.array([math.factorial(2 * j + 1) for j in k], dtype=float)
    fact_even = np.array([math.factorial(2 * j) for j in k], dtype=float)
    return (-1.0) ** k * math.pi ** (2 * k) * (a * ch * math.pi / fact_odd - sh / fact_even)


def eval_B_over_z(p: HBParams, z):
    """B_a(z)/z, continuous through z = 0 where it equals B_a'(0)."""
    z = _asarray_c(z)
    out = np.empty_like(z)
    small = np.abs(z) < B_OVER_Z_RADIUS
    big = ~small
    if np.any(big):
        zb = z[big]
        out[big] = eval_B(p, zb) / zb
    if np.any(small):
        zs = z[small]
        d = _b_over_z_coeffs(p)
        num = np.polynomial.polynomial.polyval(zs * zs, d)
        out[small] = num / (zs * zs + p.a**2)
    return out if out.ndim else out[()]


def _kernel_numerator(p, v, zeta):
    """B(zeta)A(v) - A(zeta)B(v): vanishes at zeta = v."""
    av, bv = eval_AB(p, v)
    az, bz = eval_AB(p, zeta)
    return bz * av - az * bv


def kernel(p: HBParams, w, z):
    """Reproducing kernel K(w, z) of H(E_a); broadcasts ``w`` against ``z``.

    Off the confluent set this is [B(z)A(w*) - A(z)B(w*)] / (pi (z - w*)),
    with w* = conj(w).  Near z = w* the divided difference is taken as a
    Cauchy integral over a circle of radius 0.5 around the midpoint, which
    the trapezoid rule resolves to rounding with 64 nodes.
    """
    w, z = np.broadcast_arrays(_asarray_c(w), _asarray_c(z))
    v = np.conj(w)
    out = np.empty(z.shape, dtype=complex)
    diff = z - v
    near = np.abs(diff) < KERNEL_CONFLUENT_RADIUS
    far = ~near
    if np.any(far):
        out[far] = _kernel_numerator(p, v[far], z[far]) / (math.pi * diff[far])
    if np.any(near):
        vn, zn = v[near], z[near]
        center = 0.5 * (vn + zn)
        theta = 2.0 * math.pi * np.arange(_CAUCHY_POINTS) / _CAUCHY_POINTS
        circle = _CAUCHY_RADIUS * np.exp(1j * theta)
        zeta = center[:, None] + circle[None, :]
        f = _kernel_numerator(p, vn[:, None], zeta)
        # (1/2 pi i) contour integral of f / ((zeta - z)(zeta - v)) d zeta
        integrand = f * circle[None, :] / ((zeta - zn[:, None]) * (zeta - vn[:, None]))
        out[near] = integrand.mean(axis=1) / math.pi
    return out if out.ndim else out[()]


def kernel_diag(p: HBParams, x):
    """K(x, x) for real x from its closed trigonometric form."""
    x = np.asarray(x, dtype=float)
    a = p.a
    _, coth, csch = _stable_hyperbolics(a)
    r = a * a + x * x
    return (math.pi * r - a * coth + a * np.cos(2.0 * math.pi * x) * csch) / (math.pi * r * r)


def weight(p: HBParams, x):
    """Density of the de Branges measure, 1/|E_a(x)|^2, for real x.

    Uses sinh(2 pi a)(x^2 + a^2) / (cosh 2 pi a - cos 2 pi x) rescaled by
    e^{-2 pi a} so that large ``a`` does not overflow.
    """
    x = np.asarray(x, dtype=float)
    a = p.a
    q = math.exp(-2.0 * math.pi * a)
    num = -math.expm1(-4.0 * math.pi * a) * (x * x + a * a)
    den = (1.0 - q) ** 2 + 2.0 * q * (1.0 - np.cos(2.0 * math.pi * x))
    return num / den


def _zero_equation(p: HBParams):
    a = p.a
    t = math.tanh(math.pi * a)

    def phi(x):
        # a sin(pi x) - x tanh(pi a) cos(pi x): same zeros as B_a off the poles of tan
        return a * math.sin(math.pi * x) - x * t * math.cos(math.pi * x)

    return phi


def _positive_zero(p: HBParams, k: int) -> float:
    phi = _zero_equation(p)
    lo, hi = float(k), k + 0.5
    return bracket_root(phi, lo, hi, tol=4e-16 * hi)


def zeros_of_B(p: HBParams, count: int):
    """Return ``[0, xi_1, ..., xi_{count-1}]``, the nonnegative zeros of B_a.

    The k-th positive zero lies in (k, k + 1/2): there tan(pi x) runs from 0
    to +inf while the line m x stays finite, and since m < pi the crossing is
    unique on each branch.
    """
    count = int(count)
    if count < 1:
        raise ValueError("count must be >= 1")
    out = np.zeros(count)
    for k in range(1, count):
        out[k] = p.tau if k == 1 else _positive_zero(p, k)
    return out


def zeros_asymptotic(p: HBParams, k):
    """Leading-order location k + 1/2 - 1/(pi m (k + 1/2)) of the k-th zero."""
    k = np.asarray(k, dtype=float)
    return k + 0.5 - 1.0 / (math.pi * p.zero_slope * (k + 0.5))


def poisson_density(p: HBParams, t):
    """(t^2 + a^2)|E_a(t)|^2 = (cosh 2 pi a - cos 2 pi t) / sinh 2 pi a."""
    t = np.asarray(t, dtype=float)
    _, coth, csch = _stable_hyperbolics(p.a)
    return coth - csch * np.cos(2.0 * math.pi * t)


def verify_poisson_identity(p: HBParams, x: float, y: float, spec: QuadratureSpec = INNER_SPEC, T: float = 200.0, tol: float = 1e-5):
    """Compare the Poisson integral of (t^2+a^2)|E_a(t)|^2 with its closed form.

    The closed form is coth(2 pi a) - e^{-2 pi y} cos(2 pi x) csch(2 pi a).
    The left side is integrated over |t - x| <= T.  Outside that window the
    periodic density is replaced by its mean coth(2 pi a), whose Poisson
    mass is known exactly; the oscillating remainder is bounded by
    csch(2 pi a) * (2y / pi^2) / T^2 and reported as the tail bound.
    """
    if not y > 0:
        raise ValueError("y must be positive")
    _, coth, csch = _stable_hyperbolics(p.a)

    def f(t):
        return (y / math.pi) * poisson_density(p, t) / ((x - t) ** 2 + y * y)

    lo, hi = x - T, x + T
    bps = np.arange(math.ceil(lo), math.floor(hi) + 1)
    inner = integrate_finite(f, lo, hi, spec, breakpoints=bps)
    tail = coth * (1.0 - (2.0 / math.pi) * math.atan(T / y))
    tail_bound = csch * 2.0 * y / (math.pi**2 * T * T)
    lhs = inner + tail
    rhs = coth - math.exp(-2.0 * math.pi * y) * math.cos(2.0 * math.pi * x) * csch
    return ReportEntry.compare(
        "hb.poisson_identity", rhs, lhs, tol, mode="abs", x=x, y=y, window=T, tail_bound=tail_bound
    )


def condition_iv_proxy(p: HBParams, X: float, spec: QuadratureSpec = INNER_SPEC) -> float:
    """Integral of |B_a/E_a|^2 over [-X, X]; grows linearly, so B_a is not in H(E_a)."""
    if not X > 1:
        raise ValueError("X must exceed 1")

    def f(x):
        b = eval_B(p, x).real
        return b * b * weight(p, x)

    bps = np.arange(-math.floor(X), math.floor(X) + 1)
    return float(integrate_finite(f, -X, X, spec, breakpoints=bps))
