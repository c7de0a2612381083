"""The continuous nonlocal operator, the scheme's consistency defect and the
linear reference solution.

For one corner the operator is

    int delta_z w(x) k_pm |z|^(-1-alpha) dz,   delta_z w(x) = w(x+z) - w(x) - w'(x) z,

which splits as k_+ A_+(x) + k_- A_-(x) with half-line integrals A_pm that do
not depend on the corner.  The maximum over the corners therefore costs two
quadratures per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import AccuracyError, InvalidParameters, NotAvailable
from .measure import StableParams, assumption_constants
from .quadrature import composite_nodes, power_tail_integral, power_weight_quad, subdivide
from .sublinear import DEFAULT_TOL, Integrand, SublinearKernel, expect, expect_abs

OPERATOR_TOL = 1e-7

Field = Callable[[float, np.ndarray], np.ndarray]


# --------------------------------------------------------------------------
# test functions
# --------------------------------------------------------------------------


def _zero(t, x):
    return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class SmoothTestFunction:
    """A smooth w(t, x) with closed-form derivatives and their sup-norms.

    ``far_mean`` is the mean value of w(t, .) at spatial infinity when it is
    known (0 for decaying or zero-mean periodic data); it lets the far field
    of the nonlocal operator be charged in closed form.  ``dxxx`` is optional
    and is replaced by a difference of ``dxx`` when absent.  ``increment``
    optionally returns w(t, x+z) - w(t, x) without cancellation; near z = 0
    the operator's integrand is amplified by z^(-1-alpha), so plain
    differencing costs about eps * z^-alpha.
    """

    name: str
    omega: Field
    dt: Field = _zero
    dx: Field = _zero
    dxx: Field = _zero
    dtt: Field = _zero
    dtx: Field = _zero
    dxxx: Field | None = None
    sup_dt: float = 0.0
    sup_dx: float = 0.0
    sup_dxx: float = 0.0
    sup_dtt: float = 0.0
    sup_dtx: float = 0.0
    far_mean: float | None = 0.0
    scale: float = 1.0
    increment: Callable | None = None

    def diff(self, t, x, z):
        if self.increment is not None:
            return self.increment(t, x, z)
        w = self.omega
        return w(t, x + z) - w(t, x)

    def third(self, t, x):
        if self.dxxx is not None:
            return self.dxxx(t, x)
        eps = 1e-4
        x = np.asarray(x, dtype=float)
        return (self.dxx(t, x + eps) - self.dxx(t, x - eps)) / (2.0 * eps)

    def at(self, t: float) -> Integrand:
        w = self.omega
        return Integrand(lambda x: w(t, x), self.sup_dx, None, (), self.scale)

    def self_check(self, rng: np.random.Generator, points: int = 20, span: float = 3.0,
                   T: float = 1.0, tol: float = 1e-6) -> float:
        """Largest mismatch between the supplied derivatives and central differences."""
        t = rng.uniform(0.1, T, points)
        x = rng.uniform(-span, span, points)
        e = 1e-4
        w = self.omega
        pairs = [
            (self.dt(t, x), (w(t + e, x) - w(t - e, x)) / (2 * e)),
            (self.dx(t, x), (w(t, x + e) - w(t, x - e)) / (2 * e)),
            (self.dxx(t, x), (self.dx(t, x + e) - self.dx(t, x - e)) / (2 * e)),
            (self.dtt(t, x), (self.dt(t + e, x) - self.dt(t - e, x)) / (2 * e)),
            (self.dtx(t, x), (self.dt(t, x + e) - self.dt(t, x - e)) / (2 * e)),
        ]
        if self.dxxx is not None:
            pairs.append((self.dxxx(t, x), (self.dxx(t, x + e) - self.dxx(t, x - e)) / (2 * e)))
        worst = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) for a, b in pairs)
        if worst > tol:
            raise AccuracyError(f"derivatives of {self.name} disagree with differences", estimate=worst)
        return worst


def constant_function(c: float) -> SmoothTestFunction:
    return SmoothTestFunction(
        "const",
        lambda t, x: np.full_like(np.asarray(x, dtype=float), c),
        far_mean=c,
        increment=lambda t, x, z: np.zeros_like(np.asarray(z, dtype=float)),
    )


def affine_function(a: float, b: float) -> SmoothTestFunction:
    return SmoothTestFunction(
        "affine",
        lambda t, x: a + b * np.asarray(x, dtype=float),
        dx=lambda t, x: np.full_like(np.asarray(x, dtype=float), b),
        sup_dx=abs(b),
        far_mean=None,
        increment=lambda t, x, z: b * np.asarray(z, dtype=float),
    )


def cosine_function() -> SmoothTestFunction:
    return SmoothTestFunction(
        "cos",
        lambda t, x: np.cos(x),
        dx=lambda t, x: -np.sin(x),
        dxx=lambda t, x: -np.cos(x),
        dxxx=lambda t, x: np.sin(x),
        sup_dx=1.0,
        sup_dxx=1.0,
        increment=lambda t, x, z: -2.0 * np.sin(x + 0.5 * z) * np.sin(0.5 * z),
    )


def gaussian_bump(T: float = 1.0) -> SmoothTestFunction:
    """w(t, x) = exp(-x^2) (1 + t/2), with sup-norms taken over t in [0, T]."""
    g = lambda x: np.exp(-np.asarray(x, dtype=float) ** 2)  # noqa: E731
    amp = lambda t: 1.0 + 0.5 * np.asarray(t, dtype=float)  # noqa: E731
    top = 1.0 + 0.5 * T
    return SmoothTestFunction(
        "bump",
        lambda t, x: g(x) * amp(t),
        dt=lambda t, x: 0.5 * g(x) + 0.0 * np.asarray(t),
        dx=lambda t, x: -2.0 * x * g(x) * amp(t),
        dxx=lambda t, x: (4.0 * x * x - 2.0) * g(x) * amp(t),
        dtt=_zero,
        dtx=lambda t, x: -x * g(x) + 0.0 * np.asarray(t),
        dxxx=lambda t, x: (12.0 * x - 8.0 * x**3) * g(x) * amp(t),
        sup_dt=0.5,
        sup_dx=math.sqrt(2.0 / math.e) * top,
        sup_dxx=2.0 * top,
        sup_dtt=0.0,
        sup_dtx=1.0 / math.sqrt(2.0 * math.e),
        far_mean=0.0,
        increment=lambda t, x, z: g(x) * np.expm1(-z * (2.0 * x + z)) * amp(t),
    )


def time_independent(name: str, f: Callable, df: Callable, d2f: Callable, sup1: float, sup2: float,
                     far_mean: float | None = 0.0, scale: float = 1.0) -> SmoothTestFunction:
    return SmoothTestFunction(
        name,
        lambda t, x: f(np.asarray(x, dtype=float)),
        dx=lambda t, x: df(np.asarray(x, dtype=float)),
        dxx=lambda t, x: d2f(np.asarray(x, dtype=float)),
        sup_dx=sup1,
        sup_dxx=sup2,
        far_mean=far_mean,
        scale=scale,
    )


# --------------------------------------------------------------------------
# nonlocal operator
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LevyMeasureView:
    """The measure k_pm |z|^(-1-alpha) dz of one corner."""

    k_minus: float
    k_plus: float
    alpha: float

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise InvalidParameters("alpha must lie in (1, 2)")
        if self.k_minus < 0.0 or self.k_plus < 0.0:
            raise InvalidParameters("tail weights must be nonnegative")

    def levy_moment(self) -> float:
        """int |z| ^ |z|^2 of the measure."""
        a = self.alpha
        return (self.k_minus + self.k_plus) * (1.0 / (2.0 - a) + 1.0 / (a - 1.0))


def views_of(kernel: SublinearKernel) -> tuple[LevyMeasureView, ...]:
    return tuple(LevyMeasureView(d.k_minus, d.k_plus, d.alpha) for d in kernel.corners)


@dataclass(frozen=True)
class _OpBudget:
    inner_levels: int
    outer_exp: int
    order: int
    width: float


_COARSE = _OpBudget(12, 12, 10, 0.5)
_FINE = _OpBudget(14, 14, 14, 0.25)


def _half_line(omega: SmoothTestFunction, t: float, x: float, alpha: float, side: int, b: _OpBudget) -> float:
    """int_0^inf delta_{side*z} w(t, x) z^(-1-alpha) dz."""
    w = omega.omega
    w0 = float(np.asarray(w(t, np.array([x])))[0])
    d1 = float(np.asarray(omega.dx(t, np.array([x])))[0])
    d2 = float(np.asarray(omega.dxx(t, np.array([x])))[0])
    d3 = float(np.asarray(omega.third(t, np.array([x])))[0])
    sc = omega.scale

    zs = 2.0 ** (-b.inner_levels)
    # below zs: Taylor through the cubic term
    total = d2 * zs ** (2.0 - alpha) / (2.0 * (2.0 - alpha))
    total += side * d3 * zs ** (3.0 - alpha) / (6.0 * (3.0 - alpha))
    # (zs, 1]: exact second differences on a dyadic mesh
    edges = zs * 2.0 ** np.arange(b.inner_levels + 1)
    edges = subdivide(edges, b.width * sc, 1 << 16)
    z, wts = composite_nodes(edges, b.order)
    inner = omega.diff(t, x, side * z) - side * d1 * z
    total += float(np.dot(wts, inner * z ** (-1.0 - alpha)))
    # [1, Z]
    Z = 2.0 ** b.outer_exp
    g = lambda zz: omega.diff(t, x, side * zz)  # noqa: E731
    total += power_tail_integral(
        g, 1.0, [(1.0 / alpha, alpha)], levels=4 * b.outer_exp, order=b.order,
        scale=b.width * sc / 2.0, max_panels=1 << 20, upper=Z,
    )
    total -= side * d1 / (alpha - 1.0)
    # (Z, inf)
    if omega.far_mean is not None:
        total += (omega.far_mean - w0) * Z ** (-alpha) / alpha
    else:
        total += power_tail_integral(g, Z, [(1.0 / alpha, alpha)], levels=60, order=b.order)
    return total


def half_line_integrals(omega: SmoothTestFunction, t: float, x: float, alpha: float,
                        tol: float | None = OPERATOR_TOL) -> tuple[float, float, float]:
    """(A_minus, A_plus, error estimate)."""
    out = []
    est = 0.0
    for side in (-1, 1):
        coarse = _half_line(omega, t, x, alpha, side, _COARSE)
        fine = _half_line(omega, t, x, alpha, side, _FINE)
        est = max(est, abs(fine - coarse))
        out.append(fine)
    if tol is not None and est > tol:
        raise AccuracyError(f"nonlocal operator refinement disagreement {est:.3e}", estimate=est, where=x)
    return out[0], out[1], est


def _as_views(kernel_or_views) -> tuple[LevyMeasureView, ...]:
    if isinstance(kernel_or_views, SublinearKernel):
        return views_of(kernel_or_views)
    if isinstance(kernel_or_views, LevyMeasureView):
        return (kernel_or_views,)
    return tuple(kernel_or_views)


def nonlocal_operator(kernel_or_views, omega: SmoothTestFunction, t: float, x: float,
                      tol: float | None = OPERATOR_TOL) -> float:
    """max over corners of int delta_z w(t, x) F(dz)."""
    views = _as_views(kernel_or_views)
    alpha = views[0].alpha
    if any(v.alpha != alpha for v in views):
        raise InvalidParameters("views must share alpha")
    am, ap, _ = half_line_integrals(omega, t, x, alpha, tol)
    return max(v.k_plus * ap + v.k_minus * am for v in views)


# --------------------------------------------------------------------------
# consistency
# --------------------------------------------------------------------------


def kernel_params(kernel: SublinearKernel, T: float = 1.0) -> StableParams:
    ks = [c.k_minus for c in kernel.corners] + [c.k_plus for c in kernel.corners]
    return StableParams(kernel.alpha, min(ks), max(ks), T)


def numerical_allowance(Delta: float) -> float:
    """Accuracy budget of the computed residual: E[.] to DEFAULT_TOL, divided by Delta, plus the operator's."""
    return DEFAULT_TOL / Delta + OPERATOR_TOL


def consistency_bound(kernel: SublinearKernel, omega: SmoothTestFunction, Delta: float, constants=None,
                      include_allowance: bool = True) -> float:
    """Analytic remainder bound, plus the numerical allowance unless switched off."""
    a = kernel.alpha
    c = constants or assumption_constants(kernel_params(kernel), kernel.corners[0].profile, Delta)
    m1 = expect_abs(kernel)
    analytic = (
        (1.0 + m1) * (omega.sup_dtt * Delta + omega.sup_dtx * Delta ** (1.0 / a))
        + c.R0 * omega.sup_dxx * Delta ** ((2.0 - a) / a)
        + omega.sup_dxx * c.R1_Delta
        + omega.sup_dx * c.R2_Delta
    )
    return analytic + (numerical_allowance(Delta) if include_allowance else 0.0)


def consistency_residual(kernel: SublinearKernel, omega: SmoothTestFunction, Delta: float, t: float, x: float,
                         constants=None, operator_value: float | None = None) -> tuple[float, float]:
    """(|w_t - sup int delta_z w F(dz) - S(Delta, x, w(t,x), w(t-Delta, .))|, bound)."""
    if not 0.0 < Delta < 1.0:
        raise InvalidParameters("Delta must lie in (0, 1)")
    if t < Delta:
        raise InvalidParameters("need t >= Delta")
    B = Delta ** (1.0 / kernel.alpha)
    prev = omega.at(t - Delta).compose_affine(x, B)
    p = float(np.asarray(omega.omega(t, np.array([x])))[0])
    S = (p - expect(kernel, prev)) / Delta
    wt = float(np.asarray(omega.dt(t, np.array([x])))[0])
    op = nonlocal_operator(kernel, omega, t, x) if operator_value is None else operator_value
    return abs(wt - op - S), consistency_bound(kernel, omega, Delta, constants)


# --------------------------------------------------------------------------
# linear reference
# --------------------------------------------------------------------------


def _tail_cos_power(U: float, s: float, terms: int = 6) -> float:
    """int_U^inf cos(u) u^-s du for U a multiple of 2 pi.

    Repeated integration by parts gives T(s) = s U^(-s-1) - s(s+1) T(s+2).
    """
    total, coef = 0.0, 1.0
    for j in range(terms):
        coef *= s + 2 * j if j == 0 else (s + 2 * j - 1) * (s + 2 * j)
        total += (-1) ** j * coef * U ** (-s - 1 - 2 * j)
    return total


@lru_cache(maxsize=64)
def _stable_integral(alpha: float) -> float:
    """int_0^inf (1 - cos u) u^(-1-alpha) du by quadrature."""
    if not 1.0 < alpha < 2.0:
        raise InvalidParameters("alpha must lie in (1, 2)")
    near = power_weight_quad(lambda u: 2.0 * np.sin(0.5 * u) ** 2 / (u * u), 1.0, 1.0 - alpha, levels=60, order=16)
    U = 2.0 * math.pi * 256
    edges = np.concatenate([[1.0], np.arange(1, 4 * 256 * 2 + 1) * (math.pi / 4.0)])
    edges = edges[edges >= 1.0]
    edges = np.unique(np.append(edges[edges <= U], U))
    z, wts = composite_nodes(edges, 16)
    mid = float(np.dot(wts, 2.0 * np.sin(0.5 * z) ** 2 * z ** (-1.0 - alpha)))
    far = U ** (-alpha) / alpha - _tail_cos_power(U, 1.0 + alpha)
    return near + mid + far


def characteristic_exponent(alpha: float, k: float) -> float:
    """c(alpha, k) = 2k int_0^inf (1 - cos u) u^(-1-alpha) du."""
    return 2.0 * k * _stable_integral(float(alpha))


REFERENCE_FUNCTIONS = ("cos", "sin", "const")


def reference_linear(alpha: float, k: float, phi: str, t: float, x, shift: float = 0.0, level: float = 1.0):
    """Exact solution for a single symmetric corner k_- = k_+ = k.

    ``cos``/``sin`` mean level*cos(x - shift) and level*sin(x - shift); ``const`` is the
    constant ``level``.
    """
    x = np.asarray(x, dtype=float)
    if phi == "const":
        return np.full_like(x, level) if x.ndim else level
    if phi not in ("cos", "sin"):
        raise NotAvailable(f"no closed-form reference for {phi!r}")
    base = np.cos(x - shift) if phi == "cos" else np.sin(x - shift)
    if t == 0.0:
        return level * base
    return level * math.exp(-t * characteristic_exponent(alpha, k)) * base
