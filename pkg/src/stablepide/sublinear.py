"""The sublinear expectation as a maximum of classical expectations over four corners."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError, InvalidParameters
from .measure import DistributionSpec, StableParams, TailProfile, corner_distributions
from .quadrature import (
    QuadratureBudget,
    composite_nodes,
    merge_breakpoints,
    power_tail_integral,
    subdivide,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Integrand:
    """A vectorized real function with optional regularity hints.

    ``breakpoints`` are kinks the quadrature should not straddle and ``scale``
    is the length over which the function varies (panels are kept below
    twice that width).
    """

    func: Callable[[np.ndarray], np.ndarray]
    lipschitz: float | None = None
    sup: float | None = None
    breakpoints: tuple[float, ...] = ()
    scale: float | None = None

    def __call__(self, z):
        return np.asarray(self.func(np.asarray(z, dtype=float)), dtype=float)

    def compose_affine(self, shift: float, factor: float) -> "Integrand":
        """z -> f(shift + factor * z)."""
        if factor <= 0.0:
            raise InvalidParameters("factor must be positive")
        f = self.func
        return Integrand(
            lambda z: f(shift + factor * z),
            None if self.lipschitz is None else self.lipschitz * factor,
            self.sup,
            tuple((b - shift) / factor for b in self.breakpoints),
            None if self.scale is None else self.scale / factor,
        )

    def __add__(self, other: "Integrand") -> "Integrand":
        f, g = self.func, other.func
        return Integrand(
            lambda z: f(z) + g(z),
            _opt_sum(self.lipschitz, other.lipschitz),
            _opt_sum(self.sup, other.sup),
            tuple(sorted(set(self.breakpoints) | set(other.breakpoints))),
            _opt_min(self.scale, other.scale),
        )

    def scaled(self, lam: float) -> "Integrand":
        f = self.func
        return Integrand(
            lambda z: lam * f(z),
            None if self.lipschitz is None else abs(lam) * self.lipschitz,
            None if self.sup is None else abs(lam) * self.sup,
            self.breakpoints,
            self.scale,
        )

    def map(self, op: Callable[[np.ndarray], np.ndarray]) -> "Integrand":
        """Pointwise op(f); regularity hints other than breakpoints are dropped."""
        f = self.func
        return Integrand(lambda z: op(f(z)), None, None, self.breakpoints, self.scale)


def _opt_sum(a, b):
    return None if a is None or b is None else a + b


def _opt_min(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def constant(c: float) -> Integrand:
    return Integrand(lambda z: np.full_like(z, c, dtype=float), 0.0, abs(c))


def identity() -> Integrand:
    return Integrand(lambda z: np.array(z, dtype=float), 1.0, None)


@dataclass(frozen=True)
class SublinearKernel:
    corners: tuple[DistributionSpec, ...]
    quad: QuadratureBudget = field(default_factory=QuadratureBudget)

    def __post_init__(self):
        if len(self.corners) != 4:
            raise InvalidParameters("a kernel has exactly four corners")
        a0, p0 = self.corners[0].alpha, self.corners[0].profile
        if any(c.alpha != a0 or c.profile != p0 for c in self.corners):
            raise InvalidParameters("corners must share alpha and profile")

    @classmethod
    def from_params(
        cls,
        params: StableParams,
        profile: TailProfile | None = None,
        quad: QuadratureBudget | None = None,
    ) -> "SublinearKernel":
        return cls(corner_distributions(params, profile), quad or QuadratureBudget())

    @classmethod
    def singleton(cls, alpha: float, k: float, profile: TailProfile | None = None, quad=None):
        return cls.from_params(StableParams(alpha, k, k), profile, quad)

    @property
    def alpha(self) -> float:
        return self.corners[0].alpha

    @property
    def is_singleton(self) -> bool:
        c = self.corners
        return all(d.k_minus == c[0].k_minus and d.k_plus == c[0].k_plus for d in c)

    def distinct_corners(self) -> tuple[DistributionSpec, ...]:
        """Corners with duplicates removed, first occurrence kept."""
        seen, out = set(), []
        for d in self.corners:
            key = (d.k_minus, d.k_plus)
            if key not in seen:
                seen.add(key)
                out.append(d)
        return tuple(out)


# --------------------------------------------------------------------------
# per-distribution integrals
# --------------------------------------------------------------------------


def _middle(dist: DistributionSpec, f: Integrand, quad: QuadratureBudget, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    panels = max(1, int(math.ceil(quad.middle_panels * (b - a) / 2.0)))
    edges = np.linspace(a, b, panels + 1)
    edges = merge_breakpoints(edges, f.breakpoints)
    edges = subdivide(edges, None if f.scale is None else 2.0 * f.scale, 64 * quad.max_panels_per_level)
    nodes, weights = composite_nodes(edges, quad.middle_order)
    return float(np.dot(weights * dist.pdf(nodes), f(nodes)))


def _tail(dist: DistributionSpec, f: Integrand, quad: QuadratureBudget, side: int, upper=np.inf) -> float:
    if side > 0:
        g = f.__call__
        bps = [b for b in f.breakpoints if b > 1.0]
    else:
        g = lambda y: f(-y)  # noqa: E731
        bps = [-b for b in f.breakpoints if b < -1.0]
    return power_tail_integral(
        g,
        1.0,
        dist.tail_terms(side),
        levels=quad.tail_levels,
        order=quad.tail_order,
        grading=quad.grading,
        breakpoints=bps,
        scale=f.scale,
        max_panels=quad.max_panels_per_level,
        upper=upper,
        panel_tol=quad.tail_panel_tol,
    )


def integrate(
    dist: DistributionSpec,
    f: Integrand,
    quad: QuadratureBudget | None = None,
    lo: float = -np.inf,
    hi: float = np.inf,
) -> float:
    """int_{(lo, hi)} f dF for one distribution."""
    quad = quad or QuadratureBudget()
    if f.lipschitz == 0.0 and lo == -np.inf and hi == np.inf:
        # a constant integrates to itself exactly
        return float(f(np.zeros(1))[0])
    total = _middle(dist, f, quad, max(lo, -1.0), min(hi, 1.0))
    if hi > 1.0:
        total += _tail(dist, f, quad, 1, hi)
    if lo < -1.0:
        total += _tail(dist, f, quad, -1, -lo)
    return total


def _checked(dist, f, quad, tol, **kw) -> tuple[float, float]:
    coarse = integrate(dist, f, quad, **kw)
    fine = integrate(dist, f, quad.refined(), **kw)
    est = abs(fine - coarse)
    if not np.isfinite(fine) or (tol is not None and est > tol):
        raise AccuracyError(
            f"quadrature refinement disagreement {est:.3e} for k=({dist.k_minus}, {dist.k_plus})",
            estimate=est,
            where=(dist.k_minus, dist.k_plus),
        )
    return fine, est


# --------------------------------------------------------------------------
# sublinear expectations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExpectationDetail:
    value: float
    argmax: tuple[float, float]
    per_corner: tuple[float, ...]
    error_estimate: float


def _maximize(kernel: SublinearKernel, values: Sequence[float], errors: Sequence[float]) -> ExpectationDetail:
    top = max(values)
    # values within a few ulps of the maximum count as ties; the first corner wins
    tie = 64.0 * np.finfo(float).eps * max(1.0, abs(top))
    best = next(i for i, v in enumerate(values) if v >= top - tie)
    d = kernel.corners[best]
    return ExpectationDetail(float(top), (d.k_minus, d.k_plus), tuple(float(v) for v in values), float(max(errors)))


def expect_detail(
    kernel: SublinearKernel, f: Integrand, tol: float | None = DEFAULT_TOL
) -> ExpectationDetail:
    """Value, maximizing corner (lexicographic tie-break) and error estimate."""
    cache: dict[tuple[float, float], tuple[float, float]] = {}
    vals, errs = [], []
    for d in kernel.corners:
        key = (d.k_minus, d.k_plus)
        if key not in cache:
            cache[key] = _checked(d, f, kernel.quad, tol)
        vals.append(cache[key][0])
        errs.append(cache[key][1])
    return _maximize(kernel, vals, errs)


def expect(kernel: SublinearKernel, f: Integrand, tol: float | None = DEFAULT_TOL) -> float:
    """E[f] = max over the corners of int f dF."""
    return expect_detail(kernel, f, tol).value


def expect_abs(kernel: SublinearKernel) -> float:
    """E|xi| from the per-corner closed forms."""
    return max(d.abs_mean() for d in kernel.corners)


def clamped_integral(dist: DistributionSpec, f: Integrand, N: float, quad: QuadratureBudget | None = None) -> float:
    """int f(clamp(z, -N, N)) dF: quadrature on (-N, N) plus the two atoms."""
    if N <= 0.0:
        raise InvalidParameters("N must be positive")
    inner = integrate(dist, f, quad, -N, N)
    ends = f(np.array([-N, N]))
    return inner + float(ends[0]) * float(dist.cdf(-N)) + float(ends[1]) * float(dist.sf(N))


def expect_clamped(
    kernel: SublinearKernel, f: Integrand, N: float, tol: float | None = DEFAULT_TOL
) -> float:
    """E[f(xi^N)] with xi^N = xi clamped to [-N, N]."""
    vals, errs = [], []
    for d in kernel.corners:
        coarse = clamped_integral(d, f, N, kernel.quad)
        fine = clamped_integral(d, f, N, kernel.quad.refined())
        est = abs(fine - coarse)
        if tol is not None and est > tol:
            raise AccuracyError(f"clamped quadrature disagreement {est:.3e}", estimate=est)
        vals.append(fine)
        errs.append(est)
    return _maximize(kernel, vals, errs).value
