"""Quadrature building blocks shared by the measure, sublinear and pide modules.

Everything here is deterministic: node sets depend only on their arguments,
and sums are taken in a fixed order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import AccuracyError


@dataclass(frozen=True)
class QuadratureBudget:
    """Resolution knobs for every integral against a distribution.

    The middle region (-1, 1) uses ``middle_panels`` Gauss-Legendre panels of
    order ``middle_order``.  Each tail is cut into ``tail_levels`` levels that
    carry geometrically decreasing mass (ratio ``grading``), each integrated
    with order ``tail_order``; what lies beyond the last level is handled by
    an affine extrapolation of the integrand.  Tail panels whose rule
    disagrees with its two-half split by more than ``tail_panel_tol`` are
    bisected (``None`` switches this off).
    """

    middle_panels: int = 16
    middle_order: int = 10
    tail_levels: int = 60
    tail_order: int = 10
    grading: float = 0.5
    max_panels_per_level: int = 512
    tail_panel_tol: float | None = 1e-13

    def refined(self) -> "QuadratureBudget":
        return QuadratureBudget(
            middle_panels=2 * self.middle_panels,
            middle_order=self.middle_order + 4,
            tail_levels=self.tail_levels + 10,
            tail_order=self.tail_order + 4,
            grading=self.grading,
            max_panels_per_level=2 * self.max_panels_per_level,
            tail_panel_tol=self.tail_panel_tol,
        )


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_nodes(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Gauss-Legendre on consecutive ``edges``."""
    edges = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (lo + half * (x[None, :] + 1.0)).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def subdivide(edges: np.ndarray, max_width: float | None, cap: int) -> np.ndarray:
    """Split every interval of ``edges`` so no piece is wider than ``max_width``."""
    edges = np.asarray(edges, dtype=float)
    if max_width is None or len(edges) < 2:
        return edges
    widths = np.diff(edges)
    counts = np.clip(np.ceil(widths / max_width).astype(np.int64), 1, cap)
    if np.all(counts == 1):
        return edges
    pieces = [
        np.linspace(a, b, c + 1)[:-1] for a, b, c in zip(edges[:-1], edges[1:], counts)
    ]
    pieces.append(edges[-1:])
    return np.concatenate(pieces)


def merge_breakpoints(edges: np.ndarray, points: Sequence[float]) -> np.ndarray:
    """Insert the points lying strictly inside ``[edges[0], edges[-1]]``."""
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[0], edges[-1]
    if lo > hi:
        raise ValueError("edges must be increasing")
    pts = [p for p in points if lo < p < hi]
    if not pts:
        return edges
    out = np.unique(np.concatenate([edges, np.asarray(pts, dtype=float)]))
    return out


# --------------------------------------------------------------------------
# Power tails.  A tail measure on (z0, inf) is a finite sum of terms
# coef * exponent * z^(-exponent-1) dz, i.e. survival function sum coef * z^-exponent.
# --------------------------------------------------------------------------

PowerTerms = Sequence[tuple[float, float]]  # (coef, exponent)


def power_tail_integral(
    g: Callable[[np.ndarray], np.ndarray],
    z0: float,
    terms: PowerTerms,
    levels: int = 60,
    order: int = 10,
    grading: float = 0.5,
    breakpoints: Sequence[float] = (),
    scale: float | None = None,
    max_panels: int = 512,
    upper: float = np.inf,
    panel_tol: float | None = None,
) -> float:
    """Integrate ``g`` against the measure with survival ``sum c z^-e`` on (z0, upper).

    Level edges are placed so that the leading term loses a factor ``grading``
    of its mass per level.  For an infinite ``upper``, ``g`` is replaced beyond
    the last level by the secant through its values at the last two edges,
    which makes the rule exact for affine ``g``.  With ``panel_tol`` set,
    panels are bisected until each agrees with its two halves to that
    absolute tolerance.
    """
    terms = [(float(c), float(e)) for c, e in terms if c != 0.0]
    if not terms:
        return 0.0
    e_min = min(e for _, e in terms)
    ratio = grading ** (-1.0 / e_min)
    edges = z0 * ratio ** np.arange(levels + 1)
    finite = np.isfinite(upper)
    if finite:
        if upper <= z0:
            return 0.0
        edges = np.append(edges[edges < upper], upper)
    edges = merge_breakpoints(edges, breakpoints)
    edges = subdivide(edges, None if scale is None else 2.0 * scale, max_panels)

    def weighted(x):
        dens = np.zeros_like(x)
        for c, e in terms:
            dens += c * e * x ** (-e - 1.0)
        return dens * np.asarray(g(x), dtype=float)

    if panel_tol is not None:
        edges = _bisect_panels(weighted, edges, order, panel_tol)
    nodes, weights = composite_nodes(edges, order)
    total = float(np.dot(weights, weighted(nodes)))
    if finite:
        return total

    zb = edges[-1]
    za = edges[-2]
    ga, gb = np.asarray(g(np.array([za, zb])), dtype=float)
    slope = (gb - ga) / (zb - za)
    intercept = gb - slope * zb
    for c, e in terms:
        mass = c * zb ** (-e)
        first = c * e / (e - 1.0) * zb ** (1.0 - e) if e > 1.0 else np.inf
        total += intercept * mass + (slope * first if slope != 0.0 else 0.0)
    return total


def _panel_sums(fw, edges: np.ndarray, order: int) -> np.ndarray:
    nodes, weights = composite_nodes(edges, order)
    return (weights * fw(nodes)).reshape(len(edges) - 1, order).sum(axis=1)


def _bisect_panels(fw, edges: np.ndarray, order: int, tol: float, rounds: int = 16,
                   cap: int = 50_000) -> np.ndarray:
    """Bisect panels until each one's rule matches the sum over its halves."""
    for _ in range(rounds):
        mids = 0.5 * (edges[:-1] + edges[1:])
        whole = _panel_sums(fw, edges, order)
        split = np.empty(2 * len(mids) + 1)
        split[0::2] = edges
        split[1::2] = mids
        halves = _panel_sums(fw, split, order).reshape(-1, 2).sum(axis=1)
        bad = np.abs(whole - halves) > tol
        if not bad.any() or len(edges) + bad.sum() > cap:
            break
        edges = np.sort(np.concatenate([edges, mids[bad]]))
    return edges


def power_weight_quad(
    g: Callable[[np.ndarray], np.ndarray],
    b: float,
    p: float,
    levels: int = 60,
    order: int = 12,
    breakpoints: Sequence[float] = (),
) -> float:
    """Compute int_0^b g(y) y^p dy for p > -1 with ``g`` bounded near 0.

    Geometric mesh toward 0 (ratio 1/2); the last piece (0, b 2^-levels) is
    integrated analytically with ``g`` frozen at its value there.
    """
    if b <= 0.0:
        return 0.0
    edges = b * 0.5 ** np.arange(levels, -1, -1, dtype=float)
    edges = merge_breakpoints(edges, breakpoints)
    nodes, weights = composite_nodes(edges, order)
    total = float(np.dot(weights * nodes**p, np.asarray(g(nodes), dtype=float)))
    y0 = edges[0]
    g0 = float(np.asarray(g(np.array([y0])), dtype=float)[0])
    total += g0 * y0 ** (p + 1.0) / (p + 1.0)
    return total


def check_refinement(coarse: float, fine: float, tol: float | None, what: str) -> float:
    est = abs(fine - coarse)
    if not np.isfinite(fine) or (tol is not None and est > tol):
        raise AccuracyError(f"{what}: refinement disagreement {est:.3e}", estimate=est)
    return est


# --------------------------------------------------------------------------
# Accurate finite differences of power functions (used for grid weights far
# out in the tails, where direct differencing cancels catastrophically).
# --------------------------------------------------------------------------


def _even_binomial_series(g: float, x: np.ndarray, terms: int = 14) -> np.ndarray:
    # (1+x)^g + (1-x)^g - 2 = 2 * sum_k binom(g, 2k) x^(2k)
    out = np.zeros_like(x)
    coef = 1.0
    x2 = x * x
    power = np.ones_like(x)
    for j in range(1, 2 * terms + 1):
        coef *= (g - j + 1) / j
        if j % 2 == 0:
            power = power * x2
            out += coef * power
    return 2.0 * out


def second_diff_power(a: np.ndarray, d: float, g: float) -> np.ndarray:
    """(a+d)^g - 2 a^g + (a-d)^g for a > d > 0, without cancellation."""
    a = np.asarray(a, dtype=float)
    x = d / a
    small = x < 0.1
    bracket = np.empty_like(a)
    if np.any(small):
        bracket[small] = _even_binomial_series(g, x[small])
    big = ~small
    if np.any(big):
        xb = x[big]
        bracket[big] = np.expm1(g * np.log1p(xb)) + np.expm1(g * np.log1p(-xb))
    return a**g * bracket


def backward_diff_power(a: np.ndarray, d: float, g: float) -> np.ndarray:
    """(a-d)^g - a^g for a > d > 0."""
    a = np.asarray(a, dtype=float)
    return a**g * np.expm1(g * np.log1p(-d / a))
