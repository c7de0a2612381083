"""Random bounded-Lipschitz integrands shared by the property tests."""

import numpy as np
from scipy.optimize import brentq

from stablepide.sublinear import Integrand, expect


def random_integrand(rng: np.random.Generator) -> Integrand:
    """Two tanh ramps, a clipped line and a constant, with exact hints."""
    a = rng.uniform(-1.0, 1.0, 2)
    b = rng.uniform(0.2, 3.0, 2)
    c = rng.uniform(-3.0, 3.0, 2)
    d = rng.uniform(-0.8, 0.8)
    e = rng.uniform(-2.0, 2.0)
    lo, hi = rng.uniform(0.2, 2.5, 2)
    k = rng.uniform(-1.0, 1.0)

    def f(z):
        z = np.asarray(z, dtype=float)
        out = a[0] * np.tanh(b[0] * (z - c[0])) + a[1] * np.tanh(b[1] * (z - c[1]))
        return out + d * np.clip(z - e, -lo, hi) + k

    lip = float(np.sum(np.abs(a * b)) + abs(d))
    sup = float(np.sum(np.abs(a)) + abs(d) * max(lo, hi) + abs(k))
    return Integrand(f, lip, sup, (e - lo, e + hi))


def crossings(f: Integrand, level: float, span: float = 20.0) -> tuple[float, ...]:
    """Points where f crosses ``level``; the ramps are flat well before ``span``."""
    z = np.linspace(-span, span, 40001)
    v = f(z) - level
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    return tuple(brentq(lambda t: float(f(np.array([t]))[0]) - level, z[i], z[i + 1], xtol=1e-15) for i in idx)


def _with_kinks(f: Integrand, func, sup, pts) -> Integrand:
    return Integrand(func, f.lipschitz, sup, tuple(sorted(set(f.breakpoints) | set(pts))), f.scale)


def clamp(f: Integrand, m: float = 1.0) -> Integrand:
    g = f.func
    return _with_kinks(f, lambda z: np.clip(g(z), -m, m), m, crossings(f, m) + crossings(f, -m))


def absval(f: Integrand) -> Integrand:
    g = f.func
    return _with_kinks(f, lambda z: np.abs(g(z)), f.sup, crossings(f, 0.0))


def nested_abs_clip(dists, B):
    """y -> max over corners of E[min(|y + B xi|, 2)], from call/put closed forms."""

    def each(y):
        y = np.asarray(y, dtype=float)
        return np.array([
            B * (d.excess(-y / B) + d.call(-y / B) - d.excess((2 - y) / B) - d.call((-2 - y) / B)) for d in dists
        ])

    def g(y):
        return np.max(each(y), axis=0)

    # the maximizing corner switches at a few points; they are kinks of g
    y = np.linspace(-60.0, 60.0, 240001)
    top = np.argmax(each(y), axis=0)
    kinks = []
    for i in np.nonzero(np.diff(top))[0]:
        a, b = top[i], top[i + 1]
        kinks.append(brentq(lambda t: float(np.diff(each(np.array([t]))[[a, b], 0])[0]), y[i], y[i + 1], xtol=1e-15))
    return g, tuple(kinks)


def two_step_abs_clip(kernel) -> float:
    """E[min(|B(xi_1 + xi_2)|, 2)] with B = 2^(-1/alpha), integrated one level at a time."""
    B = 0.5 ** (1.0 / kernel.alpha)
    g, kinks = nested_abs_clip(kernel.distinct_corners(), B)
    pts = tuple(sorted({-2.0 / B, 0.0, 2.0 / B} | {k / B for k in kinks}))
    return expect(kernel, Integrand(lambda z: g(B * z), B, 2.0, pts))
