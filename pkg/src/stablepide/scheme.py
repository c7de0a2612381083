"""The monotone approximation scheme on a uniform grid.

One time step replaces v by x -> E[v(x + B xi)] with B = Delta^(1/alpha).
Grid functions are piecewise linear between nodes, so each node's
expectation is an exact finite sum: the weight of a hat function centred at
``a`` with half-width ``d`` (in units of xi) is the second difference
(C(a+d) - 2C(a) + C(a-d))/d of the call function C(a) = E[(a - xi)^+].
These weights are nonnegative and sum to one, which is what makes the
discrete operator monotone and constant preserving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import fft as sfft

from .errors import AccuracyError, InvalidParameters
from .measure import DistributionSpec
from .quadrature import QuadratureBudget, backward_diff_power, second_diff_power
from .sublinear import Integrand, SublinearKernel

CONSTANT = "constant"
LINEAR = "linear"
PERIODIC = "periodic"
_EXTENSIONS = (CONSTANT, LINEAR, PERIODIC)

# explicit weights kept before the periodic wrap spreads the remainder
_MAX_WRAP_TERMS = 1 << 22


# --------------------------------------------------------------------------
# grid functions
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nodal values on x0 + j*h, linearly interpolated.

    Outside the nodes the function is extended by its boundary values
    (``constant``), by the boundary slopes (``linear``) or periodically with
    period ``n*h`` (``periodic``).
    """

    x0: float
    h: float
    values: np.ndarray
    extension: str = CONSTANT

    def __post_init__(self):
        if self.h <= 0.0:
            raise InvalidParameters("grid spacing must be positive")
        if self.extension not in _EXTENSIONS:
            raise InvalidParameters(f"unknown extension {self.extension!r}")
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise InvalidParameters("need at least two nodal values")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, f: Callable, x0: float, h: float, n: int, extension: str = CONSTANT):
        x = x0 + h * np.arange(n)
        return cls(x0, h, np.asarray(f(x), dtype=float), extension)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def nodes(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    @property
    def x_end(self) -> float:
        return self.x0 + self.h * (self.n - 1)

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.x0, self.h, values, self.extension)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = self.values
        if self.extension == PERIODIC:
            period = self.n * self.h
            s = np.mod(x - self.x0, period) / self.h
            j = np.minimum(np.floor(s).astype(np.int64), self.n - 1)
            t = s - j
            return (1.0 - t) * v[j] + t * v[(j + 1) % self.n]
        out = np.interp(x, self.nodes, v)
        if self.extension == LINEAR:
            sl, sr = (v[1] - v[0]) / self.h, (v[-1] - v[-2]) / self.h
            out = np.where(x < self.x0, v[0] + sl * (x - self.x0), out)
            out = np.where(x > self.x_end, v[-1] + sr * (x - self.x_end), out)
        return out

    def as_integrand(self) -> Integrand:
        scale = self.h if self.extension != PERIODIC else self.h
        return Integrand(self.__call__, lipschitz_of(self), float(np.max(np.abs(self.values))), (), scale)


def lipschitz_of(v: GridFunction) -> float:
    """Largest adjacent difference over h (wrapping for periodic data)."""
    d = np.abs(np.diff(v.values))
    m = float(np.max(d)) if d.size else 0.0
    if v.extension == PERIODIC:
        m = max(m, abs(float(v.values[0] - v.values[-1])))
    return m / v.h


# --------------------------------------------------------------------------
# exact hat-function weights
# --------------------------------------------------------------------------


class _CallPair:
    """C(a) = E[(a - X)^+] and D(a) = E[(X - a)^+] for X or its clamp to [-N, N]."""

    def __init__(self, dist: DistributionSpec, N: float | None = None):
        self.dist = dist
        self.N = None if N is None or not np.isfinite(N) else float(N)
        if self.N is not None:
            self._cN = float(dist.call(-self.N))
            self._dN = float(dist.excess(self.N))

    def C(self, a):
        a = np.asarray(a, dtype=float)
        if self.N is None:
            return np.asarray(self.dist.call(a))
        N = self.N
        inner = np.asarray(self.dist.call(np.clip(a, -N, N))) - self._cN
        out = np.where(a <= -N, 0.0, inner)
        return np.where(a >= N, a + self._dN - self._cN, out)

    def D(self, a):
        a = np.asarray(a, dtype=float)
        if self.N is None:
            return np.asarray(self.dist.excess(a))
        return self.C(a) - a + (self._cN - self._dN)

    def _tail_sum(self, side: int, fn, r, d):
        out = np.zeros_like(r)
        for c, e in self.dist.tail_terms(side):
            out += c / (e - 1.0) * fn(r, d, 1.0 - e)
        return out

    def hat(self, a: np.ndarray, d: float) -> np.ndarray:
        """Weights of hats centred at ``a`` with half-width ``d``."""
        a = np.asarray(a, dtype=float)
        w = np.empty_like(a)
        right = a - d >= 1.0
        left = a + d <= -1.0
        mid = (a - d >= -1.0) & (a + d <= 1.0)
        rest = ~(right | left | mid)
        if np.any(right):
            w[right] = self._tail_sum(1, second_diff_power, a[right], d) / d
        if np.any(left):
            w[left] = self._tail_sum(-1, second_diff_power, -a[left], d) / d
        if np.any(mid):
            c0, c1, c2, c3 = self.dist.middle_coeffs
            am = a[mid]
            p = c0 + am * (c1 + am * (c2 + am * c3))
            p2 = 2.0 * c2 + 6.0 * c3 * am
            w[mid] = d * p + d**3 * p2 / 12.0
        if np.any(rest):
            ar = a[rest]
            w[rest] = (self.dist.call(ar + d) - 2.0 * self.dist.call(ar) + self.dist.call(ar - d)) / d
        if self.N is not None:
            N = self.N
            inside = (a - d >= -N) & (a + d <= N)
            outside = (a - d >= N) | (a + d <= -N)
            edge = ~(inside | outside)
            w[outside] = 0.0
            if np.any(edge):
                ae = a[edge]
                w[edge] = (self.C(ae + d) - 2.0 * self.C(ae) + self.C(ae - d)) / d
        return np.maximum(w, 0.0)

    def ramp_right(self, a: float, d: float) -> float:
        """Weight of the function rising from 0 at a-d to 1 at a, then flat."""
        if self.N is None and a - d >= 1.0:
            r = np.array([a])
            return float(self._tail_sum(1, backward_diff_power, r, d)[0] / d)
        return max(float(self.D(a - d) - self.D(a)) / d, 0.0)

    def ramp_left(self, a: float, d: float) -> float:
        """Weight of the function equal to 1 up to a, falling to 0 at a+d."""
        if self.N is None and a + d <= -1.0:
            r = np.array([-a])
            return float(self._tail_sum(-1, backward_diff_power, r, d)[0] / d)
        return max(float(self.C(a + d) - self.C(a)) / d, 0.0)

    def support_cells(self, d: float) -> int | None:
        """Half-width of the weight support in cells (None if unbounded)."""
        if self.N is None:
            return None
        return int(math.ceil(self.N / d)) + 1


@lru_cache(maxsize=128)
def _stencil(dist: DistributionSpec, d: float, K: int, N: float | None) -> np.ndarray:
    """Weights for offsets -K..K (cells of width d); the ends absorb everything beyond."""
    cp = _CallPair(dist, N)
    m = np.arange(-K, K + 1, dtype=float)
    w = cp.hat(m * d, d)
    w[0] = cp.ramp_left(-K * d, d)
    w[-1] = cp.ramp_right(K * d, d)
    total = math.fsum(w)
    if abs(total - 1.0) > 1e-10:
        raise AccuracyError(f"stencil mass {total!r} differs from one", estimate=abs(total - 1.0))
    w.setflags(write=False)
    return w


def _stencil_width(dist: DistributionSpec, d: float, n: int, N: float | None) -> int:
    support = _CallPair(dist, N).support_cells(d)
    return n if support is None else max(1, min(n, support))


@lru_cache(maxsize=32)
def _wrapped(dist: DistributionSpec, d: float, n: int, N: float | None) -> np.ndarray:
    """Stencil folded modulo n; mass beyond the explicit range is spread evenly."""
    cp = _CallPair(dist, N)
    support = cp.support_cells(d)
    if support is not None:
        M = support
    else:
        # explicit range until the tail mass drops below 1e-13, capped
        mass = lambda a: float(dist.cdf(-a)) + float(dist.sf(a))  # noqa: E731
        a = 1.0
        while mass(a) > 1e-13 and a / d < _MAX_WRAP_TERMS:
            a *= 2.0
        M = int(min(math.ceil(a / d), _MAX_WRAP_TERMS))
    m = np.arange(-M, M + 1)
    w = cp.hat(m * d, d)
    spread = cp.ramp_left(-M * d, d) + cp.ramp_right(M * d, d)
    w[0] = w[-1] = 0.0
    W = np.bincount(np.mod(m, n), weights=w, minlength=n) + spread / n
    W.setflags(write=False)
    return W


def general_weights(dist: DistributionSpec, v: GridFunction, x: float, B: float) -> np.ndarray:
    """Weights on v's nodes of E[v(x + B X)] for constant-extended v at any x."""
    if v.extension != CONSTANT:
        raise InvalidParameters("general weights need constant extension")
    cp = _CallPair(dist)
    d = v.h / B
    a = (v.nodes - x) / B
    w = cp.hat(a, d)
    w[0] = cp.ramp_left(a[0], d)
    w[-1] = cp.ramp_right(a[-1], d)
    return w


# --------------------------------------------------------------------------
# the step operator
# --------------------------------------------------------------------------


class StepOperator:
    """Precomputed transfer functions of v -> E[v(. + B xi)] for one grid layout."""

    def __init__(self, kernel: SublinearKernel, Delta: float, x0: float, h: float, n: int,
                 extension: str = CONSTANT, N: float | None = None):
        # Delta = 1 is allowed here: it is the single-step case E[v(x + xi)]
        if not 0.0 < Delta <= 1.0:
            raise InvalidParameters("Delta must lie in (0, 1]")
        self.kernel = kernel
        self.Delta = Delta
        self.B = Delta ** (1.0 / kernel.alpha)
        self.x0, self.h, self.n = x0, h, n
        self.extension = extension
        self.N = N
        d = h / self.B
        self.corners = kernel.distinct_corners()
        if extension == PERIODIC:
            self.nfft = n
            self._tf = [np.conj(sfft.rfft(_wrapped(c, d, n, N))) for c in self.corners]
            self.K = 0
            self._lin = [(0.0, 0.0)] * len(self.corners)
        else:
            self.K = max(_stencil_width(c, d, n, N) for c in self.corners)
            self.nfft = sfft.next_fast_len(n + 2 * self.K, real=True)
            self._tf = []
            self._lin = []
            for c in self.corners:
                w = _stencil(c, d, self.K, N)
                kern = np.zeros(self.nfft)
                kern[: 2 * self.K + 1] = w[::-1]
                self._tf.append(sfft.rfft(kern))
                cp = _CallPair(c, N)
                aK = self.K * d
                self._lin.append((self.B * float(cp.D(aK)), self.B * float(cp.C(-aK))))

    def _padded(self, v: np.ndarray) -> tuple[np.ndarray, float, float, float]:
        K, n = self.K, self.n
        v0 = v[0]
        buf = np.zeros(self.nfft)
        buf[K : K + n] = v - v0
        sl = sr = 0.0
        if self.extension == LINEAR:
            sl, sr = (v[1] - v[0]) / self.h, (v[-1] - v[-2]) / self.h
            buf[:K] = sl * self.h * np.arange(-K, 0)
            buf[K + n : 2 * K + n] = (v[-1] - v0) + sr * self.h * np.arange(1, K + 1)
        else:
            buf[K + n : 2 * K + n] = v[-1] - v0
        return buf, v0, sl, sr

    def per_corner(self, v: np.ndarray) -> list[np.ndarray]:
        v = np.asarray(v, dtype=float)
        if self.extension == PERIODIC:
            v0 = v[0]
            spec = sfft.rfft(v - v0)
            return [v0 + sfft.irfft(spec * tf, n=self.n) for tf in self._tf]
        buf, v0, sl, sr = self._padded(v)
        spec = sfft.rfft(buf)
        outs = []
        K, n = self.K, self.n
        for tf, (dK, cK) in zip(self._tf, self._lin):
            c = sfft.irfft(spec * tf, n=self.nfft)
            out = v0 + c[2 * K : 2 * K + n]
            if self.extension == LINEAR:
                out = out + (sr * dK - sl * cK)
            outs.append(out)
        return outs

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.size and np.all(v == v[0]) and self.extension != LINEAR:
            return v.copy()
        outs = self.per_corner(v)
        res = outs[0]
        for o in outs[1:]:
            res = np.maximum(res, o)
        return res


def step(kernel: SublinearKernel, v: GridFunction, Delta: float, N: float | None = None) -> GridFunction:
    """One application of the scheme (clamped at level N when given)."""
    if not 0.0 < Delta < 1.0:
        raise InvalidParameters("Delta must lie in (0, 1)")
    op = StepOperator(kernel, Delta, v.x0, v.h, v.n, v.extension, N)
    return v.with_values(op.apply(v.values))


# --------------------------------------------------------------------------
# configuration and solutions
# --------------------------------------------------------------------------


def default_half_width(alpha: float, T: float, window: float = 2.0) -> float:
    return 8.0 * T ** (1.0 / alpha) + window


@dataclass(frozen=True)
class SchemeConfig:
    """Discretisation parameters.

    ``h`` defaults to a quarter of the kernel scale B = Delta^(1/alpha); the
    domain is [-L, L] (a full period for periodic data).  ``keep`` selects the
    stored time slices: ``"all"``, ``"final"`` or an integer stride.
    """

    Delta: float
    T: float = 1.0
    h: float | None = None
    L: float | None = None
    N: float | None = None
    quad: QuadratureBudget = field(default_factory=QuadratureBudget)
    extension: str = CONSTANT
    keep: object = "all"

    def __post_init__(self):
        if not 0.0 < self.Delta < 1.0:
            raise InvalidParameters("Delta must lie in (0, 1)")
        if self.T <= 0.0:
            raise InvalidParameters("T must be positive")
        if self.h is not None and self.h <= 0.0:
            raise InvalidParameters("h must be positive")
        if self.L is not None and self.L <= 0.0:
            raise InvalidParameters("L must be positive")
        if self.N is not None and self.N <= 0.0:
            raise InvalidParameters("N must be positive")
        if self.extension not in _EXTENSIONS:
            raise InvalidParameters(f"unknown extension {self.extension!r}")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.T / self.Delta * (1.0 + 1e-12)))

    def kernel_scale(self, alpha: float) -> float:
        return self.Delta ** (1.0 / alpha)

    def grid(self, alpha: float) -> tuple[float, float, int]:
        """(x0, h, n) of the spatial grid."""
        B = self.kernel_scale(alpha)
        h = self.h if self.h is not None else B / 4.0
        if self.extension == PERIODIC:
            L = self.L if self.L is not None else math.pi
            n = 1 << max(3, int(math.ceil(math.log2(2.0 * L / h))))
            return -L, 2.0 * L / n, n
        L = self.L if self.L is not None else default_half_width(alpha, self.T)
        cells = int(math.ceil(2.0 * L / h))
        return -L, 2.0 * L / cells, cells + 1


@dataclass(frozen=True, eq=False)
class SchemeSolution:
    config: SchemeConfig
    slices: dict
    phi_id: str = ""
    truncated_at: float | None = None

    @property
    def n_steps(self) -> int:
        return self.config.n_steps

    @property
    def final(self) -> GridFunction:
        return self.slices[self.n_steps]

    def step_index(self, t: float) -> int:
        """Index k with t in [k Delta, (k+1) Delta), capped at the last step."""
        if t < 0.0 or t > self.config.T * (1.0 + 1e-12):
            raise InvalidParameters(f"t={t} outside [0, T]")
        k = int(math.floor(t / self.config.Delta * (1.0 + 1e-12)))
        return min(k, self.n_steps)

    def at(self, t: float) -> GridFunction:
        k = self.step_index(t)
        if k not in self.slices:
            raise KeyError(f"time slice {k} was not stored")
        return self.slices[k]

    def __call__(self, t: float, x):
        return self.at(t)(x)


def _keep(keep, k: int, last: int) -> bool:
    if k == last or keep == "all":
        return True
    if keep == "final":
        return k == 0
    return k % int(keep) == 0


def _run(kernel, phi, config: SchemeConfig, N, callback=None) -> SchemeSolution:
    if isinstance(phi, GridFunction):
        v = phi
    else:
        x0, h, n = config.grid(kernel.alpha)
        v = GridFunction.sample(phi, x0, h, n, config.extension)
    last = config.n_steps
    slices = {0: v}
    if last > 0:
        op = StepOperator(kernel, config.Delta, v.x0, v.h, v.n, v.extension, N)
        vals = v.values
        for k in range(1, last + 1):
            vals = op.apply(vals)
            if callback is not None:
                callback(k, vals)
            if _keep(config.keep, k, last):
                slices[k] = v.with_values(vals)
    name = getattr(phi, "name", "") or getattr(getattr(phi, "func", None), "__name__", "")
    return SchemeSolution(config, slices, name, N)


def solve(kernel: SublinearKernel, phi, config: SchemeConfig, callback=None) -> SchemeSolution:
    """floor(T/Delta) steps of the scheme started from phi sampled on the grid."""
    return _run(kernel, phi, config, None, callback)


def solve_truncated(kernel: SublinearKernel, phi, config: SchemeConfig, callback=None) -> SchemeSolution:
    """The scheme driven by xi clamped to [-N, N]."""
    if config.N is None:
        raise InvalidParameters("solve_truncated needs config.N")
    return _run(kernel, phi, config, config.N, callback)


# --------------------------------------------------------------------------
# the operator S and diagnostics
# --------------------------------------------------------------------------


def shifted_expectation(kernel: SublinearKernel, Delta: float, x, v: GridFunction) -> np.ndarray:
    """E[v(x + B xi)] at arbitrary points x, exact for the interpolant."""
    B = Delta ** (1.0 / kernel.alpha)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    for i, xi in enumerate(xs):
        best = -np.inf
        for d in kernel.distinct_corners():
            w = general_weights(d, v, float(xi), B)
            best = max(best, float(np.dot(w, v.values)))
        out[i] = best
    return out


def scheme_operator_S(kernel: SublinearKernel, Delta: float, x, p, v: GridFunction):
    """S(Delta, x, p, v) = (p - E[v(x + B xi)]) / Delta."""
    if not 0.0 < Delta < 1.0:
        raise InvalidParameters("Delta must lie in (0, 1)")
    e = shifted_expectation(kernel, Delta, x, v)
    out = (np.asarray(p, dtype=float) - e) / Delta
    return float(out[0]) if np.ndim(x) == 0 and np.ndim(p) == 0 else out


def scheme_residual_on_grid(kernel: SublinearKernel, Delta: float, p: np.ndarray, v: GridFunction) -> np.ndarray:
    """S(Delta, x_i, p_i, v) at every node of v's grid."""
    op = StepOperator(kernel, Delta, v.x0, v.h, v.n, v.extension)
    return (np.asarray(p, dtype=float) - op.apply(v.values)) / Delta


def holder_time(sol: SchemeSolution, s: float, t: float) -> float:
    """sup_x |u(t, x) - u(s, x)| over the grid."""
    return float(np.max(np.abs(sol.at(t).values - sol.at(s).values)))
