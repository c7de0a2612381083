"""Admissible heavy-tailed distributions and the constants attached to them.

A distribution is determined by its tail weights ``(k_minus, k_plus)``, the
stability index ``alpha`` and a tail profile.  Outside (-1, 1) the cdf is

    F(z)     = (k_minus/alpha) |z|^-alpha + a1 |z|^-beta,        z <= -1
    1 - F(z) = (k_plus/alpha)  z^-alpha   + a2 z^-beta,          z >= 1

(``a1 = a2 = 0`` for the compact profile).  On (-1, 1) the density is the
unique cubic that fixes the total mass, zeroes the mean and joins the tail
densities continuously at both ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import AssumptionViolated, InvalidParameters
from .quadrature import (
    QuadratureBudget,
    composite_nodes,
    merge_breakpoints,
    power_tail_integral,
    power_weight_quad,
)

COMPACT = "compact"
POWER = "power"


@dataclass(frozen=True)
class StableParams:
    alpha: float
    r1: float
    r2: float
    T: float = 1.0

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise InvalidParameters(f"alpha must lie in (1, 2), got {self.alpha}")
        if not 0.0 <= self.r1 <= self.r2:
            raise InvalidParameters(f"need 0 <= r1 <= r2, got r1={self.r1}, r2={self.r2}")
        if self.T <= 0.0:
            raise InvalidParameters("T must be positive")

    @property
    def corners(self) -> tuple[tuple[float, float], ...]:
        """The four corners (k_minus, k_plus) in lexicographic order."""
        r1, r2 = self.r1, self.r2
        return ((r1, r1), (r1, r2), (r2, r1), (r2, r2))


@dataclass(frozen=True)
class TailProfile:
    """Tail correction family: ``compact`` (no correction) or ``power``.

    For ``power`` the corrections are a1 |z|^(alpha-beta) on the left and
    a2 z^(alpha-beta) on the right of the unit interval, with beta > alpha.
    """

    kind: str = COMPACT
    beta: float | None = None
    a1: float = 0.0
    a2: float = 0.0

    def __post_init__(self):
        if self.kind not in (COMPACT, POWER):
            raise InvalidParameters(f"unknown profile {self.kind!r}")
        if self.kind == COMPACT and (self.a1 != 0.0 or self.a2 != 0.0):
            raise InvalidParameters("compact profile takes no tail amplitudes")
        if self.kind == POWER and self.beta is None:
            raise InvalidParameters("power profile needs beta")

    @classmethod
    def compact(cls) -> "TailProfile":
        return cls(COMPACT)

    @classmethod
    def power(cls, beta: float, a1: float = 0.0, a2: float = 0.0) -> "TailProfile":
        return cls(POWER, float(beta), float(a1), float(a2))

    def rate_exponent(self, alpha: float) -> tuple[float, bool]:
        """(q, log_corrected) for the decay of the tail corrections."""
        base = (2.0 - alpha) / alpha
        if self.kind == COMPACT:
            return base, False
        beta = self.beta
        if beta == 2.0:
            return base, True
        if beta < 2.0:
            return (beta - alpha) / alpha, False
        return base, False


@dataclass(frozen=True)
class DistributionSpec:
    alpha: float
    k_minus: float
    k_plus: float
    profile: TailProfile
    middle_coeffs: tuple[float, float, float, float] = field(default=(0.0, 0.0, 0.0, 0.0))

    # ---- tail data -------------------------------------------------------

    @property
    def beta(self) -> float:
        return self.profile.beta if self.profile.kind == POWER else math.inf

    @property
    def left_mass(self) -> float:
        """F(-1)."""
        return self.k_minus / self.alpha + self.profile.a1

    @property
    def right_mass(self) -> float:
        """1 - F(1)."""
        return self.k_plus / self.alpha + self.profile.a2

    def tail_terms(self, side: int) -> list[tuple[float, float]]:
        """Survival-function power terms ``(coef, exponent)`` of one tail (side=-1 or +1)."""
        k = self.k_minus if side < 0 else self.k_plus
        a = self.profile.a1 if side < 0 else self.profile.a2
        terms = [(k / self.alpha, self.alpha)]
        if self.profile.kind == POWER and a != 0.0:
            terms.append((a, self.beta))
        return terms

    def _tail_survival(self, r: np.ndarray, side: int) -> np.ndarray:
        out = np.zeros_like(r)
        for c, e in self.tail_terms(side):
            out += c * r ** (-e)
        return out

    def _tail_density(self, r: np.ndarray, side: int) -> np.ndarray:
        out = np.zeros_like(r)
        for c, e in self.tail_terms(side):
            out += c * e * r ** (-e - 1.0)
        return out

    def _tail_excess(self, r: np.ndarray, side: int) -> np.ndarray:
        # int_r^inf survival(s) ds
        out = np.zeros_like(r)
        for c, e in self.tail_terms(side):
            out += c / (e - 1.0) * r ** (1.0 - e)
        return out

    # ---- middle polynomial -----------------------------------------------

    def _poly(self, z):
        c0, c1, c2, c3 = self.middle_coeffs
        return c0 + z * (c1 + z * (c2 + z * c3))

    def _poly_anti(self, z):
        c0, c1, c2, c3 = self.middle_coeffs
        return z * (c0 + z * (c1 / 2 + z * (c2 / 3 + z * c3 / 4)))

    def _poly_anti2(self, z):
        c0, c1, c2, c3 = self.middle_coeffs
        return z * z * (c0 / 2 + z * (c1 / 6 + z * (c2 / 12 + z * c3 / 20)))

    # ---- distribution functions ------------------------------------------

    def cdf(self, z):
        z = np.asarray(z, dtype=float)
        out = np.empty_like(z)
        left = z <= -1.0
        right = z >= 1.0
        mid = ~(left | right)
        out[left] = self._tail_survival(-z[left], -1)
        out[right] = 1.0 - self._tail_survival(z[right], 1)
        zm = z[mid]
        out[mid] = self.left_mass + self._poly_anti(zm) - self._poly_anti(-1.0)
        return out if out.ndim else float(out)

    def sf(self, z):
        """Survival 1 - F(z), accurate in the right tail."""
        z = np.asarray(z, dtype=float)
        out = np.empty_like(z)
        right = z >= 1.0
        out[right] = self._tail_survival(z[right], 1)
        out[~right] = 1.0 - np.asarray(self.cdf(z[~right]))
        return out if out.ndim else float(out)

    def pdf(self, z):
        z = np.asarray(z, dtype=float)
        out = np.empty_like(z)
        left = z <= -1.0
        right = z >= 1.0
        mid = ~(left | right)
        out[left] = self._tail_density(-z[left], -1)
        out[right] = self._tail_density(z[right], 1)
        out[mid] = np.maximum(self._poly(z[mid]), 0.0) if self.is_proper else self._poly(z[mid])
        return out if out.ndim else float(out)

    @property
    def is_proper(self) -> bool:
        return _cubic_minimum(self.middle_coeffs) >= -1e-14

    def call(self, a):
        """C(a) = E[(a - X)^+] = int_{-inf}^a F(s) ds."""
        a = np.asarray(a, dtype=float)
        out = np.empty_like(a)
        left = a <= -1.0
        right = a >= 1.0
        mid = ~(left | right)
        out[left] = self._tail_excess(-a[left], -1)
        am = a[mid]
        c_left = self._tail_excess(np.array(1.0), -1)
        shift = self.left_mass - self._poly_anti(-1.0)
        out[mid] = (
            c_left + shift * (am + 1.0) + self._poly_anti2(am) - self._poly_anti2(-1.0)
        )
        out[right] = a[right] + self._tail_excess(a[right], 1)
        return out if out.ndim else float(out)

    def excess(self, a):
        """D(a) = E[(X - a)^+] = C(a) - a (the mean is zero)."""
        a = np.asarray(a, dtype=float)
        out = np.empty_like(a)
        right = a >= 1.0
        out[right] = self._tail_excess(a[right], 1)
        out[~right] = np.asarray(self.call(a[~right])) - a[~right]
        return out if out.ndim else float(out)

    # ---- beta profiles -----------------------------------------------------

    def beta_profile(self, z):
        """Value and derivative of the tail correction at ``z``.

        ``z <= 0`` selects the left correction, ``z > 0`` the right one;
        at 0 the forced limits -k/alpha are returned (left for ``-0.0``).
        """
        z = np.asarray(z, dtype=float)
        val = np.empty_like(z)
        der = np.empty_like(z)
        al = self.alpha
        neg = np.signbit(z)
        pos = ~neg
        # right branch
        zp = z[pos]
        r_tail = zp >= 1.0
        vp = np.empty_like(zp)
        dp = np.empty_like(zp)
        a2 = self.profile.a2
        if self.profile.kind == POWER:
            vp[r_tail] = a2 * zp[r_tail] ** (al - self.beta)
            dp[r_tail] = a2 * (al - self.beta) * zp[r_tail] ** (al - self.beta - 1.0)
        else:
            vp[r_tail] = 0.0
            dp[r_tail] = 0.0
        zi = zp[~r_tail]
        sf = 1.0 - (self.left_mass + self._poly_anti(zi) - self._poly_anti(-1.0))
        vp[~r_tail] = sf * zi**al - self.k_plus / al
        dp[~r_tail] = -self._poly(zi) * zi**al + al * sf * zi ** (al - 1.0)
        val[pos], der[pos] = vp, dp
        # left branch
        zn = z[neg]
        l_tail = zn <= -1.0
        vn = np.empty_like(zn)
        dn = np.empty_like(zn)
        a1 = self.profile.a1
        y = -zn
        if self.profile.kind == POWER:
            vn[l_tail] = a1 * y[l_tail] ** (al - self.beta)
            dn[l_tail] = -a1 * (al - self.beta) * y[l_tail] ** (al - self.beta - 1.0)
        else:
            vn[l_tail] = 0.0
            dn[l_tail] = 0.0
        yi = y[~l_tail]
        F = self.left_mass + self._poly_anti(-yi) - self._poly_anti(-1.0)
        vn[~l_tail] = F * yi**al - self.k_minus / al
        dn[~l_tail] = self._poly(-yi) * yi**al - al * F * yi ** (al - 1.0)
        val[neg], der[neg] = vn, dn
        if val.ndim == 0:
            return float(val), float(der)
        return val, der

    def beta_left(self, y):
        """Left correction evaluated at -y for y >= 0."""
        return self.beta_profile(-np.abs(np.asarray(y, dtype=float)))[0]

    def beta_right(self, y):
        return self.beta_profile(np.abs(np.asarray(y, dtype=float)))[0]

    def levy_deviation(self, side: int, y):
        """|y|^(alpha+1) p(side*y) - k_side: the density's departure from the stable shape."""
        y = np.asarray(y, dtype=float)
        k = self.k_minus if side < 0 else self.k_plus
        return np.asarray(self.pdf(side * y)) * y ** (self.alpha + 1.0) - k

    # ---- moments -------------------------------------------------------------

    def abs_mean(self) -> float:
        """E|X| from the closed-form decomposition."""
        c0, c1, c2, c3 = self.middle_coeffs
        # int_{-1}^{1} |z| p(z) dz: odd terms cancel in |z|
        mid = c0 + c2 / 2.0
        tails = 0.0
        for side in (-1, 1):
            for c, e in self.tail_terms(side):
                tails += c * e / (e - 1.0)
        return mid + tails

    def truncated_second_moment(self, N: float) -> float:
        """E[X^2 ; |X| <= N] by Gauss-Legendre on the middle and closed forms outside."""
        lo, hi = -min(N, 1.0), min(N, 1.0)
        nodes, weights = composite_nodes(np.linspace(lo, hi, 9), 8)
        total = float(np.dot(weights, nodes**2 * self._poly(nodes)))
        if N > 1.0:
            for side in (-1, 1):
                for c, e in self.tail_terms(side):
                    # int_1^N r^2 c e r^(-e-1) dr
                    total += c * e * (N ** (2.0 - e) - 1.0) / (2.0 - e)
        return total

    def clamped_second_moment(self, N: float) -> float:
        """E[(X clamped to [-N, N])^2]."""
        tails = float(self.cdf(-N)) + float(self.sf(N))
        return self.truncated_second_moment(N) + N * N * tails


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------


def _cubic_minimum(coeffs: Sequence[float]) -> float:
    c0, c1, c2, c3 = coeffs
    cands = [-1.0, 1.0]
    disc = 4.0 * c2 * c2 - 12.0 * c1 * c3
    if c3 != 0.0 and disc >= 0.0:
        s = math.sqrt(disc)
        cands += [(-2.0 * c2 + s) / (6.0 * c3), (-2.0 * c2 - s) / (6.0 * c3)]
    elif c3 == 0.0 and c2 != 0.0:
        cands.append(-c1 / (2.0 * c2))
    pts = np.array([c for c in cands if -1.0 <= c <= 1.0])
    return float(np.min(c0 + pts * (c1 + pts * (c2 + pts * c3))))


def build_distribution(
    alpha: float,
    k_minus: float,
    k_plus: float,
    profile: TailProfile | None = None,
    strict: bool = True,
) -> DistributionSpec:
    """Close the tails of a profile with the cubic middle density.

    With ``strict=False`` a middle density that dips below zero is accepted.
    The tails stay exact, which is all some diagnostics need, but such a
    spec is not a probability distribution.
    """
    profile = profile or TailProfile.compact()
    if not 1.0 < alpha < 2.0:
        raise InvalidParameters(f"alpha must lie in (1, 2), got {alpha}")
    if k_minus < 0.0 or k_plus < 0.0:
        raise InvalidParameters("tail weights must be nonnegative")
    if profile.kind == POWER and not profile.beta > alpha:
        raise InvalidParameters("power profile needs beta > alpha")
    mL = k_minus / alpha + profile.a1
    mR = k_plus / alpha + profile.a2
    if mL < 0.0 or mR < 0.0:
        raise InvalidParameters("tail masses must be nonnegative")
    if mL + mR >= 1.0:
        raise InvalidParameters(f"tail masses {mL:.4g} + {mR:.4g} leave no middle mass")

    beta = profile.beta if profile.kind == POWER else math.inf
    pL = k_minus + (profile.a1 * beta if profile.kind == POWER else 0.0)
    pR = k_plus + (profile.a2 * beta if profile.kind == POWER else 0.0)
    # tail first moments (left is negative)
    mom = k_plus / (alpha - 1.0) - k_minus / (alpha - 1.0)
    if profile.kind == POWER:
        mom += (profile.a2 - profile.a1) * beta / (beta - 1.0)

    A = np.array(
        [
            [2.0, 0.0, 2.0 / 3.0, 0.0],  # mass
            [0.0, 2.0 / 3.0, 0.0, 2.0 / 5.0],  # first moment
            [1.0, -1.0, 1.0, -1.0],  # p(-1)
            [1.0, 1.0, 1.0, 1.0],  # p(1)
        ]
    )
    rhs = np.array([1.0 - mL - mR, -mom, pL, pR])
    coeffs = tuple(float(c) for c in np.linalg.solve(A, rhs))
    if strict and _cubic_minimum(coeffs) < -1e-14:
        raise InvalidParameters(
            f"middle density goes negative for k=({k_minus}, {k_plus}), alpha={alpha}"
        )
    return DistributionSpec(alpha, float(k_minus), float(k_plus), profile, coeffs)


def corner_distributions(params: StableParams, profile: TailProfile | None = None):
    return tuple(build_distribution(params.alpha, km, kp, profile) for km, kp in params.corners)


# module-level wrappers with the operation names used throughout the docs


def cdf(spec: DistributionSpec, z):
    return spec.cdf(z)


def pdf(spec: DistributionSpec, z):
    return spec.pdf(z)


def beta_profile(spec: DistributionSpec, z):
    return spec.beta_profile(z)


# --------------------------------------------------------------------------
# integrals of the tail corrections
# --------------------------------------------------------------------------


def _as_specs(dists) -> tuple[DistributionSpec, ...]:
    if isinstance(dists, DistributionSpec):
        return (dists,)
    return tuple(dists)


def _sign_changes(f, lo: float, hi: float, samples: int = 400) -> list[float]:
    if hi <= lo:
        return []
    ys = np.linspace(lo, hi, samples + 1)
    vals = np.asarray(f(ys), dtype=float)
    roots = []
    for i in range(samples):
        a, b = vals[i], vals[i + 1]
        if a == 0.0 and 0 < i:
            roots.append(float(ys[i]))
        elif a * b < 0.0:
            roots.append(brentq(lambda t: float(np.asarray(f(np.array([t])))[0]), ys[i], ys[i + 1], xtol=1e-15))
    return roots


def _middle_weighted(f, upper: float, p: float, absolute: bool) -> float:
    """int_0^upper f(y) y^p dy (or |f|) over y in (0, min(upper, 1)]."""
    b = min(upper, 1.0)
    if b <= 0.0:
        return 0.0
    g = (lambda y: np.abs(f(y))) if absolute else f
    bps = _sign_changes(f, b * 1e-6, b) if absolute else []
    return power_weight_quad(g, b, p, breakpoints=bps)


def _tail_beta_power(spec: DistributionSpec, side: int):
    """(amplitude, exponent) of the correction beyond |y| >= 1: a*y^(alpha-beta)."""
    if spec.profile.kind != POWER:
        return 0.0, 0.0
    a = spec.profile.a1 if side < 0 else spec.profile.a2
    return a, spec.alpha - spec.beta


def beta_weighted_near(spec: DistributionSpec, side: int, Y: float, absolute: bool = True) -> float:
    """int_0^Y |beta_side(side*y)| y^(1-alpha) dy."""
    f = spec.beta_left if side < 0 else spec.beta_right
    total = _middle_weighted(f, Y, 1.0 - spec.alpha, absolute)
    if Y > 1.0:
        a, e = _tail_beta_power(spec, side)
        if a != 0.0:
            amp = abs(a) if absolute else a
            k = e + 2.0 - spec.alpha  # exponent of y in integrand is e + 1 - alpha
            if abs(k) < 1e-14:
                total += amp * math.log(Y)
            else:
                total += amp * (Y**k - 1.0) / k
    return total


def beta_weighted_far(spec: DistributionSpec, side: int, Y: float, absolute: bool = True) -> float:
    """int_Y^inf |beta_side(side*y)| y^(-alpha) dy."""
    total = 0.0
    f = spec.beta_left if side < 0 else spec.beta_right
    if Y < 1.0:
        g = (lambda y: np.abs(f(y))) if absolute else f
        bps = _sign_changes(f, Y, 1.0) if absolute else []
        edges = merge_breakpoints(np.linspace(Y, 1.0, 17), bps)
        nodes, weights = composite_nodes(edges, 12)
        total += float(np.dot(weights, np.asarray(g(nodes)) * nodes ** (-spec.alpha)))
    a, e = _tail_beta_power(spec, side)
    if a != 0.0:
        amp = abs(a) if absolute else a
        lo = max(Y, 1.0)
        k = e + 1.0 - spec.alpha  # integrand exponent e - alpha; antiderivative exponent
        total += amp * lo**k / (-k)
    return total


def lemma_I1(dists, N: float) -> float:
    """Max over the distributions of the truncated-moment constant I_{1,N}.

    Satisfies E[X^2; |X| <= N] = N^(2-alpha) * I_{1,N} for every corner.
    """
    best = -math.inf
    for d in _as_specs(dists):
        al = d.alpha
        # 2 int_0^1 (beta1(-zN) + beta2(zN)) z^(1-alpha) dz = 2 N^(alpha-2) int_0^N (...) y^(1-alpha) dy
        near = beta_weighted_near(d, -1, N, absolute=False) + beta_weighted_near(d, 1, N, absolute=False)
        val = (
            (d.k_minus + d.k_plus) / (2.0 - al)
            + 2.0 * N ** (al - 2.0) * near
            - d.beta_left(N)
            - d.beta_right(N)
        )
        best = max(best, float(val))
    return best


def lemma_I2(dists, N: float) -> float:
    """Max over the distributions of I_{2,N}, with E|X - X^N| = N^(1-alpha) I_{2,N}."""
    best = -math.inf
    for d in _as_specs(dists):
        al = d.alpha
        far = beta_weighted_far(d, -1, N, absolute=False) + beta_weighted_far(d, 1, N, absolute=False)
        val = (d.k_minus + d.k_plus) / (al * (al - 1.0)) + N ** (al - 1.0) * far
        best = max(best, float(val))
    return best


def levy_integral_g(alpha: float) -> float:
    """int_0^inf min(z, z^2) z^(-alpha-1) dz, split at 1 analytically."""
    return 1.0 / (2.0 - alpha) + 1.0 / (alpha - 1.0)


# --------------------------------------------------------------------------
# assumption constants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AssumptionConstants:
    Delta: float
    M: float
    C: float
    q: float
    q_log_corrected: bool
    I1_Delta: float
    I2_Delta: float
    I_Delta: float
    R0: float
    R1_Delta: float
    R2_Delta: float
    K_levy: float
    M_xi_1: float
    Gamma: float
    profile_case: str

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def gamma_exponent(alpha: float, q: float) -> float:
    return min(0.25, (2.0 - alpha) / (2.0 * alpha), q / 2.0)


def _profile_case(profile: TailProfile) -> str:
    if profile.kind == COMPACT:
        return "compact: q=(2-alpha)/alpha"
    if profile.beta == 2.0:
        return "power beta=2: q=(2-alpha)/alpha up to a logarithmic factor"
    if profile.beta < 2.0:
        return "power alpha<beta<2: q=(beta-alpha)/alpha"
    return "power beta>2: q=(2-alpha)/alpha"


def _finite(x: float, name: str) -> float:
    if not np.isfinite(x):
        raise AssumptionViolated(f"{name} did not converge")
    return float(x)


def assumption_constants(
    params: StableParams, profile: TailProfile | None, Delta: float
) -> AssumptionConstants:
    """Compute every assumption/remainder constant for step size ``Delta``."""
    if not 0.0 < Delta < 1.0:
        raise InvalidParameters("Delta must lie in (0, 1)")
    profile = profile or TailProfile.compact()
    al = params.alpha
    B = Delta ** (1.0 / al)
    Y = 1.0 / B
    q, log_flag = profile.rate_exponent(al)
    dists = corner_distributions(params, profile)

    M = I1 = I2 = R0 = R1 = R2 = a3 = Mxi = 0.0
    for d in dists:
        # uniform bound M: far-tail beta integrals, beta at +-1 and the middle deviations
        m_vals = []
        for side in (-1, 1):
            m_vals.append(abs(beta_weighted_far_signed_alpha(d, side)))
        b1m1, b21 = abs(d.beta_left(1.0)), abs(d.beta_right(1.0))
        dev = [
            _middle_weighted(lambda y, s=s: d.levy_deviation(s, y), 1.0, 1.0 - al, True)
            for s in (-1, 1)
        ]
        M = max(M, *m_vals, b1m1, b21, *dev)
        R0 = max(R0, b1m1 + b21 + dev[0] + dev[1])

        near = [beta_weighted_near(d, s, Y) for s in (-1, 1)]
        far = [beta_weighted_far(d, s, Y) for s in (-1, 1)]
        at = [abs(d.beta_left(Y)), abs(d.beta_right(Y))]
        near_scaled = [B ** (2.0 - al) * v for v in near]  # int_0^1 |beta(z/B)| z^(1-alpha) dz
        far_scaled = [B ** (1.0 - al) * v for v in far]  # int_1^inf |beta(z/B)| z^-alpha dz
        a3 = max(a3, *at, *near_scaled, *far_scaled)
        ks = d.k_minus + d.k_plus
        I1 = max(I1, ks / (2.0 - al) + 2.0 * sum(near_scaled) + sum(at))
        I2 = max(I2, ks / (al * (al - 1.0)) + sum(far_scaled))
        R1 = max(R1, 5.0 * sum(near_scaled))
        R2 = max(R2, 4.0 * (sum(at) + sum(far_scaled)))
        Mxi = max(Mxi, d.abs_mean())

    K_levy = 2.0 * params.r2 * levy_integral_g(al)
    vals = dict(M=M, I1=I1, I2=I2, R0=R0, R1=R1, R2=R2, A3=a3, Mxi=Mxi)
    for k, v in vals.items():
        _finite(v, k)
    M, I1, I2, R0, R1, R2, a3, Mxi = (float(v) for v in vals.values())
    return AssumptionConstants(
        Delta=Delta,
        M=M,
        C=a3 / Delta**q,
        q=q,
        q_log_corrected=log_flag,
        I1_Delta=I1,
        I2_Delta=I2,
        I_Delta=math.sqrt(I1) + 2.0 * I2,
        R0=R0,
        R1_Delta=R1,
        R2_Delta=R2,
        K_levy=K_levy,
        M_xi_1=Mxi,
        Gamma=gamma_exponent(al, q),
        profile_case=_profile_case(profile),
    )


def beta_weighted_far_signed_alpha(d: DistributionSpec, side: int) -> float:
    """Signed int_1^inf beta(side*y) y^-alpha dy, one of the quantities bounded by M."""
    return beta_weighted_far(d, side, 1.0, absolute=False)


def iter_corners(dists: Iterable[DistributionSpec]):
    return tuple(dists)
