import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sint

from stablepide.errors import InvalidParameters
from stablepide.measure import (
    StableParams,
    TailProfile,
    assumption_constants,
    beta_profile,
    build_distribution,
    cdf,
    corner_distributions,
    gamma_exponent,
    lemma_I1,
    lemma_I2,
    levy_integral_g,
    pdf,
)
from stablepide.sublinear import Integrand, constant, identity, integrate


@pytest.fixture(scope="module")
def sym():
    return build_distribution(1.5, 0.5, 0.5)


@pytest.fixture(scope="module")
def power():
    return build_distribution(1.5, 0.3, 0.3, TailProfile.power(3.0, 0.05, 0.08))


# ---- construction -----------------------------------------------------------


def test_symmetric_middle_density_is_half_z_squared(sym):
    assert np.allclose(sym.middle_coeffs, (0.0, 0.0, 0.5, 0.0), atol=1e-14)


def test_cdf_examples(sym):
    assert cdf(sym, -1.0) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert cdf(sym, 0.0) == pytest.approx(0.5, abs=1e-15)
    assert cdf(sym, 1.0) == pytest.approx(2.0 / 3.0, abs=1e-15)
    assert cdf(sym, -2.0) == pytest.approx((1.0 / 3.0) * 2.0**-1.5, rel=1e-14)
    assert cdf(sym, 1e300) == pytest.approx(1.0, abs=1e-15)
    assert cdf(sym, -1e300) == pytest.approx(0.0, abs=1e-15)


def test_pdf_examples(sym):
    assert pdf(sym, 2.0) == pytest.approx(0.5 * 2.0**-2.5, rel=1e-14)
    assert pdf(sym, 0.0) == pytest.approx(0.0, abs=1e-15)
    # continuity at the seams
    for z in (-1.0, 1.0):
        assert pdf(sym, z - 1e-12) == pytest.approx(pdf(sym, z + 1e-12), abs=1e-9)


def test_power_tail_pdf_value():
    # This tail has no nonnegative cubic closure, so only the tail formula is checked.
    d = build_distribution(1.5, 0.5, 0.5, TailProfile.power(3.0, 0.0, 0.1), strict=False)
    assert pdf(d, 2.0) == pytest.approx(0.5 * 2.0**-2.5 + 0.1 * 3.0 * 2.0**-4.0, rel=1e-13)
    assert pdf(d, 2.0) == pytest.approx(0.10714, abs=1e-5)
    with pytest.raises(InvalidParameters):
        build_distribution(1.5, 0.5, 0.5, TailProfile.power(3.0, 0.0, 0.1))


def test_pdf_integrates_to_one(sym, power):
    for d in (sym, power):
        assert integrate(d, constant(1.0)) == pytest.approx(1.0, abs=1e-10)


def test_infeasible_parameters_raise():
    with pytest.raises(InvalidParameters):
        build_distribution(1.5, 0.8, 0.8)
    with pytest.raises(InvalidParameters):
        build_distribution(1.5, 0.4, 0.6)
    with pytest.raises(InvalidParameters):
        StableParams(2.0, 0.1, 0.2, 1.0)
    with pytest.raises(InvalidParameters):
        StableParams(1.5, 0.3, 0.2, 1.0)
    with pytest.raises(InvalidParameters):
        build_distribution(1.5, 0.2, 0.2, TailProfile.power(1.2))


def test_corners_are_lexicographic():
    p = StableParams(1.5, 0.2, 0.3, 1.0)
    assert p.corners == ((0.2, 0.2), (0.2, 0.3), (0.3, 0.2), (0.3, 0.3))
    ds = corner_distributions(p)
    assert [(d.k_minus, d.k_plus) for d in ds] == list(p.corners)


# ---- invariants ---------------------------------------------------------------


def test_cdf_monotone_on_dense_sample(sym, power):
    z = np.linspace(-20.0, 20.0, 10_000)
    for d in (sym, power):
        F = cdf(d, z)
        assert np.all(np.diff(F) >= 0.0)
        assert np.all((F >= 0.0) & (F <= 1.0))


def test_mean_zero_every_corner():
    for p, prof in [
        (StableParams(1.5, 0.2, 0.3, 1.0), TailProfile.compact()),
        (StableParams(1.8, 0.3, 0.4, 1.0), TailProfile.compact()),
        (StableParams(1.5, 0.25, 0.3, 1.0), TailProfile.power(1.8, 0.03, 0.03)),
    ]:
        for d in corner_distributions(p, prof):
            assert abs(integrate(d, identity())) <= 1e-10


def test_beta_profile_examples(sym):
    v, _ = beta_profile(sym, -1.0)
    assert v == pytest.approx(0.0, abs=1e-15)
    v, _ = beta_profile(sym, 0.0)
    assert v == pytest.approx(-0.5 / 1.5, abs=1e-15)
    v, _ = beta_profile(sym, -0.0)
    assert v == pytest.approx(-0.5 / 1.5, abs=1e-15)
    # 1 - F(z) = 1/2 - z^3/6 on (0, 1)
    expected = (0.5 - 0.5**3 / 6.0) * 0.5**1.5 - 1.0 / 3.0
    v, _ = beta_profile(sym, 0.5)
    assert v == pytest.approx(expected, abs=1e-14)
    assert v == pytest.approx(-0.16392, abs=1e-5)


def test_beta_derivative_matches_differences(power):
    z = np.array([-1.7, -0.6, -0.2, 0.3, 0.8, 1.4, 2.5])
    e = 1e-6
    _, der = beta_profile(power, z)
    fd = (beta_profile(power, z + e)[0] - beta_profile(power, z - e)[0]) / (2 * e)
    assert np.allclose(der, fd, atol=1e-7)


def test_beta_round_trip(sym, power):
    z = np.concatenate([np.linspace(-2.0, -1e-3, 500), np.linspace(1e-3, 2.0, 500)])
    for d in (sym, power):
        v, _ = beta_profile(d, z)
        a = np.abs(z) ** -d.alpha
        F = np.where(z < 0, (v + d.k_minus / d.alpha) * a, 1.0 - (v + d.k_plus / d.alpha) * a)
        assert np.max(np.abs(F - cdf(d, z))) <= 1e-12


def _direct_truncated(d, N):
    return integrate(d, Integrand(lambda z: z * z, None, None, (-N, N)), lo=-N, hi=N)


def _direct_gap(d, N):
    return integrate(d, Integrand(lambda z: np.maximum(np.abs(z) - N, 0.0), 1.0, None, (-N, N)))


@pytest.mark.parametrize("N", [1.0, 2.0, 4.0, 8.0])
def test_truncated_moment_identity(sym, power, N):
    for d in (sym, power):
        direct = _direct_truncated(d, N)
        assert N ** (2 - d.alpha) * lemma_I1(d, N) == pytest.approx(direct, rel=1e-8)
        assert d.truncated_second_moment(N) == pytest.approx(direct, rel=1e-8)


@pytest.mark.parametrize("N", [1.0, 2.0, 4.0, 8.0])
def test_clamp_gap_identity(sym, power, N):
    for d in (sym, power):
        assert N ** (1 - d.alpha) * lemma_I2(d, N) == pytest.approx(_direct_gap(d, N), rel=1e-8)


def test_lemma_examples(sym):
    assert lemma_I1(sym, 1.0) == pytest.approx(0.2, rel=1e-12)
    assert 2.0**0.5 * lemma_I1(sym, 2.0) == pytest.approx(0.2 + 2.0 * (math.sqrt(2.0) - 1.0), rel=1e-12)
    assert lemma_I2(sym, 1.0) == pytest.approx(4.0 / 3.0, rel=1e-12)
    assert 4.0**-0.5 * lemma_I2(sym, 4.0) == pytest.approx(2.0 / 3.0, rel=1e-12)
    assert 1e-3**0.5 * lemma_I1(sym, 1e-3) < 1e-10
    # clamped moment differs from the truncated one by N^2 P(|X| > N)
    assert sym.clamped_second_moment(1.0) == pytest.approx(13.0 / 15.0, rel=1e-12)


def test_lemma_max_over_corners():
    ds = corner_distributions(StableParams(1.5, 0.2, 0.3, 1.0))
    assert lemma_I1(ds, 2.0) == max(lemma_I1(d, 2.0) for d in ds)
    assert lemma_I2(ds, 2.0) == max(lemma_I2(d, 2.0) for d in ds)


def test_second_moment_diverges(sym):
    Ns = 2.0 ** np.arange(1, 16)
    vals = np.array([_direct_truncated(sym, N) for N in Ns])
    assert np.all(np.diff(vals) > 0)
    ratio = vals / Ns ** (2 - sym.alpha)
    steps = np.abs(np.diff(ratio))
    assert np.all(np.diff(steps) < 0)
    assert ratio[-1] == pytest.approx(2 * 0.5 / (2 - 1.5), rel=1e-2)


def test_levy_integral_two_ways():
    for a in (1.2, 1.5, 1.8):
        near, _ = sint.quad(lambda z: 1.0, 0.0, 1.0, weight="alg", wvar=(1.0 - a, 0.0))
        far, _ = sint.quad(lambda z: z ** (-a), 1.0, np.inf, epsabs=1e-14, epsrel=1e-13)
        assert levy_integral_g(a) == pytest.approx(near + far, abs=1e-10)
    c = assumption_constants(StableParams(1.5, 0.5, 0.5, 1.0), TailProfile.compact(), 2**-6)
    assert c.K_levy == pytest.approx((0.5 + 0.5) * levy_integral_g(1.5), abs=1e-12)


# ---- constants ----------------------------------------------------------------


def test_rate_exponents():
    assert TailProfile.compact().rate_exponent(1.5) == (pytest.approx(1 / 3), False)
    assert TailProfile.power(3.0).rate_exponent(1.5)[0] == pytest.approx(1 / 3)
    assert TailProfile.power(1.8).rate_exponent(1.5)[0] == pytest.approx(0.2)
    q, flag = TailProfile.power(2.0).rate_exponent(1.5)
    assert q == pytest.approx(1 / 3) and flag
    assert gamma_exponent(1.5, 1 / 3) == pytest.approx(1 / 6)
    assert gamma_exponent(1.2, (2 - 1.2) / 1.2) == pytest.approx(0.25)
    assert gamma_exponent(1.8, (2 - 1.8) / 1.8) == pytest.approx(1 / 18)


def test_assumption_constants_compact():
    c = assumption_constants(StableParams(1.5, 0.5, 0.5, 1.0), TailProfile.compact(), 2**-8)
    assert c.q == pytest.approx(1 / 3) and c.Gamma == pytest.approx(1 / 6)
    assert c.M_xi_1 == pytest.approx(9 / 4, rel=1e-14)
    assert c.I_Delta == pytest.approx(math.sqrt(c.I1_Delta) + 2 * c.I2_Delta, rel=1e-14)
    assert 0 < c.Gamma <= 0.25
    for v in c.as_dict().values():
        if isinstance(v, float):
            assert math.isfinite(v) and v >= 0


def test_assumption_constants_power():
    c = assumption_constants(StableParams(1.5, 0.25, 0.3, 1.0), TailProfile.power(1.8, 0.03, 0.03), 2**-6)
    assert c.q == pytest.approx(0.2) and c.Gamma == pytest.approx(0.1)


def test_I_Delta_stays_bounded():
    p = StableParams(1.5, 0.5, 0.5, 1.0)
    vals = [assumption_constants(p, TailProfile.compact(), 2.0**-j).I_Delta for j in range(4, 20, 3)]
    assert max(vals) < 10.0


# ---- randomized -------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(
    alpha=st.floats(1.3, 1.9),
    k=st.floats(0.05, 0.3),
    skew=st.floats(-0.02, 0.02),
)
def test_random_compact_family(alpha, k, skew):
    try:
        d = build_distribution(alpha, k, k + abs(skew))
    except InvalidParameters:
        return
    z = np.linspace(-5, 5, 2001)
    assert np.all(np.diff(cdf(d, z)) >= 0)
    assert np.all(pdf(d, z) >= 0)
    assert abs(integrate(d, identity())) <= 1e-10
    for s in (-1.0, 1.0):
        assert pdf(d, s * (1 - 1e-12)) == pytest.approx(pdf(d, s * (1 + 1e-12)), abs=1e-9)
