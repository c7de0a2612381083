import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from stablepide.errors import InvalidParameters, NotAvailable
from stablepide.measure import StableParams, levy_integral_g
from stablepide.pide import (
    LevyMeasureView,
    affine_function,
    characteristic_exponent,
    consistency_bound,
    consistency_residual,
    constant_function,
    cosine_function,
    gaussian_bump,
    nonlocal_operator,
    reference_linear,
    views_of,
)
from stablepide.sublinear import SublinearKernel

# c(alpha, k) = -2k Gamma(-alpha) cos(pi alpha / 2), frozen from an independent evaluation
C_ORACLE = {
    (1.2, 0.2): 0.5996112781623311,
    (1.5, 0.5): 1.6710855164206668,
    (1.8, 0.5): 3.0320498802702045,
}


@pytest.fixture(scope="module")
def single():
    return SublinearKernel.singleton(1.5, 0.5)


@pytest.fixture(scope="module")
def four():
    return SublinearKernel.from_params(StableParams(1.5, 0.2, 0.3, 1.0))


def test_characteristic_exponent_oracle():
    for (a, k), c in C_ORACLE.items():
        assert characteristic_exponent(a, k) == pytest.approx(c, rel=1e-12)
        assert c == pytest.approx(-2 * k * gamma(-a) * math.cos(math.pi * a / 2), rel=1e-14)


def test_affine_annihilated(four):
    w = affine_function(0.3, -1.2)
    for x in (-2.0, 0.0, 0.7, 5.0):
        assert abs(nonlocal_operator(four, w, 0.5, x)) <= 1e-10
    assert nonlocal_operator(four, constant_function(4.0), 0.5, 1.0) == 0.0


def test_cosine_gives_minus_c(single):
    assert nonlocal_operator(single, cosine_function(), 0.0, 0.0) == pytest.approx(-C_ORACLE[(1.5, 0.5)], abs=1e-9)
    # translation: delta_z cos(x) = cos(x) times the value at 0 for a symmetric measure
    assert nonlocal_operator(single, cosine_function(), 0.0, 0.9) == pytest.approx(
        -C_ORACLE[(1.5, 0.5)] * math.cos(0.9), abs=1e-9
    )


def _brute_force_bump(k, alpha, nodes=1_000_000):
    """2k int_0^inf (exp(-z^2) - 1) z^(-1-alpha) dz on a log-graded Simpson mesh."""
    lo, hi = 1e-12, 40.0
    s = np.linspace(math.log(lo), math.log(hi), nodes + 1)
    z = np.exp(s)
    f = np.expm1(-z * z) * z ** (-alpha)
    h = s[1] - s[0]
    simpson = h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
    below = -(lo ** (2 - alpha)) / (2 - alpha)
    above = -(hi ** -alpha) / alpha
    return 2 * k * (simpson + below + above)


def test_bump_against_brute_force(single):
    got = nonlocal_operator(single, gaussian_bump(1.0), 0.0, 0.0)
    brute = _brute_force_bump(0.5, 1.5)
    assert got == pytest.approx(brute, abs=1e-6)
    assert brute == pytest.approx(0.5 * gamma(-0.75), abs=1e-6)


def test_maximum_principle(single, four):
    for kernel in (single, four):
        assert nonlocal_operator(kernel, gaussian_bump(1.0), 0.3, 0.0) <= 1e-9
        # cos peaks at 0 and 2 pi
        assert nonlocal_operator(kernel, cosine_function(), 0.0, 2 * math.pi) <= 1e-9


@settings(max_examples=10, deadline=None)
@given(x=st.floats(-3, 3), t=st.floats(0, 1))
def test_corner_affinity(x, t):
    r1, r2, a = 0.2, 0.3, 1.5
    corners = [LevyMeasureView(km, kp, a) for km in (r1, r2) for kp in (r1, r2)]
    centroid = LevyMeasureView((r1 + r2) / 2, (r1 + r2) / 2, a)
    w = gaussian_bump(1.0)
    avg = np.mean([nonlocal_operator(v, w, t, x) for v in corners])
    assert nonlocal_operator(centroid, w, t, x) == pytest.approx(avg, abs=1e-10)


def test_views_and_levy_moment(four):
    vs = views_of(four)
    assert [(v.k_minus, v.k_plus) for v in vs] == [(0.2, 0.2), (0.2, 0.3), (0.3, 0.2), (0.3, 0.3)]
    assert vs[1].levy_moment() == pytest.approx(0.5 * levy_integral_g(1.5), rel=1e-14)
    with pytest.raises(InvalidParameters):
        LevyMeasureView(0.1, 0.1, 2.5)


def test_reference_linear():
    x = np.linspace(-2, 2, 9)
    assert np.array_equal(reference_linear(1.5, 0.5, "cos", 0.0, x), np.cos(x))
    v = reference_linear(1.5, 0.5, "cos", 1.0, 0.0)
    assert v == pytest.approx(math.exp(-C_ORACLE[(1.5, 0.5)]), rel=1e-12)
    lam = 2.5
    assert reference_linear(1.5, 0.5, "cos", lam * 0.4, 0.3) == pytest.approx(
        reference_linear(1.5, lam * 0.5, "cos", 0.4, 0.3), rel=1e-14
    )
    assert reference_linear(1.5, 0.5, "const", 0.7, 0.0, level=3.0) == 3.0
    with pytest.raises(NotAvailable):
        reference_linear(1.5, 0.5, "bump", 0.5, 0.0)


def test_test_functions_self_check():
    rng = np.random.default_rng(0)
    for w in (cosine_function(), gaussian_bump(1.0), affine_function(1.0, 2.0), constant_function(1.0)):
        assert w.self_check(rng) <= 1e-6


def test_sup_norms_of_bump():
    w = gaussian_bump(1.0)
    x = np.linspace(-5, 5, 200001)
    for t in (0.0, 1.0):
        assert np.max(np.abs(w.dx(t, x))) <= w.sup_dx + 1e-12
        assert np.max(np.abs(w.dxx(t, x))) <= w.sup_dxx + 1e-12
    assert np.max(np.abs(w.dtx(0.0, x))) <= w.sup_dtx + 1e-12


def test_consistency_examples(single):
    const = constant_function(2.0)
    r, b = consistency_residual(single, const, 2.0**-6, 0.5, 0.1)
    assert r == 0.0 and b > 0.0
    # only the quadrature allowance remains when every derivative vanishes
    assert consistency_bound(single, const, 2.0**-6, include_allowance=False) == 0.0
    r, _ = consistency_residual(single, affine_function(0.0, 1.0), 2.0**-6, 0.5, 0.1)
    assert r <= 1e-9
    w = gaussian_bump(1.0)
    for Delta in (2.0**-4, 2.0**-8):
        r, b = consistency_residual(single, w, Delta, 0.6, -0.4)
        assert r <= b
    with pytest.raises(InvalidParameters):
        consistency_residual(single, w, 0.5, 0.1, 0.0)
