import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from nonlocal_fronts.errors import DivergentTransformError, ParameterError, ResolutionError
from nonlocal_fronts.kernels import (AccuracyWarning, GridProfile, KernelSpec, convolve, convolve_values,
                                     kernel_weights, moments, tail_radius, transform)
from oracles import brute_convolve, quad_transform

BUILTIN = ("tophat", "gaussian", "laplace")


def kern(f):
    return getattr(KernelSpec, f)()


@pytest.mark.parametrize("family", BUILTIN)
def test_unit_mass_and_moments(family):
    k = kern(family)
    lim = k.support_radius()
    mass = quad(k.pdf, -lim, lim, points=[0.0], limit=200)[0]
    assert mass == pytest.approx(1.0, abs=1e-9)
    for order in (1, 2):
        m = quad(lambda z: abs(z) ** order * k.pdf(z), -lim, lim, points=[0.0], limit=200)[0]
        assert moments(k, order) == pytest.approx(m, rel=1e-8)


@pytest.mark.parametrize("family", BUILTIN)
@pytest.mark.parametrize("mu", [-0.9, -0.3, 0.0, 0.05, 0.6])
def test_transform_matches_quadrature(family, mu):
    assert transform(kern(family), 1.0, mu) == pytest.approx(quad_transform(family, mu), rel=1e-9)


def test_transform_small_argument_series_is_continuous():
    k = KernelSpec.tophat()
    x = np.array([0.99e-4, 1.01e-4])
    vals = transform(k, 1.0, x)
    assert np.all(np.abs(vals - np.sinh(x) / x) < 1e-15)


def test_transform_overflow_and_divergence():
    assert transform(KernelSpec.gaussian(), 1.0, 100.0) == math.inf
    assert transform(KernelSpec.tophat(), 1.0, -800.0) == math.inf
    with pytest.raises(DivergentTransformError):
        transform(KernelSpec.laplace(), 0.5, -2.0)


@given(st.floats(-3.0, 3.0), st.floats(0.01, 2.0))
def test_transform_is_even_and_at_least_one(lam, sigma):
    for f in ("tophat", "gaussian"):
        k = kern(f)
        v = transform(k, sigma, lam)
        assert v >= 1.0 - 1e-15
        assert v == pytest.approx(transform(k, sigma, -lam), rel=1e-14)


@pytest.mark.parametrize("family", BUILTIN)
def test_tail_radius_meets_target(family):
    k = kern(family)
    R = tail_radius(k, 0.01, 0.8)
    assert 0.8 * k.tail_mass(R) <= 0.01 * (1 + 1e-9)
    assert 0.8 * k.tail_mass(R * (1 - 1e-6)) > 0.01 * (1 - 1e-6)
    with pytest.raises(ParameterError):
        tail_radius(k, 0.0, 0.8)


def test_tabulated_kernel_reproduces_gaussian():
    z = np.linspace(-10, 10, 4001)
    k = KernelSpec.tabulated(z, np.exp(-0.5 * z * z))
    assert moments(k, 2) == pytest.approx(1.0, rel=1e-6)
    assert transform(k, 1.0, 0.7) == pytest.approx(math.exp(0.245), rel=1e-6)
    g = KernelSpec.gaussian()
    prof = GridProfile.sample(np.tanh, -5, 5, 0.01, -1.0, 1.0)
    a = convolve(prof, k, 0.3).values
    b = convolve(prof, g, 0.3).values
    assert np.max(np.abs(a - b)) < 1e-6


def test_tabulated_kernel_checks(tmp_path):
    z = np.linspace(-1, 1, 11)
    with pytest.raises(ParameterError):
        KernelSpec.tabulated(z ** 3, np.ones(11))
    with pytest.raises(ParameterError):
        KernelSpec.tabulated(z, -np.ones(11))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        KernelSpec.tabulated(z, np.ones(11))
    assert any(issubclass(w.category, AccuracyWarning) for w in caught)
    path = tmp_path / "k.csv"
    zz = np.linspace(-8, 8, 801)
    path.write_text("z,J\n" + "\n".join(f"{a},{math.exp(-a * a / 2)}" for a in zz))
    k = KernelSpec.from_csv(path)
    assert k.family == "tabulated" and k.describe()["points"] == 801


def test_resolution_guard():
    with pytest.raises(ResolutionError):
        kernel_weights(KernelSpec.tophat(), 0.02, 0.01)
    with pytest.raises(ParameterError):
        kernel_weights(KernelSpec.tophat(), 0.0, 0.01)


def test_tophat_edge_weights_are_halved():
    w, K = kernel_weights(KernelSpec.tophat(), 0.1, 0.01)
    assert K == 10
    assert w[0] == pytest.approx(0.5 * w[1]) and w[-1] == pytest.approx(0.5 * w[-2])
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(BUILTIN), st.integers(5, 120), st.floats(0.03, 0.6),
       st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.integers(0, 2 ** 31 - 1))
def test_convolution_matches_double_sum(family, n, sigma, left, right, seed):
    h = 0.01
    vals = np.random.default_rng(seed).uniform(-1, 1, n)
    w, K = kernel_weights(kern(family), sigma, h)
    fast = convolve_values(vals, left, right, w, K)
    slow = brute_convolve(list(vals), left, right, family, sigma, h)
    assert np.max(np.abs(fast - slow)) < 1e-12


@given(st.sampled_from(BUILTIN), st.floats(-2.0, 2.0), st.floats(0.05, 1.0))
def test_constants_are_preserved(family, value, sigma):
    prof = GridProfile(0.0, 0.01, np.full(50, value), value, value)
    out = convolve(prof, kern(family), sigma)
    assert np.max(np.abs(out.values - value)) < 1e-14


@settings(deadline=None)
@given(st.sampled_from(BUILTIN), st.lists(st.floats(0, 1), min_size=3, max_size=80), st.floats(0.05, 0.5))
def test_convolution_preserves_monotonicity(family, incr, sigma):
    v = np.cumsum(incr)
    prof = GridProfile(0.0, 0.01, v, v[0], v[-1])
    out = convolve(prof, kern(family), sigma).values
    assert np.all(np.diff(out) >= -1e-12)


def test_linear_profile_fixed_in_interior():
    # symmetric weights reproduce affine functions away from the edges
    x = np.arange(400) * 0.01
    prof = GridProfile(0.0, 0.01, 2 * x + 1, 1.0, 2 * x[-1] + 1)
    out = convolve(prof, KernelSpec.gaussian(), 0.2).values
    interior = slice(150, 250)
    assert np.max(np.abs(out[interior] - prof.values[interior])) < 1e-12


def test_grid_profile_basics():
    p = GridProfile.sample(lambda x: x, 0.0, 1.0, 0.25, -5.0, 5.0)
    assert p.n == 5 and p.x_end == pytest.approx(1.0)
    assert p(-1.0) == -5.0 and p(2.0) == 5.0 and p(0.125) == pytest.approx(0.125)
    with pytest.raises(ValueError):
        p.values[0] = 3.0
    q = p.replace(left_ext=0.0)
    assert q.left_ext == 0.0 and q.right_ext == 5.0
