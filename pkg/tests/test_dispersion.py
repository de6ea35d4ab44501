import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_fronts.dispersion import (c_star, dispersion, largest_negative_root, mu_roots, mu_sub, phi,
                                        speed_threshold)
from nonlocal_fronts.errors import ThresholdError
from nonlocal_fronts.kernels import KernelSpec
from nonlocal_fronts.model import ModelParams


def quadratic_root(c, const):
    """Negative root of lam^2 - c lam + const with const < 0."""
    return 0.5 * (c - math.sqrt(c * c - 4 * const))


@pytest.mark.parametrize("c", [0.5, 2.0, 4.0])
def test_small_sigma_roots_approach_local_quadratics(c):
    m = ModelParams(0.16, 1e-4)
    r = dispersion(c, 1e-4, m, KernelSpec.tophat())
    assert r.both_exist
    A, d = m.A, m.d
    assert r.lambda1 == pytest.approx(quadratic_root(c, -d - A * A), abs=1e-7)
    assert r.lambda2 == pytest.approx(quadratic_root(c, d - A * A), abs=1e-7)
    assert r.lambda1 < r.lambda2 < 0


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(["tophat", "gaussian", "laplace"]), st.floats(0.0, 6.0), st.floats(0.05, 1.5),
       st.floats(0.0, 0.22))
def test_roots_and_margins(family, c, sigma, d):
    m = ModelParams(d, sigma)
    k = getattr(KernelSpec, family)()
    for i in (1, 2):
        r = largest_negative_root(i, c, sigma, m, k)
        if r is None:
            continue
        lam, eps = r
        assert lam < 0 and eps > 0
        assert abs(phi(i, c, sigma, lam, m, k)) < 1e-10
        assert phi(i, c, sigma, lam - eps, m, k) > 0
        # the root is the largest negative one: Phi_i < 0 between it and 0
        grid = np.linspace(lam * 0.999, -1e-9, 200)
        assert np.all(phi(i, c, sigma, grid, m, k) < 1e-12)


def test_phi2_below_phi1_offset():
    m = ModelParams(0.1, 0.3)
    k = KernelSpec.gaussian()
    lam = np.linspace(-3, -0.01, 50)
    assert np.allclose(phi(2, 1.0, 0.3, lam, m, k) - phi(1, 1.0, 0.3, lam, m, k), 2 * m.d)
    with pytest.raises(ValueError):
        phi(3, 1.0, 0.3, lam, m, k)


def test_c_star_zero_for_small_sigma_and_positive_for_large():
    m = ModelParams(0.16, 0.1)
    k = KernelSpec.gaussian()
    assert c_star(0.1, m, k) == 0.0
    big = c_star(3.0, m.with_sigma(3.0), k)
    assert big > 0
    assert dispersion(big, 3.0, m, k).both_exist
    assert not dispersion(big - 1e-6, 3.0, m, k).both_exist


@pytest.mark.parametrize("family", ["tophat", "gaussian"])
def test_c_star_nondecreasing(family):
    k = getattr(KernelSpec, family)()
    m = ModelParams(0.16, 1.0)
    sig = np.linspace(0.5, 4.0, 8)
    cs = [c_star(s, m, k) for s in sig]
    assert all(b >= a - 1e-8 for a, b in zip(cs, cs[1:]))


def test_mu_roots_threshold():
    m = ModelParams(0.16, 0.2)
    thr = speed_threshold(m)
    assert thr == pytest.approx(2 * math.sqrt(1.44))
    with pytest.raises(ThresholdError) as info:
        mu_roots(thr, m)
    assert info.value.payload["mu_double"] == pytest.approx(thr / 2)
    r = mu_roots(3.0, m)
    assert r.mu1 * r.mu2 == pytest.approx(1.44) and r.mu1 + r.mu2 == pytest.approx(3.0)
    assert 0 < r.mu1 < r.mu2


@given(st.floats(2.0001, 50.0))
def test_mu_sub_roots(c):
    lo, hi = mu_sub(c), mu_sub(c, larger=True)
    for mu in (lo, hi):
        assert abs(mu * mu - c * mu + 1) < 1e-9 * max(1.0, c * c)
    assert lo <= hi


def test_mu_sub_threshold():
    with pytest.raises(ThresholdError):
        mu_sub(2.0)
