import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_fronts.dispersion import c_star, dispersion, speed_threshold
from nonlocal_fronts.errors import PreconditionError, ThresholdError
from nonlocal_fronts.kernels import GridProfile, KernelSpec
from nonlocal_fronts.local import exact_front_aA
from nonlocal_fronts.model import ModelParams
from nonlocal_fronts.subsuper import (build_sub, build_super, certify, choose_b, eps_target, residual_L,
                                      sign_tolerance, super_parameters, verification_grid)


def admissible_speed(model, sigma, kernel, extra=0.5):
    return max(speed_threshold(model), c_star(sigma, model, kernel)) + extra


@settings(max_examples=25, deadline=None)
@given(st.floats(0.0, 0.22), st.floats(0.05, 1.0), st.floats(0.1, 3.0))
def test_sub_branches_match_to_first_order(d, sigma, extra):
    m = ModelParams(d, sigma)
    k = KernelSpec.tophat()
    c = admissible_speed(m, sigma, k, extra)
    sub = build_sub(c, sigma, m, k)
    dv, ds = sub.matching_residuals()
    assert abs(dv) < 1e-12 and abs(ds) < 1e-12
    assert sub.alpha > 0
    # the left branch lies above the right branch everywhere, not only near xi_minus
    xi = np.linspace(-60, 60, 24001)
    left = sub.alpha * np.exp(sub.mu * xi) + d
    right = m.A * (1 - np.exp(sub.lambda1 * xi))
    assert np.all(left - right >= -1e-12)


@pytest.mark.parametrize("larger", [False, True])
def test_sub_solution_sign(larger):
    m = ModelParams(0.16, 0.2)
    k = KernelSpec.tophat()
    c = admissible_speed(m, 0.2, k)
    sub = build_sub(c, 0.2, m, k, larger_mu_root=larger)
    prof = GridProfile.sample(sub, -60, 40, 0.01, sub.d, sub.A)
    res = residual_L(prof, c, 0.2, m, k).values[1:-1]
    assert res.max() <= sign_tolerance(0.01)
    assert sub.as_dict()["mu_root"] == ("larger" if larger else "smaller")


def test_build_sub_below_threshold():
    m = ModelParams(0.16, 0.2)
    with pytest.raises(ThresholdError):
        build_sub(speed_threshold(m), 0.2, m, KernelSpec.tophat())


def test_super_parameters_closed_form():
    l2, e2, A = -0.6, 0.2, 0.8
    xi_b, mu_b = super_parameters(8.0, l2, e2, A)
    w = lambda x: A * (1 - math.exp(l2 * x) + 8.0 * math.exp((l2 - e2) * x))
    # xi_b is the minimiser of the exponential branch and mu_b its value there
    assert w(xi_b) == pytest.approx(mu_b, rel=1e-13)
    dx = 1e-5
    assert (w(xi_b + dx) - w(xi_b - dx)) / (2 * dx) == pytest.approx(0.0, abs=1e-8)


def test_super_needs_large_b():
    m = ModelParams(0.16, 0.2)
    k = KernelSpec.tophat()
    c = admissible_speed(m, 0.2, k)
    with pytest.raises(PreconditionError):
        build_super(c, 0.2, 0.5, m, k)
    b = choose_b(c, 0.2, m, k)
    sup = build_super(c, 0.2, b.b, m, k)
    assert sup.mu_b > max(m.a, 2 * (1 - m.A), m.A - eps_target(m))
    assert sup(sup.xi_b - 5) == pytest.approx(sup.mu_b)


@pytest.mark.parametrize("d,sigma", [(0.0, 0.1), (0.1, 0.5), (0.16, 0.2)])
def test_certificate(d, sigma):
    m = ModelParams(d, sigma)
    k = KernelSpec.tophat()
    cert = certify(admissible_speed(m, sigma, k), sigma, m, k)
    assert cert.sub_ok and cert.super_ok and cert.ordered and cert.passed
    out = cert.as_dict()
    assert out["passed"] and out["tol_q"] == sign_tolerance(0.01)


def test_verification_grid_reaches_limits():
    m = ModelParams(0.16, 0.1)
    k = KernelSpec.tophat()
    c = admissible_speed(m, 0.1, k)
    cert = certify(c, 0.1, m, k)
    xmin, xmax, h = verification_grid(cert.sub, cert.sup)
    assert abs(cert.sub(xmin) - m.d) < 1e-14
    assert abs(cert.sup(xmax) - m.A) < 1e-12


def test_residual_of_exact_local_front_is_second_order():
    m = ModelParams(0.16, 0.0)
    f = exact_front_aA(m)
    errs = []
    for h in (0.02, 0.01):
        prof = GridProfile.sample(f, -30, 30, h, m.a, m.A)
        errs.append(np.max(np.abs(residual_L(prof, f.c, 0.0, m, None).values)))
    assert errs[0] < 1e-4 and 3.5 < errs[0] / errs[1] < 4.5


def test_residual_needs_points():
    with pytest.raises(PreconditionError):
        residual_L(GridProfile(0.0, 0.1, np.zeros(3), 0.0, 0.0), 1.0, 0.0, ModelParams(0.1, 0.0), None)
