import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_fronts.bvp import (BvpProblem, CutoffSpec, Schedule, _jacobian, assemble_system, default_h,
                                 eps0, find_c0, g_eps, homotopy_solve, rounding_floor, speed_bounds,
                                 tau0_center_value, tau0_solution, verify_bounds)
from nonlocal_fronts.errors import ParameterError, ResolutionError
from nonlocal_fronts.kernels import KernelSpec
from nonlocal_fronts.model import ModelParams

M = ModelParams(0.16, 0.1, 0.1)
K = KernelSpec.tophat()


def problem(L=10.0, h=0.02, tau=1.0, eps=1e-2, **kw):
    return BvpProblem(L, h, M, K, 0.1, CutoffSpec(eps, M.A), tau=tau, **kw)


@settings(max_examples=50)
@given(st.floats(1e-4, 0.13), st.floats(-0.5, 1.5))
def test_cutoff_shape(eps, s):
    cut = CutoffSpec(eps, 0.8)
    v = g_eps(s, cut)
    assert 0.0 <= v <= 1.0
    if s <= eps or s >= 0.8 - eps:
        assert v == 0.0
    if 3 * eps <= s <= 0.8 - 3 * eps:
        assert v == 1.0


def test_cutoff_derivative_and_bounds():
    cut = CutoffSpec(0.01, 0.8)
    s = np.linspace(0.0, 0.8, 4001)
    ds = 1e-7
    fd = (cut(s + ds) - cut(s - ds)) / (2 * ds)
    assert np.max(np.abs(fd - cut.derivative(s))) < 1e-4
    for bad in (0.0, 0.8 / 6):
        with pytest.raises(ParameterError):
            CutoffSpec(bad, 0.8)


def test_problem_validation():
    with pytest.raises(ResolutionError):
        BvpProblem(10.0, 0.03, M, K, 0.1, None)
    with pytest.raises(ResolutionError):
        BvpProblem(10.005, 0.01, M, K, 0.1, None)
    with pytest.raises(ParameterError):
        BvpProblem(1.0, 0.01, M, K, 0.1, None)
    with pytest.raises(ParameterError):
        BvpProblem(10.0, 0.01, ModelParams(0.16, 0.1, None), K, 0.1, None)
    p = problem()
    assert p.n == 1001 and p.x[p.i0] == pytest.approx(0.0) and p.L0 == pytest.approx(math.log(8) / math.sqrt(0.8))


@given(st.floats(-3.0, 3.0))
def test_tau0_solution_is_exact(c):
    p = problem(tau=0.0)
    w = tau0_solution(c, p)
    t = p.x
    if abs(c) < 1e-12:
        ref = M.A * (t + p.L) / (2 * p.L)
    else:
        ref = M.A * np.expm1(c * (t + p.L)) / np.expm1(2 * c * p.L)
    assert np.max(np.abs(w.values - ref)) < 1e-12
    assert w(0.0) == pytest.approx(tau0_center_value(c, p.L, M.A), abs=1e-12)


def test_find_c0_matches_closed_form():
    for L in (10.0, 20.0, 40.0):
        p = problem(L=L, tau=0.0)
        assert find_c0(p) == pytest.approx(math.log(M.A / M.d0 - 1) / L, abs=1e-12)


def test_jacobian_matches_finite_differences():
    p = problem(L=4.0, h=0.02, tau=0.7)
    rng = np.random.default_rng(3)
    w = np.clip(tau0_solution(0.3, p).values + 0.01 * rng.standard_normal(p.n), 0, M.A)
    w[0], w[-1] = 0.0, M.A
    c = 0.3
    J = _jacobian(w, c, p).toarray()

    def G(z):
        R, ph = assemble_system(z[:-1], z[-1], p)
        return np.concatenate([R, [ph]])

    z = np.concatenate([w, [c]])
    delta = 1e-7
    cols = rng.choice(p.n + 1, 25, replace=False)
    for j in cols:
        e = np.zeros_like(z)
        e[j] = delta
        fd = (G(z + e) - G(z - e)) / (2 * delta)
        assert np.max(np.abs(fd - J[:, j])) < 1e-5 * max(1.0, np.max(np.abs(J[:, j])))


@pytest.fixture(scope="module")
def short_solution():
    p = BvpProblem(20.0, 0.02, M, K, 0.1, CutoffSpec(1e-2, M.A))
    return p, homotopy_solve(p)


def test_homotopy_reaches_tau_one(short_solution):
    p, s = short_solution
    assert s.tau == 1.0 and s.bounds_pass
    assert s.newton_residual <= max(p.newton_tol, rounding_floor(p.h, M.A))
    assert s.trace[0][0] == 0.0 and s.trace[-1][0] == 1.0
    taus = [t for t, _, _ in s.trace]
    assert all(b > a for a, b in zip(taus, taus[1:]))
    assert s.profile(0.0) == pytest.approx(M.d0, abs=1e-10)


def test_verify_bounds_detects_violations(short_solution):
    p, s = short_solution
    bad = s.profile.replace(values=np.where(s.profile.x < -5, 0.02, s.profile.values))
    report = {c.name: c.passed for c in verify_bounds(type(s)(s.c, bad, 0.0, ()), p)}
    assert not report["monotone_left_half"]
    report = {c.name: c.passed for c in verify_bounds(type(s)(10.0, s.profile, 0.0, ()), p)}
    assert not report["c_le_c_max"]


def test_speed_bounds_and_defaults():
    c_min, c_max, R0 = speed_bounds(M, K, 0.1)
    assert c_max == pytest.approx(2 * math.sqrt(0.8))
    assert eps0(M) == pytest.approx(0.01)
    assert R0 == pytest.approx(1 - 0.01 / 0.8)
    assert c_min == pytest.approx(-(2 / 0.01) * 0.64 * R0 * 0.1)
    assert default_h(0.1) == 0.01 and default_h(0.01) == 0.0025


def test_schedule_staircase():
    pts = Schedule((1e-2, 1e-3), (20.0, 40.0, 80.0)).points()
    assert pts == [(1e-2, 20.0), (1e-3, 20.0), (1e-3, 40.0), (1e-3, 80.0)]
