"""Finite-domain cutoff problem and its homotopy continuation.

On ``(-L, L)`` we solve

    w'' - c w' + tau g_eps(w) [w^2 (1 - J_sigma * w~) - d w] = 0,
    w(-L) = 0,  w(L) = A,  w(0) = d0,

for ``(c, w)``, where ``w~`` extends ``w`` by 0 on the left and A on the
right. At ``tau = 0`` the solution is explicit; continuation in ``tau`` up to
1, then ``eps -> 0`` and ``L -> inf`` along a ladder, yields a semi-wavefront.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import ContinuationError, ParameterError, ResolutionError
from .kernels import GridProfile, KernelSpec, convolve_values, kernel_weights, moments, tail_radius
from .model import ModelParams, validate
from .monotone import Check, FrontSolution, classify_limits

NEWTON_TOL = 1e-10
TAU_STEP_FLOOR = 1e-4


def rounding_floor(h: float, A: float) -> float:
    """Smallest residual the second difference can certify in double precision."""
    return 16.0 * np.finfo(float).eps * max(A, 1.0) / (h * h)


# ---------------------------------------------------------------------------
# cutoff


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t))


def _smoothstep_prime(t):
    inside = (t > 0.0) & (t < 1.0)
    t = np.clip(t, 0.0, 1.0)
    return np.where(inside, 30.0 * t * t * (1.0 - t) ** 2, 0.0)


@dataclass(frozen=True)
class CutoffSpec:
    """C^2 bump: zero outside ``(eps, A - eps)``, one on ``[3 eps, A - 3 eps]``.

    The two ramps are quintic smoothsteps of width ``2 eps``.
    """

    eps: float
    A: float
    ramp: str = "quintic smoothstep on [eps, 3eps] and [A-3eps, A-eps]"

    def __post_init__(self):
        if not 0.0 < self.eps < self.A / 6.0:
            raise ParameterError(f"cutoff eps={self.eps!r} must lie in (0, A/6)=(0, {self.A / 6.0!r})")

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        e = self.eps
        return _smoothstep((s - e) / (2 * e)) * _smoothstep((self.A - e - s) / (2 * e))

    def derivative(self, s):
        s = np.asarray(s, dtype=float)
        e = self.eps
        up, dn = (s - e) / (2 * e), (self.A - e - s) / (2 * e)
        return (_smoothstep_prime(up) * _smoothstep(dn) - _smoothstep(up) * _smoothstep_prime(dn)) / (2 * e)


def g_eps(s, cutoff: CutoffSpec):
    out = cutoff(s)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# problem


@dataclass(frozen=True)
class BvpProblem:
    """Discretised cutoff problem on ``[-L, L]`` with spacing ``h``.

    ``kernel=None`` with ``sigma=0`` gives the local problem; ``cutoff=None``
    means ``g = 1``.
    """

    L: float
    h: float
    model: ModelParams
    kernel: KernelSpec | None
    sigma: float
    cutoff: CutoffSpec | None
    tau: float = 1.0
    newton_tol: float = NEWTON_TOL
    enforce_domain: bool = True

    def __post_init__(self):
        d0 = self.model.d0
        if d0 is None or not 0.0 < d0 < self.model.A:
            raise ParameterError("d0 must be set, with 0 < d0 < A")
        m = self.L / self.h
        if abs(m - round(m)) > 1e-9 * max(1.0, m):
            raise ResolutionError(f"L={self.L} must be a multiple of h={self.h}")
        if self.enforce_domain and self.L < self.L0:
            raise ParameterError(f"L={self.L} below the domain threshold L0={self.L0}")
        if not self.h < 0.1 / math.sqrt(self.model.A):
            raise ResolutionError(f"h={self.h} does not resolve boundary layers; need h < {0.1 / math.sqrt(self.model.A)}")
        if self.nonlocal_ and not self.h < 0.5 * self.sigma:
            raise ResolutionError(f"h={self.h} does not resolve sigma={self.sigma}; need h < {0.5 * self.sigma}")
        if not 0.0 <= self.tau <= 1.0:
            raise ParameterError("tau must lie in [0, 1]")

    @property
    def nonlocal_(self) -> bool:
        return self.kernel is not None and self.sigma > 0

    @property
    def L0(self) -> float:
        A = self.model.A
        return (math.log(A) - math.log(self.model.d0)) / math.sqrt(A)

    @property
    def n(self) -> int:
        return int(round(2 * self.L / self.h)) + 1

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.n)

    @property
    def i0(self) -> int:
        return int(round(self.L / self.h))

    def with_(self, **kw) -> "BvpProblem":
        args = dict(L=self.L, h=self.h, model=self.model, kernel=self.kernel, sigma=self.sigma,
                    cutoff=self.cutoff, tau=self.tau, newton_tol=self.newton_tol,
                    enforce_domain=self.enforce_domain)
        args.update(kw)
        return BvpProblem(**args)


@dataclass
class _Operators:
    """Sparse pieces that depend only on the grid."""

    D2: sp.csr_matrix
    D1: sp.csr_matrix
    W: sp.csr_matrix | None
    ext: np.ndarray           # contribution A * (mass beyond the right edge)
    weights: np.ndarray | None
    K: int


_OPS_CACHE: dict = {}


def _operators(problem: BvpProblem) -> _Operators:
    key = (problem.n, problem.h, problem.sigma, None if problem.kernel is None else id(problem.kernel),
           problem.model.A)
    hit = _OPS_CACHE.get(key)
    if hit is not None and hit[0] is problem.kernel:
        return hit[1]
    n, h = problem.n, problem.h
    ones = np.ones(n)
    D2 = sp.diags([ones[:-1], -2 * ones, ones[:-1]], [-1, 0, 1], format="csr") / (h * h)
    D1 = sp.diags([-ones[:-1], ones[:-1]], [-1, 1], format="csr") / (2 * h)
    if problem.nonlocal_:
        w, K = kernel_weights(problem.kernel, problem.sigma, h)
        offs = np.arange(-K, K + 1)
        # (W v)_i = sum_k w[k+K] v_{i-k}: column j = i - k sits at offset -k
        diags = [np.full(n - abs(o), w[K - o]) for o in offs]
        W = sp.diags(diags, offs, shape=(n, n), format="csr")
        ext = convolve_values(np.zeros(n), 0.0, problem.model.A, w, K)
    else:
        W, ext, w, K = None, np.zeros(n), None, 0
    ops = _Operators(D2, D1, W, ext, w, K)
    _OPS_CACHE.clear()
    _OPS_CACHE[key] = (problem.kernel, ops)
    return ops


def _conv(ops: _Operators, w: np.ndarray) -> np.ndarray:
    if ops.W is None:
        return w
    return ops.W @ w + ops.ext


def assemble_system(omega, c: float, problem: BvpProblem) -> tuple[np.ndarray, float]:
    """Residual of the discretised equation (interior and Dirichlet rows) and of the phase condition."""
    w = np.asarray(omega.values if isinstance(omega, GridProfile) else omega, dtype=float)
    if w.size != problem.n:
        raise ParameterError(f"profile has {w.size} points, problem needs {problem.n}")
    ops = _operators(problem)
    m = problem.model
    Jw = _conv(ops, w)
    N = w * w * (1.0 - Jw) - m.d * w
    g = problem.cutoff(w) if problem.cutoff is not None else 1.0
    R = ops.D2 @ w - c * (ops.D1 @ w) + problem.tau * g * N
    R[0] = w[0]
    R[-1] = w[-1] - m.A
    return R, float(w[problem.i0] - m.d0)


def _jacobian(w: np.ndarray, c: float, problem: BvpProblem) -> sp.csc_matrix:
    ops = _operators(problem)
    m = problem.model
    n = problem.n
    Jw = _conv(ops, w)
    N = w * w * (1.0 - Jw) - m.d * w
    dN_self = 2.0 * w * (1.0 - Jw) - m.d
    if problem.cutoff is not None:
        g, dg = problem.cutoff(w), problem.cutoff.derivative(w)
    else:
        g, dg = np.ones(n), np.zeros(n)
    tau = problem.tau
    diag = tau * (dg * N + g * dN_self)
    J = ops.D2 - c * ops.D1 + sp.diags(diag)
    if ops.W is not None:
        J = J + sp.diags(-tau * g * w * w) @ ops.W
    else:
        J = J + sp.diags(-tau * g * w * w)
    interior = np.ones(n)
    interior[0] = interior[-1] = 0.0
    J = sp.diags(interior) @ J + sp.diags(1.0 - interior)
    dc = -(ops.D1 @ w)
    dc[0] = dc[-1] = 0.0
    phase = sp.csr_matrix(([1.0], ([0], [problem.i0])), shape=(1, n))
    big = sp.bmat([[J.tocsr(), sp.csr_matrix(dc.reshape(-1, 1))],
                   [phase, sp.csr_matrix(np.zeros((1, 1)))]], format="csc")
    return big


@dataclass
class NewtonResult:
    w: np.ndarray
    c: float
    residual: float
    iterations: int
    converged: bool


def newton(w0: np.ndarray, c0: float, problem: BvpProblem, max_iter: int = 30) -> NewtonResult:
    """Damped Newton on the bordered system (profile plus speed)."""
    w, c = np.array(w0, dtype=float), float(c0)
    tol = max(problem.newton_tol, rounding_floor(problem.h, problem.model.A))

    def norm(w_, c_):
        R, p = assemble_system(w_, c_, problem)
        return max(float(np.max(np.abs(R))), abs(p)), R, p

    r, R, p = norm(w, c)
    for it in range(1, max_iter + 1):
        if r < tol:
            return NewtonResult(w, float(c), r, it - 1, True)
        try:
            lu = splu(_jacobian(w, c, problem))
            step = lu.solve(-np.concatenate([R, [p]]))
        except RuntimeError:
            return NewtonResult(w, float(c), r, it, False)
        if not np.all(np.isfinite(step)):
            return NewtonResult(w, float(c), r, it, False)
        lam = 1.0
        while lam >= 1.0 / 64:
            wn, cn = w + lam * step[:-1], c + lam * step[-1]
            rn, Rn, pn = norm(wn, cn)
            if rn < r or rn < tol:
                break
            lam *= 0.5
        else:
            return NewtonResult(w, float(c), r, it, False)
        w, c, r, R, p = wn, cn, rn, Rn, pn
    return NewtonResult(w, float(c), r, max_iter, r < tol)


# ---------------------------------------------------------------------------
# the linear problem at tau = 0


def tau0_solution(c: float, problem: BvpProblem) -> GridProfile:
    """Closed-form solution of ``w'' - c w' = 0``, ``w(-L) = 0``, ``w(L) = A``."""
    t, L, A = problem.x, problem.L, problem.model.A
    if abs(c) * L < 1e-12:
        # first-order expansion; the exponential forms lose all digits for tiny c
        vals = A * (t / (2 * L) + 0.5) * (1.0 + 0.5 * c * (t - L))
    elif c > 0:
        # divide through by e^{cL}; no positive exponent remains
        vals = A * np.exp(c * (t - L)) * (-np.expm1(-c * (t + L))) / (-math.expm1(-2 * c * L))
    else:
        vals = A * np.expm1(c * (t + L)) / math.expm1(2 * c * L)
    vals[0], vals[-1] = 0.0, A
    return GridProfile(-L, problem.h, vals, 0.0, A)


def tau0_center_value(c: float, L: float, A: float) -> float:
    """``w_0^c(0)``; decreasing in ``c``."""
    if c == 0.0:
        return 0.5 * A
    x = c * L
    if x > 0:
        return A * math.exp(-x) / (1.0 + math.exp(-x))
    return A / (1.0 + math.exp(x))


def find_c0(problem: BvpProblem, tol: float = 1e-15) -> float:
    """Unique speed whose linear solution passes through ``d0`` at the origin (bisection)."""
    A, L, d0 = problem.model.A, problem.L, problem.model.d0

    def g(c):
        return tau0_center_value(c, L, A) - d0

    lo, hi = -1.0, 1.0
    while g(lo) < 0:
        lo *= 2.0
    while g(hi) > 0:
        hi *= 2.0
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol * max(1.0, abs(mid)):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# continuation


@dataclass(frozen=True)
class BvpSolution:
    c: float
    profile: GridProfile
    newton_residual: float
    bound_report: tuple[Check, ...]
    tau: float = 1.0
    trace: tuple = ()

    @property
    def bounds_pass(self) -> bool:
        return all(ch.passed for ch in self.bound_report)


def _acceptable(w: np.ndarray, problem: BvpProblem) -> bool:
    A = problem.model.A
    if w.min() < -1e-12 or w.max() > A + 1e-12:
        return False
    left = w[: problem.i0 + 1]
    return bool(np.all(np.diff(left) >= -1e-12))


def homotopy_solve(problem: BvpProblem, *, tau_target: float = 1.0, dtau0: float = 0.1,
                   dtau_max: float = 0.25) -> BvpSolution:
    """Follow ``tau`` from 0 to ``tau_target`` starting at the explicit linear solution.

    Each step uses a secant predictor and damped Newton. A step is accepted
    only if Newton converges and the profile stays in ``[0, A]`` and is
    nondecreasing on ``[-L, 0]``; otherwise the step is halved, down to
    ``TAU_STEP_FLOOR``.
    """
    c0 = find_c0(problem)
    start = tau0_solution(c0, problem)
    w, c, tau = start.values.copy(), c0, 0.0
    prev: tuple[np.ndarray, float, float] | None = None
    trace = [(0.0, float(c0), 0.0)]
    dtau = dtau0
    while tau < tau_target:
        step = min(dtau, tau_target - tau)
        if prev is not None:
            pw, pc, ptau = prev
            s = step / (tau - ptau)
            wg, cg = w + s * (w - pw), c + s * (c - pc)
        else:
            wg, cg = w, c
        sub = problem.with_(tau=tau + step)
        res = newton(wg, cg, sub)
        if res.converged and _acceptable(res.w, sub):
            prev = (w, c, tau)
            w, c, tau = res.w, float(res.c), tau + step
            trace.append((float(tau), float(c), float(res.residual)))
            dtau = min(dtau_max, 1.5 * step)
            continue
        dtau = 0.5 * step
        if dtau < TAU_STEP_FLOOR:
            raise ContinuationError(f"tau step fell below {TAU_STEP_FLOOR} at tau={tau}",
                                    last_tau=tau, c=c, trace=trace)
    final = problem.with_(tau=tau)
    R, p = assemble_system(w, c, final)
    prof = GridProfile(-problem.L, problem.h, w, 0.0, problem.model.A)
    sol = BvpSolution(c, prof, max(float(np.max(np.abs(R))), abs(p)), (), tau, tuple(trace))
    return BvpSolution(sol.c, sol.profile, sol.newton_residual, verify_bounds(sol, final), tau, sol.trace)


def solve_from(w0: np.ndarray, c0: float, problem: BvpProblem) -> BvpSolution | None:
    """Newton at the problem's ``tau`` from a warm start; ``None`` if rejected."""
    res = newton(w0, c0, problem)
    if not (res.converged and _acceptable(res.w, problem)):
        return None
    prof = GridProfile(-problem.L, problem.h, res.w, 0.0, problem.model.A)
    sol = BvpSolution(res.c, prof, res.residual, (), problem.tau, ())
    return BvpSolution(res.c, prof, res.residual, verify_bounds(sol, problem), problem.tau, ())


# ---------------------------------------------------------------------------
# a priori bounds


def eps0(model: ModelParams) -> float:
    return (1.0 - 4.0 * model.d) / 36.0


def speed_bounds(model: ModelParams, kernel: KernelSpec | None, sigma: float) -> tuple[float, float, float]:
    """``(c_min, c_max, R0)`` of the a priori speed estimate."""
    A = model.A
    c_max = 2.0 * math.sqrt(A)
    if kernel is None or sigma == 0:
        return 0.0, c_max, 0.0
    R0 = tail_radius(kernel, eps0(model), A)
    return -(2.0 / eps0(model)) * A * A * R0 * sigma, c_max, R0


def derivative_norms(profile: GridProfile) -> tuple[float, float, float]:
    w, h = profile.values, profile.h
    d1 = np.max(np.abs(np.diff(w))) / h
    d2 = np.max(np.abs(w[2:] - 2 * w[1:-1] + w[:-2])) / (h * h) if w.size > 2 else 0.0
    return float(np.max(np.abs(w))), float(d1), float(d2)


def verify_bounds(solution: BvpSolution, problem: BvpProblem) -> tuple[Check, ...]:
    """Check speed bounds, range, derivative sizes, monotonicity and the side conditions."""
    m = problem.model
    A = m.A
    w = solution.profile.values
    c = solution.c
    c_min, c_max, R0 = speed_bounds(m, problem.kernel, problem.sigma)
    n0, n1, n2 = derivative_norms(solution.profile)
    # |w''| <= |c| |w'| + sup|nonlinearity|, the nonlinearity being bounded by A^2 on [0, A]
    c2_bound = abs(c) * n1 + A * A
    left = w[: problem.i0 + 1]
    # boundary rows are Newton rows, so they hold to the Newton tolerance
    tol = max(problem.newton_tol, rounding_floor(problem.h, A))
    checks = [
        Check("c_le_c_max", c <= c_max, c, c_max),
        Check("c_ge_c_min", (c >= c_min) if problem.tau == 1.0 else True, c, c_min if problem.tau == 1.0 else None),
        Check("range_0_A", bool(w.min() >= -1e-12 and w.max() <= A + 1e-12), float(w.min()), 0.0),
        Check("c2_bounded", bool(np.isfinite(n2) and n2 <= c2_bound * (1 + 1e-6) + 1e-8), n2, c2_bound),
        Check("monotone_left_half", bool(np.all(np.diff(left) >= -1e-12)), float(np.min(np.diff(left))), 0.0),
        Check("phase", abs(w[problem.i0] - m.d0) < 1e-10, float(w[problem.i0] - m.d0), 1e-10),
        Check("dirichlet", max(abs(w[0]), abs(w[-1] - A)) <= tol, float(max(abs(w[0]), abs(w[-1] - A))), tol),
    ]
    return tuple(checks)


# ---------------------------------------------------------------------------
# eps -> 0 and L -> infinity


@dataclass(frozen=True)
class Schedule:
    """Cutoff and half-length ladders.

    Visited as a staircase: every ``eps`` at the first ``L``, then the
    remaining ``L`` at the last ``eps``.
    """

    eps: tuple[float, ...] = (1e-2, 1e-3, 1e-4)
    L: tuple[float, ...] = (20.0, 40.0, 80.0)

    def points(self) -> list[tuple[float, float]]:
        pts = [(e, self.L[0]) for e in self.eps]
        pts += [(self.eps[-1], L) for L in self.L[1:]]
        return pts


def _transfer(prof: GridProfile, problem: BvpProblem) -> np.ndarray:
    w = np.interp(problem.x, prof.x, prof.values, left=0.0, right=problem.model.A)
    w[0], w[-1] = 0.0, problem.model.A
    return w


def default_h(sigma: float) -> float:
    """``1/N`` just below ``min(0.01, sigma/4)``, so every integer ``L`` is a whole number of cells."""
    target = min(0.01, sigma / 4.0) if sigma > 0 else 0.01
    return 1.0 / math.ceil(1.0 / target - 1e-9)


def extract_semiwavefront(model: ModelParams, kernel: KernelSpec | None, sigma: float,
                          schedule: Schedule = Schedule(), h: float | None = None,
                          tol_class: float = 1e-4, dc_tol: float = 1e-5,
                          dprofile_tol: float = 1e-4) -> FrontSolution:
    """Solve along the schedule with warm starts and test stabilisation of ``(c, w)``."""
    rep = validate(model, "zero_to_A")
    if not rep.passed and sigma > 0:
        if not (model.allow_outside and rep.violated == "0<=d<2/9"):
            raise ParameterError(f"zero_to_A hypotheses violated: {rep.violated}")
    h = default_h(sigma) if h is None else h
    prev: BvpSolution | None = None
    prev_prob: BvpProblem | None = None
    ladder = []
    for eps, L in schedule.points():
        prob = BvpProblem(L, h, model, kernel, sigma, CutoffSpec(eps, model.A))
        sol = None
        if prev is not None:
            sol = solve_from(_transfer(prev.profile, prob), prev.c, prob)
            if sol is None and prev_prob is not None and prev_prob.L == L:
                sol = _eps_continuation(prev, prev_prob, prob)
        if sol is None:
            sol = homotopy_solve(prob)
        ladder.append({"eps": eps, "L": L, "c": sol.c, "newton_residual": sol.newton_residual,
                       "bounds_pass": sol.bounds_pass})
        if prev is not None:
            half = 0.5 * min(prev_prob.L, L)
            xs = prob.x[np.abs(prob.x) <= half]
            dprof = float(np.max(np.abs(sol.profile(xs) - prev.profile(xs))))
            ladder[-1].update(dc=abs(sol.c - prev.c), dprofile=dprof)
        prev, prev_prob = sol, prob

    last = ladder[-1]
    stabilized = len(ladder) >= 2 and last["dc"] < dc_tol and last["dprofile"] < dprofile_tol
    left, right = classify_limits(prev.profile, model, tol_class)
    m2 = moments(kernel, 2) if kernel is not None else 0.0
    gate = math.sqrt(m2) * sigma * model.A ** 2
    report = list(prev.bound_report) + [
        Check("stabilized", stabilized, last.get("dc"), dc_tol),
        Check("left_limit_0", left == "0", float(np.mean(prev.profile.values[: max(2, prev.profile.n // 10)])), tol_class),
    ]
    if abs(prev.c) > gate:
        report.append(Check("limit_gate_classified", right != "unresolved", abs(prev.c), gate))
    info = {"mode": "zero_to_A", "sigma": sigma, "h": h, "ladder": ladder,
            "limit_gate": gate, "speed_bounds": list(speed_bounds(model, kernel, sigma)[:2]),
            "eps0": eps0(model), "theoretical_guarantee": model.guaranteed}
    return FrontSolution(prev.c, prev.profile, prev.newton_residual, left, right, len(ladder),
                         tuple(report), stabilized, info)


def _eps_continuation(prev: BvpSolution, prev_prob: BvpProblem, prob: BvpProblem,
                      substeps: int = 8) -> BvpSolution | None:
    """Geometric steps in ``eps`` between two cutoffs on the same grid."""
    e0, e1 = prev_prob.cutoff.eps, prob.cutoff.eps
    w, c = prev.profile.values, prev.c
    sol = None
    for k in range(1, substeps + 1):
        e = e0 * (e1 / e0) ** (k / substeps)
        sol = solve_from(w, c, prob.with_(cutoff=CutoffSpec(e, prob.model.A)))
        if sol is None:
            return None
        w, c = sol.profile.values, sol.c
    return sol


# ---------------------------------------------------------------------------
# barrier


def barrier_check(solution: FrontSolution, model: ModelParams, kernel: KernelSpec, sigma: float,
                  max_sweeps: int = 200_000, tol: float = 1e-12) -> dict:
    """Compare the front with the minimal solution of a shifted local problem.

    ``C0 = A^2 |w'|_inf m1``; ``alpha < gamma < beta`` are the roots of
    ``f(s) = C0 sigma`` with ``f(s) = s^2 (1 - s) - d s``. The local problem
    ``psi'' - c psi' + f(psi) - C0 sigma = 0``, ``psi(-L) = alpha``,
    ``psi(L) = beta`` is solved by monotone iteration from ``psi = alpha``.
    """
    A, d = model.A, model.d
    prof = solution.profile
    _, n1, _ = derivative_norms(prof)
    m1 = moments(kernel, 1)
    C0 = A * A * n1 * m1
    shift = C0 * sigma
    roots = np.roots([-1.0, 1.0, -d, -shift])
    real = np.sort(roots[np.abs(roots.imag) < 1e-10].real)
    out = {"C0": C0, "C0_sigma": shift, "roots": [float(r) for r in real]}
    if real.size < 3:
        out.update(barrier=False, passed=False, reason="fewer than three real roots")
        return out
    alpha, gamma, beta = (float(r) for r in real)
    ordering = alpha < 0.0 < model.a < gamma < beta < A
    n, h, c = prof.n, prof.h, solution.c

    def f(s):
        return s * s * (1.0 - s) - d * s

    fprime_max = max(abs(2 * s - 3 * s * s - d) for s in np.linspace(alpha, beta, 2001))
    Kc = fprime_max + 1e-3
    ones = np.ones(n - 2)
    main = -2.0 / h ** 2 - Kc
    lower = 1.0 / h ** 2 + c / (2 * h)
    upper = 1.0 / h ** 2 - c / (2 * h)
    M = sp.diags([lower * ones[1:], main * ones, upper * ones[:-1]], [-1, 0, 1], format="csc")
    lu = splu(M)
    psi = np.full(n, alpha)
    psi[-1] = beta
    rhs_bc = np.zeros(n - 2)
    rhs_bc[0] -= lower * alpha
    rhs_bc[-1] -= upper * beta
    change = math.inf
    sweeps = 0
    while sweeps < max_sweeps and change > tol:
        inner = psi[1:-1]
        new = lu.solve(-(f(inner) - shift + Kc * inner) + rhs_bc)
        change = float(np.max(np.abs(new - inner)))
        psi[1:-1] = new
        sweeps += 1
    resid = ((psi[2:] - 2 * psi[1:-1] + psi[:-2]) / h ** 2 - c * (psi[2:] - psi[:-2]) / (2 * h)
             + f(psi[1:-1]) - shift)
    gap = float(np.min(prof.values - psi))
    out.update(barrier=True, alpha=alpha, gamma=gamma, beta=beta, ordering=bool(ordering),
               sweeps=sweeps, psi_change=change, psi_residual=float(np.max(np.abs(resid))),
               min_gap=gap, psi_below=bool(gap >= -1e-10),
               passed=bool(ordering and gap >= -1e-10))
    out["psi"] = psi
    return out
