"""Explicit sub- and super-solutions of the a -> A wave problem.

``L[w] = w'' - c w' + w^2 (1 - J_sigma * w) - d w``. A sub-solution has
``L <= 0`` and a super-solution ``L >= 0``. Both constructions rest on the
largest negative characteristic roots (see :mod:`dispersion`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import DispersionResult, dispersion, mu_sub, speed_threshold
from .errors import ConstructionError, PreconditionError, ThresholdError
from .kernels import GridProfile, KernelSpec, convolve
from .model import ModelParams

#: Constant in the sign-check tolerance ``tol_q = C_Q (h^2 + TRUNCATION_MASS)``.
C_Q = 1.0
TRUNCATION_MASS = 1e-10
B_MAX = 2.0 ** 60


def sign_tolerance(h: float) -> float:
    return C_Q * (h * h + TRUNCATION_MASS)


@dataclass(frozen=True)
class SubSolution:
    """``alpha e^{mu xi} + d`` left of ``xi_minus``, ``A (1 - e^{lambda1 xi})`` right of it."""

    alpha: float
    xi_minus: float
    mu: float
    lambda1: float
    A: float
    d: float
    larger_mu_root: bool = False

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        left = self.alpha * np.exp(np.minimum(self.mu * xi, 700.0)) + self.d
        right = self.A * -np.expm1(self.lambda1 * np.maximum(xi, self.xi_minus))
        return np.where(xi <= self.xi_minus, left, right)

    def matching_residuals(self) -> tuple[float, float]:
        """Value and slope mismatch of the two branches at ``xi_minus``."""
        x = self.xi_minus
        e_mu = self.alpha * math.exp(self.mu * x)
        e_l = math.exp(self.lambda1 * x)
        return e_mu + self.d - self.A * (1.0 - e_l), self.mu * e_mu + self.lambda1 * self.A * e_l

    def as_dict(self) -> dict:
        return {"alpha": self.alpha, "xi_minus": self.xi_minus, "mu": self.mu,
                "lambda1": self.lambda1, "mu_root": "larger" if self.larger_mu_root else "smaller"}


@dataclass(frozen=True)
class SuperSolution:
    """Constant ``mu_b`` left of ``xi_b``, ``A (1 - e^{l2 xi} + b e^{(l2 - e2) xi})`` right of it."""

    b: float
    lambda2: float
    eps2: float
    xi_b: float
    mu_b: float
    A: float

    def __call__(self, xi):
        xi = np.maximum(np.asarray(xi, dtype=float), self.xi_b)
        l2, e2 = self.lambda2, self.eps2
        return self.A * (-np.expm1(l2 * xi) + np.exp((l2 - e2) * xi + math.log(self.b)))

    def as_dict(self) -> dict:
        return {"b": self.b, "lambda2": self.lambda2, "eps2": self.eps2,
                "xi_b": self.xi_b, "mu_b": self.mu_b}


def _require_speed(c: float, model: ModelParams):
    thr = speed_threshold(model)
    if not c > thr:
        raise ThresholdError(f"c={c!r} must exceed 2*sqrt(2A-d)={thr!r}", threshold=thr)


def build_sub(c: float, sigma: float, model: ModelParams, kernel: KernelSpec, *,
              larger_mu_root: bool = False, disp: DispersionResult | None = None) -> SubSolution:
    """Solve the C^1 matching system at ``xi_minus`` in closed form."""
    _require_speed(c, model)
    disp = disp or dispersion(c, sigma, model, kernel)
    if disp.lambda1 is None:
        raise ThresholdError(f"Phi_1 has no negative root at c={c!r}, sigma={sigma!r}")
    l1 = disp.lambda1
    mu = mu_sub(c, larger=larger_mu_root)
    A, d = model.A, model.d
    xi_m = math.log((A - d) * mu / (A * (mu - l1))) / l1
    alpha = -(l1 / mu) * A * math.exp((l1 - mu) * xi_m)
    return SubSolution(alpha, xi_m, mu, l1, A, d, larger_mu_root)


def super_parameters(b: float, lambda2: float, eps2: float, A: float) -> tuple[float, float]:
    """``(xi_b, mu_b)`` for a given ``b``."""
    r = b * (lambda2 - eps2) / lambda2
    xi_b = math.log(r) / eps2
    mu_b = A + eps2 * A / (lambda2 - eps2) * math.exp(lambda2 / eps2 * math.log(r))
    return xi_b, mu_b


def build_super(c: float, sigma: float, b: float, model: ModelParams, kernel: KernelSpec, *,
                disp: DispersionResult | None = None) -> SuperSolution:
    disp = disp or dispersion(c, sigma, model, kernel)
    if disp.lambda2 is None:
        raise ThresholdError(f"Phi_2 has no negative root at c={c!r}, sigma={sigma!r}")
    xi_b, mu_b = super_parameters(b, disp.lambda2, disp.eps2, model.A)
    if not xi_b > 0:
        raise PreconditionError(f"b={b!r} too small: xi_b={xi_b!r} is not positive")
    floor = max(model.a, 2.0 * (1.0 - model.A))
    if not mu_b > floor:
        raise PreconditionError(f"b={b!r} too small: mu_b={mu_b!r} <= max(a, 2(1-A))={floor!r}")
    return SuperSolution(b, disp.lambda2, disp.eps2, xi_b, mu_b, model.A)


def eps_target(model: ModelParams) -> float:
    """Half of ``min(1 - 9d/2, 3A - 2)``, the admissible gap below A for ``mu_b``."""
    return 0.5 * min(1.0 - 4.5 * model.d, 3.0 * model.A - 2.0)


def residual_L(profile: GridProfile, c: float, sigma: float, model: ModelParams,
               kernel: KernelSpec | None) -> GridProfile:
    """``L[w]`` at interior nodes by central differences; endpoint entries are zero.

    ``sigma == 0`` (or ``kernel is None``) replaces the convolution by the
    identity, giving the local operator.
    """
    if profile.n < 5:
        raise PreconditionError("residual needs at least 5 grid points")
    w = profile.values
    if sigma > 0 and kernel is not None:
        Jw = convolve(profile, kernel, sigma).values
    else:
        Jw = w
    h = profile.h
    out = np.zeros_like(w)
    wi = w[1:-1]
    d2 = (w[2:] - 2.0 * wi + w[:-2]) / (h * h)
    d1 = (w[2:] - w[:-2]) / (2.0 * h)
    out[1:-1] = d2 - c * d1 + wi * wi * (1.0 - Jw[1:-1]) - model.d * wi
    return profile.replace(values=out, left_ext=0.0, right_ext=0.0)


def verification_grid(sub: SubSolution, sup: SuperSolution, h: float = 0.01) -> tuple[float, float, float]:
    """``(xmin, xmax, h)`` wide enough for both tails to reach 1e-14 of their limits.

    The left tail of the sub-solution decays like ``e^{mu xi}`` and the
    right tail of the super-solution like ``e^{lambda2 xi}``.
    """
    xmin = -40.0 / sub.mu
    xmax = 40.0 / abs(sup.lambda2)
    xmin = h * math.floor(xmin / h)
    xmax = h * math.ceil(xmax / h)
    return xmin, xmax, h


def sample_sub(sub: SubSolution, xmin: float, xmax: float, h: float) -> GridProfile:
    return GridProfile.sample(sub, xmin, xmax, h, left_ext=sub.d, right_ext=sub.A)


def sample_super(sup: SuperSolution, xmin: float, xmax: float, h: float) -> GridProfile:
    return GridProfile.sample(sup, xmin, xmax, h, left_ext=sup.mu_b, right_ext=sup.A)


@dataclass(frozen=True)
class BChoice:
    b: float
    checks: dict


def b_predicates(b: float, c: float, sigma: float, model: ModelParams, kernel: KernelSpec,
                 disp: DispersionResult, sub: SubSolution, grid: tuple[float, float, float],
                 require_order: bool) -> dict:
    """Evaluate the acceptance predicates of a candidate ``b``."""
    xi_b, mu_b = super_parameters(b, disp.lambda2, disp.eps2, model.A)
    floor = max(model.a, 2.0 * (1.0 - model.A), model.A - eps_target(model))
    out = {"xi_b_positive": xi_b > 0, "mu_b_above_floor": mu_b > floor}
    if not all(out.values()):
        return out
    sup = SuperSolution(b, disp.lambda2, disp.eps2, xi_b, mu_b, model.A)
    xmin, xmax, h = grid
    prof = sample_super(sup, xmin, xmax, h)
    res = residual_L(prof, c, sigma, model, kernel).values[1:-1]
    out["super_sign"] = bool(res.min() >= -sign_tolerance(h))
    if require_order:
        out["ordered"] = bool(np.all(sub(prof.x) <= prof.values + 1e-14))
    return out


def choose_b(c: float, sigma: float, model: ModelParams, kernel: KernelSpec, *,
             h: float = 0.01, require_order: bool = False,
             disp: DispersionResult | None = None, sub: SubSolution | None = None) -> BChoice:
    """Double ``b`` from 1 until every predicate holds.

    With ``require_order`` the pair must also be ordered on the verification
    grid. For ``d > 0`` this forces ``xi_b`` to the right edge of the grid,
    because the sub-solution approaches A faster than the super-solution.
    """
    disp = disp or dispersion(c, sigma, model, kernel)
    if disp.lambda2 is None:
        raise ThresholdError(f"Phi_2 has no negative root at c={c!r}, sigma={sigma!r}")
    sub = sub or build_sub(c, sigma, model, kernel, disp=disp)
    probe = SuperSolution(1.0, disp.lambda2, disp.eps2, 0.0, model.A, model.A)
    grid = verification_grid(sub, probe, h)
    b = 1.0
    while b <= B_MAX:
        checks = b_predicates(b, c, sigma, model, kernel, disp, sub, grid, require_order)
        if len(checks) >= 3 and all(checks.values()):
            return BChoice(b, checks)
        b *= 2.0
    raise ConstructionError(f"no admissible b up to 2^60 at c={c!r}, sigma={sigma!r}")


@dataclass(frozen=True)
class Certificate:
    """Outcome of the sampled sign and ordering checks on the verification grid."""

    sub: SubSolution
    sup: SuperSolution
    grid: tuple[float, float, float]
    tol_q: float
    sub_residual_max: float
    super_residual_min: float
    order_gap_min: float
    matching: tuple[float, float]

    @property
    def sub_ok(self) -> bool:
        return self.sub_residual_max <= self.tol_q

    @property
    def super_ok(self) -> bool:
        return self.super_residual_min >= -self.tol_q

    @property
    def ordered(self) -> bool:
        return self.order_gap_min >= -1e-14

    @property
    def passed(self) -> bool:
        return self.sub_ok and self.super_ok and self.ordered

    def as_dict(self) -> dict:
        return {"sub": self.sub.as_dict(), "super": self.sup.as_dict(),
                "grid": list(self.grid), "tol_q": self.tol_q,
                "sub_residual_max": self.sub_residual_max,
                "super_residual_min": self.super_residual_min,
                "order_gap_min": self.order_gap_min,
                "matching_residuals": list(self.matching),
                "sub_ok": self.sub_ok, "super_ok": self.super_ok,
                "ordered": self.ordered, "passed": self.passed}


def certify(c: float, sigma: float, model: ModelParams, kernel: KernelSpec, *,
            h: float = 0.01, larger_mu_root: bool = False) -> Certificate:
    """Build an ordered pair and check both differential inequalities on a grid."""
    disp = dispersion(c, sigma, model, kernel)
    sub = build_sub(c, sigma, model, kernel, disp=disp, larger_mu_root=larger_mu_root)
    choice = choose_b(c, sigma, model, kernel, h=h, require_order=True, disp=disp, sub=sub)
    sup = build_super(c, sigma, choice.b, model, kernel, disp=disp)
    grid = verification_grid(sub, sup, h)
    ps, pS = sample_sub(sub, *grid), sample_super(sup, *grid)
    rs = residual_L(ps, c, sigma, model, kernel).values[1:-1]
    rS = residual_L(pS, c, sigma, model, kernel).values[1:-1]
    return Certificate(sub, sup, grid, sign_tolerance(h), float(rs.max()), float(rS.min()),
                       float(np.min(pS.values - ps.values)), sub.matching_residuals())
