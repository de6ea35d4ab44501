"""Characteristic functions of the linearised problem and the threshold speed.

    Phi_1(c, sigma, lam) = lam^2 - c lam - d - A^2 M(sigma lam)
    Phi_2(c, sigma, lam) = lam^2 - c lam + d - A^2 M(sigma lam)

with ``M`` the bilateral transform of the base kernel. Both are negative at
``lam = 0``. The sub-solution needs the largest negative root of Phi_1, the
super-solution that of Phi_2; ``c_star`` is the least ``c >= 0`` for which
both exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DivergentTransformError, ThresholdError
from .kernels import KernelSpec, transform
from .model import ModelParams

#: Ladder magnitudes 1e-6 * 2**(k / LADDER_SUBSTEPS), k = 0 .. 60 * LADDER_SUBSTEPS.
LADDER_SUBSTEPS = 16
LADDER_OCTAVES = 60
C_HI = 100.0


@dataclass(frozen=True)
class DispersionResult:
    c: float
    sigma: float
    lambda1: float | None
    lambda2: float | None
    eps1: float | None
    eps2: float | None

    @property
    def both_exist(self) -> bool:
        return self.lambda1 is not None and self.lambda2 is not None

    def as_dict(self) -> dict:
        return {"c": self.c, "sigma": self.sigma, "lambda1": self.lambda1, "lambda2": self.lambda2,
                "eps1": self.eps1, "eps2": self.eps2, "both_exist": self.both_exist}


@dataclass(frozen=True)
class MuRoots:
    mu1: float
    mu2: float


def phi(i: int, c: float, sigma: float, lam, model: ModelParams, kernel: KernelSpec):
    """Evaluate Phi_i; vectorised over ``lam``."""
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    lam = np.asarray(lam, dtype=float)
    sign = -1.0 if i == 1 else 1.0
    M = transform(kernel, sigma, lam)
    with np.errstate(invalid="ignore"):
        out = lam * lam - c * lam + sign * model.d - model.A ** 2 * M
    return float(out) if out.ndim == 0 else out


def _ladder(sigma: float, kernel: KernelSpec) -> np.ndarray:
    k = np.arange(LADDER_OCTAVES * LADDER_SUBSTEPS + 1)
    lam = -1e-6 * 2.0 ** (k / LADDER_SUBSTEPS)
    if kernel.family == "laplace" and sigma > 0:
        lam = lam[sigma * np.abs(lam) < 1.0 - 1e-12]
    return lam


def _safe_phi(i, c, sigma, lam, model, kernel):
    try:
        return phi(i, c, sigma, lam, model, kernel)
    except DivergentTransformError:
        return -math.inf


def largest_negative_root(i: int, c: float, sigma: float, model: ModelParams,
                          kernel: KernelSpec) -> tuple[float, float] | None:
    """Return ``(lambda_i, eps_i)`` or ``None`` when Phi_i has no negative root.

    A log-spaced ladder from ``-1e-6`` downward locates the first sample with
    Phi_i > 0; if none is positive, the largest sample is refined by a
    bounded maximisation so that roots hidden between rungs are not missed.
    The root is then polished by Brent's method. ``eps_i`` is half the gap to
    the next root below (at most ``|lambda_i| / 2``) and always satisfies
    ``Phi_i(lambda_i - eps_i) > 0``.
    """
    lam = _ladder(sigma, kernel)
    vals = phi(i, c, sigma, lam, model, kernel)
    finite = np.isfinite(vals)
    if not finite.all():
        stop = int(np.argmin(finite))
        lam, vals = lam[:stop], vals[:stop]
    if lam.size < 3:
        return None

    def f(x):
        return _safe_phi(i, c, sigma, x, model, kernel)

    pos = np.flatnonzero(vals > 0)
    if pos.size:
        k = int(pos[0])
        lam_pos = float(lam[k])
    else:
        k = int(np.argmax(vals))
        lo = float(lam[min(k + 1, lam.size - 1)])
        hi = float(lam[max(k - 1, 0)])
        res = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12 * max(1.0, abs(lam[k]))})
        if not -res.fun > 0:
            return None
        lam_pos = float(res.x)
        k = int(np.searchsorted(-lam, -lam_pos))  # first rung below lam_pos
    right = float(lam[k - 1]) if k >= 1 and lam[k - 1] > lam_pos else -0.5e-6
    root = brentq(f, lam_pos, right, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)

    # next sign change below the positive stretch
    below = np.flatnonzero((lam < lam_pos) & (vals <= 0))
    if below.size:
        j = int(below[0])
        upper = float(lam[j - 1]) if lam[j - 1] < lam_pos else lam_pos
        if f(upper) > 0:
            nxt = brentq(f, float(lam[j]), upper, xtol=1e-14, maxiter=500)
        else:
            nxt = float(lam[j])
        eps = 0.5 * (root - nxt)
    else:
        eps = math.inf
    eps = min(eps, 0.5 * abs(root))
    while not f(root - eps) > 0:
        eps *= 0.5
        if eps < 1e-14 * max(1.0, abs(root)):
            break
    return root, eps


def dispersion(c: float, sigma: float, model: ModelParams, kernel: KernelSpec) -> DispersionResult:
    r1 = largest_negative_root(1, c, sigma, model, kernel)
    r2 = largest_negative_root(2, c, sigma, model, kernel)
    l1, e1 = r1 if r1 else (None, None)
    l2, e2 = r2 if r2 else (None, None)
    return DispersionResult(c, sigma, l1, l2, e1, e2)


def both_roots_exist(c: float, sigma: float, model: ModelParams, kernel: KernelSpec) -> bool:
    return (largest_negative_root(1, c, sigma, model, kernel) is not None
            and largest_negative_root(2, c, sigma, model, kernel) is not None)


def c_star(sigma: float, model: ModelParams, kernel: KernelSpec, tol: float = 1e-10) -> float:
    """Least ``c >= 0`` at which both characteristic roots exist (``inf`` above ``C_HI``).

    For fixed negative ``lam`` both Phi_i increase with ``c``, so existence is
    monotone in ``c`` and bisection applies. The returned value is the upper
    end of the final bracket, where existence has been confirmed.
    """
    if both_roots_exist(0.0, sigma, model, kernel):
        return 0.0
    if not both_roots_exist(C_HI, sigma, model, kernel):
        return math.inf
    lo, hi = 0.0, C_HI
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if both_roots_exist(mid, sigma, model, kernel):
            hi = mid
        else:
            lo = mid
    return hi


def mu_roots(c: float, model: ModelParams) -> MuRoots:
    """Roots ``0 < mu1 < mu2`` of ``mu^2 - c mu + (2A - d)``."""
    D = 2.0 * model.A - model.d
    threshold = 2.0 * math.sqrt(D)
    disc = c * c - 4.0 * D
    if not c > threshold or disc <= 0:
        raise ThresholdError(
            f"c={c!r} must exceed 2*sqrt(2A-d)={threshold!r}",
            threshold=threshold, mu_double=0.5 * threshold)
    s = math.sqrt(disc)
    mu2 = 0.5 * (c + s)
    return MuRoots(D / mu2, mu2)


def mu_sub(c: float, larger: bool = False) -> float:
    """Positive root of ``mu^2 - c mu + 1``; the smaller one unless ``larger``."""
    disc = c * c - 4.0
    if not c > 2.0 or disc <= 0:
        raise ThresholdError(f"c={c!r} must exceed 2", threshold=2.0, mu_double=1.0)
    big = 0.5 * (c + math.sqrt(disc))
    return big if larger else 1.0 / big


def speed_threshold(model: ModelParams) -> float:
    """``2 sqrt(2A - d)``, below which the integral operator is undefined."""
    return 2.0 * math.sqrt(2.0 * model.A - model.d)
