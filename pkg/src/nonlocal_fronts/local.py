"""Local (sigma = 0) fronts: exact Nagumo profiles and numerical references.

With ``J`` a Dirac mass the wave equation reduces to

    w'' - c w' + f(w) = 0,   f(w) = w (w - a) (A - w).

The ansatz ``w' = k (w - p)(A - w)`` turns it into an algebraic condition
and gives explicit fronts for the connections 0 -> A and a -> A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .bvp import BvpProblem, homotopy_solve, rounding_floor
from .errors import ConstructionError, ParameterError
from .kernels import GridProfile
from .model import ModelParams, reaction_local
from .monotone import Check, FrontSolution, align_at, classify_limits
from .subsuper import residual_L

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ExactFront:
    """Logistic front ``left + (A - left) / (1 + exp(-k (xi - xi0)))``."""

    c: float
    left: float
    right: float
    rate: float
    xi0: float = 0.0

    def __call__(self, xi):
        z = -self.rate * (np.asarray(xi, dtype=float) - self.xi0)
        return self.left + (self.right - self.left) * 0.5 * (1.0 - np.tanh(0.5 * z))

    def derivative(self, xi, order: int = 1):
        s = (self(xi) - self.left) / (self.right - self.left)
        k, span = self.rate, self.right - self.left
        if order == 1:
            return span * k * s * (1 - s)
        if order == 2:
            return span * k * k * s * (1 - s) * (1 - 2 * s)
        raise ValueError("order must be 1 or 2")

    def residual(self, xi, d: float):
        """``w'' - c w' + f(w)`` evaluated with the closed-form derivatives."""
        w = self(xi)
        return self.derivative(xi, 2) - self.c * self.derivative(xi, 1) + reaction_local(w, d)

    @property
    def endpoints(self) -> tuple[float, float]:
        return self.left, self.right


def exact_front_0A(model: ModelParams) -> ExactFront:
    """Front from 0 to A, speed ``(3A - 2)/sqrt(2)``, shifted so that ``w(0) = d0``.

    Substituting ``w' = w (A - w)/sqrt(2)`` leaves ``c = (A - 2a)/sqrt(2)``,
    which equals ``(3A - 2)/sqrt(2)`` because ``a = 1 - A``.
    """
    if not 0.0 < model.d < 2.0 / 9.0:
        raise ParameterError("the 0 -> A front needs 0 < d < 2/9")
    A = model.A
    k = A / SQRT2
    xi0 = 0.0
    if model.d0 is not None:
        xi0 = math.log(A / model.d0 - 1.0) / k
    return ExactFront((3.0 * A - 2.0) / SQRT2, 0.0, A, k, xi0)


def exact_front_aA(model: ModelParams) -> ExactFront:
    """Front from a to A with speed ``(a + A)/sqrt(2) = 1/sqrt(2)``, centred at 0."""
    return ExactFront((model.a + model.A) / SQRT2, model.a, model.A, (model.A - model.a) / SQRT2, 0.0)


# ---------------------------------------------------------------------------
# finite-difference fronts


def _fprime(u, d):
    return 2.0 * u - 3.0 * u * u - d


def _a_to_A_newton(model: ModelParams, c: float, L: float, h: float, max_iter: int = 50):
    """Newton for the local a -> A front at fixed ``c`` on ``[-L, L]``.

    Rows: the equation at interior nodes, ``w'(L) = lam (w(L) - A)`` on the
    right (``lam`` the decaying rate at A), and ``w(0) = 1/2``. The left end
    carries no condition; the equation decides the tail.
    """
    a, A, d = model.a, model.A, model.d
    n = int(round(2 * L / h)) + 1
    x = -L + h * np.arange(n)
    i0 = int(round(L / h))
    mid = 0.5 * (a + A)
    disc_a = c * c - 4.0 * _fprime(a, d)
    nu = 0.5 * (c - math.sqrt(disc_a)) if disc_a >= 0 else 0.5 * c
    lam = 0.5 * (c - math.sqrt(c * c - 4.0 * _fprime(A, d)))
    w = np.where(x < 0, a + (mid - a) * np.exp(nu * np.minimum(x, 0)),
                 A - (A - mid) * np.exp(lam * np.maximum(x, 0)))

    ones = np.ones(n)
    D2 = sp.diags([ones[:-1], -2 * ones, ones[:-1]], [-1, 0, 1], format="csr") / h ** 2
    D1 = sp.diags([-ones[:-1], ones[:-1]], [-1, 1], format="csr") / (2 * h)
    Lin = (D2 - c * D1).tolil()
    Lin[0, :] = 0.0
    Lin[0, i0] = 1.0
    Lin[n - 1, :] = 0.0
    Lin[n - 1, n - 1] = 1.5 / h - lam
    Lin[n - 1, n - 2] = -2.0 / h
    Lin[n - 1, n - 3] = 0.5 / h
    Lin = Lin.tocsr()
    mask = np.ones(n)
    mask[0] = mask[-1] = 0.0
    rhs_const = np.zeros(n)
    rhs_const[0] = -mid
    rhs_const[-1] = lam * A

    def residual(v):
        return Lin @ v + mask * reaction_local(v, d) + rhs_const

    tol = max(1e-12, rounding_floor(h, A))
    R = residual(w)
    r = float(np.max(np.abs(R)))
    it = 0
    while r > tol and it < max_iter:
        J = (Lin + sp.diags(mask * _fprime(w, d))).tocsc()
        step = splu(J).solve(-R)
        t = 1.0
        while t > 1e-3:
            wn = w + t * step
            Rn = residual(wn)
            rn = float(np.max(np.abs(Rn)))
            if rn < r:
                break
            t *= 0.5
        else:
            raise ConstructionError(f"local a->A Newton stalled at residual {r:.3e}")
        w, R, r = wn, Rn, rn
        it += 1
    if r > tol:
        raise ConstructionError(f"local a->A Newton did not converge (residual {r:.3e})")
    return x, w, r, it


def local_bvp_front(model: ModelParams, c: float | None = None, mode: str = "a_to_A",
                    L: float = 60.0, h: float = 0.01) -> FrontSolution:
    """Numerical local front.

    ``a_to_A`` needs a fixed speed ``c`` (the local problem has a front for
    every ``c`` at or above its minimal speed). ``zero_to_A`` leaves ``c``
    free and pins ``w(0) = d0`` (``d/2`` when ``d0`` is unset), using the same
    continuation as the nonlocal cutoff problem with the convolution replaced
    by the identity and no cutoff.
    """
    if mode == "a_to_A":
        if c is None:
            raise ParameterError("a_to_A mode needs a speed")
        c_min = 2.0 * math.sqrt(max(_fprime(model.a, model.d), 0.0))
        if c < min(c_min, 1.0 / SQRT2) - 1e-12:
            raise ParameterError(f"c={c} is below the local minimal speed {c_min}")
        x, w, r, it = _a_to_A_newton(model, c, L, h)
        prof = GridProfile(-L, h, w, w[0], w[-1])
        res = residual_L(prof, c, 0.0, model, None).values
        slope = np.diff(w)
        left, right = classify_limits(prof, model)
        report = (Check("newton", True, r, None),
                  Check("nondecreasing", bool(slope.min() >= -1e-12), float(slope.min() / h), 0.0),
                  Check("phase", abs(prof(0.0) - 0.5 * (model.a + model.A)) < 1e-10, float(prof(0.0)), None))
        return FrontSolution(c, prof, float(np.max(np.abs(res[1:-1]))), left, right, it, report, True,
                             {"mode": "a_to_A", "sigma": 0.0, "L": L, "h": h})
    if mode == "zero_to_A":
        d0 = model.d0 if model.d0 is not None else 0.5 * model.d
        m = ModelParams(model.d, 0.0, d0, model.allow_outside)
        prob = BvpProblem(L, h, m, None, 0.0, None)
        sol = homotopy_solve(prob)
        left, right = classify_limits(sol.profile, m)
        return FrontSolution(sol.c, sol.profile, sol.newton_residual, left, right, len(sol.trace),
                             sol.bound_report, True, {"mode": "zero_to_A", "sigma": 0.0, "L": L, "h": h})
    raise ParameterError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# shooting oracle


def _rk4_batch(c: np.ndarray, w: np.ndarray, p: np.ndarray, d: float, A: float, h: float,
               max_steps: int) -> np.ndarray:
    """Integrate ``w' = p, p' = c p - f(w)`` for a batch of speeds.

    Returns +1 where the orbit overshoots A, -1 where it turns back
    (``p < 0``) first, 0 if neither happened within ``max_steps``.
    """
    def rhs(w_, p_):
        return p_, c * p_ - (w_ * w_ * (1.0 - w_) - d * w_)

    out = np.zeros(c.size, dtype=int)
    live = np.ones(c.size, dtype=bool)
    for _ in range(max_steps):
        k1w, k1p = rhs(w, p)
        k2w, k2p = rhs(w + 0.5 * h * k1w, p + 0.5 * h * k1p)
        k3w, k3p = rhs(w + 0.5 * h * k2w, p + 0.5 * h * k2p)
        k4w, k4p = rhs(w + h * k3w, p + h * k3p)
        w = np.where(live, w + h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w), w)
        p = np.where(live, p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p), p)
        over = live & (w > A)
        back = live & ~over & (p < 0)
        out[over] = 1
        out[back] = -1
        live &= ~(over | back)
        if not live.any():
            break
    return out


def shooting_speed(model: ModelParams, left: str = "0", bracket: tuple[float, float] = (0.0, 2.0),
                   h: float = 0.005, delta: float = 1e-9, rounds: int = 8, width: int = 17,
                   max_length: float = 400.0) -> float:
    """Speed of the heteroclinic orbit from ``left`` (``'0'`` or ``'a'``) to A.

    The orbit leaves the left state along its fastest unstable direction;
    too large a speed overshoots A, too small a speed turns back first.
    Each round evaluates ``width`` speeds at once and keeps the bracket
    around the sign change.
    """
    d, A = model.d, model.A
    base = 0.0 if left == "0" else model.a
    if left not in ("0", "a"):
        raise ParameterError("left must be '0' or 'a'")
    fp = _fprime(base, d)
    lo, hi = bracket
    steps = int(max_length / h)
    for _ in range(rounds):
        cs = np.linspace(lo, hi, width)
        kappa = 0.5 * (cs + np.sqrt(np.maximum(cs * cs - 4.0 * fp, 0.0)))
        w = np.full(cs.size, base + delta)
        p = kappa * delta
        flag = _rk4_batch(cs, w, p, d, A, h, steps)
        over = np.flatnonzero(flag == 1)
        back = np.flatnonzero(flag == -1)
        if over.size == 0 or back.size == 0:
            raise ConstructionError(f"shooting bracket [{lo}, {hi}] does not straddle the speed")
        i = int(back.max())
        j = int(over[over > i].min()) if np.any(over > i) else int(over.min())
        lo, hi = cs[i], cs[j]
    return 0.5 * (lo + hi)
