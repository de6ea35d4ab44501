"""Monotone iteration for the a -> A wavefront.

The wave equation is rewritten as ``w = T[w]`` with

    F(w) = 2A w - w^2 (1 - J_sigma * w),
    T[w](xi) = 1/(mu2 - mu1) int_xi^inf (e^{mu1 (xi - y)} - e^{mu2 (xi - y)}) F(w)(y) dy,

where ``mu1 < mu2`` solve ``mu^2 - c mu + 2A - d = 0``. ``F`` and ``T`` are
order preserving on ``[0, A]``, so iterating ``T`` from a super-solution
produces a nonincreasing sequence of profiles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .dispersion import c_star, dispersion, mu_roots, speed_threshold
from .errors import ParameterError, PreconditionError, SqueezeError, ThresholdError
from .kernels import GridProfile, KernelSpec, convolve, convolve_values, kernel_weights
from .model import ModelParams, validate
from .subsuper import build_sub, build_super, choose_b, residual_L, sample_super

LIMIT_LABELS = ("0", "a", "A")


# ---------------------------------------------------------------------------
# operators


def _conv_or_identity(profile: GridProfile, kernel: KernelSpec | None, sigma: float) -> np.ndarray:
    if sigma > 0 and kernel is not None:
        return convolve(profile, kernel, sigma).values
    return profile.values


def F_op(profile: GridProfile, model: ModelParams, kernel: KernelSpec | None, sigma: float,
         check_range: bool = True) -> GridProfile:
    """Pointwise ``F(w) = 2A w - w^2 (1 - J_sigma * w)``.

    The extensions of the result are ``F`` of the constant extensions.
    """
    A = model.A
    w = profile.values
    if check_range:
        lo = min(w.min(), profile.left_ext, profile.right_ext)
        hi = max(w.max(), profile.left_ext, profile.right_ext)
        if lo < -1e-12 or hi > A + 1e-12:
            raise PreconditionError(f"F needs values in [0, A]=[0, {A}], got [{lo}, {hi}]")
    Jw = _conv_or_identity(profile, kernel, sigma)

    def const(u):
        return 2.0 * A * u - u * u * (1.0 - u)

    return profile.replace(values=2.0 * A * w - w * w * (1.0 - Jw),
                           left_ext=const(profile.left_ext), right_ext=const(profile.right_ext))


def _cell_weights(mu: float, h: float) -> tuple[float, float, float]:
    """``(q, w0, w1)`` for the exact integral of ``e^{-mu s}`` against a linear interpolant."""
    x = mu * h
    q = math.exp(-x)
    I0 = -math.expm1(-x) / mu
    if x < 0.05:
        # series of int_0^1 t e^{-x t} dt, avoids cancellation for small x
        s, term = 0.0, 1.0
        for k in range(12):
            s += term / (k + 2)
            term *= -x / (k + 1)
        I1 = h * s
    else:
        I1 = (1.0 - q * (1.0 + x)) / (mu * mu * h)
    return q, I0 - I1, I1


def _backward_exponential(F: np.ndarray, F_tail: float, mu: float, h: float) -> np.ndarray:
    """``P_j = int_{x_j}^inf e^{mu (x_j - y)} F(y) dy`` for piecewise-linear ``F``.

    Beyond the last node ``F`` equals ``F_tail``, whose contribution is
    ``F_tail / mu``. Evaluated as ``P_j = q P_{j+1} + w0 F_j + w1 F_{j+1}``.
    """
    q, w0, w1 = _cell_weights(mu, h)
    rev = F[::-1]
    zi = [F_tail / mu - w0 * rev[0]]
    y, _ = lfilter([w0, w1], [1.0, -q], rev, zi=zi)
    out = y[::-1].copy()
    out[-1] = F_tail / mu
    return out


def T_op(profile: GridProfile, c: float, sigma: float, model: ModelParams,
         kernel: KernelSpec | None, check_range: bool = True) -> GridProfile:
    """The integral operator ``T`` on a grid profile.

    Constants ``0``, ``a`` and ``A`` are fixed points to rounding, because the
    right tail beyond the grid is closed with the exact constant ``F``.
    """
    mu = mu_roots(c, model)
    Fp = F_op(profile, model, kernel, sigma, check_range=check_range)
    P1 = _backward_exponential(Fp.values, Fp.right_ext, mu.mu1, profile.h)
    P2 = _backward_exponential(Fp.values, Fp.right_ext, mu.mu2, profile.h)
    vals = (P1 - P2) / (mu.mu2 - mu.mu1)
    right = Fp.right_ext / (mu.mu1 * mu.mu2)
    return profile.replace(values=vals, left_ext=vals[0], right_ext=right)


# ---------------------------------------------------------------------------
# limit classification


def classify_tail(values: np.ndarray, h: float, model: ModelParams, tol_class: float) -> str:
    if values.size >= 2 and np.max(np.abs(np.diff(values))) / h >= tol_class:
        return "unresolved"
    mean = float(values.mean())
    targets = {"0": 0.0, "a": model.a, "A": model.A}
    label, target = min(targets.items(), key=lambda kv: abs(kv[1] - mean))
    return label if abs(target - mean) < tol_class else "unresolved"


def classify_limits(profile: GridProfile, model: ModelParams, tol_class: float = 1e-4,
                    fraction: float = 0.1) -> tuple[str, str]:
    """Label each tail ``'0'``, ``'a'``, ``'A'`` or ``'unresolved'``.

    A tail is the outer ``fraction`` of the grid. It is classified when it is
    flat (``|w'| < tol_class``) and its mean is within ``tol_class`` of an
    equilibrium. When ``a = 0`` (``d = 0``) the label ``'0'`` is returned.
    """
    m = max(2, int(round(fraction * profile.n)))
    w = profile.values
    return (classify_tail(w[:m], profile.h, model, tol_class),
            classify_tail(w[-m:], profile.h, model, tol_class))


def tail_deviation(profile: GridProfile, model: ModelParams, fraction: float = 0.1) -> tuple[float, float]:
    """Distance of the tail means from a (left) and A (right)."""
    m = max(2, int(round(fraction * profile.n)))
    w = profile.values
    return abs(float(w[:m].mean()) - model.a), abs(float(w[-m:].mean()) - model.A)


# ---------------------------------------------------------------------------
# solution container


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float | None = None
    bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))
        for name in ("value", "bound"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, float(v))

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "value": self.value, "bound": self.bound}


@dataclass(frozen=True)
class FrontSolution:
    """A computed travelling wave together with its diagnostics."""

    c: float
    profile: GridProfile
    residual_sup: float
    left_limit: str
    right_limit: str
    iterations: int
    bound_report: tuple[Check, ...]
    converged: bool = True
    info: dict = field(default_factory=dict)

    @property
    def bounds_pass(self) -> bool:
        return all(ch.passed for ch in self.bound_report)

    def summary(self) -> dict:
        return {"c": self.c, "residual_sup": self.residual_sup,
                "left_limit": self.left_limit, "right_limit": self.right_limit,
                "iterations": self.iterations, "converged": self.converged,
                "bounds_pass": self.bounds_pass,
                "bound_report": [ch.as_dict() for ch in self.bound_report],
                "grid": {"x0": self.profile.x0, "h": self.profile.h, "n": self.profile.n},
                **self.info}


def align_at(profile: GridProfile, level: float) -> tuple[GridProfile, float]:
    """Translate a nondecreasing profile so that it crosses ``level`` at 0."""
    w = profile.values
    k = int(np.searchsorted(w, level))
    if k <= 0 or k >= w.size:
        raise ParameterError(f"profile does not cross level {level}")
    x = profile.x
    t = (level - w[k - 1]) / (w[k] - w[k - 1])
    shift = float(x[k - 1] + t * profile.h)
    return profile.replace(x0=profile.x0 - shift), shift


# ---------------------------------------------------------------------------
# the solver


@dataclass(frozen=True)
class MonotoneConfig:
    xmin: float = -60.0
    xmax: float = 60.0
    h: float = 0.01
    tol: float = 1e-10
    max_iter: int = 100_000
    margin: float = 1e-3
    b: float | None = None
    larger_mu_root: bool = False
    tol_class: float = 1e-4
    #: free region beyond xmax (units of xi), then a region held at the super-solution
    pad_free: float = 10.0
    pad_frozen: float = 10.0
    mono_tol: float = 1e-12


def solve_monotone(c: float, sigma: float, model: ModelParams, kernel: KernelSpec,
                   config: MonotoneConfig = MonotoneConfig(), *, record_chain: bool = False) -> FrontSolution:
    """Iterate ``w_m = T[w_{m-1}]`` from the super-solution to a monotone front.

    The computational grid extends past ``xmax`` by ``pad_free`` (where the
    iterate evolves) and then by ``pad_frozen`` (held at the super-solution
    in every sweep). The frozen strip replaces the constant closure at A,
    whose only fixed point on a truncated grid is the constant A itself.
    Only ``[xmin, xmax]`` is reported, translated so that ``w(0) = 1/2``.
    """
    rep = validate(model, "a_to_A")
    if not rep.passed and not (model.allow_outside and rep.violated == "0<=d<2/9"):
        raise ParameterError(f"a_to_A hypotheses violated: {rep.violated}")
    cfg = config
    thr = speed_threshold(model)
    cs = c_star(sigma, model, kernel)
    need = max(thr, cs) + cfg.margin
    if not c >= need:
        raise ThresholdError(f"c={c!r} below max(2 sqrt(2A-d), c_star)+margin={need!r}",
                             threshold=max(thr, cs), c_star=cs)
    disp = dispersion(c, sigma, model, kernel)
    sub = build_sub(c, sigma, model, kernel, disp=disp, larger_mu_root=cfg.larger_mu_root)
    b = cfg.b if cfg.b is not None else choose_b(c, sigma, model, kernel, h=cfg.h, disp=disp, sub=sub).b
    sup = build_super(c, sigma, b, model, kernel, disp=disp)
    mu = mu_roots(c, model)

    h = cfg.h
    A = model.A
    radius = kernel.support_radius() * sigma
    n_main = int(round((cfg.xmax - cfg.xmin) / h)) + 1
    n_free = n_main + int(math.ceil(max(cfg.pad_free, 2.0 * radius) / h))
    # hold the super-solution until it is within 1e-12 of A, so the constant
    # closure beyond the grid cannot push the first sweep above the start
    x_flat = math.log(1e-12 / A) / sup.lambda2
    x_free_end = cfg.xmin + h * (n_free - 1)
    strip = max(cfg.pad_frozen, 2.0 * radius + 10 * h, x_flat - x_free_end)
    n_tot = n_free + int(math.ceil(strip / h))
    x = cfg.xmin + h * np.arange(n_tot)
    frozen = sup(x[n_free:])
    w = sup(x)
    lower = sub(x[:n_free])
    ordered = lower <= w[:n_free]
    # the lower bound follows from comparison only when the pair is ordered on
    # the whole strip; for d > 0 the sub-solution tends to A faster than any
    # front, so the gap is then a diagnostic rather than an assertion
    enforce_lower = bool(ordered.all() and np.all(sub(x[n_free:]) <= frozen))

    weights, K = kernel_weights(kernel, sigma, h)
    q1, a1, b1 = _cell_weights(mu.mu1, h)
    q2, a2, b2 = _cell_weights(mu.mu2, h)
    A = model.A
    F_tail = 2.0 * A * A - A * A * (1.0 - A)
    scale = 1.0 / (mu.mu2 - mu.mu1)

    def sweep(v):
        Jv = convolve_values(v, v[0], A, weights, K)
        Fv = 2.0 * A * v - v * v * (1.0 - Jv)
        rev = Fv[::-1]
        P1 = lfilter([a1, b1], [1.0, -q1], rev, zi=[F_tail / mu.mu1 - a1 * rev[0]])[0][::-1]
        P2 = lfilter([a2, b2], [1.0, -q2], rev, zi=[F_tail / mu.mu2 - a2 * rev[0]])[0][::-1]
        return scale * (P1 - P2)

    deltas: list[float] = []
    chain: list[np.ndarray] = []
    max_increase = 0.0
    squeeze_gap = math.inf
    it = 0
    converged = False
    while it < cfg.max_iter:
        nv = sweep(w)
        nv[n_free:] = frozen
        inc = float(np.max(nv[:n_free] - w[:n_free]))
        max_increase = max(max_increase, inc)
        if inc > cfg.mono_tol:
            raise SqueezeError(f"iterate increased by {inc:.3e} at sweep {it + 1}")
        gap = float(np.min((nv[:n_free] - lower)[ordered])) if ordered.any() else math.inf
        squeeze_gap = min(squeeze_gap, gap)
        if enforce_lower and gap < -cfg.mono_tol:
            raise SqueezeError(f"iterate fell below the sub-solution by {-gap:.3e} at sweep {it + 1}")
        delta = float(np.max(np.abs(nv - w)))
        deltas.append(delta)
        w = nv
        it += 1
        if record_chain:
            chain.append(w[:n_main].copy())
        if delta < cfg.tol:
            converged = True
            break

    # fixed-point defect and residual on the free region
    defect = float(np.max(np.abs(sweep(w)[:n_free] - w[:n_free])))
    full = GridProfile(cfg.xmin, h, w, w[0], A)
    res = residual_L(full, c, sigma, model, kernel).values
    main = GridProfile(cfg.xmin, h, w[:n_main], w[0], w[n_main - 1])
    res_main = res[:n_main].copy()
    res_main[0] = 0.0
    residual_sup = float(np.max(np.abs(res_main[1:-1])))
    try:
        aligned, shift = align_at(main, 0.5 * (model.a + A))
    except ParameterError:
        # an unconverged iterate may not reach the midpoint yet
        aligned, shift = main, None
    left, right = classify_limits(aligned, model, cfg.tol_class)
    dev_left, dev_right = tail_deviation(aligned, model)
    slope = np.diff(aligned.values) / h
    deriv_bound = mu.mu1 * A
    rate = _geometric_rate(deltas)

    report = (
        Check("converged", converged, deltas[-1] if deltas else None, cfg.tol),
        Check("nondecreasing", bool(slope.min() >= -1e-12), float(slope.min()), 0.0),
        Check("iterates_nonincreasing", max_increase <= cfg.mono_tol, max_increase, cfg.mono_tol),
        Check("derivative_bound", bool(slope.max() <= deriv_bound + 1e-8), float(slope.max()), deriv_bound),
        Check("range", bool(aligned.values.min() >= model.a - cfg.tol and aligned.values.max() <= A + cfg.tol),
              float(aligned.values.min()), model.a),
        Check("left_limit_a", left == "a", dev_left, cfg.tol_class),
        Check("right_limit_A", right == "A", dev_right, cfg.tol_class),
        Check("fixed_point_defect", defect < 10 * cfg.tol, defect, 10 * cfg.tol),
    )
    info = {
        "mode": "a_to_A", "sigma": sigma, "b": b, "alpha": sub.alpha, "xi_minus": sub.xi_minus,
        "mu_sub": sub.mu, "mu_root": "larger" if cfg.larger_mu_root else "smaller",
        "lambda1": disp.lambda1, "lambda2": disp.lambda2, "eps1": disp.eps1, "eps2": disp.eps2,
        "xi_b": sup.xi_b, "mu_b": sup.mu_b, "mu1": mu.mu1, "mu2": mu.mu2,
        "c_star": cs, "speed_threshold": thr, "shift": shift,
        "last_delta": deltas[-1] if deltas else None, "empirical_rate": rate,
        "tail_deviation": [dev_left, dev_right], "max_increase": max_increase,
        "sub_gap_min": squeeze_gap, "sub_gap_enforced": enforce_lower,
        "theoretical_guarantee": model.guaranteed,
    }
    if record_chain:
        info["chain"] = chain
    return FrontSolution(c, aligned, residual_sup, left, right, it, report, converged,
                         info)


def _geometric_rate(deltas: list[float]) -> float | None:
    tail = [d for d in deltas[-20:] if d > 0]
    if len(tail) < 3:
        return None
    return float(math.exp(np.mean(np.diff(np.log(tail)))))


def solve_critical(c: float, sigma: float, model: ModelParams, kernel: KernelSpec,
                   config: MonotoneConfig = MonotoneConfig(),
                   deltas: tuple[float, ...] = (0.04, 0.02, 0.01)) -> FrontSolution:
    """Boundary-speed mode: solve at ``c + delta`` and extrapolate linearly to ``delta = 0``.

    Profiles are compared after alignment at ``w(0) = 1/2`` on the grid of
    the smallest ``delta``.
    """
    sols = [solve_monotone(c + dl, sigma, model, kernel,
                           MonotoneConfig(**{**config.__dict__, "margin": 0.0})) for dl in deltas]
    ref = sols[-1].profile
    xs = ref.x
    curves = np.array([s.profile(xs) for s in sols])
    dl = np.asarray(deltas)
    coef = np.polyfit(dl, curves, 1)
    vals = coef[1]
    base = sols[-1]
    info = dict(base.info, critical_extrapolation=list(deltas))
    return FrontSolution(c, ref.replace(values=vals), base.residual_sup, base.left_limit,
                         base.right_limit, sum(s.iterations for s in sols), base.bound_report,
                         all(s.converged for s in sols), info)
