"""Model parameters, equilibria and the local reaction term.

The travelling-wave equation studied throughout the package is

    w'' - c w' + w^2 (1 - J_sigma * w) - d w = 0,

whose constant solutions are 0, a and A with a + A = 1 and a A = d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import ParameterError

#: Upper end of the mortality range covered by the existence theorems.
D_THEOREM_MAX = 2.0 / 9.0
#: Upper end of the range where a and A are real and distinct.
D_COMPUTABLE_MAX = 0.25

Mode = Literal["a_to_A", "zero_to_A"]


@dataclass(frozen=True)
class Equilibria:
    """The three constant states, ordered ``zero <= a < A``."""

    a: float
    A: float
    zero: float = 0.0
    outside_theorem_range: bool = False

    def as_dict(self) -> dict:
        return {"zero": self.zero, "a": self.a, "A": self.A,
                "outside_theorem_range": self.outside_theorem_range}


def equilibria(d: float) -> Equilibria:
    """Roots of ``s^2 (1 - s) - d s``.

    ``a`` is evaluated as ``d / A`` so that ``a A = d`` holds to rounding
    even when the discriminant is close to one.
    """
    d = float(d)
    if not (0.0 <= d < D_COMPUTABLE_MAX) or not math.isfinite(d):
        raise ParameterError(f"d must lie in [0, 1/4), got {d!r}")
    root = math.sqrt(1.0 - 4.0 * d)
    A = 0.5 * (1.0 + root)
    a = d / A
    return Equilibria(a=a, A=A, outside_theorem_range=d >= D_THEOREM_MAX)


def reaction_local(u, d: float):
    """Local reaction ``u^2 (1 - u) - d u`` (the nonlocal term with J a delta)."""
    u = np.asarray(u, dtype=float) if not np.isscalar(u) else float(u)
    return u * u * (1.0 - u) - d * u


def reaction_factored(u, d: float):
    """The same reaction written as ``u (u - a) (A - u)``."""
    eq = equilibria(d)
    return u * (u - eq.a) * (eq.A - u)


@dataclass(frozen=True)
class ModelParams:
    """Mortality ``d``, kernel scale ``sigma`` and normalisation level ``d0``.

    ``d0`` is only needed for semi-wavefront solves; ``allow_outside``
    lets ``d >= 2/9`` through, in which case outputs are marked as carrying
    no theoretical guarantee.
    """

    d: float
    sigma: float
    d0: float | None = None
    allow_outside: bool = False
    eq: Equilibria = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise ParameterError(f"sigma must be >= 0, got {self.sigma!r}")
        object.__setattr__(self, "eq", equilibria(self.d))
        if self.eq.outside_theorem_range and not self.allow_outside:
            raise ParameterError(
                f"d={self.d} is outside [0, 2/9); pass allow_outside=True to explore")

    @property
    def a(self) -> float:
        return self.eq.a

    @property
    def A(self) -> float:
        return self.eq.A

    @property
    def guaranteed(self) -> bool:
        return not self.eq.outside_theorem_range

    def with_sigma(self, sigma: float) -> "ModelParams":
        return ModelParams(self.d, sigma, self.d0, self.allow_outside)

    def as_dict(self) -> dict:
        return {"d": self.d, "sigma": self.sigma, "d0": self.d0,
                "a": self.a, "A": self.A,
                "theoretical_guarantee": self.guaranteed}


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    mode: str
    violated: str | None
    checks: tuple[tuple[str, bool], ...]

    def as_dict(self) -> dict:
        return {"passed": self.passed, "mode": self.mode, "violated": self.violated,
                "checks": [{"name": n, "passed": p} for n, p in self.checks]}


def validate(params: ModelParams, mode: Mode) -> ValidationReport:
    """Check the hypotheses behind the chosen construction.

    ``a_to_A`` needs ``0 <= d < 2/9``; ``zero_to_A`` additionally needs
    ``d > 0`` and ``0 < d0 < d``. The first failing check is named.
    """
    if mode not in ("a_to_A", "zero_to_A"):
        raise ParameterError(f"unknown mode {mode!r}")
    d, d0 = params.d, params.d0
    checks: list[tuple[str, bool]] = [
        ("0<=d<2/9", 0.0 <= d < D_THEOREM_MAX),
        ("sigma>0", params.sigma > 0),
    ]
    if mode == "zero_to_A":
        checks.append(("d>0 required", d > 0))
        checks.append(("d0>0 required", d0 is not None and d0 > 0))
        checks.append(("d0<d required", d0 is not None and d0 < d))
    violated = next((name for name, ok in checks if not ok), None)
    return ValidationReport(violated is None, mode, violated, tuple(checks))
