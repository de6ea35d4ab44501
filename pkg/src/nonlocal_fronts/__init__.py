"""Travelling fronts of a bistable reaction-diffusion equation with nonlocal consumption.

The wave profile ``w(xi)``, ``xi = x - c t``, solves

    w'' - c w' + w^2 (1 - J_sigma * w) - d w = 0.

Two constructions are provided: monotone iteration between a sub- and a
super-solution (fronts from ``a`` to ``A``), and a cutoff boundary-value
problem on ``[-L, L]`` followed through a homotopy (semi-wavefronts leaving
0). Exact local fronts serve as references as ``sigma -> 0``.
"""

from .bvp import (BvpProblem, BvpSolution, CutoffSpec, Schedule, barrier_check, extract_semiwavefront,
                  find_c0, homotopy_solve, verify_bounds)
from .dispersion import DispersionResult, c_star, dispersion, mu_roots, speed_threshold
from .errors import (ConstructionError, ContinuationError, DivergentTransformError, ParameterError,
                     PreconditionError, ResolutionError, SqueezeError, ThresholdError)
from .kernels import GridProfile, KernelSpec, convolve, moments, transform
from .local import exact_front_0A, exact_front_aA, local_bvp_front, shooting_speed
from .model import Equilibria, ModelParams, equilibria, validate
from .monotone import FrontSolution, MonotoneConfig, T_op, classify_limits, solve_monotone
from .subsuper import certify, choose_b, residual_L

__all__ = [
    "BvpProblem", "BvpSolution", "CutoffSpec", "Schedule", "barrier_check", "extract_semiwavefront",
    "find_c0", "homotopy_solve", "verify_bounds",
    "DispersionResult", "c_star", "dispersion", "mu_roots", "speed_threshold",
    "ConstructionError", "ContinuationError", "DivergentTransformError", "ParameterError",
    "PreconditionError", "ResolutionError", "SqueezeError", "ThresholdError",
    "GridProfile", "KernelSpec", "convolve", "moments", "transform",
    "exact_front_0A", "exact_front_aA", "local_bvp_front", "shooting_speed",
    "Equilibria", "ModelParams", "equilibria", "validate",
    "FrontSolution", "MonotoneConfig", "T_op", "classify_limits", "solve_monotone",
    "certify", "choose_b", "residual_L",
]
