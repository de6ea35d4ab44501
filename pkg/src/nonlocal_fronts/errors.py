"""Exception types shared by the solvers."""

from __future__ import annotations


class ParameterError(ValueError):
    """A model or numerical parameter lies outside its admissible domain."""


class ResolutionError(ValueError):
    """The grid is too coarse for the kernel or for boundary layers."""


class DivergentTransformError(ArithmeticError):
    """The bilateral exponential transform of the kernel is infinite."""


class ThresholdError(ValueError):
    """A speed threshold needed by a construction is not met.

    ``payload`` carries diagnostic numbers (threshold value, coincident roots).
    """

    def __init__(self, message: str, **payload: float):
        super().__init__(message)
        self.payload = payload


class PreconditionError(ValueError):
    """An input violates an operation's precondition."""


class ConstructionError(RuntimeError):
    """An explicit construction could not be completed."""


class SqueezeError(RuntimeError):
    """Monotone iterates left the band between sub- and super-solution."""


class ContinuationError(RuntimeError):
    """Homotopy continuation reached its step floor.

    ``last_tau`` is the last accepted homotopy parameter.
    """

    def __init__(self, message: str, last_tau: float, **info):
        super().__init__(message)
        self.last_tau = last_tau
        self.info = info
