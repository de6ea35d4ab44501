"""Convolution kernels, their moments and exponential transforms.

A kernel is described by its unscaled density ``J``; the scaled kernel is
``J_sigma(z) = J(z / sigma) / sigma``. Discrete convolution samples
``J_sigma`` at multiples of the grid spacing, renormalises the weights to
unit mass and treats values outside the grid as the constant extensions of
the profile.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erfc

from .errors import DivergentTransformError, ParameterError, ResolutionError

FAMILIES = ("tophat", "gaussian", "laplace", "tabulated")

#: Truncation radius in units of sigma; the discarded mass is below 1e-10.
R_TRUNC = {"tophat": 1.0, "gaussian": 7.0, "laplace": 25.0}

#: Exponent above which a transform is reported as infinite.
OVERFLOW_EXP = 700.0


class AccuracyWarning(UserWarning):
    """A tabulated kernel loses significant mass at the table edges."""


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class KernelSpec:
    """A probability density ``J`` on the real line.

    Built-in families have closed-form moments and transforms. The
    ``tabulated`` family stores a density sampled on a uniform grid of
    offsets; it is renormalised with the trapezoid rule on construction and
    interpolated linearly (zero outside the table).
    """

    family: str
    offsets: np.ndarray | None = None
    density: np.ndarray | None = None
    normalization: float = 1.0
    tail_mass_estimate: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterError(f"unknown kernel family {self.family!r}; choose from {FAMILIES}")
        if self.family != "tabulated":
            return
        if self.offsets is None or self.density is None:
            raise ParameterError("tabulated kernel needs offsets and density")
        z = np.asarray(self.offsets, dtype=float)
        p = np.asarray(self.density, dtype=float)
        if z.ndim != 1 or z.shape != p.shape or z.size < 3:
            raise ParameterError("offsets and density must be 1-D arrays of equal length >= 3")
        dz = np.diff(z)
        if np.any(dz <= 0) or np.ptp(dz) > 1e-9 * abs(dz[0]):
            raise ParameterError("tabulated offsets must be uniform and increasing")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ParameterError("tabulated density must be finite and nonnegative")
        mass = float(np.trapezoid(p, z))
        if mass <= 0:
            raise ParameterError("tabulated density has zero mass")
        p = p / mass
        step = float(dz[0])
        edge = 0.5 * step * (p[0] + p[-1])
        if edge > 1e-8:
            warnings.warn(f"tabulated kernel edge mass {edge:.2e} exceeds 1e-8; "
                          "moments and transforms may be inaccurate", AccuracyWarning, stacklevel=3)
        object.__setattr__(self, "offsets", _readonly(z))
        object.__setattr__(self, "density", _readonly(p))
        object.__setattr__(self, "normalization", mass)
        object.__setattr__(self, "tail_mass_estimate", edge)

    # construction helpers -------------------------------------------------
    @classmethod
    def tophat(cls) -> "KernelSpec":
        return cls("tophat")

    @classmethod
    def gaussian(cls) -> "KernelSpec":
        return cls("gaussian")

    @classmethod
    def laplace(cls) -> "KernelSpec":
        return cls("laplace")

    @classmethod
    def tabulated(cls, offsets, density) -> "KernelSpec":
        return cls("tabulated", offsets=np.asarray(offsets, float), density=np.asarray(density, float))

    @classmethod
    def from_csv(cls, path: str | Path) -> "KernelSpec":
        """Load a two-column ``offset,density`` table; a header row is optional."""
        rows = []
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or not row[0].strip():
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except ValueError:
                    if rows:
                        raise ParameterError(f"malformed kernel row {row!r} in {path}")
        z, p = np.array(rows).T
        return cls.tabulated(z, p)

    def describe(self) -> dict:
        out = {"family": self.family}
        if self.family == "tabulated":
            out.update(points=int(self.offsets.size), normalization=self.normalization,
                       support=[float(self.offsets[0]), float(self.offsets[-1])])
        return out

    # densities --------------------------------------------------------------
    def pdf(self, z) -> np.ndarray:
        """Unscaled density J(z)."""
        z = np.asarray(z, dtype=float)
        if self.family == "tophat":
            out = np.where(np.abs(z) < 1.0, 0.5, 0.0)
            return np.where(np.abs(z) == 1.0, 0.25, out)
        if self.family == "gaussian":
            return np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        if self.family == "laplace":
            return 0.5 * np.exp(-np.abs(z))
        return np.interp(z, self.offsets, self.density, left=0.0, right=0.0)

    def support_radius(self) -> float:
        """Radius (unscaled) beyond which the density is neglected."""
        if self.family == "tabulated":
            return float(max(abs(self.offsets[0]), abs(self.offsets[-1])))
        return R_TRUNC[self.family]

    def tail_mass(self, R) -> np.ndarray:
        """Mass of J outside ``[-R, R]`` for ``R >= 0``."""
        R = np.maximum(np.asarray(R, dtype=float), 0.0)
        if self.family == "tophat":
            return np.maximum(1.0 - R, 0.0)
        if self.family == "gaussian":
            return erfc(R / math.sqrt(2.0))
        if self.family == "laplace":
            return np.exp(-R)
        radii, inner = _tabulated_inner_mass(self.offsets, self.density)
        return np.maximum(1.0 - np.interp(R, radii, inner), 0.0)


def _tabulated_inner_mass(z: np.ndarray, p: np.ndarray):
    """Tabulate R -> mass of J on [-R, R] by trapezoid quadrature."""
    radii = np.unique(np.abs(z))
    grid = np.linspace(z[0], z[-1], 16 * z.size + 1)
    dens = np.interp(grid, z, p)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(grid))])
    upper = np.interp(radii, grid, cum)
    lower = np.interp(-radii, grid, cum)
    return radii, upper - lower


def moments(kernel: KernelSpec, order: int) -> float:
    """Absolute moment ``m_i = int |z|^i J(z) dz`` of the unscaled kernel."""
    if order not in (1, 2):
        raise ParameterError("order must be 1 or 2")
    if kernel.family == "tophat":
        return 0.5 if order == 1 else 1.0 / 3.0
    if kernel.family == "gaussian":
        return math.sqrt(2.0 / math.pi) if order == 1 else 1.0
    if kernel.family == "laplace":
        return 1.0 if order == 1 else 2.0
    if kernel.tail_mass_estimate > 1e-8:
        warnings.warn("tabulated kernel tail mass exceeds 1e-8", AccuracyWarning, stacklevel=2)
    z, p = kernel.offsets, kernel.density
    return float(np.trapezoid(np.abs(z) ** order * p, z))


def transform(kernel: KernelSpec, sigma: float, lam):
    """Bilateral transform ``M(sigma*lam) = int J(s) exp(-sigma*lam*s) ds``.

    Vectorised over ``lam``. Values whose exponent exceeds ``OVERFLOW_EXP``
    are returned as ``inf``. The Laplace kernel raises
    :class:`DivergentTransformError` for ``|sigma*lam| >= 1``.
    """
    mu = sigma * np.asarray(lam, dtype=float)
    scalar = mu.ndim == 0
    mu = np.atleast_1d(mu)
    fam = kernel.family
    with np.errstate(over="ignore", invalid="ignore"):
        if fam == "tophat":
            am = np.abs(mu)
            out = np.where(am < 1e-4, 1.0 + mu * mu / 6.0 + mu ** 4 / 120.0,
                           np.sinh(np.minimum(am, OVERFLOW_EXP)) / np.where(am == 0, 1.0, am))
            out = np.where(am > OVERFLOW_EXP, np.inf, out)
        elif fam == "gaussian":
            e = 0.5 * mu * mu
            out = np.where(e > OVERFLOW_EXP, np.inf, np.exp(np.minimum(e, OVERFLOW_EXP)))
        elif fam == "laplace":
            if np.any(np.abs(mu) >= 1.0):
                raise DivergentTransformError(
                    f"laplace transform diverges for |sigma*lambda| >= 1 (got {np.max(np.abs(mu)):.6g})")
            out = 1.0 / (1.0 - mu * mu)
        else:
            z, p = kernel.offsets, kernel.density
            expo = -np.outer(mu, z)
            big = expo.max(axis=1) > OVERFLOW_EXP
            vals = np.trapezoid(np.exp(np.minimum(expo, OVERFLOW_EXP)) * p, z, axis=1)
            out = np.where(big, np.inf, vals)
    return float(out[0]) if scalar else out


def tail_radius(kernel: KernelSpec, epsilon0: float, A: float) -> float:
    """Smallest ``R0`` with ``A * (mass of J outside [-R0, R0]) <= epsilon0``."""
    if epsilon0 <= 0:
        raise ParameterError("epsilon0 must be positive")
    target = epsilon0 / A
    if target >= 1.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while float(kernel.tail_mass(hi)) > target:
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise ParameterError("kernel tail too heavy for the requested epsilon0")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(kernel.tail_mass(mid)) > target:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13:
            break
    return hi


# ---------------------------------------------------------------------------
# grid profiles and discrete convolution


@dataclass(frozen=True)
class GridProfile:
    """Samples ``values[j]`` at ``x0 + j h`` with constant extensions outside."""

    x0: float
    h: float
    values: np.ndarray
    left_ext: float
    right_ext: float

    def __post_init__(self):
        if not self.h > 0:
            raise ParameterError("grid spacing must be positive")
        v = _readonly(self.values)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ParameterError("profile values must be a finite 1-D array")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "left_ext", float(self.left_ext))
        object.__setattr__(self, "right_ext", float(self.right_ext))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.h * np.arange(self.n)

    @property
    def x_end(self) -> float:
        return self.x0 + self.h * (self.n - 1)

    @classmethod
    def sample(cls, func, x0: float, x1: float, h: float, left_ext=None, right_ext=None) -> "GridProfile":
        n = int(round((x1 - x0) / h)) + 1
        x = x0 + h * np.arange(n)
        v = np.asarray(func(x), dtype=float)
        return cls(x0, h, v, v[0] if left_ext is None else left_ext,
                   v[-1] if right_ext is None else right_ext)

    def replace(self, values=None, **kw) -> "GridProfile":
        args = dict(x0=self.x0, h=self.h, values=self.values if values is None else values,
                    left_ext=self.left_ext, right_ext=self.right_ext)
        args.update(kw)
        return GridProfile(**args)

    def __call__(self, xi):
        """Linear interpolation with the constant extensions outside."""
        return np.interp(xi, self.x, self.values, left=self.left_ext, right=self.right_ext)


def kernel_weights(kernel: KernelSpec, sigma: float, h: float) -> tuple[np.ndarray, int]:
    """Discrete weights ``w[k + K] ~ h J_sigma(k h)`` for ``|k| <= K``, summing to one."""
    if not sigma > 0:
        raise ParameterError("sigma must be positive for a nonlocal kernel")
    if not h < 0.5 * sigma:
        raise ResolutionError(
            f"grid spacing h={h:g} does not resolve sigma={sigma:g}; need h < {0.5 * sigma:g}")
    if kernel.family == "tabulated":
        zmin, zmax = float(kernel.offsets[0]), float(kernel.offsets[-1])
        K = int(math.floor(max(-zmin, zmax) * sigma / h + 1e-9))
    else:
        K = int(math.floor(R_TRUNC[kernel.family] * sigma / h + 1e-9))
    k = np.arange(-K, K + 1)
    z = k * h / sigma
    if kernel.family == "tophat":
        # snap offsets that land on the support edge so the half weight applies
        z = np.where(np.isclose(np.abs(z), 1.0, rtol=0, atol=1e-9), np.sign(z), z)
    w = kernel.pdf(z)
    w = w / w.sum()
    return w, K


def convolve_values(values: np.ndarray, left_ext: float, right_ext: float,
                    weights: np.ndarray, K: int) -> np.ndarray:
    """Apply ``sum_k w_k v(x_j - k h)`` with constant extensions.

    Grid values are convolved directly; each extension contributes its
    value times the cumulative weight of the offsets that leave the grid.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    out = np.convolve(v, weights, mode="full")[K:K + n]
    # must mirror the full sum over offsets whose source lies beyond the grid
    cw = np.concatenate([[0.0], np.cumsum(weights)])  # cw[m] = sum_{i<m} w[i]
    j = np.arange(n)
    # source index j - k < 0  <=>  k > j  <=>  weight index i = k + K > j + K
    idx_left = np.clip(j + K + 1, 0, 2 * K + 1)
    left_mass = cw[-1] - cw[idx_left]
    # source index j - k > n - 1  <=>  k < j - n + 1  <=>  i < j - n + 1 + K
    idx_right = np.clip(j - n + 1 + K, 0, 2 * K + 1)
    right_mass = cw[idx_right]
    return out + left_ext * left_mass + right_ext * right_mass


def convolve(profile: GridProfile, kernel: KernelSpec, sigma: float) -> GridProfile:
    """Discrete ``J_sigma * w~`` on the profile's grid.

    ``w~`` is the profile extended by ``left_ext``/``right_ext``. The
    extensions of the result are unchanged since the weights have unit mass.
    """
    w, K = kernel_weights(kernel, sigma, profile.h)
    vals = convolve_values(profile.values, profile.left_ext, profile.right_ext, w, K)
    return profile.replace(values=vals)
