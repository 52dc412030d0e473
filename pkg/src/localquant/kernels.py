"""Localization kernels and per-sample weights.

Each kernel is a bounded symmetric density on the real line; multivariate
localization uses the product of 1-d kernels with per-dimension bandwidths,
so the maximum of the product kernel stays exactly computable.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .base import Dataset
from .errors import DimensionMismatch
from .weighted import WeightedSample

# weights below this are flushed to exactly zero to keep subnormal noise
# out of weight sums
_WEIGHT_FLOOR = 1e-300

# truncation radius for the gaussian kernel; keeps the maximum finite so
# rejection sampling stays valid
_GAUSS_RADIUS = 5.0
_GAUSS_NORM = 2.0 * ndtr(_GAUSS_RADIUS) - 1.0
_GAUSS_PEAK = 1.0 / math.sqrt(2.0 * math.pi) / _GAUSS_NORM


class Kernel(enum.Enum):
    """Supported 1-d kernel families; all integrate to 1."""

    TRIANGULAR = "triangular"
    BIWEIGHT = "biweight"
    UNIFORM = "uniform"
    GAUSSIAN = "gaussian"  # truncated at |u| <= 5 and renormalized

    @classmethod
    def from_name(cls, name: str) -> "Kernel":
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValueError(f"unknown kernel {name!r}; expected one of: {valid}") from None

    @property
    def max_value(self) -> float:
        """sup_u K(u), attained at u = 0."""
        return {
            Kernel.TRIANGULAR: 1.0,
            Kernel.BIWEIGHT: 15.0 / 16.0,
            Kernel.UNIFORM: 0.5,
            Kernel.GAUSSIAN: _GAUSS_PEAK,
        }[self]

    @property
    def support_radius(self) -> float:
        """Half-width of the support of K."""
        return _GAUSS_RADIUS if self is Kernel.GAUSSIAN else 1.0

    def evaluate(self, u):
        """K(u), elementwise; zero outside the support."""
        u = np.asarray(u, dtype=float)
        au = np.abs(u)
        if self is Kernel.TRIANGULAR:
            out = np.maximum(0.0, 1.0 - au)
        elif self is Kernel.BIWEIGHT:
            out = (15.0 / 16.0) * np.maximum(0.0, 1.0 - u * u) ** 2
        elif self is Kernel.UNIFORM:
            out = np.where(au <= 1.0, 0.5, 0.0)
        else:
            out = np.where(
                au <= _GAUSS_RADIUS,
                np.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi) / _GAUSS_NORM,
                0.0,
            )
        return float(out) if out.ndim == 0 else out


def kernel_eval(kernel: Kernel, u):
    """Evaluate the kernel at scaled distance u."""
    return kernel.evaluate(u)


def kernel_max(kernel: Kernel) -> float:
    """Maximum of the 1-d kernel."""
    return kernel.max_value


@dataclass(frozen=True, eq=False)
class LocalizationSpec:
    """Kernel family, center point, and per-dimension bandwidths.

    Defines the covariate reweighting: sample i receives weight
    prod_j K((center_j - X_ij) / bandwidths_j).
    """

    kernel: Kernel
    center: np.ndarray
    bandwidths: np.ndarray

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float)).copy()
        bw = np.atleast_1d(np.asarray(self.bandwidths, dtype=float)).copy()
        if center.ndim != 1 or bw.ndim != 1:
            raise ValueError("center and bandwidths must be 1-d")
        if center.shape != bw.shape:
            raise ValueError("center and bandwidths must have equal length")
        if center.size < 1:
            raise ValueError("at least one dimension is required")
        if not np.all(np.isfinite(center)):
            raise ValueError("center must be finite")
        if not np.all(np.isfinite(bw)) or np.any(bw <= 0.0):
            raise ValueError("bandwidths must be strictly positive")
        center.flags.writeable = False
        bw.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "bandwidths", bw)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    @property
    def kernel_max(self) -> float:
        """Maximum of the product kernel: product of per-dimension maxima."""
        return self.kernel.max_value ** self.dim


def localization_weights(data: Dataset, spec: LocalizationSpec) -> WeightedSample:
    """Attach kernel weights to every row of `data`.

    Row order is preserved and responses are copied unchanged; rows outside
    the kernel support get weight exactly 0 and are retained so indices stay
    aligned with the input.
    """
    if data.dim != spec.dim:
        raise DimensionMismatch(
            f"dataset has {data.dim} covariate(s) but the localization spec has {spec.dim}"
        )
    u = (spec.center[None, :] - data.covariates) / spec.bandwidths[None, :]
    weights = np.prod(spec.kernel.evaluate(u), axis=1)
    weights[weights < _WEIGHT_FLOOR] = 0.0
    return WeightedSample(responses=data.responses, weights=weights)
