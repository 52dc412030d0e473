"""Core data containers: datasets, quantile requests, interval results."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def _frozen_float_array(values, ndim: int, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """An i.i.d. sample of (covariate vector, response) rows.

    covariates has shape (n, d), responses shape (n,). `normalization`, when
    present, holds the per-column (mean, sd) used to standardize covariates so
    centers and bandwidths can be expressed in normalized units.
    """

    covariates: np.ndarray
    responses: np.ndarray
    x_names: tuple[str, ...] = ()
    y_name: str = "y"
    normalization: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        cov = np.asarray(self.covariates, dtype=float)
        if cov.ndim == 1:
            cov = cov[:, None]
        object.__setattr__(self, "covariates", _frozen_float_array(cov, 2, "covariates"))
        object.__setattr__(self, "responses", _frozen_float_array(self.responses, 1, "responses"))
        if self.covariates.shape[0] != self.responses.shape[0]:
            raise ValueError("covariates and responses must have the same number of rows")
        if self.responses.shape[0] < 1:
            raise ValueError("dataset must contain at least one row")
        if not self.x_names:
            object.__setattr__(
                self, "x_names", tuple(f"x{j}" for j in range(self.covariates.shape[1]))
            )

    @property
    def n(self) -> int:
        return self.responses.shape[0]

    @property
    def dim(self) -> int:
        return self.covariates.shape[1]


@dataclass(frozen=True)
class QuantileSpec:
    """Quantile level and miscoverage split for an interval request.

    alpha is the total miscoverage, alpha1 the share spent on the lower tail;
    the upper tail gets alpha2 = alpha - alpha1.
    """

    p: float
    alpha: float
    alpha1: float

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise ValueError("p must lie in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        if not 0.0 <= self.alpha1 <= self.alpha:
            raise ValueError("alpha1 must lie in [0, alpha]")

    @property
    def alpha2(self) -> float:
        return self.alpha - self.alpha1


@dataclass(frozen=True)
class IntervalResult:
    """A confidence interval with method diagnostics.

    Endpoints are extended reals; only the order-statistic based methods
    (QR, DFQ) may return infinite endpoints.
    """

    lower: float
    upper: float
    method: str
    n_eff: float
    accepted: int | None = None
    p_hat_lo: float | None = None
    p_hat_hi: float | None = None
    sigma_hat: float | None = None

    def __post_init__(self):
        if self.method not in ("WQ", "QR", "DFQ"):
            raise ValueError(f"unknown method tag {self.method!r}")
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("interval endpoints cannot be NaN")
        if self.lower > self.upper:
            raise ValueError("interval endpoints out of order")
        if self.method == "WQ" and not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("WQ intervals must have finite endpoints")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, value: float) -> bool:
        return self.lower <= value <= self.upper
