"""Quantile Rejection confidence interval.

Rejection sampling thins the data to i.i.d. draws from the localized
distribution: row i is kept when U_i <= w_i with w_i the kernel weight
scaled by the kernel maximum. The order-statistic CI applied to the kept
responses is then valid in finite samples for every n and every underlying
distribution. An empty acceptance yields the trivial interval, never an
error.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Dataset, IntervalResult, QuantileSpec
from .kernels import LocalizationSpec, localization_weights
from .orderstat import df_quantile_ci
from .rng import RngStream
from .weighted import effective_sample_size


def rejection_sample(data: Dataset, spec: LocalizationSpec, rng: RngStream) -> np.ndarray:
    """Indices of rows accepted as i.i.d. draws from the localized law.

    One uniform is consumed per row in row order, including zero-weight
    rows, so the accepted set is invariant to any weight-pruning shortcut.
    """
    ws = localization_weights(data, spec)
    w = ws.weights / spec.kernel_max
    u = rng.uniforms(data.n)
    return np.flatnonzero(u <= w)


def qr_interval(
    data: Dataset, spec: LocalizationSpec, q: QuantileSpec, rng: RngStream
) -> IntervalResult:
    """Quantile Rejection confidence interval for the local p-th quantile.

    Valid for every sample size; degenerate inputs (no weight, no accepted
    rows) produce the whole real line rather than an error.
    """
    ws = localization_weights(data, spec)
    accepted = rejection_sample(data, spec, rng)
    n_eff = effective_sample_size(ws) if ws.weight_sum > 0.0 else 0.0
    if accepted.size == 0:
        return IntervalResult(
            lower=-math.inf, upper=math.inf, method="QR", n_eff=n_eff, accepted=0
        )
    sub = df_quantile_ci(data.responses[accepted], q.p, q.alpha1, q.alpha2)
    return IntervalResult(
        lower=sub.lower,
        upper=sub.upper,
        method="QR",
        n_eff=n_eff,
        accepted=int(accepted.size),
    )
