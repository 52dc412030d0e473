"""Distribution-free quantile confidence intervals from order statistics.

The interval [X_(l), X_(u)] covers the p-th quantile with probability at
least 1 - alpha1 - alpha2 for i.i.d. samples from any distribution, by
bounding the counts of samples below/above the quantile with Binomial(n, p)
tails. Ties are handled through the minimum/maximum order-statistic index
sharing each value; sentinels X_(0) = -inf and X_(n+1) = +inf give one-sided
or trivial intervals when a tail budget is too small.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

from .base import IntervalResult


@dataclass(frozen=True, eq=False)
class TieIndices:
    """Per order statistic, the 1-based first/last index sharing its value."""

    i_min: np.ndarray
    i_max: np.ndarray

    @classmethod
    def from_sorted(cls, values: np.ndarray) -> "TieIndices":
        values = np.asarray(values)
        n = values.shape[0]
        if n < 1:
            raise ValueError("need at least one value")
        if np.any(values[1:] < values[:-1]):
            raise ValueError("values must be sorted ascending")
        # starts[k] is True where a run of equal values begins
        starts = np.ones(n, dtype=bool)
        starts[1:] = values[1:] != values[:-1]
        run_id = np.cumsum(starts) - 1
        first = np.flatnonzero(starts) + 1
        last = np.append(first[1:] - 1, n)
        i_min = first[run_id]
        i_max = last[run_id]
        i_min.flags.writeable = False
        i_max.flags.writeable = False
        return cls(i_min=i_min, i_max=i_max)


@lru_cache(maxsize=4096)
def _binom_tables(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """(cdf, sf) for Binomial(n, p): cdf[k] = P(B <= k), sf[k] = P(B >= k).

    Terms are computed in log space and each tail is accumulated from its own
    small end, so small tail probabilities keep full relative accuracy.
    """
    k = np.arange(n + 1, dtype=float)
    log_pmf = (
        gammaln(n + 1.0)
        - gammaln(k + 1.0)
        - gammaln(n - k + 1.0)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    pmf = np.exp(log_pmf)
    cdf = np.cumsum(pmf)
    sf = np.cumsum(pmf[::-1])[::-1]
    cdf.flags.writeable = False
    sf.flags.writeable = False
    return cdf, sf


def binom_cdf(n: int, p: float, k: int) -> float:
    """P(Binomial(n, p) <= k), accurate to ~1e-15 relative.

    Out-of-range k is clamped: k < 0 gives 0, k >= n gives 1.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if k < 0:
        return 0.0
    if k >= n:
        return 1.0
    cdf, _ = _binom_tables(n, p)
    return min(float(cdf[k]), 1.0)


def quantile_ci_indices(
    n: int, ties: TieIndices, p: float, alpha1: float, alpha2: float
) -> tuple[int, int]:
    """Order-statistic indices (l_hat, u_hat) for the p-th quantile CI.

    l_hat is the largest i in [0, n] with P(B(n,p) < I_{i,max}) <= alpha1,
    u_hat the smallest j in [1, n+1] with P(B(n,p) >= I_{j,min}) <= alpha2,
    where the sentinel indices I_{0,max} = 0 and I_{n+1,min} = n+1 always
    qualify. l_hat = 0 / u_hat = n+1 signal infinite endpoints.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0.0 <= alpha1 < 1.0 and 0.0 <= alpha2 < 1.0):
        raise ValueError("alpha1 and alpha2 must lie in [0, 1)")
    cdf, sf = _binom_tables(n, p)
    # P(B < I_{i,max}) for i = 0..n; the i = 0 sentinel contributes 0
    below = np.concatenate(([0.0], cdf[ties.i_max - 1]))
    l_hat = int(np.flatnonzero(below <= alpha1).max())
    # P(B >= I_{j,min}) for j = 1..n+1; the j = n+1 sentinel contributes 0
    above = np.concatenate((sf[ties.i_min], [0.0]))
    u_hat = int(np.flatnonzero(above <= alpha2).min()) + 1
    return l_hat, u_hat


def df_quantile_ci(ys, p: float, alpha1: float, alpha2: float) -> IntervalResult:
    """Distribution-free CI for the p-th quantile of an i.i.d. sample."""
    ys = np.asarray(ys, dtype=float)
    if ys.ndim != 1 or ys.shape[0] < 1:
        raise ValueError("ys must be a nonempty 1-d array")
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    n = ys.shape[0]
    srt = np.sort(ys)
    ties = TieIndices.from_sorted(srt)
    l_hat, u_hat = quantile_ci_indices(n, ties, p, alpha1, alpha2)
    lower = -math.inf if l_hat == 0 else float(srt[l_hat - 1])
    upper = math.inf if u_hat == n + 1 else float(srt[u_hat - 1])
    return IntervalResult(lower=lower, upper=upper, method="DFQ", n_eff=float(n))
