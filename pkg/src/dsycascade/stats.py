"""Small statistical helpers used by probes and reports."""

from __future__ import annotations

import math

import numpy as np


def mean_se(values) -> tuple[float, float]:
    """Sample mean and its standard error."""
    x = np.asarray(values, dtype=float)
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    if n == 1:
        return float(x[0]), float("inf")
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(n))


def median_se(values) -> tuple[float, float]:
    """Sample median and a distribution-free standard error.

    The SE is taken from the order statistics at ranks n/2 +- sqrt(n)/2,
    the one-sigma band of the binomial argument for sample quantiles.
    Robust for the heavy-tailed path sums produced by shrinking cascades,
    where the plain sigma/sqrt(n) would be dominated by outliers.
    """
    x = np.sort(np.asarray(values, dtype=float))
    n = x.size
    if n < 4:
        raise ValueError("need at least 4 values for a median SE")
    med = float(np.median(x))
    k = max(1, int(math.sqrt(n) / 2.0))
    lo = x[max(0, n // 2 - k)]
    hi = x[min(n - 1, n // 2 + k)]
    return med, float((hi - lo) / 2.0)


def ratio_of_means_se(num, den) -> tuple[float, float]:
    """Ratio of sample means with its linearization standard error."""
    x = np.asarray(den, dtype=float)
    y = np.asarray(num, dtype=float)
    n = x.size
    mx = x.mean()
    if mx == 0:
        raise ValueError("denominator mean is zero")
    ratio = y.mean() / mx
    resid = y - ratio * x
    return float(ratio), float(math.sqrt(resid.var(ddof=1) / n) / mx)


def wilson_interval(successes: int, trials: int, z: float = 3.0) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)
