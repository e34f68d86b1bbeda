"""
Interval estimates used by the harness and the diagnostics
"""
import math

import numpy as np
from scipy import stats


def wilson_interval(successes, trials, confidence=0.95):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    z = stats.norm.ppf(0.5 + confidence / 2.0)
    z2 = z * z
    phat = successes / trials
    denominator = 1.0 + z2 / trials
    center = (phat + z2 / (2.0 * trials)) / denominator
    half_width = z * math.sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denominator
    return max(0.0, center - half_width), min(1.0, center + half_width)


def proportion_se(p, trials):
    return math.sqrt(max(p * (1.0 - p), 0.0) / trials)


def mean_and_se(values):
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("No values to summarize")
    if values.size == 1:
        return float(values[0]), 0.0
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))
