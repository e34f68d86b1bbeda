"""
Statistical checks of the side claims behind the estimator

Each check simulates, computes one statistic and decides pass/fail by a fixed
rule, comparing the statistic and its se_mult standard-error band with a
theoretical target. Simulations run in batches, batch b drawing from
stream RngSeed(seed, b), so a report depends only on its parameters.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from estimator.services import expected_xk, height_bound, k_epsilon
from graphs.generators import ModelSpec, RngSeed, pi
from utils.exceptions import ModelSpecError
from utils.validators import validate_open_unit, validate_positive_int

from .statistics import mean_and_se, proportion_se

logger = logging.getLogger(__name__)

BATCH_SIZE = 10000
# Cells per batch for the wide X_k simulations
BATCH_CELLS = 5_000_000


@dataclass
class DiagnosticReport:
    check: str
    sample_size: int
    statistic: float
    target: tuple
    standard_error: float
    se_mult: float
    passed: bool
    parameters: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def lower_bound(self):
        return self.statistic - self.se_mult * self.standard_error

    @property
    def upper_bound(self):
        return self.statistic + self.se_mult * self.standard_error


def _se_mult(value, key='SE_MULT'):
    if value is None:
        return float(settings.ARCHAEOLOGY[key])
    if value < 0:
        raise ModelSpecError(f"se_mult must be nonnegative, got {value}")
    return float(value)


def _batches(replications, seed, size=BATCH_SIZE):
    """Yields (rng, batch_size) covering `replications` draws."""
    validate_positive_int(replications, 'replications')
    index = 0
    remaining = replications
    while remaining > 0:
        batch = min(size, remaining)
        yield RngSeed(seed, index).generator(), batch
        remaining -= batch
        index += 1


def urrt_parent_matrix(rng, batch, k):
    """batch x (k - 1) parents; column j holds the parent of vertex j + 2."""
    if k < 2:
        return np.zeros((batch, 0), dtype=np.int64)
    return rng.integers(1, np.arange(2, k + 1), size=(batch, k - 1))


def normalize_pattern(pattern, n):
    """Sorted (i, j) pairs with i < j; rejects self-pairs, repeats and out-of-range vertices."""
    pairs = []
    for pair in pattern:
        a, b = (int(x) for x in pair)
        if a == b:
            raise ModelSpecError(f"Self-pair ({a}, {b}) in edge pattern")
        if not (1 <= a <= n and 1 <= b <= n):
            raise ModelSpecError(f"Pair ({a}, {b}) lies outside [1, {n}]")
        pairs.append((min(a, b), max(a, b)))
    if len(set(pairs)) != len(pairs):
        raise ModelSpecError(f"Edge pattern has repeated pairs: {pairs}")
    return sorted(pairs)


def _domination_report(hits, trials, pairs, rate, se_mult, parameters):
    frequency = hits / trials
    bound = math.prod(pi(a, b, rate) for a, b in pairs)
    se = proportion_se(frequency, trials)
    slack = se_mult * se
    upper = frequency + slack
    passed = upper <= bound + slack
    if not passed:
        logger.warning(f"Domination failed: frequency {frequency:.5f} vs product {bound:.5f}")
    return DiagnosticReport(
        check='domination',
        sample_size=trials,
        statistic=frequency,
        target=(0.0, bound),
        standard_error=se,
        se_mult=se_mult,
        passed=passed,
        parameters=parameters,
        details={
            'pattern': [list(pair) for pair in pairs],
            'product_pi': bound,
            'upper_bound': upper,
            'hits': hits,
        },
    )


def check_domination(ell, n, edge_pattern, replications, seed, se_mult=None):
    """
    Joint presence of a fixed edge pattern in the l-dag against the product of
    pi(a, b) = min(1, l / (max(a, b) - 1)). One-sided: passes when the upper
    bound frequency + se_mult * SE stays within the product plus the same slack.
    """
    validate_positive_int(ell, 'l')
    validate_positive_int(n, 'n')
    pairs = normalize_pattern(edge_pattern, n)
    se_mult = _se_mult(se_mult)

    hits = 0
    for rng, batch in _batches(replications, seed):
        present = np.ones(batch, dtype=bool)
        trees = [urrt_parent_matrix(rng, batch, n) for _ in range(ell)]
        for a, b in pairs:
            edge = np.zeros(batch, dtype=bool)
            for parents in trees:
                edge |= parents[:, b - 2] == a
            present &= edge
        hits += int(present.sum())

    return _domination_report(
        hits, replications, pairs, float(ell), se_mult,
        {'model': ModelSpec.ldag(n, ell).to_dict(), 'replications': replications, 'seed': seed},
    )


def check_model_domination(model, edge_pattern, replications, seed, se_mult=None):
    """check_domination for any sampled model, at the model's domination rate."""
    if model.n is None:
        raise ModelSpecError("Domination needs a model with a fixed vertex count")
    pairs = normalize_pattern(edge_pattern, model.n)
    se_mult = _se_mult(se_mult)
    validate_positive_int(replications, 'replications')

    hits = 0
    for rep in range(replications):
        g = model.sample(RngSeed(seed, rep))
        if all(g.has_edge(a, b) for a, b in pairs):
            hits += 1

    return _domination_report(
        hits, replications, pairs, model.domination_rate, se_mult,
        {'model': model.to_dict(), 'replications': replications, 'seed': seed},
    )


def check_edge_marginal(n, i, replications, seed, se_mult=None):
    """Frequency of the edge {1, i} in a URRT on [n] against 1 / (i - 1), two-sided."""
    validate_positive_int(n, 'n')
    if isinstance(i, bool) or not isinstance(i, int) or not 2 <= i <= n:
        raise ModelSpecError(f"i must satisfy 2 <= i <= n={n}, got {i!r}")
    se_mult = _se_mult(se_mult, 'MARGINAL_SE_MULT')

    hits = 0
    for rng, batch in _batches(replications, seed):
        parents = urrt_parent_matrix(rng, batch, i)
        hits += int((parents[:, i - 2] == 1).sum())

    target = 1.0 / (i - 1)
    frequency = hits / replications
    se = proportion_se(target, replications)
    passed = abs(frequency - target) <= se_mult * se
    return DiagnosticReport(
        check='edge-marginal',
        sample_size=replications,
        statistic=frequency,
        target=(target, target),
        standard_error=se,
        se_mult=se_mult,
        passed=passed,
        parameters={'n': n, 'i': i, 'replications': replications, 'seed': seed},
        details={'hits': hits},
    )


def simulate_xk(k, replications, seed):
    """
    X_k over independent URRT pairs (T1, T2) on [k]: the number of i with the
    edge {1, i} in T2 but not in T1.
    """
    batch_size = max(1, min(BATCH_SIZE, BATCH_CELLS // max(k, 1)))
    values = []
    for rng, batch in _batches(replications, seed, batch_size):
        first = urrt_parent_matrix(rng, batch, k)
        second = urrt_parent_matrix(rng, batch, k)
        values.append(((second == 1) & (first != 1)).sum(axis=1))
    return np.concatenate(values)


def check_xk_bracket(k, replications, seed, se_mult=None):
    """Mean of X_k inside [ln k - 2, ln k - 1] widened by se_mult standard errors."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 3:
        raise ModelSpecError(f"k must be an integer >= 3, got {k!r}")
    se_mult = _se_mult(se_mult)

    values = simulate_xk(k, replications, seed)
    mean, se = mean_and_se(values)
    low, high = math.log(k) - 2.0, math.log(k) - 1.0
    passed = low - se_mult * se <= mean <= high + se_mult * se
    return DiagnosticReport(
        check='xk',
        sample_size=replications,
        statistic=mean,
        target=(low, high),
        standard_error=se,
        se_mult=se_mult,
        passed=passed,
        parameters={'k': k, 'replications': replications, 'seed': seed},
        details={
            'expected': expected_xk(k),
            'min': int(values.min()),
            'max': int(values.max()),
            'at_least_two': float((values >= 2).mean()),
        },
    )


def check_xk_tail(epsilon, replications, seed, se_mult=None, k=None):
    """P{X_k >= 2} at k = k_eps against 1 - eps / 4, one-sided."""
    epsilon = validate_open_unit(epsilon, 'epsilon')
    se_mult = _se_mult(se_mult)
    if k is None:
        k = k_epsilon(epsilon)

    values = simulate_xk(k, replications, seed)
    frequency = float((values >= 2).mean())
    se = proportion_se(frequency, replications)
    target = 1.0 - epsilon / 4.0
    passed = frequency >= target - se_mult * se
    return DiagnosticReport(
        check='xk-tail',
        sample_size=replications,
        statistic=frequency,
        target=(target, 1.0),
        standard_error=se,
        se_mult=se_mult,
        passed=passed,
        parameters={'epsilon': epsilon, 'k': k, 'replications': replications, 'seed': seed},
        details={'expected': expected_xk(k)},
    )


def urrt_heights(parents):
    """Depth of the deepest vertex below vertex 1, for each row of a parent matrix."""
    batch, width = parents.shape
    depth = np.zeros((batch, width + 2), dtype=np.int64)
    rows = np.arange(batch)
    for column in range(width):
        vertex = column + 2
        depth[:, vertex] = depth[rows, parents[:, column]] + 1
    return depth.max(axis=1)


def check_tree_height(k, epsilon, replications, seed, se_mult=None):
    """Fraction of URRTs on [k] with height <= e ln k + e ln(4e / eps), one-sided."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2:
        raise ModelSpecError(f"k must be an integer >= 2, got {k!r}")
    epsilon = validate_open_unit(epsilon, 'epsilon')
    se_mult = _se_mult(se_mult)
    bound = height_bound(k, epsilon)

    within = 0
    tallest = 0
    shortest = None
    for rng, batch in _batches(replications, seed, max(1, min(BATCH_SIZE, BATCH_CELLS // k))):
        heights = urrt_heights(urrt_parent_matrix(rng, batch, k))
        within += int((heights <= bound).sum())
        tallest = max(tallest, int(heights.max()))
        lowest = int(heights.min())
        shortest = lowest if shortest is None else min(shortest, lowest)

    frequency = within / replications
    se = proportion_se(frequency, replications)
    target = 1.0 - epsilon / 4.0
    return DiagnosticReport(
        check='height',
        sample_size=replications,
        statistic=frequency,
        target=(target, 1.0),
        standard_error=se,
        se_mult=se_mult,
        passed=frequency >= target - se_mult * se,
        parameters={'k': k, 'epsilon': epsilon, 'replications': replications, 'seed': seed},
        details={'height_bound': bound, 'min_height': shortest, 'max_height': tallest},
    )
