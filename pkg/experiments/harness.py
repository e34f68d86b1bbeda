"""
Seeded Monte Carlo harness for root containment

Replication i of an experiment samples its graph from stream RngSeed(master_seed, i)
so results do not depend on how replications are spread over workers.
"""
import logging
import math
import multiprocessing
import time
from collections import Counter
from dataclasses import dataclass, field

from anchors.detection import anchor_levels, anchor_set_from_levels, compute_anchor_set
from anchors.exponents import check_exponent_lemmas, exponent_profile
from anchors.oracle import brute_force_anchor_set
from estimator.services import has_m_formula, resolve_m, theoretical_k_log
from graphs.generators import RngSeed
from utils.exceptions import ModelSpecError, ResourceGuardError

from .diagnostics import DiagnosticReport
from .statistics import wilson_interval

logger = logging.getLogger(__name__)

CSV_COLUMNS = ['rep', 'seed', 'n', 'm', 'contained', 'set_size', 'ms']


@dataclass(frozen=True)
class ExperimentConfig:
    model: object
    epsilon: float
    m: object = 'auto'
    replications: int = 1
    master_seed: int = 0
    se_mult: float = 3.0
    oracle_max_n: int = 0
    max_vertices: int = 200000
    max_steps: int = 400000
    record_timing: bool = False
    m_sweep: tuple = ()
    output_dir: str = None

    def __post_init__(self):
        if self.replications < 1:
            raise ModelSpecError(f"replications must be >= 1, got {self.replications}")
        if self.m == 'auto' and not has_m_formula(self.model):
            raise ModelSpecError(
                f"m='auto' needs a model with an m_eps formula, not '{self.model.variant.value}'"
            )

    def resolve_m(self):
        return resolve_m(self.model, self.epsilon, None if self.m == 'auto' else self.m)

    def to_dict(self):
        """Everything that determines the output; workers and output_dir excluded."""
        return {
            'model': self.model.to_dict(),
            'epsilon': self.epsilon,
            'm': self.m,
            'replications': self.replications,
            'master_seed': self.master_seed,
            'tolerances': {'se_mult': self.se_mult},
            'guards': {'oracle_max_n': self.oracle_max_n, 'max_vertices': self.max_vertices},
            'record_timing': self.record_timing,
            'm_sweep': list(self.m_sweep),
        }


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    m: int
    clamped: bool
    containment_rate: float
    wilson_ci: tuple
    size_stats: dict
    rows: list
    theoretical_k_log: float
    size_bound_rate: float
    oracle_checked: int = 0
    oracle_mismatches: int = 0

    @property
    def replications(self):
        return len(self.rows)


@dataclass
class SweepResult:
    config: ExperimentConfig
    results: dict
    subset_violations: int
    containment_monotone: bool = field(default=True)


def check_guards(config):
    model = config.model
    if model.steps is not None and model.steps > config.max_steps:
        raise ResourceGuardError(f"T={model.steps} exceeds the guard of {config.max_steps} steps")
    if model.n is not None and model.n > config.max_vertices:
        raise ResourceGuardError(f"n={model.n} exceeds the guard of {config.max_vertices} vertices")


def run_parallel(func, tasks, workers=1):
    """Ordered map over tasks, in-process or on a fork-context pool."""
    if workers <= 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    context = multiprocessing.get_context('fork')
    chunksize = max(1, len(tasks) // (workers * 4))
    with context.Pool(workers) as pool:
        return pool.map(func, tasks, chunksize=chunksize)


def _replicate(task):
    model, master_seed, rep, m, oracle_max_n, record_timing = task
    seed = RngSeed(master_seed, rep)
    started = time.perf_counter()
    g = model.sample(seed)
    anchor_set = compute_anchor_set(g, m)
    elapsed_ms = (time.perf_counter() - started) * 1000.0

    oracle_mismatch = None
    if oracle_max_n and g.n <= oracle_max_n:
        oracle = brute_force_anchor_set(g, m, max_vertices=oracle_max_n, max_m=m)
        oracle_mismatch = oracle.members != anchor_set.members

    return {
        'rep': rep,
        'seed': seed.derived_seed,
        'n': g.n,
        'm': m,
        'contained': int(1 in anchor_set),
        'set_size': len(anchor_set),
        'ms': int(round(elapsed_ms)) if record_timing else 0,
        'oracle_mismatch': oracle_mismatch,
    }


def summarize(config, m, clamped, rows):
    trials = len(rows)
    contained = sum(row['contained'] for row in rows)
    sizes = [row['set_size'] for row in rows]
    k_log = theoretical_k_log(config.model, config.epsilon, m)
    within_bound = sum(1 for size in sizes if size == 0 or math.log(size) <= k_log)
    checked = [row['oracle_mismatch'] for row in rows if row.get('oracle_mismatch') is not None]

    return ExperimentResult(
        config=config,
        m=m,
        clamped=clamped,
        containment_rate=contained / trials,
        wilson_ci=wilson_interval(contained, trials),
        size_stats={
            'min': min(sizes),
            'mean': sum(sizes) / trials,
            'max': max(sizes),
            'histogram': {str(size): count for size, count in sorted(Counter(sizes).items())},
        },
        rows=[{column: row[column] for column in CSV_COLUMNS} for row in rows],
        theoretical_k_log=k_log,
        size_bound_rate=within_bound / trials,
        oracle_checked=len(checked),
        oracle_mismatches=sum(1 for mismatch in checked if mismatch),
    )


def run_containment(config, workers=1):
    """Fraction of replications with the root in S_m, plus |S_m| statistics."""
    check_guards(config)
    m, clamped = config.resolve_m()
    logger.info(
        f"Containment run: model={config.model.variant.value} m={m} "
        f"replications={config.replications} workers={workers}"
    )
    tasks = [
        (config.model, config.master_seed, rep, m, config.oracle_max_n, config.record_timing)
        for rep in range(config.replications)
    ]
    rows = run_parallel(_replicate, tasks, workers)
    result = summarize(config, m, clamped, rows)
    if result.oracle_mismatches:
        logger.error(f"Detector disagreed with the oracle in {result.oracle_mismatches} replication(s)")
    logger.info(f"Containment rate {result.containment_rate:.4f} at m={m}")
    return result


def _replicate_levels(task):
    model, master_seed, rep, m_values, record_timing = task
    seed = RngSeed(master_seed, rep)
    started = time.perf_counter()
    g = model.sample(seed)
    levels = anchor_levels(g, max(m_values))
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    sets = {m: anchor_set_from_levels(levels, m) for m in m_values}
    return {
        'rep': rep,
        'seed': seed.derived_seed,
        'n': g.n,
        'ms': int(round(elapsed_ms)) if record_timing else 0,
        'sets': {m: anchor_set.members for m, anchor_set in sets.items()},
    }


def run_containment_sweep(config, m_values=None, workers=1):
    """
    Paired-seed sweep: every replication's graph is shared by all m values, so
    S_m is checked to be a subset of S_m' replication by replication.
    """
    check_guards(config)
    m_values = sorted(set(m_values or config.m_sweep))
    if not m_values:
        raise ModelSpecError("A sweep needs at least one m value")
    if m_values[0] < 3:
        raise ModelSpecError(f"Sweep values must be >= 3, got {m_values[0]}")

    tasks = [
        (config.model, config.master_seed, rep, tuple(m_values), config.record_timing)
        for rep in range(config.replications)
    ]
    outcomes = run_parallel(_replicate_levels, tasks, workers)

    subset_violations = 0
    for outcome in outcomes:
        for smaller, larger in zip(m_values, m_values[1:]):
            if not set(outcome['sets'][smaller]) <= set(outcome['sets'][larger]):
                subset_violations += 1

    results = {}
    for m in m_values:
        rows = [
            {
                'rep': outcome['rep'],
                'seed': outcome['seed'],
                'n': outcome['n'],
                'm': m,
                'contained': int(1 in outcome['sets'][m]),
                'set_size': len(outcome['sets'][m]),
                'ms': outcome['ms'],
            }
            for outcome in outcomes
        ]
        results[m] = summarize(config, m, False, rows)

    rates = [results[m].containment_rate for m in m_values]
    monotone = all(a <= b for a, b in zip(rates, rates[1:]))
    if subset_violations:
        logger.error(f"{subset_violations} nested-set violations in the sweep")
    return SweepResult(config, results, subset_violations, monotone)


def _audit_replication(task):
    model, master_seed, rep, m = task
    g = model.sample(RngSeed(master_seed, rep))
    anchor_set = compute_anchor_set(g, m, with_witnesses=True)
    profiles = failures = 0
    for witness in anchor_set.witnesses.values():
        for anchor in witness.anchors:
            profiles += 1
            if not check_exponent_lemmas(exponent_profile(witness, anchor)):
                failures += 1
    return len(anchor_set.witnesses), profiles, failures


def run_lemma_audit(model, m, replications, master_seed, workers=1):
    """Check the exponent lemmas on every witness found over the replications."""
    tasks = [(model, master_seed, rep, m) for rep in range(replications)]
    totals = run_parallel(_audit_replication, tasks, workers)
    witnesses = sum(total[0] for total in totals)
    profiles = sum(total[1] for total in totals)
    failures = sum(total[2] for total in totals)
    if failures:
        logger.error(f"Exponent lemma failed on {failures} of {profiles} profiles")
    return DiagnosticReport(
        check='lemmas',
        sample_size=profiles,
        statistic=float(failures),
        target=(0.0, 0.0),
        standard_error=0.0,
        se_mult=0.0,
        passed=failures == 0,
        parameters={'model': model.to_dict(), 'm': m, 'replications': replications,
                    'seed': master_seed},
        details={'witnesses': witnesses, 'profiles': profiles, 'failures': failures},
    )
