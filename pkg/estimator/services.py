"""
Root estimation: cycle-length budgets m_eps, confidence-set size bounds K(eps)
and the confidence set S_m of an observed graph.

All logarithms are natural. K(eps) is astronomically large for small eps, so
only ln K is exposed.
"""
import logging
import math
from dataclasses import dataclass, field

from anchors.detection import MIN_CYCLE_LENGTH, compute_anchor_set
from graphs.generators import ModelVariant
from utils.exceptions import EstimationError
from utils.validators import validate_open_unit

logger = logging.getLogger(__name__)

LDAG_EPSILON_CEILING = 0.01
CEIL_SNAP = 1e-9


def _snapped_ceil(value):
    """ceil() that treats values within CEIL_SNAP of an integer as that integer."""
    nearest = round(value)
    if abs(value - nearest) < CEIL_SNAP:
        return int(nearest)
    return math.ceil(value)


def _epsilon(epsilon):
    return validate_open_unit(epsilon, 'epsilon', EstimationError)


def m_epsilon_ldag(ell, epsilon):
    """ceil((30 / l) ln(1 / eps)); the guarantee is stated for eps < 1/100."""
    epsilon = _epsilon(epsilon)
    if ell < 1:
        raise EstimationError(f"l must be >= 1, got {ell}")
    if epsilon >= LDAG_EPSILON_CEILING:
        logger.debug(f"epsilon={epsilon} is outside the guaranteed range (0, {LDAG_EPSILON_CEILING})")
    return _snapped_ceil(30.0 / ell * math.log(1.0 / epsilon))


def m_epsilon_cf(c, epsilon):
    """ceil((9 + 12 / c) ln(1 / eps))"""
    epsilon = _epsilon(epsilon)
    if c <= 0:
        raise EstimationError(f"c must be positive, got {c}")
    return _snapped_ceil((9.0 + 12.0 / c) * math.log(1.0 / epsilon))


def clamp_m(m):
    """Returns (m, clamped); no cycle is shorter than 3."""
    if m < MIN_CYCLE_LENGTH:
        return MIN_CYCLE_LENGTH, True
    return m, False


def log_factorial(k):
    """ln(k!) by exact summation of logarithms."""
    return math.fsum(math.log(i) for i in range(2, k + 1))


def k_bound_log(epsilon, rate, m):
    """ln(8 / eps) + 2m ln(rate) + ln((2m)!)"""
    epsilon = _epsilon(epsilon)
    if rate < 1:
        raise EstimationError(f"rate must be >= 1 for the size bound, got {rate}")
    return math.fsum([math.log(8.0 / epsilon), 2 * m * math.log(rate), log_factorial(2 * m)])


def k_bound_log_ldag(ell, epsilon):
    m, _ = clamp_m(m_epsilon_ldag(ell, epsilon))
    return k_bound_log(epsilon, ell, m)


def k_bound_log_cf(c, epsilon):
    """Factor 8 is twice the 4/eps high-probability bound, as for l-dags."""
    m, _ = clamp_m(m_epsilon_cf(c, epsilon))
    return k_bound_log(epsilon, c + 1.0, m)


def model_m_epsilon(model, epsilon):
    """m_eps for models with a formula, None otherwise."""
    if model.variant is ModelVariant.LDAG:
        return m_epsilon_ldag(model.ell, epsilon)
    if model.variant is ModelVariant.COOPER_FRIEZE:
        return m_epsilon_cf(model.c, epsilon)
    if model.variant is ModelVariant.CF_PROCESS:
        return m_epsilon_cf(model.c_alpha, epsilon)
    return None


def has_m_formula(model):
    return model.variant in (ModelVariant.LDAG, ModelVariant.COOPER_FRIEZE, ModelVariant.CF_PROCESS)


def resolve_m(model, epsilon, m_override=None):
    """Returns (m_used, clamped)."""
    if m_override is not None:
        if isinstance(m_override, bool) or not isinstance(m_override, int) \
                or m_override < MIN_CYCLE_LENGTH:
            raise EstimationError(f"m must be an integer >= {MIN_CYCLE_LENGTH}, got {m_override!r}")
        _epsilon(epsilon)
        return m_override, False
    m_eps = model_m_epsilon(model, epsilon)
    if m_eps is None:
        raise EstimationError(
            f"Model '{model.variant.value}' has no m_eps formula; an explicit m is required"
        )
    m, clamped = clamp_m(m_eps)
    if clamped:
        logger.info(f"m_eps={m_eps} clamped to {m}")
    return m, clamped


def theoretical_k_log(model, epsilon, m):
    """ln K at m using the model's domination rate."""
    return k_bound_log(epsilon, max(model.domination_rate, 1.0), m)


@dataclass(frozen=True)
class ConfidenceSet:
    members: tuple
    m_used: int
    epsilon: float
    model: object
    theoretical_k_log: float
    clamped: bool = False
    epsilon_in_guaranteed_range: bool = True
    witnesses: dict = field(default_factory=dict, compare=False)

    def __contains__(self, v):
        return v in set(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def size_within_bound(self):
        return len(self.members) == 0 or math.log(len(self.members)) <= self.theoretical_k_log


def estimate_root(g, model, epsilon, m_override=None, workers=1, with_witnesses=False):
    """
    Confidence set for the root of g. Reads graph structure only; members are
    exactly S_m for the chosen m.
    """
    epsilon = _epsilon(epsilon)
    m, clamped = resolve_m(model, epsilon, m_override)
    anchor_set = compute_anchor_set(g, m, workers=workers, with_witnesses=with_witnesses)
    if not anchor_set.members:
        logger.info(f"S_{m} is empty for a graph with n={g.n}; no root candidates")

    in_range = True
    if model.variant is ModelVariant.LDAG:
        in_range = epsilon < LDAG_EPSILON_CEILING
    return ConfidenceSet(
        members=anchor_set.members,
        m_used=m,
        epsilon=epsilon,
        model=model,
        theoretical_k_log=theoretical_k_log(model, epsilon, m),
        clamped=clamped,
        epsilon_in_guaranteed_range=in_range,
        witnesses=anchor_set.witnesses,
    )


def expected_xk(k):
    """E[X_k] = sum_{i=2}^k (1/(i-1)) (1 - 1/(i-1))"""
    return math.fsum((1.0 / (i - 1)) * (1.0 - 1.0 / (i - 1)) for i in range(2, k + 1))


def xk_tail_lower_bound(k):
    """Lower-tail bound 1 - exp(-(E - 1)^2 / (2E)) on P{X_k >= 2}; meaningful when E > 1."""
    mean = expected_xk(k)
    if mean <= 1:
        return 0.0
    return 1.0 - math.exp(-((mean - 1.0) ** 2) / (2.0 * mean))


def k_epsilon(epsilon):
    """ceil(16 e^5 / eps^2)"""
    epsilon = _epsilon(epsilon)
    return _snapped_ceil(16.0 * math.exp(5) / epsilon ** 2)


def height_bound(k, epsilon):
    """e ln k + e ln(4e / eps)"""
    epsilon = _epsilon(epsilon)
    return math.e * math.log(k) + math.e * math.log(4.0 * math.e / epsilon)
