"""
Seeded samplers for the random network models

Every sampler is a pure function of (parameters, seed). A seed is either an
RngSeed or a plain integer (taken as stream 0 of that master seed); the
replication stream is a Philox generator keyed by hash(master_seed, stream).
"""
import enum
import logging
from dataclasses import dataclass

import numpy as np

from utils.exceptions import GraphError, ModelSpecError
from utils.validators import (
    validate_open_unit,
    validate_positive_int,
    validate_positive_real,
    validate_seed,
)

from .core import Graph

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RngSeed:
    """(master_seed, stream_index) fully determines a replication's output."""
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        validate_seed(self.master_seed)
        if isinstance(self.stream_index, bool) or not isinstance(self.stream_index, int) \
                or self.stream_index < 0:
            raise ModelSpecError(f"stream_index must be a nonnegative integer, got {self.stream_index!r}")

    def sequence(self):
        return np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))

    def generator(self):
        return np.random.Generator(np.random.Philox(self.sequence()))

    @property
    def derived_seed(self):
        """64-bit value identifying the stream, reported in result rows."""
        return int(self.sequence().generate_state(1, dtype=np.uint64)[0])


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, RngSeed):
        return seed.generator()
    return RngSeed(seed).generator()


class ModelVariant(str, enum.Enum):
    URRT = 'urrt'
    LDAG = 'ldag'
    COOPER_FRIEZE = 'cooper-frieze'
    CF_PROCESS = 'cf-process'
    INHOM_ER = 'inhom-er'


@dataclass(frozen=True)
class ModelSpec:
    """
    Which random model to sample and with which parameters.

    URRT(n), LDag(n, l), CooperFrieze(n, c), CooperFriezeProcess(alpha, T),
    InhomER(n, c).
    """
    variant: ModelVariant
    n: int = None
    ell: int = None
    c: float = None
    alpha: float = None
    steps: int = None

    def __post_init__(self):
        try:
            variant = ModelVariant(self.variant)
        except ValueError as exc:
            raise ModelSpecError(f"Unknown model variant {self.variant!r}") from exc
        object.__setattr__(self, 'variant', variant)

        if variant is ModelVariant.CF_PROCESS:
            validate_open_unit(self.alpha, 'alpha')
            validate_positive_int(self.steps, 'steps (T)')
        else:
            validate_positive_int(self.n, 'n')
        if variant is ModelVariant.LDAG:
            validate_positive_int(self.ell, 'l')
        if variant in (ModelVariant.COOPER_FRIEZE, ModelVariant.INHOM_ER):
            object.__setattr__(self, 'c', validate_positive_real(self.c, 'c'))

    @classmethod
    def urrt(cls, n):
        return cls(ModelVariant.URRT, n=n)

    @classmethod
    def ldag(cls, n, ell):
        return cls(ModelVariant.LDAG, n=n, ell=ell)

    @classmethod
    def cooper_frieze(cls, n, c):
        return cls(ModelVariant.COOPER_FRIEZE, n=n, c=c)

    @classmethod
    def cooper_frieze_process(cls, alpha, steps):
        return cls(ModelVariant.CF_PROCESS, alpha=alpha, steps=steps)

    @classmethod
    def inhom_er(cls, n, c):
        return cls(ModelVariant.INHOM_ER, n=n, c=c)

    @property
    def c_alpha(self):
        """2 / (1 - alpha), the edge rate the process approximates."""
        if self.alpha is None:
            raise ModelSpecError("c_alpha is only defined for the Cooper-Frieze process")
        return 2.0 / (1.0 - self.alpha)

    @property
    def domination_rate(self):
        """Rate r such that edge patterns are dominated by min(1, r / (max(i, j) - 1))."""
        if self.variant is ModelVariant.URRT:
            return 1.0
        if self.variant is ModelVariant.LDAG:
            return float(self.ell)
        if self.variant is ModelVariant.COOPER_FRIEZE:
            return self.c + 1.0
        if self.variant is ModelVariant.CF_PROCESS:
            return self.c_alpha + 1.0
        return max(self.c, 1.0)

    @property
    def size_parameter(self):
        return self.steps if self.variant is ModelVariant.CF_PROCESS else self.n

    def sample(self, seed):
        if self.variant is ModelVariant.URRT:
            return gen_urrt(self.n, seed)
        if self.variant is ModelVariant.LDAG:
            return gen_ldag(self.n, self.ell, seed)
        if self.variant is ModelVariant.COOPER_FRIEZE:
            return gen_cooper_frieze(self.n, self.c, seed)
        if self.variant is ModelVariant.CF_PROCESS:
            return gen_cooper_frieze_process(self.alpha, self.steps, seed)
        return gen_inhom_er(self.n, self.c, seed)

    def to_dict(self):
        payload = {'variant': self.variant.value}
        if self.variant is ModelVariant.CF_PROCESS:
            payload.update({'T': self.steps, 'alpha': self.alpha})
            return payload
        payload['n'] = self.n
        if self.variant is ModelVariant.LDAG:
            payload['l'] = self.ell
        if self.variant in (ModelVariant.COOPER_FRIEZE, ModelVariant.INHOM_ER):
            payload['c'] = self.c
        return payload


@dataclass(frozen=True)
class ProcessSample:
    """Outcome of the recursive Cooper-Frieze process."""
    graph: Graph
    tree: Graph
    forced_steps: int
    edge_steps: int


def urrt_parents(n, rng):
    """parents[i] for i in 2..n, uniform on [1, i - 1]; index 0 and 1 unused."""
    parents = np.zeros(n + 1, dtype=np.int64)
    if n >= 2:
        parents[2:] = rng.integers(1, np.arange(2, n + 1))
    return parents


def _urrt_into(g, rng):
    parents = urrt_parents(g.n, rng)
    for i in range(2, g.n + 1):
        g.add_edge(int(parents[i]), i)
    return parents


def gen_urrt(n, seed):
    validate_positive_int(n, 'n')
    g = Graph(n)
    _urrt_into(g, _rng(seed))
    return g.freeze()


def gen_ldag(n, ell, seed):
    """Union of ell independent URRTs on [n], sampled tree by tree."""
    validate_positive_int(n, 'n')
    validate_positive_int(ell, 'l')
    rng = _rng(seed)
    g = Graph(n)
    for _ in range(ell):
        _urrt_into(g, rng)
    return g.freeze()


def _inhom_er_into(g, c, rng):
    """Each pair {i, j} independently with probability min(c / (max(i, j) - 1), 1)."""
    n = g.n
    if n < 2:
        return
    older = np.arange(1, n)  # j - 1 candidate partners for j = 2..n
    probabilities = np.minimum(c / older, 1.0)
    counts = rng.binomial(older, probabilities)
    for j, k in zip(range(2, n + 1), counts):
        if k == 0:
            continue
        if k == j - 1:
            partners = range(1, j)
        else:
            partners = rng.choice(j - 1, size=int(k), replace=False) + 1
        for i in partners:
            g.add_edge(int(i), j)


def gen_inhom_er(n, c, seed):
    validate_positive_int(n, 'n')
    c = validate_positive_real(c, 'c')
    g = Graph(n)
    _inhom_er_into(g, c, _rng(seed))
    return g.freeze()


def gen_cooper_frieze(n, c, seed):
    """One URRT unioned with an independent inhomogeneous ER graph."""
    validate_positive_int(n, 'n')
    c = validate_positive_real(c, 'c')
    rng = _rng(seed)
    g = Graph(n)
    _urrt_into(g, rng)
    _inhom_er_into(g, c, rng)
    return g.freeze()


def sample_cooper_frieze_process(alpha, steps, seed):
    """
    Run the uniform Cooper-Frieze process for `steps` steps from one vertex.

    Z_t ~ Bernoulli(alpha). Z_t = 0 adds a vertex joined to a uniform existing
    vertex; Z_t = 1 joins a uniform unordered pair of distinct vertices. While
    only one vertex exists an edge step is impossible and a vertex step is
    taken instead (counted in forced_steps).
    """
    alpha = validate_open_unit(alpha, 'alpha')
    validate_positive_int(steps, 'steps (T)')
    rng = _rng(seed)

    edge_flags = rng.random(steps) < alpha
    edges = []
    tree_edges = []
    n = 1
    forced = 0
    edge_steps = 0
    for is_edge_step in edge_flags:
        if is_edge_step and n >= 2:
            a = int(rng.integers(0, n))
            b = int(rng.integers(0, n - 1))
            if b >= a:
                b += 1
            edges.append((a + 1, b + 1))
            edge_steps += 1
            continue
        if is_edge_step:
            forced += 1
        parent = int(rng.integers(1, n + 1))
        n += 1
        edges.append((parent, n))
        tree_edges.append((parent, n))

    graph = Graph(n)
    tree = Graph(n)
    for u, v in edges:
        graph.add_edge(u, v)
    for u, v in tree_edges:
        tree.add_edge(u, v)
    if forced:
        logger.debug(f"Cooper-Frieze process forced {forced} vertex step(s) at start-up")
    return ProcessSample(graph.freeze(), tree.freeze(), forced, edge_steps)


def gen_cooper_frieze_process(alpha, steps, seed):
    return sample_cooper_frieze_process(alpha, steps, seed).graph


def pi(i, j, rate):
    """min(1, rate / (max(i, j) - 1))"""
    if i == j:
        raise GraphError(f"pi is undefined on the diagonal (i = j = {i})")
    if i < 1 or j < 1:
        raise GraphError(f"Vertices must be >= 1, got ({i}, {j})")
    if rate <= 0:
        raise ModelSpecError(f"rate must be positive, got {rate}")
    return min(1.0, rate / (max(i, j) - 1))
