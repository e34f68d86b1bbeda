"""
Double-cycle detection and the anchor set S_m

A double cycle is a pair of cycles of lengths s <= t whose intersection (as
subgraphs) is a single path of p vertices, 1 <= p <= floor(s / 2). The
endpoints of that path are its anchors. S_m holds every vertex that anchors
a double cycle with s, t <= m.

Search per vertex v is iterative deepening on the cycle length: all cycles
through v of length exactly L are enumerated by a bounded DFS (pruned by
BFS distance to v inside the 2-core), and after each level the new cycles
are paired with the shorter ones. The first level producing a pair gives the
least witness under (max(s,t), min(s,t), canonical vertex sequence).
"""
import logging
import multiprocessing
from collections import deque
from dataclasses import dataclass, field

from utils.exceptions import AnchorSearchError, GraphError

logger = logging.getLogger(__name__)

MIN_CYCLE_LENGTH = 3


def canonical_cycle(sequence):
    """Rotation/reflection of a cyclic vertex sequence that is lexicographically least."""
    sequence = tuple(sequence)
    start = sequence.index(min(sequence))
    forward = sequence[start:] + sequence[:start]
    backward = (forward[0],) + tuple(reversed(forward[1:]))
    return min(forward, backward)


def cycle_edges(sequence):
    """Edges of a cyclic sequence as (min, max) pairs."""
    size = len(sequence)
    return frozenset(
        (a, b) if a < b else (b, a)
        for a, b in ((sequence[i], sequence[(i + 1) % size]) for i in range(size))
    )


def path_edges(sequence):
    return frozenset(
        (a, b) if a < b else (b, a) for a, b in zip(sequence, sequence[1:])
    )


@dataclass(frozen=True)
class DoubleCycleWitness:
    """
    One concrete double cycle. cycle_a is the shorter cycle (s <= t); both
    cycles are stored in canonical form. shared_path starts at the anchor the
    witness was searched for.
    """
    cycle_a: tuple
    cycle_b: tuple
    shared_path: tuple
    anchors: tuple

    @property
    def s(self):
        return len(self.cycle_a)

    @property
    def t(self):
        return len(self.cycle_b)

    @property
    def p(self):
        return len(self.shared_path)

    @property
    def size(self):
        return (self.s, self.t)

    def vertices(self):
        return frozenset(self.cycle_a) | frozenset(self.cycle_b)

    def edges(self):
        return cycle_edges(self.cycle_a) | cycle_edges(self.cycle_b)

    def sort_key(self):
        return (max(self.s, self.t), min(self.s, self.t), self.cycle_a + self.cycle_b)

    def relabeled(self, perm):
        return DoubleCycleWitness(
            cycle_a=canonical_cycle(perm(v) for v in self.cycle_a),
            cycle_b=canonical_cycle(perm(v) for v in self.cycle_b),
            shared_path=tuple(perm(v) for v in self.shared_path),
            anchors=tuple(sorted(perm(v) for v in self.anchors)),
        )

    def to_dict(self):
        return {
            'anchors': list(self.anchors),
            's': self.s,
            't': self.t,
            'p': self.p,
            'cycle_a': list(self.cycle_a),
            'cycle_b': list(self.cycle_b),
            'shared_path': list(self.shared_path),
        }


@dataclass(frozen=True)
class AnchorSet:
    """S_m: members sorted ascending, optional witness per member."""
    m: int
    members: tuple
    witnesses: dict = field(default_factory=dict, compare=False)

    def __contains__(self, v):
        return v in self._member_set

    @property
    def _member_set(self):
        return frozenset(self.members)

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class _Cycle:
    sequence: tuple
    vertices: frozenset
    canon: tuple

    @property
    def ends(self):
        return (self.sequence[1], self.sequence[-1])


def _run_from_anchor(sequence, common):
    """The common vertices as a contiguous run starting at sequence[0], or None."""
    p = len(common)
    forward = sequence[:p]
    if set(forward) == common:
        return forward
    backward = (sequence[0],) + tuple(reversed(sequence[len(sequence) - p + 1:]))
    if set(backward) == common:
        return backward
    return None


def shared_path_between(first, second):
    """
    Shared path of two cycles through the same anchor (sequence[0]) when the
    pair is a double cycle anchored there, else None.
    """
    common = first.vertices & second.vertices
    p = len(common)
    if p > min(len(first.sequence), len(second.sequence)) // 2:
        return None
    shared_ends = len(set(first.ends) & set(second.ends))
    if shared_ends == 0:
        return first.sequence[:1] if p == 1 else None
    if shared_ends == 2:
        return None
    run = _run_from_anchor(first.sequence, common)
    if run is None or run != _run_from_anchor(second.sequence, common):
        return None
    return run


class AnchorSearch:
    """
    Bounded cycle enumeration around single vertices of one frozen graph.
    """

    def __init__(self, g, m_max, core=None):
        if isinstance(m_max, bool) or not isinstance(m_max, int) or m_max < MIN_CYCLE_LENGTH:
            raise AnchorSearchError(
                f"m must be an integer >= {MIN_CYCLE_LENGTH} (no shorter cycle exists), got {m_max!r}"
            )
        self.g = g
        self.m_max = m_max
        self.core = g.two_core() if core is None else core

    def core_degree(self, v):
        return sum(1 for w in self.g.neighbors(v) if w in self.core)

    def distances(self, v, radius):
        """BFS distances from v inside the 2-core, up to radius."""
        dist = {v: 0}
        queue = deque([v])
        while queue:
            u = queue.popleft()
            if dist[u] == radius:
                continue
            for w in self.g.neighbors(u):
                if w not in dist and w in self.core:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return dist

    def cycles_of_length(self, v, length, dist):
        """Cycles through v with exactly `length` edges, one orientation each."""
        neighbors = self.g.neighbors
        found = []
        path = [v]
        on_path = {v}

        def extend(u):
            k = len(path)
            for w in neighbors(u):
                if w == v:
                    if k == length and path[1] < path[-1]:
                        sequence = tuple(path)
                        found.append(_Cycle(sequence, frozenset(sequence), canonical_cycle(sequence)))
                    continue
                if k >= length or w in on_path:
                    continue
                d = dist.get(w)
                if d is None or k + d > length:
                    continue
                path.append(w)
                on_path.add(w)
                extend(w)
                on_path.discard(w)
                path.pop()

        extend(v)
        found.sort(key=lambda cycle: cycle.canon)
        return found

    def _witness(self, v, shorter, longer, run):
        anchors = (v,) if len(run) == 1 else tuple(sorted((run[0], run[-1])))
        return DoubleCycleWitness(shorter.canon, longer.canon, tuple(run), anchors)

    def _first_pair(self, v, shorter, longer, same_length):
        for index, first in enumerate(shorter):
            candidates = shorter[index + 1:] if same_length else longer
            for second in candidates:
                run = shared_path_between(first, second)
                if run is not None:
                    return self._witness(v, first, second, run)
        return None

    def least_witness(self, v, m=None):
        m = self.m_max if m is None else m
        if v not in self.core or self.core_degree(v) < 3:
            return None
        dist = self.distances(v, m // 2)
        by_length = {}
        for t in range(MIN_CYCLE_LENGTH, m + 1):
            by_length[t] = self.cycles_of_length(v, t, dist)
            if not by_length[t]:
                continue
            for s in range(MIN_CYCLE_LENGTH, t + 1):
                witness = self._first_pair(v, by_length[s], by_length[t], s == t)
                if witness is not None:
                    return witness
        return None

    def count_anchored(self, v, s, t):
        if v not in self.core:
            return 0
        dist = self.distances(v, t // 2)
        shorter = self.cycles_of_length(v, s, dist)
        longer = shorter if s == t else self.cycles_of_length(v, t, dist)
        count = 0
        for index, first in enumerate(shorter):
            candidates = shorter[index + 1:] if s == t else longer
            count += sum(
                1 for second in candidates if shared_path_between(first, second) is not None
            )
        return count


def _check_vertex(g, v):
    if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= g.n:
        raise GraphError(f"Vertex {v!r} outside [1, {g.n}]")


def find_witness(g, v, m):
    """Least double cycle anchored at v with s, t <= m, or None."""
    search = AnchorSearch(g, m)
    _check_vertex(g, v)
    return search.least_witness(v)


# Worker state for fork-context pools; set once per worker by the initializer.
_worker_search = None


def _init_worker(g, m, core):
    global _worker_search
    _worker_search = AnchorSearch(g, m, core)


def _witness_chunk(vertices):
    return [(v, _worker_search.least_witness(v)) for v in vertices]


def _chunks(items, size):
    return [items[i:i + size] for i in range(0, len(items), size)]


def least_witnesses(g, m, workers=1):
    """Map vertex -> least witness for every anchor of S_m."""
    search = AnchorSearch(g, m)
    candidates = [v for v in sorted(search.core) if search.core_degree(v) >= 3]
    logger.debug(f"Searching {len(candidates)} of {g.n} vertices for double cycles (m={m})")

    if workers <= 1 or len(candidates) < 2 * workers:
        results = [(v, search.least_witness(v)) for v in candidates]
    else:
        chunk_size = max(1, len(candidates) // (workers * 4))
        context = multiprocessing.get_context('fork')
        with context.Pool(workers, initializer=_init_worker, initargs=(g, m, search.core)) as pool:
            results = [
                pair for chunk in pool.map(_witness_chunk, _chunks(candidates, chunk_size))
                for pair in chunk
            ]
    return {v: witness for v, witness in results if witness is not None}


def compute_anchor_set(g, m, workers=1, with_witnesses=False):
    witnesses = least_witnesses(g, m, workers=workers)
    members = tuple(sorted(witnesses))
    return AnchorSet(m, members, witnesses if with_witnesses else {})


def anchor_levels(g, m_max, workers=1):
    """
    Vertex -> smallest max(s, t) over its witnesses, for anchors of S_{m_max}.
    S_m for any m <= m_max is {v : level <= m}.
    """
    return {v: witness.sort_key()[0] for v, witness in least_witnesses(g, m_max, workers).items()}


def anchor_set_from_levels(levels, m):
    return AnchorSet(m, tuple(sorted(v for v, level in levels.items() if level <= m)))


def count_anchored(g, v, s, t):
    """Number of distinct double cycles of size exactly (s, t) anchored at v."""
    if s > t:
        raise AnchorSearchError(f"Sizes must be given in canonical order s <= t, got ({s}, {t})")
    if s < MIN_CYCLE_LENGTH:
        raise AnchorSearchError(f"Cycle sizes must be >= {MIN_CYCLE_LENGTH}, got s={s}")
    _check_vertex(g, v)
    return AnchorSearch(g, t).count_anchored(v, s, t)


def validate_witness(g, w):
    """True iff w is a genuine double cycle of g with consistent anchors."""
    try:
        cycle_a = tuple(w.cycle_a)
        cycle_b = tuple(w.cycle_b)
        path = tuple(w.shared_path)
        anchors = tuple(w.anchors)
        s, t, p = len(cycle_a), len(cycle_b), len(path)

        if s < MIN_CYCLE_LENGTH or t < MIN_CYCLE_LENGTH or p < 1:
            return False
        if len(set(cycle_a)) != s or len(set(cycle_b)) != t or len(set(path)) != p:
            return False
        if not 1 <= p <= min(s, t) // 2:
            return False

        edges_a = cycle_edges(cycle_a)
        edges_b = cycle_edges(cycle_b)
        if not all(g.has_edge(u, v) for u, v in edges_a | edges_b):
            return False
        if set(cycle_a) & set(cycle_b) != set(path):
            return False
        if edges_a & edges_b != path_edges(path):
            return False

        expected_anchors = {path[0], path[-1]}
        if len(anchors) != len(expected_anchors) or set(anchors) != expected_anchors:
            return False
        return len(set(cycle_a) | set(cycle_b)) == s + t - p
    except (TypeError, AttributeError):
        return False
