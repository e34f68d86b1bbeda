"""
Simple undirected graph on arrival-ordered vertices 1..n

Vertex 1 is the root (the first vertex of the growth process). Graphs are
built by add_edge and frozen before they are handed to the detector, so a
frozen graph can be shared read-only between workers.
"""
import logging
from dataclasses import dataclass

import networkx as nx

from utils.exceptions import GraphError

logger = logging.getLogger(__name__)


class Graph:
    """
    Simple undirected labeled graph. Multi-edges collapse at insertion and
    self-loops are rejected.
    """

    __slots__ = ('n', '_adj', '_edges', '_sorted', '_frozen')

    def __init__(self, n):
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise GraphError(f"A graph needs at least one vertex, got n={n!r}")
        self.n = n
        self._adj = [set() for _ in range(n + 1)]
        self._edges = set()
        self._sorted = {}
        self._frozen = False

    def __repr__(self):
        return f"Graph(n={self.n}, m={len(self._edges)})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self._edges == other._edges

    def __hash__(self):
        if not self._frozen:
            raise TypeError("Only frozen graphs are hashable")
        return hash((self.n, frozenset(self._edges)))

    def __getstate__(self):
        return {'n': self.n, 'edges': sorted(self._edges), 'frozen': self._frozen}

    def __setstate__(self, state):
        self.n = state['n']
        self._adj = [set() for _ in range(self.n + 1)]
        self._edges = set()
        self._sorted = {}
        self._frozen = False
        for u, v in state['edges']:
            self.add_edge(u, v)
        self._frozen = state['frozen']

    def _check_vertex(self, v):
        if isinstance(v, bool) or not isinstance(v, int) or not 1 <= v <= self.n:
            raise GraphError(f"Vertex {v!r} outside [1, {self.n}]")

    def add_edge(self, u, v):
        """Insert {u, v}; returns False when the edge was already present."""
        if self._frozen:
            raise GraphError("Graph is frozen")
        self._check_vertex(u)
        self._check_vertex(v)
        if u == v:
            raise GraphError(f"Self-loop at vertex {u} is not allowed")
        key = (u, v) if u < v else (v, u)
        if key in self._edges:
            return False
        self._edges.add(key)
        self._adj[u].add(v)
        self._adj[v].add(u)
        self._sorted.pop(u, None)
        self._sorted.pop(v, None)
        return True

    def freeze(self):
        self._frozen = True
        return self

    @property
    def frozen(self):
        return self._frozen

    @property
    def edge_count(self):
        return len(self._edges)

    def has_edge(self, u, v):
        key = (u, v) if u < v else (v, u)
        return key in self._edges

    def neighbors(self, v):
        """Ascending neighbor tuple; iteration order of the detector depends on it."""
        cached = self._sorted.get(v)
        if cached is None:
            self._check_vertex(v)
            cached = tuple(sorted(self._adj[v]))
            self._sorted[v] = cached
        return cached

    def degree(self, v):
        self._check_vertex(v)
        return len(self._adj[v])

    def vertices(self):
        return range(1, self.n + 1)

    def edges(self):
        """Edges as (min, max) pairs in lexicographic order."""
        return sorted(self._edges)

    def degree_sequence(self):
        return [len(self._adj[v]) for v in self.vertices()]

    def two_core(self):
        """Vertices surviving repeated removal of degree <= 1 vertices."""
        degree = [len(nbrs) for nbrs in self._adj]
        removed = [False] * (self.n + 1)
        stack = [v for v in self.vertices() if degree[v] <= 1]
        for v in stack:
            removed[v] = True
        while stack:
            v = stack.pop()
            for w in self._adj[v]:
                if removed[w]:
                    continue
                degree[w] -= 1
                if degree[w] <= 1:
                    removed[w] = True
                    stack.append(w)
        return frozenset(v for v in self.vertices() if not removed[v])

    def to_networkx(self):
        nx_graph = nx.Graph()
        nx_graph.add_nodes_from(self.vertices())
        nx_graph.add_edges_from(self._edges)
        return nx_graph


@dataclass(frozen=True)
class Permutation:
    """Bijection on [1, n]; mapping[i - 1] is the image of vertex i."""
    mapping: tuple

    def __post_init__(self):
        mapping = tuple(self.mapping)
        n = len(mapping)
        if n == 0 or sorted(mapping) != list(range(1, n + 1)):
            raise GraphError("Permutation must be a bijection on [1, n]")
        object.__setattr__(self, 'mapping', mapping)

    @classmethod
    def from_dict(cls, images):
        n = len(images)
        try:
            return cls(tuple(images[i] for i in range(1, n + 1)))
        except KeyError as exc:
            raise GraphError(f"Permutation is missing vertex {exc.args[0]}") from exc

    @classmethod
    def identity(cls, n):
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self):
        return len(self.mapping)

    def __call__(self, v):
        return self.mapping[v - 1]

    def inverse(self):
        inverse = [0] * self.n
        for source, target in enumerate(self.mapping, start=1):
            inverse[target - 1] = source
        return Permutation(tuple(inverse))


def new_graph(n):
    return Graph(n)


def add_edge(g, u, v):
    g.add_edge(u, v)
    return g


def relabel(g, perm):
    """Graph with {perm(u), perm(v)} for every edge {u, v} of g."""
    if not isinstance(perm, Permutation):
        perm = Permutation(tuple(perm))
    if perm.n != g.n:
        raise GraphError(f"Permutation size {perm.n} does not match graph size {g.n}")
    result = Graph(g.n)
    for u, v in g.edges():
        result.add_edge(perm(u), perm(v))
    return result.freeze()


def write_edge_list(g):
    """Canonical text: header "n m", then sorted "u v" lines with u < v, LF endings."""
    edges = g.edges()
    lines = [f"{g.n} {len(edges)}"]
    lines.extend(f"{u} {v}" for u, v in edges)
    return '\n'.join(lines) + '\n'


def read_edge_list(text):
    lines = [line.strip() for line in text.splitlines()]
    lines = [line for line in lines if line]
    if not lines:
        raise GraphError("Empty edge list: missing 'n m' header")

    header = lines[0].split()
    if len(header) != 2 or not all(token.isdigit() for token in header):
        raise GraphError(f"Malformed header {lines[0]!r}; expected 'n m'")
    n, m = int(header[0]), int(header[1])
    if len(lines) - 1 != m:
        raise GraphError(f"Header announces {m} edges, found {len(lines) - 1}")

    g = Graph(n)
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if len(tokens) != 2 or not all(token.lstrip('-').isdigit() for token in tokens):
            raise GraphError(f"Line {lineno}: malformed edge {line!r}")
        u, v = int(tokens[0]), int(tokens[1])
        try:
            g.add_edge(u, v)
        except GraphError as exc:
            raise GraphError(f"Line {lineno}: {exc}") from exc
    logger.debug(f"Read graph with n={n}, m={g.edge_count}")
    return g.freeze()
