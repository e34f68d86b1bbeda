"""
Exhaustive reference for S_m, independent of the detector

Enumerates every simple cycle of length <= m with networkx, then every
unordered pair of cycles, and keeps the pairs whose subgraph intersection is
a single path of p vertices with 1 <= p <= floor(min(s, t) / 2).
Exponential; guarded by ARCHAEOLOGY_GUARDS.
"""
import itertools
import logging

import networkx as nx
from django.conf import settings

from utils.exceptions import AnchorSearchError, ResourceGuardError

from .detection import MIN_CYCLE_LENGTH, AnchorSet, cycle_edges

logger = logging.getLogger(__name__)


def _guard_limits(max_vertices, max_m):
    guards = settings.ARCHAEOLOGY_GUARDS
    if max_vertices is None:
        max_vertices = guards['ORACLE_MAX_VERTICES']
    if max_m is None:
        max_m = guards['ORACLE_MAX_M']
    return max_vertices, max_m


def _intersection_path_ends(first, second):
    """Endpoints of the intersection when it is a single path, else None."""
    common = first['vertices'] & second['vertices']
    if not common:
        return None
    shared = first['edges'] & second['edges']
    overlap = nx.Graph()
    overlap.add_nodes_from(common)
    overlap.add_edges_from(shared)
    if overlap.number_of_edges() != len(common) - 1 or not nx.is_connected(overlap):
        return None
    return [v for v in overlap.nodes if overlap.degree(v) <= 1]


def brute_force_anchor_set(g, m, max_vertices=None, max_m=None):
    if isinstance(m, bool) or not isinstance(m, int) or m < MIN_CYCLE_LENGTH:
        raise AnchorSearchError(f"m must be an integer >= {MIN_CYCLE_LENGTH}, got {m!r}")
    max_vertices, max_m = _guard_limits(max_vertices, max_m)
    if g.n > max_vertices or m > max_m:
        logger.warning(f"Oracle refused n={g.n}, m={m} (limits n<={max_vertices}, m<={max_m})")
        raise ResourceGuardError(
            f"Oracle input too large: n={g.n}, m={m} exceeds n<={max_vertices}, m<={max_m}"
        )

    cycles = [
        {'length': len(cycle), 'vertices': frozenset(cycle), 'edges': cycle_edges(cycle)}
        for cycle in nx.simple_cycles(g.to_networkx(), length_bound=m)
        if len(cycle) >= MIN_CYCLE_LENGTH
    ]

    anchors = set()
    for first, second in itertools.combinations(cycles, 2):
        p = len(first['vertices'] & second['vertices'])
        if not 1 <= p <= min(first['length'], second['length']) // 2:
            continue
        ends = _intersection_path_ends(first, second)
        if ends is not None:
            anchors.update(ends)

    logger.debug(f"Oracle examined {len(cycles)} cycles, found {len(anchors)} anchors")
    return AnchorSet(m, tuple(sorted(anchors)))
