"""
Exponent profiles of labeled double cycles

For each vertex of a witness, E counts its witness-neighbors with a smaller
label, so the exponents sum to the number of witness edges,
s + t - (p - 1). Vertices are split around an anchor v into those below and
above it.
"""
from dataclasses import dataclass

from utils.exceptions import AnchorSearchError


@dataclass(frozen=True)
class ExponentProfile:
    anchor: int
    below: tuple
    above: tuple
    exponents: dict
    edge_count: int

    @property
    def r(self):
        return len(self.below)

    @property
    def anchor_exponent(self):
        return self.exponents[self.anchor]

    def exponent(self, v):
        return self.exponents[v]

    def total(self):
        return sum(self.exponents.values())


def exponent_profile(w, anchor):
    if anchor not in w.anchors:
        raise AnchorSearchError(f"Vertex {anchor} is not an anchor of this witness {w.anchors}")
    edges = w.edges()
    exponents = {v: 0 for v in w.vertices()}
    for u, v in edges:
        exponents[max(u, v)] += 1
    ordered = sorted(exponents)
    return ExponentProfile(
        anchor=anchor,
        below=tuple(v for v in ordered if v < anchor),
        above=tuple(v for v in ordered if v > anchor),
        exponents=exponents,
        edge_count=len(edges),
    )


def small_exponent_violations(profile):
    """k in [r] with E(i_1) + ... + E(i_k) > k - 1."""
    violations = []
    running = 0
    for k, v in enumerate(profile.below, start=1):
        running += profile.exponents[v]
        if running > k - 1:
            violations.append(k)
    return violations


def big_exponent_violations(profile):
    """k with the k largest labels carrying exponent sum < k + 1."""
    violations = []
    running = 0
    for k, v in enumerate(reversed(profile.above), start=1):
        running += profile.exponents[v]
        if running < k + 1:
            violations.append(k)
    return violations


def check_exponent_lemmas(profile):
    return not small_exponent_violations(profile) and not big_exponent_violations(profile)
