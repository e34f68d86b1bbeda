import itertools

from django.test import SimpleTestCase, override_settings
from hypothesis import given
from hypothesis import settings as hypothesis_settings
from hypothesis import strategies as st

from graphs.core import Graph, Permutation, relabel
from graphs.generators import RngSeed, gen_cooper_frieze, gen_ldag, gen_urrt
from utils.exceptions import AnchorSearchError, GraphError, ResourceGuardError

from .detection import (
    DoubleCycleWitness,
    anchor_levels,
    anchor_set_from_levels,
    canonical_cycle,
    compute_anchor_set,
    count_anchored,
    find_witness,
    validate_witness,
)
from .exponents import (
    big_exponent_violations,
    check_exponent_lemmas,
    exponent_profile,
    small_exponent_violations,
)
from .oracle import brute_force_anchor_set
from .serializers import AnchorSetSerializer, DoubleCycleWitnessSerializer


def graph_from_edges(n, edges):
    g = Graph(n)
    for u, v in edges:
        g.add_edge(u, v)
    return g.freeze()


FIGURE_EIGHT = graph_from_edges(5, [(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (5, 1)])
THETA_133 = graph_from_edges(6, [(1, 2), (1, 3), (3, 4), (4, 2), (1, 5), (5, 6), (6, 2)])
THETA_122 = graph_from_edges(4, [(1, 2), (1, 3), (3, 2), (1, 4), (4, 2)])
CYCLE_5 = graph_from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])


@st.composite
def small_graphs(draw, max_n=9):
    n = draw(st.integers(min_value=3, max_value=max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    edges = draw(st.sets(st.sampled_from(pairs), max_size=min(len(pairs), 2 * n)))
    return graph_from_edges(n, edges)


def oracle(g, m):
    return brute_force_anchor_set(g, m, max_vertices=16, max_m=8).members


class CanonicalCycleTests(SimpleTestCase):

    def test_rotation_and_reflection(self):
        self.assertEqual(canonical_cycle((3, 1, 2)), (1, 2, 3))
        self.assertEqual(canonical_cycle((1, 3, 2)), (1, 2, 3))
        self.assertEqual(canonical_cycle((4, 2, 6, 1, 5)), (1, 5, 4, 2, 6))


class DetectionTests(SimpleTestCase):

    def test_figure_eight(self):
        self.assertEqual(compute_anchor_set(FIGURE_EIGHT, 3).members, (1,))

    def test_figure_eight_witness(self):
        witness = find_witness(FIGURE_EIGHT, 1, 3)
        self.assertEqual((witness.s, witness.t, witness.p), (3, 3, 1))
        self.assertEqual(witness.anchors, (1,))
        self.assertEqual(witness.cycle_a, (1, 2, 3))
        self.assertEqual(witness.cycle_b, (1, 4, 5))
        self.assertTrue(validate_witness(FIGURE_EIGHT, witness))

    def test_figure_eight_other_vertices_not_anchored(self):
        for v in (2, 3, 4, 5):
            self.assertIsNone(find_witness(FIGURE_EIGHT, v, 6))

    def test_theta_133(self):
        self.assertEqual(compute_anchor_set(THETA_133, 3).members, ())
        self.assertEqual(compute_anchor_set(THETA_133, 4).members, (1, 2))
        witness = find_witness(THETA_133, 1, 4)
        self.assertEqual(witness.shared_path, (1, 2))
        self.assertEqual(witness.anchors, (1, 2))
        self.assertEqual((witness.s, witness.t, witness.p), (4, 4, 2))

    def test_theta_122_has_no_anchor(self):
        for m in range(3, 8):
            self.assertEqual(compute_anchor_set(THETA_122, m).members, ())

    def test_cycle_and_trees_are_empty(self):
        self.assertEqual(compute_anchor_set(CYCLE_5, 7).members, ())
        for seed in range(5):
            self.assertEqual(compute_anchor_set(gen_urrt(200, seed), 12).members, ())

    def test_witness_attached_on_request(self):
        anchor_set = compute_anchor_set(THETA_133, 4, with_witnesses=True)
        self.assertEqual(sorted(anchor_set.witnesses), [1, 2])
        for witness in anchor_set.witnesses.values():
            self.assertTrue(validate_witness(THETA_133, witness))
        self.assertEqual(compute_anchor_set(THETA_133, 4).witnesses, {})

    def test_m_below_three_rejected(self):
        with self.assertRaises(AnchorSearchError):
            compute_anchor_set(FIGURE_EIGHT, 2)

    def test_vertex_out_of_range(self):
        with self.assertRaises(GraphError):
            find_witness(FIGURE_EIGHT, 9, 3)

    def test_monotone_in_m(self):
        g = gen_ldag(150, 2, 17)
        previous = set()
        for m in range(3, 9):
            current = set(compute_anchor_set(g, m).members)
            self.assertLessEqual(previous, current)
            previous = current

    def test_levels_reproduce_each_m(self):
        g = gen_ldag(150, 2, 5)
        levels = anchor_levels(g, 8)
        for m in range(3, 9):
            self.assertEqual(anchor_set_from_levels(levels, m).members, compute_anchor_set(g, m).members)

    def test_parallel_matches_serial(self):
        g = gen_ldag(400, 2, 23)
        serial = compute_anchor_set(g, 8)
        parallel = compute_anchor_set(g, 8, workers=3)
        self.assertEqual(serial, parallel)

    def test_count_anchored(self):
        self.assertEqual(count_anchored(FIGURE_EIGHT, 1, 3, 3), 1)
        self.assertEqual(count_anchored(THETA_133, 1, 4, 4), 1)
        self.assertEqual(count_anchored(CYCLE_5, 1, 3, 5), 0)
        with self.assertRaises(AnchorSearchError):
            count_anchored(FIGURE_EIGHT, 1, 4, 3)

    def test_validate_witness_rejects_fakes(self):
        fake = DoubleCycleWitness((1, 2, 3), (1, 2, 4), (1, 2), (1, 2))
        self.assertFalse(validate_witness(THETA_122, fake))
        missing_edge = DoubleCycleWitness((1, 2, 3), (1, 4, 5), (1,), (1,))
        self.assertFalse(validate_witness(CYCLE_5, missing_edge))


class OracleTests(SimpleTestCase):

    def test_canned_cases(self):
        self.assertEqual(oracle(FIGURE_EIGHT, 3), (1,))
        self.assertEqual(oracle(THETA_133, 4), (1, 2))
        self.assertEqual(oracle(THETA_122, 7), ())
        self.assertEqual(oracle(CYCLE_5, 6), ())

    @override_settings(ARCHAEOLOGY_GUARDS={
        'ORACLE_MAX_VERTICES': 10, 'ORACLE_MAX_M': 6, 'MAX_VERTICES': 100, 'MAX_STEPS': 100,
    })
    def test_guard_refuses_large_input(self):
        with self.assertRaises(ResourceGuardError):
            brute_force_anchor_set(gen_ldag(11, 2, 0), 4)
        with self.assertRaises(ResourceGuardError):
            brute_force_anchor_set(FIGURE_EIGHT, 7)

    @hypothesis_settings(max_examples=300, deadline=None)
    @given(g=small_graphs(), m=st.integers(min_value=3, max_value=6))
    def test_detector_matches_oracle(self, g, m):
        self.assertEqual(compute_anchor_set(g, m).members, oracle(g, m))

    def test_detector_matches_oracle_on_model_samples(self):
        samples = []
        for rep in range(40):
            seed = RngSeed(2024, rep)
            samples.append(gen_ldag(12, 1 + rep % 3, seed))
            samples.append(gen_cooper_frieze(12, (0.5, 2.0)[rep % 2], seed))
        for g in samples:
            for m in range(3, 7):
                self.assertEqual(compute_anchor_set(g, m).members, oracle(g, m))


class RelabelInvarianceTests(SimpleTestCase):

    @hypothesis_settings(max_examples=100, deadline=None)
    @given(g=small_graphs(), data=st.data())
    def test_anchor_set_is_equivariant(self, g, data):
        mapping = data.draw(st.permutations(range(1, g.n + 1)))
        perm = Permutation(tuple(mapping))
        expected = tuple(sorted(perm(v) for v in compute_anchor_set(g, 5).members))
        self.assertEqual(compute_anchor_set(relabel(g, perm), 5).members, expected)

    def test_witness_relabels_to_valid_witness(self):
        perm = Permutation((5, 3, 1, 2, 4))
        witness = find_witness(FIGURE_EIGHT, 1, 3).relabeled(perm)
        self.assertTrue(validate_witness(relabel(FIGURE_EIGHT, perm), witness))
        self.assertEqual(witness.anchors, (5,))


class ExponentTests(SimpleTestCase):

    def test_figure_eight_profile(self):
        profile = exponent_profile(find_witness(FIGURE_EIGHT, 1, 3), 1)
        self.assertEqual(profile.below, ())
        self.assertEqual(profile.above, (2, 3, 4, 5))
        self.assertEqual(profile.total(), 6)
        self.assertEqual(profile.edge_count, 6)
        self.assertEqual(profile.exponent(5), 2)
        self.assertEqual(small_exponent_violations(profile), [])
        self.assertEqual(big_exponent_violations(profile), [])

    def test_anchor_with_largest_label(self):
        g = relabel(FIGURE_EIGHT, Permutation((5, 1, 2, 3, 4)))
        profile = exponent_profile(find_witness(g, 5, 3), 5)
        self.assertEqual(profile.anchor_exponent, 4)
        self.assertEqual(profile.r, 4)
        self.assertTrue(check_exponent_lemmas(profile))

    def test_non_anchor_rejected(self):
        with self.assertRaises(AnchorSearchError):
            exponent_profile(find_witness(FIGURE_EIGHT, 1, 3), 2)

    @hypothesis_settings(max_examples=150, deadline=None)
    @given(g=small_graphs(max_n=8))
    def test_lemmas_hold_on_every_witness(self, g):
        anchor_set = compute_anchor_set(g, 6, with_witnesses=True)
        for witness in anchor_set.witnesses.values():
            for anchor in witness.anchors:
                profile = exponent_profile(witness, anchor)
                self.assertEqual(profile.total(), witness.s + witness.t - (witness.p - 1))
                self.assertTrue(check_exponent_lemmas(profile))

    def test_lemmas_hold_on_ldag_witnesses(self):
        for rep in range(5):
            g = gen_ldag(300, 2, RngSeed(99, rep))
            anchor_set = compute_anchor_set(g, 8, with_witnesses=True)
            for witness in anchor_set.witnesses.values():
                for anchor in witness.anchors:
                    self.assertTrue(check_exponent_lemmas(exponent_profile(witness, anchor)))


class SerializerTests(SimpleTestCase):

    def test_anchor_set_json(self):
        data = AnchorSetSerializer(compute_anchor_set(THETA_133, 4)).data
        self.assertEqual(data, {'m': 4, 'anchors': [1, 2]})

    def test_witness_json(self):
        data = DoubleCycleWitnessSerializer(find_witness(FIGURE_EIGHT, 1, 3)).data
        self.assertEqual(data['s'], 3)
        self.assertEqual(data['p'], 1)
        self.assertEqual(data['cycle_b'], [1, 4, 5])
