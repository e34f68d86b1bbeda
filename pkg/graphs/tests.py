import math
import pickle

import networkx as nx
import numpy as np
from django.test import SimpleTestCase
from rest_framework import serializers

from utils.exceptions import GraphError, ModelSpecError

from .core import Graph, Permutation, read_edge_list, relabel, write_edge_list
from .generators import (
    ModelSpec,
    ModelVariant,
    RngSeed,
    gen_cooper_frieze,
    gen_cooper_frieze_process,
    gen_inhom_er,
    gen_ldag,
    gen_urrt,
    pi,
    sample_cooper_frieze_process,
)
from .serializers import ModelSpecSerializer


def graph_from_edges(n, edges):
    g = Graph(n)
    for u, v in edges:
        g.add_edge(u, v)
    return g.freeze()


class GraphTests(SimpleTestCase):

    def test_new_graph_has_no_edges(self):
        g = Graph(5)
        self.assertEqual(g.edge_count, 0)
        self.assertEqual(g.degree_sequence(), [0, 0, 0, 0, 0])
        self.assertEqual(Graph(1).edge_count, 0)

    def test_zero_vertices_rejected(self):
        with self.assertRaises(GraphError):
            Graph(0)

    def test_multi_edges_collapse(self):
        g = Graph(3)
        self.assertTrue(g.add_edge(1, 2))
        self.assertFalse(g.add_edge(1, 2))
        self.assertFalse(g.add_edge(2, 1))
        self.assertEqual(g.edge_count, 1)

    def test_self_loop_and_out_of_range_rejected(self):
        g = Graph(3)
        with self.assertRaises(GraphError):
            g.add_edge(3, 3)
        with self.assertRaises(GraphError):
            g.add_edge(1, 4)
        with self.assertRaises(GraphError):
            g.add_edge(0, 1)

    def test_frozen_graph_rejects_edges(self):
        g = graph_from_edges(3, [(1, 2)])
        with self.assertRaises(GraphError):
            g.add_edge(2, 3)

    def test_neighbors_sorted(self):
        g = graph_from_edges(5, [(3, 5), (3, 1), (3, 4)])
        self.assertEqual(g.neighbors(3), (1, 4, 5))
        self.assertEqual(g.degree(3), 3)

    def test_two_core_of_figure_eight_with_tail(self):
        g = graph_from_edges(6, [(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (5, 1), (5, 6)])
        self.assertEqual(g.two_core(), frozenset({1, 2, 3, 4, 5}))

    def test_two_core_of_tree_is_empty(self):
        self.assertEqual(gen_urrt(30, 4).two_core(), frozenset())

    def test_pickle_preserves_graph(self):
        g = gen_ldag(40, 2, 9)
        restored = pickle.loads(pickle.dumps(g))
        self.assertEqual(restored, g)
        self.assertTrue(restored.frozen)


class RelabelTests(SimpleTestCase):

    def test_identity_keeps_graph(self):
        g = gen_ldag(20, 2, 3)
        self.assertEqual(relabel(g, Permutation.identity(20)), g)

    def test_triangle_is_permutation_closed(self):
        triangle = graph_from_edges(3, [(1, 2), (2, 3), (3, 1)])
        self.assertEqual(relabel(triangle, Permutation((3, 1, 2))), triangle)

    def test_path_swap(self):
        path = graph_from_edges(3, [(1, 2), (2, 3)])
        swapped = relabel(path, Permutation.from_dict({1: 3, 2: 2, 3: 1}))
        self.assertEqual(swapped.edges(), [(1, 2), (2, 3)])

    def test_inverse_round_trip(self):
        g = gen_cooper_frieze(25, 1.5, 11)
        perm = Permutation(tuple(int(v) + 1 for v in np.random.default_rng(0).permutation(25)))
        self.assertEqual(relabel(relabel(g, perm), perm.inverse()), g)

    def test_size_mismatch_rejected(self):
        with self.assertRaises(GraphError):
            relabel(Graph(3).freeze(), Permutation.identity(4))

    def test_non_bijection_rejected(self):
        with self.assertRaises(GraphError):
            Permutation((1, 1, 2))


class EdgeListTests(SimpleTestCase):

    def test_read_path(self):
        g = read_edge_list("3 2\n1 2\n2 3\n")
        self.assertEqual(g.n, 3)
        self.assertEqual(g.edges(), [(1, 2), (2, 3)])

    def test_write_is_canonical(self):
        g = graph_from_edges(4, [(4, 1), (3, 2), (2, 1)])
        self.assertEqual(write_edge_list(g), "4 3\n1 2\n1 4\n2 3\n")

    def test_read_back_generated_graph(self):
        g = gen_ldag(50, 3, 21)
        self.assertEqual(read_edge_list(write_edge_list(g)), g)

    def test_self_loop_rejected_with_line(self):
        with self.assertRaisesMessage(GraphError, 'Line 2'):
            read_edge_list("2 1\n1 1\n")

    def test_malformed_inputs(self):
        for text in ["", "x y\n", "3 2\n1 2\n", "3 1\n1 two\n", "3 1\n1 4\n"]:
            with self.subTest(text=text), self.assertRaises(GraphError):
                read_edge_list(text)


class GeneratorTests(SimpleTestCase):

    def test_urrt_is_a_tree(self):
        for seed in range(10):
            g = gen_urrt(60, seed)
            self.assertEqual(g.edge_count, 59)
            self.assertTrue(nx.is_tree(g.to_networkx()))

    def test_urrt_n2_forces_edge(self):
        self.assertEqual(gen_urrt(2, 5).edges(), [(1, 2)])

    def test_urrt_n1(self):
        self.assertEqual(gen_urrt(1, 0).edge_count, 0)

    def test_determinism(self):
        self.assertEqual(gen_ldag(200, 2, RngSeed(7, 3)), gen_ldag(200, 2, RngSeed(7, 3)))
        self.assertNotEqual(gen_ldag(200, 2, RngSeed(7, 3)), gen_ldag(200, 2, RngSeed(7, 4)))

    def test_integer_seed_is_stream_zero(self):
        self.assertEqual(gen_urrt(50, 12), gen_urrt(50, RngSeed(12, 0)))

    def test_ldag_edge_bounds(self):
        g = gen_ldag(100, 2, 1)
        self.assertGreaterEqual(g.edge_count, 99)
        self.assertLessEqual(g.edge_count, 198)
        self.assertTrue(nx.is_connected(g.to_networkx()))

    def test_ldag_n2_single_edge(self):
        self.assertEqual(gen_ldag(2, 5, 0).edges(), [(1, 2)])

    def test_ldag_with_one_tree_matches_urrt(self):
        self.assertEqual(gen_ldag(80, 1, 6), gen_urrt(80, 6))

    def test_inhom_er_pair_one_two_always_present(self):
        for seed in range(20):
            self.assertTrue(gen_inhom_er(10, 1.0, seed).has_edge(1, 2))

    def test_inhom_er_marginal(self):
        reps = 4000
        hits = sum(gen_inhom_er(7, 2.0, RngSeed(3, rep)).has_edge(3, 7) for rep in range(reps))
        frequency = hits / reps
        se = (1 / 3 * 2 / 3 / reps) ** 0.5
        self.assertLess(abs(frequency - 1 / 3), 4 * se)

    def test_cooper_frieze_contains_spanning_tree(self):
        g = gen_cooper_frieze(100, 2.0, 8)
        self.assertGreaterEqual(g.edge_count, 99)
        self.assertTrue(nx.is_connected(g.to_networkx()))
        self.assertEqual(gen_cooper_frieze(2, 0.5, 1).edges(), [(1, 2)])

    def test_process_single_step(self):
        sample = sample_cooper_frieze_process(0.5, 1, 0)
        self.assertEqual(sample.graph.n, 2)
        self.assertEqual(sample.graph.edge_count, 1)

    def test_process_tree_and_counts(self):
        sample = sample_cooper_frieze_process(0.5, 300, 3)
        self.assertTrue(nx.is_tree(sample.tree.to_networkx()))
        self.assertEqual(sample.tree.n, sample.graph.n)
        vertex_steps = sample.graph.n - 1
        self.assertEqual(vertex_steps + sample.edge_steps, 300)
        self.assertLessEqual(sample.graph.edge_count, 300)
        for u, v in sample.tree.edges():
            self.assertTrue(sample.graph.has_edge(u, v))

    def test_process_graph_helper_matches_sample(self):
        self.assertEqual(
            gen_cooper_frieze_process(0.3, 80, 5), sample_cooper_frieze_process(0.3, 80, 5).graph
        )

    def test_invalid_parameters(self):
        with self.assertRaises(ModelSpecError):
            gen_urrt(0, 1)
        with self.assertRaises(ModelSpecError):
            gen_ldag(10, 0, 1)
        with self.assertRaises(ModelSpecError):
            gen_inhom_er(10, -1.0, 1)
        with self.assertRaises(ModelSpecError):
            gen_cooper_frieze_process(1.0, 10, 1)
        with self.assertRaises(ModelSpecError):
            RngSeed(-1)

    def test_pi(self):
        self.assertEqual(pi(1, 2, 2.0), 1.0)
        self.assertAlmostEqual(pi(1, 4, 2.0), 2 / 3)
        self.assertAlmostEqual(pi(7, 3, 2.0), 1 / 3)
        with self.assertRaises(GraphError):
            pi(3, 3, 1.0)


class GraphInvariantTests(SimpleTestCase):

    def samples(self):
        yield gen_urrt(80, 1)
        yield gen_ldag(80, 3, 2)
        yield gen_inhom_er(80, 1.5, 3)
        yield gen_cooper_frieze(80, 2.0, 4)
        yield gen_cooper_frieze_process(0.4, 150, 5)

    def test_degree_sum_is_twice_edge_count(self):
        for g in self.samples():
            with self.subTest(n=g.n, edges=g.edge_count):
                self.assertEqual(sum(g.degree_sequence()), 2 * g.edge_count)

    def test_relabel_preserves_degree_multiset(self):
        for index, g in enumerate(self.samples()):
            mapping = np.random.default_rng(index).permutation(g.n) + 1
            relabeled = relabel(g, Permutation(tuple(int(v) for v in mapping)))
            with self.subTest(n=g.n):
                self.assertEqual(relabeled.edge_count, g.edge_count)
                self.assertEqual(sorted(relabeled.degree_sequence()), sorted(g.degree_sequence()))


class GeneratorMarginalTests(SimpleTestCase):

    def assertFrequency(self, hits, reps, target):
        se = math.sqrt(target * (1 - target) / reps)
        self.assertLess(abs(hits / reps - target), 4 * se)

    def test_urrt_edge_to_root(self):
        reps = 10000
        hits = sum(gen_urrt(10, RngSeed(31, rep)).has_edge(1, 5) for rep in range(reps))
        self.assertFrequency(hits, reps, 1 / 4)

    def test_ldag_edge_to_root(self):
        reps = 10000
        hits = sum(gen_ldag(10, 2, RngSeed(32, rep)).has_edge(1, 5) for rep in range(reps))
        self.assertFrequency(hits, reps, 7 / 16)

    def test_inhom_er_empty_graph(self):
        reps = 10000
        hits = sum(gen_inhom_er(3, 0.5, RngSeed(33, rep)).edge_count == 0 for rep in range(reps))
        self.assertFrequency(hits, reps, 0.28125)

    def test_cooper_frieze_edge_to_root(self):
        reps = 5000
        hits = sum(gen_cooper_frieze(100, 2.0, RngSeed(34, rep)).has_edge(1, 50) for rep in range(reps))
        self.assertFrequency(hits, reps, 1 - (48 / 49) * (47 / 49))

    def test_cooper_frieze_tiny_c_is_a_tree(self):
        for rep in range(20):
            g = gen_cooper_frieze(200, 1e-9, RngSeed(35, rep))
            self.assertEqual(g.edge_count, 199)

    def test_process_vertex_count(self):
        alpha, steps, reps = 0.5, 1000, 200
        sizes = [sample_cooper_frieze_process(alpha, steps, RngSeed(36, rep)).graph.n for rep in range(reps)]
        se = math.sqrt(steps * alpha * (1 - alpha) / reps)
        # one vertex to start, plus at most a few forced vertex steps
        self.assertLess(abs(np.mean(sizes) - (1 - alpha) * steps), 4 * se + 2)


class ModelSpecTests(SimpleTestCase):

    def test_domination_rates(self):
        self.assertEqual(ModelSpec.urrt(10).domination_rate, 1.0)
        self.assertEqual(ModelSpec.ldag(10, 3).domination_rate, 3.0)
        self.assertEqual(ModelSpec.cooper_frieze(10, 2.0).domination_rate, 3.0)
        self.assertEqual(ModelSpec.inhom_er(10, 0.5).domination_rate, 1.0)
        self.assertAlmostEqual(ModelSpec.cooper_frieze_process(0.5, 10).c_alpha, 4.0)

    def test_sample_dispatch(self):
        spec = ModelSpec.ldag(30, 2)
        self.assertEqual(spec.sample(RngSeed(1, 2)), gen_ldag(30, 2, RngSeed(1, 2)))

    def test_to_dict(self):
        self.assertEqual(ModelSpec.ldag(30, 2).to_dict(), {'variant': 'ldag', 'n': 30, 'l': 2})
        self.assertEqual(
            ModelSpec.cooper_frieze_process(0.5, 100).to_dict(),
            {'variant': 'cf-process', 'T': 100, 'alpha': 0.5},
        )

    def test_serializer_builds_spec(self):
        serializer = ModelSpecSerializer(data={'variant': 'cooper-frieze', 'n': 50, 'c': 2})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        spec = serializer.validated_data['spec']
        self.assertIs(spec.variant, ModelVariant.COOPER_FRIEZE)
        self.assertEqual(spec.c, 2.0)

    def test_serializer_ignores_unused_parameters(self):
        serializer = ModelSpecSerializer(data={'variant': 'urrt', 'n': 5, 'l': 3})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['spec'].to_dict(), {'variant': 'urrt', 'n': 5})

    def test_serializer_missing_parameter(self):
        serializer = ModelSpecSerializer(data={'variant': 'ldag', 'n': 50})
        self.assertFalse(serializer.is_valid())
        with self.assertRaises(serializers.ValidationError):
            serializer.is_valid(raise_exception=True)

    def test_serializer_rejects_bad_alpha(self):
        serializer = ModelSpecSerializer(data={'variant': 'cf-process', 'T': 10, 'alpha': 1.5})
        self.assertFalse(serializer.is_valid())
