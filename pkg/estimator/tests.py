import math

from django.test import SimpleTestCase

from anchors.detection import compute_anchor_set
from graphs.core import Graph, Permutation, relabel
from graphs.generators import ModelSpec, gen_ldag, gen_urrt
from utils.exceptions import EstimationError

from .serializers import ConfidenceSetSerializer
from .services import (
    clamp_m,
    estimate_root,
    expected_xk,
    height_bound,
    k_bound_log,
    k_bound_log_cf,
    k_bound_log_ldag,
    k_epsilon,
    log_factorial,
    m_epsilon_cf,
    m_epsilon_ldag,
    model_m_epsilon,
    resolve_m,
    xk_tail_lower_bound,
)

THETA_133_EDGES = [(1, 2), (1, 3), (3, 4), (4, 2), (1, 5), (5, 6), (6, 2)]


def theta_133():
    g = Graph(6)
    for u, v in THETA_133_EDGES:
        g.add_edge(u, v)
    return g.freeze()


class CycleBudgetTests(SimpleTestCase):

    def test_ldag_formula(self):
        self.assertEqual(m_epsilon_ldag(2, math.exp(-2)), 30)
        self.assertEqual(m_epsilon_ldag(30, math.exp(-1)), 1)
        self.assertEqual(m_epsilon_ldag(2, 0.5), 11)

    def test_cooper_frieze_formula(self):
        self.assertEqual(m_epsilon_cf(12, math.exp(-1)), 10)
        self.assertEqual(m_epsilon_cf(1, math.exp(-1)), 21)

    def test_epsilon_near_one_gives_zero(self):
        self.assertEqual(m_epsilon_ldag(2, 1 - 1e-12), 0)
        self.assertEqual(m_epsilon_cf(2, 1 - 1e-12), 0)

    def test_clamp(self):
        self.assertEqual(clamp_m(1), (3, True))
        self.assertEqual(clamp_m(30), (30, False))

    def test_invalid_epsilon(self):
        for epsilon in (0, 1, 1.5, -0.1):
            with self.subTest(epsilon=epsilon), self.assertRaises(EstimationError):
                m_epsilon_ldag(2, epsilon)

    def test_process_uses_c_alpha(self):
        spec = ModelSpec.cooper_frieze_process(0.5, 100)
        self.assertEqual(model_m_epsilon(spec, math.exp(-1)), m_epsilon_cf(4.0, math.exp(-1)))

    def test_models_without_formula_need_m(self):
        with self.assertRaises(EstimationError):
            resolve_m(ModelSpec.urrt(10), 0.1)
        with self.assertRaises(EstimationError):
            resolve_m(ModelSpec.inhom_er(10, 2.0), 0.1)
        self.assertEqual(resolve_m(ModelSpec.urrt(10), 0.1, 5), (5, False))

    def test_invalid_override(self):
        with self.assertRaises(EstimationError):
            resolve_m(ModelSpec.ldag(10, 2), 0.1, 2)


class SizeBoundTests(SimpleTestCase):

    def test_log_factorial(self):
        for k in (0, 1, 2, 10, 60):
            self.assertAlmostEqual(log_factorial(k), math.lgamma(k + 1), delta=1e-9 * max(1, k))

    def test_ldag_bound(self):
        expected = math.log(8) + 2 + 60 * math.log(2) + math.lgamma(61)
        self.assertTrue(math.isclose(k_bound_log_ldag(2, math.exp(-2)), expected, rel_tol=1e-9))

    def test_cooper_frieze_bound(self):
        expected = math.log(8) + 1 + 42 * math.log(2) + math.lgamma(43)
        self.assertTrue(math.isclose(k_bound_log_cf(1, math.exp(-1)), expected, rel_tol=1e-9))

    def test_bound_grid(self):
        points = [(0.5, 1.0, 3), (0.1, 2.0, 5), (0.01, 3.0, 8), (0.25, 1.5, 12), (1e-4, 2.0, 20)]
        for epsilon, rate, m in points:
            expected = math.log(8 / epsilon) + 2 * m * math.log(rate) + math.lgamma(2 * m + 1)
            with self.subTest(epsilon=epsilon, rate=rate, m=m):
                self.assertTrue(math.isclose(k_bound_log(epsilon, rate, m), expected, rel_tol=1e-9))

    def test_clamped_bound_near_one(self):
        expected = math.log(8 / 0.999999) + 6 * math.log(2) + math.lgamma(7)
        self.assertTrue(math.isclose(k_bound_log_ldag(2, 0.999999), expected, rel_tol=1e-9))


class EstimateRootTests(SimpleTestCase):

    def test_theta_with_override(self):
        confidence_set = estimate_root(theta_133(), ModelSpec.ldag(6, 2), 0.5, m_override=4)
        self.assertEqual(confidence_set.members, (1, 2))
        self.assertEqual(confidence_set.m_used, 4)
        self.assertIn(1, confidence_set)

    def test_tree_gives_empty_set(self):
        confidence_set = estimate_root(gen_urrt(100, 3), ModelSpec.ldag(100, 1), 0.001)
        self.assertEqual(confidence_set.members, ())
        self.assertTrue(confidence_set.size_within_bound)

    def test_auto_m_for_ldag(self):
        g = gen_ldag(200, 2, 4)
        confidence_set = estimate_root(g, ModelSpec.ldag(200, 2), 0.5)
        self.assertEqual(confidence_set.m_used, 11)
        self.assertFalse(confidence_set.clamped)
        self.assertFalse(confidence_set.epsilon_in_guaranteed_range)
        self.assertEqual(confidence_set.members, compute_anchor_set(g, 11).members)

    def test_clamp_reported(self):
        confidence_set = estimate_root(theta_133(), ModelSpec.ldag(6, 30), math.exp(-1))
        self.assertEqual(confidence_set.m_used, 3)
        self.assertTrue(confidence_set.clamped)

    def test_relabeled_input(self):
        g = gen_ldag(120, 2, 8)
        perm = Permutation(tuple(range(120, 0, -1)))
        model = ModelSpec.ldag(120, 2)
        members = estimate_root(g, model, 0.5, m_override=7).members
        relabeled = estimate_root(relabel(g, perm), model, 0.5, m_override=7).members
        self.assertEqual(relabeled, tuple(sorted(perm(v) for v in members)))

    def test_bad_epsilon(self):
        with self.assertRaises(EstimationError):
            estimate_root(theta_133(), ModelSpec.ldag(6, 2), 1.5)

    def test_serializer(self):
        confidence_set = estimate_root(theta_133(), ModelSpec.ldag(6, 2), 0.5, m_override=4)
        data = ConfidenceSetSerializer(confidence_set).data
        self.assertEqual(data['members'], [1, 2])
        self.assertEqual(data['model'], {'variant': 'ldag', 'n': 6, 'l': 2})
        self.assertNotIn('witnesses', data)


class TreeQuantityTests(SimpleTestCase):

    def test_expected_xk(self):
        self.assertEqual(expected_xk(2), 0.0)
        self.assertAlmostEqual(expected_xk(3), 0.25)
        mean = expected_xk(100)
        self.assertGreater(mean, math.log(100) - 2)
        self.assertLess(mean, math.log(100) - 1)

    def test_xk_tail_bound(self):
        self.assertEqual(xk_tail_lower_bound(3), 0.0)
        self.assertGreater(xk_tail_lower_bound(k_epsilon(0.5)), 0.0)

    def test_k_epsilon(self):
        self.assertEqual(k_epsilon(0.5), 9499)

    def test_height_bound(self):
        self.assertGreater(height_bound(2, 0.5), 1)
        self.assertAlmostEqual(
            height_bound(1000, 0.1), math.e * math.log(1000) + math.e * math.log(40 * math.e)
        )
