import json
import math
import tempfile
from pathlib import Path

import numpy as np
import pytest
from django.conf import settings
from django.test import SimpleTestCase, override_settings
from rest_framework import serializers

from graphs.generators import ModelSpec
from utils.exceptions import EmissionError, ModelSpecError, ResourceGuardError

from .calibration import baseline_files, compare_to_baseline, load_baseline, record_baseline
from .diagnostics import (
    _domination_report,
    check_domination,
    check_edge_marginal,
    check_model_domination,
    check_tree_height,
    check_xk_bracket,
    check_xk_tail,
    simulate_xk,
    urrt_heights,
)
from .emit import emit_report, emit_result, rows_csv
from .harness import (
    CSV_COLUMNS,
    ExperimentConfig,
    run_containment,
    run_containment_sweep,
    run_lemma_audit,
)
from .serializers import (
    DiagnosticReportSerializer,
    ExperimentResultSerializer,
    load_config,
    parse_config,
)
from .statistics import mean_and_se, proportion_se, wilson_interval


class WilsonIntervalTests(SimpleTestCase):

    def test_reference_table(self):
        table = {
            (0, 10): (0.0, 0.277533),
            (5, 10): (0.236593, 0.763407),
            (10, 10): (0.722467, 1.0),
            (50, 100): (0.403832, 0.596168),
            (1, 20): (0.008880, 0.236130),
        }
        for (successes, trials), (low, high) in table.items():
            with self.subTest(successes=successes, trials=trials):
                result = wilson_interval(successes, trials)
                self.assertAlmostEqual(result[0], low, places=5)
                self.assertAlmostEqual(result[1], high, places=5)

    def test_invalid_counts(self):
        with self.assertRaises(ValueError):
            wilson_interval(3, 0)
        with self.assertRaises(ValueError):
            wilson_interval(11, 10)

    def test_standard_errors(self):
        self.assertEqual(proportion_se(1.0, 100), 0.0)
        self.assertAlmostEqual(proportion_se(0.5, 100), 0.05)
        mean, se = mean_and_se([1, 2, 3, 4])
        self.assertEqual(mean, 2.5)
        self.assertAlmostEqual(se, math.sqrt(5 / 3) / 2)


class ContainmentTests(SimpleTestCase):

    def config(self, **overrides):
        values = {
            'model': ModelSpec.ldag(80, 2),
            'epsilon': 0.5,
            'm': 6,
            'replications': 6,
            'master_seed': 42,
        }
        values.update(overrides)
        return ExperimentConfig(**values)

    def test_trees_never_contain_root(self):
        result = run_containment(self.config(model=ModelSpec.urrt(100), m=8))
        self.assertEqual(result.containment_rate, 0.0)
        self.assertEqual(result.size_stats['max'], 0)
        self.assertEqual(len(result.rows), 6)

    def test_rows_are_deterministic(self):
        first = run_containment(self.config())
        second = run_containment(self.config())
        self.assertEqual(first.rows, second.rows)
        self.assertEqual([row['rep'] for row in first.rows], list(range(6)))
        self.assertTrue(all(row['ms'] == 0 for row in first.rows))

    def test_worker_count_does_not_change_rows(self):
        self.assertEqual(
            run_containment(self.config(), workers=1).rows,
            run_containment(self.config(), workers=3).rows,
        )

    def test_summary_fields(self):
        result = run_containment(self.config())
        self.assertGreaterEqual(result.containment_rate, 0.0)
        self.assertLessEqual(result.containment_rate, 1.0)
        low, high = result.wilson_ci
        self.assertLessEqual(low, result.containment_rate)
        self.assertGreaterEqual(high, result.containment_rate)
        self.assertEqual(sum(result.size_stats['histogram'].values()), 6)
        self.assertEqual(list(result.rows[0]), CSV_COLUMNS)

    def test_auto_m(self):
        result = run_containment(self.config(m='auto', epsilon=0.9, replications=2))
        self.assertEqual(result.m, 3)
        self.assertTrue(result.clamped)

    def test_auto_m_requires_formula(self):
        with self.assertRaises(ModelSpecError):
            self.config(model=ModelSpec.urrt(10), m='auto')

    def test_guard(self):
        with self.assertRaises(ResourceGuardError):
            run_containment(self.config(model=ModelSpec.ldag(1000, 2), max_vertices=500))

    def test_oracle_cross_check(self):
        result = run_containment(self.config(model=ModelSpec.ldag(10, 3), m=5, oracle_max_n=12))
        self.assertEqual(result.oracle_checked, 6)
        self.assertEqual(result.oracle_mismatches, 0)

    def test_sweep_is_nested(self):
        sweep = run_containment_sweep(self.config(model=ModelSpec.ldag(120, 2)), m_values=[4, 6, 8])
        self.assertEqual(sweep.subset_violations, 0)
        self.assertTrue(sweep.containment_monotone)
        self.assertEqual(sorted(sweep.results), [4, 6, 8])
        single = run_containment(self.config(model=ModelSpec.ldag(120, 2), m=6))
        self.assertEqual(sweep.results[6].rows, single.rows)

    def test_lemma_audit(self):
        report = run_lemma_audit(ModelSpec.ldag(150, 2), 6, 3, 7)
        self.assertTrue(report.passed)
        self.assertEqual(report.statistic, 0.0)


class DiagnosticTests(SimpleTestCase):

    def test_domination_shared_endpoint(self):
        report = check_domination(2, 6, [(1, 4), (2, 4)], 20000, 1)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.details['product_pi'], 4 / 9)
        self.assertLess(abs(report.statistic - 2 / 9), 5 * report.standard_error)

    def test_domination_patterns(self):
        for pattern, exact in (([(1, 4)], 5 / 9), ([(1, 3), (3, 5), (2, 5)], 3 / 32), ([(1, 3)], 3 / 4)):
            with self.subTest(pattern=pattern):
                report = check_domination(2, 6, pattern, 20000, 3)
                self.assertTrue(report.passed)
                self.assertLess(abs(report.statistic - exact), 5 * report.standard_error + 1e-12)

    def test_domination_upper_bound_below_product(self):
        patterns = ([(1, 4)], [(1, 4), (2, 4)], [(1, 3), (3, 5), (2, 5)])
        for pattern in patterns:
            with self.subTest(pattern=pattern):
                report = check_domination(2, 6, pattern, 100000, 12, se_mult=3.0)
                self.assertTrue(report.passed)
                self.assertLessEqual(report.details['upper_bound'], report.details['product_pi'])

    def test_frequency_above_product_fails(self):
        report = _domination_report(6761, 10000, [(1, 4)], 2.0, 3.0, {})
        self.assertAlmostEqual(report.details['product_pi'], 2 / 3)
        self.assertFalse(report.passed)
        self.assertTrue(_domination_report(6600, 10000, [(1, 4)], 2.0, 3.0, {}).passed)

    def test_empty_pattern(self):
        report = check_domination(2, 6, [], 100, 0)
        self.assertEqual(report.statistic, 1.0)
        self.assertEqual(report.details['product_pi'], 1.0)
        self.assertTrue(report.passed)

    def test_invalid_patterns(self):
        for pattern in ([(3, 3)], [(1, 7)], [(1, 4), (4, 1)]):
            with self.subTest(pattern=pattern), self.assertRaises(ModelSpecError):
                check_domination(2, 6, pattern, 10, 0)

    def test_cooper_frieze_domination(self):
        report = check_model_domination(ModelSpec.cooper_frieze(6, 1.0), [(1, 4)], 2000, 2)
        self.assertTrue(report.passed)

    def test_edge_marginal(self):
        self.assertEqual(check_edge_marginal(10, 2, 500, 0).statistic, 1.0)
        report = check_edge_marginal(10, 5, 20000, 4)
        self.assertTrue(report.passed)
        self.assertEqual(report.target, (0.25, 0.25))
        self.assertTrue(check_edge_marginal(100, 100, 20000, 5).passed)
        with self.assertRaises(ModelSpecError):
            check_edge_marginal(10, 11, 10, 0)

    def test_xk_support(self):
        values = simulate_xk(3, 2000, 9)
        self.assertGreaterEqual(values.min(), 0)
        self.assertLessEqual(values.max(), 2)

    def test_xk_bracket(self):
        report = check_xk_bracket(100, 5000, 5)
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.details['expected'], 3.5425, places=3)

    def test_xk_tail(self):
        report = check_xk_tail(0.5, 300, 6)
        self.assertEqual(report.parameters['k'], 9499)
        self.assertTrue(report.passed)

    def test_tree_height(self):
        self.assertEqual(check_tree_height(2, 0.5, 100, 0).statistic, 1.0)
        report = check_tree_height(1000, 0.1, 1000, 8)
        self.assertTrue(report.passed)
        self.assertGreaterEqual(report.details['min_height'], 1)

    def test_heights_of_known_trees(self):
        path = np.array([[1, 2, 3]])
        star = np.array([[1, 1, 1]])
        self.assertEqual(list(urrt_heights(np.vstack([path, star]))), [3, 1])

    def test_report_serializer(self):
        data = DiagnosticReportSerializer(check_edge_marginal(10, 2, 50, 0)).data
        self.assertEqual(data['check'], 'edge-marginal')
        self.assertTrue(data['passed'])
        self.assertEqual(data['target'], [1.0, 1.0])


class EmissionTests(SimpleTestCase):

    def test_csv_format(self):
        text = rows_csv([{'rep': 0, 'seed': 5, 'n': 10, 'm': 4, 'contained': 1, 'set_size': 2, 'ms': 0}])
        self.assertEqual(text, "rep,seed,n,m,contained,set_size,ms\n0,5,10,4,1,2,0\n")

    def test_reemit_is_byte_identical(self):
        config = ExperimentConfig(model=ModelSpec.ldag(50, 2), epsilon=0.5, m=5, replications=3, master_seed=1)
        result = run_containment(config)
        summary = ExperimentResultSerializer(result).data
        with tempfile.TemporaryDirectory() as directory:
            csv_path, json_path = emit_result(summary, result.rows, directory, config.to_dict())
            first = (csv_path.read_bytes(), json_path.read_bytes())
            again = emit_result(summary, result.rows, directory, config.to_dict())
            self.assertEqual(first, (again[0].read_bytes(), again[1].read_bytes()))
            self.assertIn(summary['config_hash'], csv_path.name)
            self.assertEqual(json.loads(first[1])['m'], 5)

    def test_report_file(self):
        data = DiagnosticReportSerializer(check_edge_marginal(10, 2, 50, 0)).data
        with tempfile.TemporaryDirectory() as directory:
            path = emit_report(data, directory)
            self.assertTrue(path.name.startswith('edge-marginal-'))
            self.assertEqual(json.loads(path.read_text())['check'], 'edge-marginal')

    def test_unwritable_directory(self):
        with tempfile.TemporaryDirectory() as directory:
            blocker = Path(directory) / 'file'
            blocker.write_text('x')
            with self.assertRaises(EmissionError):
                emit_report({'check': 'xk', 'parameters': {}}, blocker / 'sub')


class ConfigTests(SimpleTestCase):

    def test_parse_config(self):
        config = parse_config(json.dumps({
            'model': {'variant': 'ldag', 'n': 100, 'l': 2},
            'epsilon': 0.5,
            'm': 'auto',
            'replications': 4,
            'master_seed': 9,
            'tolerances': {'se_mult': 2.5},
        }))
        self.assertEqual(config.model, ModelSpec.ldag(100, 2))
        self.assertEqual(config.se_mult, 2.5)
        self.assertEqual(config.resolve_m(), (11, False))

    @override_settings(ARCHAEOLOGY={
        'WORKERS': 1, 'OUTPUT_DIR': 'results', 'SE_MULT': 3.0,
        'MARGINAL_SE_MULT': 4.0, 'MIN_CYCLE_LENGTH': 3,
    })
    def test_defaults_from_settings(self):
        config = parse_config(json.dumps({
            'model': {'variant': 'urrt', 'n': 10},
            'epsilon': 0.1, 'm': 4, 'replications': 1, 'master_seed': 0,
        }))
        self.assertEqual(config.se_mult, 3.0)
        self.assertEqual(config.m_sweep, ())

    def test_auto_m_without_formula(self):
        with self.assertRaises(serializers.ValidationError):
            parse_config(json.dumps({
                'model': {'variant': 'urrt', 'n': 10},
                'epsilon': 0.1, 'm': 'auto', 'replications': 1, 'master_seed': 0,
            }))

    def test_invalid_values(self):
        base = {'model': {'variant': 'ldag', 'n': 10, 'l': 2}, 'epsilon': 0.1, 'replications': 1,
                'master_seed': 0}
        for change in ({'epsilon': 1.5}, {'replications': 0}, {'m': 2}, {'master_seed': -1}):
            with self.subTest(change=change), self.assertRaises(serializers.ValidationError):
                parse_config(json.dumps({**base, **change}))

    def test_invalid_json(self):
        with self.assertRaises(serializers.ValidationError):
            parse_config('{not json')

    def test_load_config_rejects_invalid_utf8(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'config.json'
            path.write_bytes(b'{"model": "\xff"}')
            with self.assertRaises(serializers.ValidationError):
                load_config(path)


class BaselineTests(SimpleTestCase):

    NAME = 'containment-ldag2-n2000'

    def test_committed_baseline_matches_its_config(self):
        config_path, baseline_path = baseline_files(self.NAME)
        config = load_config(config_path)
        baseline = load_baseline(baseline_path)
        self.assertEqual(config.model, ModelSpec.ldag(2000, 2))
        self.assertEqual(config.m_sweep, (4, 8, 12, 16, 20))
        self.assertEqual(config.replications, 200)
        self.assertIn(baseline['m'], config.m_sweep)
        self.assertGreaterEqual(baseline['containment_rate'], 0.5)

    def test_record_then_compare(self):
        config = ExperimentConfig(model=ModelSpec.ldag(60, 2), epsilon=0.5, m=6, replications=4, master_seed=3)
        result = run_containment(config)
        with tempfile.TemporaryDirectory() as directory:
            path = record_baseline(result, Path(directory) / 'pilot.json')
            baseline = load_baseline(path)
        self.assertEqual(baseline['source'], 'pilot')
        self.assertEqual(baseline['containment_rate'], result.containment_rate)
        comparison = compare_to_baseline(result, baseline)
        self.assertTrue(comparison['met'])
        self.assertEqual(comparison['observed_rate'], result.containment_rate)

    def test_rate_below_baseline_is_not_met(self):
        result = run_containment(
            ExperimentConfig(model=ModelSpec.urrt(50), epsilon=0.5, m=5, replications=3, master_seed=0)
        )
        baseline = {'source': 'floor', 'm': 5, 'containment_rate': 0.5, 'replications': 3, 'config_hash': ''}
        self.assertFalse(compare_to_baseline(result, baseline)['met'])

    def test_baseline_for_other_config_rejected(self):
        result = run_containment(
            ExperimentConfig(model=ModelSpec.urrt(50), epsilon=0.5, m=5, replications=2, master_seed=0)
        )
        with self.assertRaises(ModelSpecError):
            compare_to_baseline(result, {'m': 5, 'containment_rate': 0.0, 'config_hash': 'abc'})
        with self.assertRaises(ModelSpecError):
            compare_to_baseline(result, {'m': 6, 'containment_rate': 0.0, 'config_hash': ''})

    def test_malformed_baseline(self):
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / 'bad.json'
            path.write_text(json.dumps({'source': 'guess', 'm': 2, 'containment_rate': 1.5}))
            with self.assertRaises(serializers.ValidationError):
                load_baseline(path)


@pytest.mark.slow
class CalibrationGateTests(SimpleTestCase):

    def workers(self):
        return max(1, settings.ARCHAEOLOGY['WORKERS'])

    def test_paired_sweep_meets_committed_baseline(self):
        config_path, baseline_path = baseline_files(BaselineTests.NAME)
        sweep = run_containment_sweep(load_config(config_path), workers=self.workers())
        self.assertEqual(sweep.subset_violations, 0)
        self.assertTrue(sweep.containment_monotone)
        baseline = load_baseline(baseline_path)
        self.assertTrue(compare_to_baseline(sweep.results[baseline['m']], baseline)['met'])

    def test_lemma_audit_at_scale(self):
        report = run_lemma_audit(ModelSpec.ldag(500, 2), 8, 10000, 2024, workers=self.workers())
        self.assertTrue(report.passed)
        self.assertEqual(report.details['failures'], 0)
