import importlib
import io
import json
import os
import tempfile
from pathlib import Path
from unittest import mock

from django.core.management import call_command, load_command_class
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from graphs.core import read_edge_list

THETA_133 = "6 7\n1 2\n1 3\n1 5\n2 4\n2 6\n3 4\n5 6\n"
FIGURE_EIGHT = "5 6\n1 2\n1 3\n1 4\n1 5\n2 3\n4 5\n"
PATH = "4 3\n1 2\n2 3\n3 4\n"


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = Path(self._tmp.name)

    def tearDown(self):
        self._tmp.cleanup()

    def write(self, name, text):
        path = self.tmp / name
        path.write_text(text)
        return str(path)

    def call(self, *args, stdin=None):
        stdout, stderr = io.StringIO(), io.StringIO()
        kwargs = {'stdout': stdout, 'stderr': stderr}
        if stdin is not None:
            kwargs['stdin'] = io.StringIO(stdin)
        call_command(*args, **kwargs)
        return stdout.getvalue(), stderr.getvalue()

    def call_json(self, *args, stdin=None):
        return json.loads(self.call(*args, stdin=stdin)[0])

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as context:
            self.call(*args)
        self.assertEqual(context.exception.returncode, code)


class GenerateCommandTests(CommandTestCase):

    def test_urrt_file(self):
        out = str(self.tmp / 'g.txt')
        summary = self.call_json('generate', '--model', 'urrt', '--n', '10', '--seed', '7', '--out', out)
        self.assertEqual(summary['edges'], 9)
        self.assertEqual(summary['n'], 10)
        self.assertEqual(read_edge_list(Path(out).read_text()).edge_count, 9)

    def test_ldag_to_stdout(self):
        stdout, stderr = self.call('generate', '--model', 'ldag', '--n', '100', '--l', '2', '--seed', '1', '--out', '-')
        g = read_edge_list(stdout)
        self.assertTrue(99 <= g.edge_count <= 198)
        self.assertEqual(json.loads(stderr)['edges'], g.edge_count)

    def test_same_flags_same_file(self):
        first = self.call('generate', '--model', 'cooper-frieze', '--n', '50', '--c', '2', '--seed', '4', '--out', '-')[0]
        second = self.call('generate', '--model', 'cooper-frieze', '--n', '50', '--c', '2', '--seed', '4', '--out', '-')[0]
        self.assertEqual(first, second)

    def test_process(self):
        out = str(self.tmp / 'p.txt')
        summary = self.call_json(
            'generate', '--model', 'cf-process', '--alpha', '0.5', '--steps', '100', '--seed', '3', '--out', out
        )
        self.assertEqual(summary['n'] - 1 + summary['edge_steps'], 100)
        self.assertEqual(summary['model'], {'variant': 'cf-process', 'T': 100, 'alpha': 0.5})

    def test_missing_parameter_is_usage_error(self):
        self.assertExitCode(2, 'generate', '--model', 'ldag', '--n', '10', '--out', '-')

    def test_unwritable_output_is_io_error(self):
        self.assertExitCode(1, 'generate', '--model', 'urrt', '--n', '5', '--out', str(self.tmp / 'no' / 'g.txt'))


class AnchorsCommandTests(CommandTestCase):

    def test_theta(self):
        data = self.call_json('anchors', '--in', self.write('theta.txt', THETA_133), '--m', '4')
        self.assertEqual(data, {'m': 4, 'anchors': [1, 2]})

    def test_tree(self):
        self.assertEqual(self.call_json('anchors', '--in', self.write('p.txt', PATH), '--m', '9')['anchors'], [])

    def test_vertex_witness(self):
        data = self.call_json('anchors', '--in', self.write('f.txt', FIGURE_EIGHT), '--m', '3', '--vertex', '1')
        self.assertTrue(data['anchored'])
        self.assertEqual((data['witness']['s'], data['witness']['t'], data['witness']['p']), (3, 3, 1))

    def test_witnesses_attached(self):
        data = self.call_json('anchors', '--in', self.write('t.txt', THETA_133), '--m', '4', '--witness')
        self.assertEqual(sorted(data['witnesses']), ['1', '2'])

    def test_stdin(self):
        self.assertEqual(self.call_json('anchors', '--in', '-', '--m', '3', stdin=FIGURE_EIGHT)['anchors'], [1])

    def test_small_m_is_usage_error(self):
        self.assertExitCode(2, 'anchors', '--in', self.write('t.txt', THETA_133), '--m', '2')

    def test_malformed_file_is_usage_error(self):
        self.assertExitCode(2, 'anchors', '--in', self.write('bad.txt', "2 1\n1 1\n"), '--m', '3')

    def test_missing_file_is_io_error(self):
        self.assertExitCode(1, 'anchors', '--in', str(self.tmp / 'missing.txt'), '--m', '3')

    def test_invalid_utf8_is_usage_error(self):
        path = self.tmp / 'latin.txt'
        path.write_bytes(b'3 1\n1 2\xff\n')
        self.assertExitCode(2, 'anchors', '--in', str(path), '--m', '3')

    def test_threads_do_not_change_output(self):
        path = str(self.tmp / 'g.txt')
        self.call('generate', '--model', 'ldag', '--n', '200', '--l', '2', '--seed', '8', '--out', path)
        serial = self.call('anchors', '--in', path, '--m', '6', '--threads', '1')[0]
        parallel = self.call('anchors', '--in', path, '--m', '6', '--threads', '3')[0]
        self.assertEqual(serial, parallel)


class EstimateCommandTests(CommandTestCase):

    def test_auto_m_for_ldag(self):
        path = str(self.tmp / 'g.txt')
        self.call('generate', '--model', 'ldag', '--n', '60', '--l', '2', '--seed', '2', '--out', path)
        data = self.call_json('estimate', '--in', path, '--model', 'ldag', '--l', '2', '--epsilon', '0.5')
        self.assertEqual(data['m_used'], 11)
        self.assertFalse(data['epsilon_in_guaranteed_range'])

    def test_override(self):
        data = self.call_json(
            'estimate', '--in', self.write('t.txt', THETA_133), '--model', 'ldag', '--l', '2',
            '--epsilon', '0.5', '--m', '4',
        )
        self.assertEqual(data['members'], [1, 2])

    def test_bad_epsilon(self):
        self.assertExitCode(
            2, 'estimate', '--in', self.write('t.txt', THETA_133), '--model', 'ldag', '--l', '2', '--epsilon', '1.5'
        )

    def test_missing_m_for_urrt(self):
        self.assertExitCode(2, 'estimate', '--in', self.write('p.txt', PATH), '--model', 'urrt', '--epsilon', '0.1')


class OracleCommandTests(CommandTestCase):

    def test_matches_anchors(self):
        for seed in range(5):
            path = str(self.tmp / f'g{seed}.txt')
            self.call('generate', '--model', 'ldag', '--n', '12', '--l', '3', '--seed', str(seed), '--out', path)
            self.assertEqual(
                self.call_json('oracle', '--in', path, '--m', '6')['anchors'],
                self.call_json('anchors', '--in', path, '--m', '6')['anchors'],
            )

    def test_guard_exit_code(self):
        path = str(self.tmp / 'big.txt')
        self.call('generate', '--model', 'ldag', '--n', '40', '--l', '2', '--seed', '0', '--out', path)
        self.assertExitCode(3, 'oracle', '--in', path, '--m', '4')


class ExperimentCommandTests(CommandTestCase):

    def config(self, **changes):
        payload = {
            'model': {'variant': 'ldag', 'n': 60, 'l': 2},
            'epsilon': 0.5,
            'm': 5,
            'replications': 4,
            'master_seed': 11,
        }
        payload.update(changes)
        return self.write('config.json', json.dumps(payload))

    def test_rerun_is_byte_identical(self):
        config = self.config()
        first = self.call_json('experiment', '--config', config, '--output-dir', str(self.tmp / 'a'))
        csv_bytes = Path(first['files']['csv']).read_bytes()
        json_bytes = Path(first['files']['json']).read_bytes()
        second = self.call_json('experiment', '--config', config, '--output-dir', str(self.tmp / 'a'), '--threads', '2')
        self.assertEqual(Path(second['files']['csv']).read_bytes(), csv_bytes)
        self.assertEqual(Path(second['files']['json']).read_bytes(), json_bytes)
        self.assertTrue(csv_bytes.startswith(b'rep,seed,n,m,contained,set_size,ms\n'))

    def test_sweep(self):
        data = self.call_json(
            'experiment', '--config', self.config(m_sweep=[4, 6]), '--output-dir', str(self.tmp / 's')
        )
        self.assertEqual(data['m_values'], [4, 6])
        self.assertEqual(data['subset_violations'], 0)

    def test_record_and_check_baseline(self):
        config = self.config()
        baseline = str(self.tmp / 'pilot.json')
        recorded = self.call_json(
            'experiment', '--config', config, '--output-dir', str(self.tmp / 'b'), '--record-baseline', baseline
        )
        self.assertEqual(recorded['files']['baseline'], baseline)
        checked = self.call_json(
            'experiment', '--config', config, '--output-dir', str(self.tmp / 'b'), '--baseline', baseline
        )
        self.assertTrue(checked['baseline']['met'])
        self.assertEqual(checked['baseline']['m'], 5)

    def test_baseline_for_uncovered_m(self):
        path = self.write('floor.json', json.dumps(
            {'source': 'floor', 'm': 9, 'containment_rate': 0.1, 'replications': 4}
        ))
        self.assertExitCode(
            2, 'experiment', '--config', self.config(), '--output-dir', str(self.tmp / 'u'), '--baseline', path
        )

    def test_invalid_config(self):
        self.assertExitCode(2, 'experiment', '--config', self.config(replications=0))

    def test_config_with_invalid_utf8(self):
        path = self.tmp / 'config.json'
        path.write_bytes(b'{"epsilon": "\xe9"}')
        self.assertExitCode(2, 'experiment', '--config', str(path))

    def test_guard(self):
        path = self.config(model={'variant': 'ldag', 'n': 5000, 'l': 2}, guards={'max_vertices': 1000})
        self.assertExitCode(3, 'experiment', '--config', path, '--output-dir', str(self.tmp / 'g'))


class DiagnoseCommandTests(CommandTestCase):

    def test_xk(self):
        data = self.call_json('diagnose', '--check', 'xk', '--k', '100', '--reps', '4000', '--seed', '5')
        self.assertTrue(data['passed'])
        self.assertEqual(data['check'], 'xk')

    def test_domination(self):
        data = self.call_json(
            'diagnose', '--check', 'domination', '--n', '6', '--l', '2', '--pattern', '1-4,2-4', '--reps', '20000'
        )
        self.assertTrue(data['passed'])
        self.assertEqual(data['details']['pattern'], [[1, 4], [2, 4]])

    def test_report_written(self):
        out = self.tmp / 'reports'
        self.call_json('diagnose', '--check', 'edge-marginal', '--n', '10', '--i', '2', '--reps', '100', '--out', str(out))
        self.assertEqual(len(list(out.glob('edge-marginal-*.json'))), 1)

    def test_lemmas(self):
        data = self.call_json('diagnose', '--check', 'lemmas', '--n', '120', '--m', '6', '--reps', '2')
        self.assertTrue(data['passed'])

    def test_missing_flag(self):
        self.assertExitCode(2, 'diagnose', '--check', 'edge-marginal')

    def test_malformed_pattern(self):
        self.assertExitCode(2, 'diagnose', '--check', 'domination', '--pattern', '1-2-3')


class CommandSurfaceTests(CommandTestCase):

    FLAGS = {
        'generate': ['--model', '--n', '--steps', '--l', '--c', '--alpha', '--seed', '--stream', '--out'],
        'anchors': ['--in', '--m', '--vertex', '--witness', '--threads'],
        'estimate': ['--in', '--model', '--l', '--c', '--alpha', '--epsilon', '--m', '--witness', '--threads'],
        'experiment': ['--config', '--output-dir', '--baseline', '--record-baseline', '--threads'],
        'oracle': ['--in', '--m'],
        'diagnose': ['--check', '--reps', '--seed', '--se-mult', '--pattern', '--k', '--epsilon', '--out'],
    }

    def test_help_documents_every_flag(self):
        for name, flags in self.FLAGS.items():
            help_text = load_command_class('core', name).create_parser('manage.py', name).format_help()
            for flag in flags:
                with self.subTest(command=name, flag=flag):
                    self.assertIn(flag, help_text)

    def test_unknown_flag_rejected(self):
        with self.assertRaises(CommandError):
            self.call('oracle', '--in', self.write('t.txt', THETA_133), '--m', '4', '--bogus')

    def test_no_color(self):
        with mock.patch.dict(os.environ, {'NO_COLOR': '1'}):
            data = self.call_json('anchors', '--in', self.write('t.txt', THETA_133), '--m', '4')
        self.assertEqual(data['anchors'], [1, 2])


class LoggingSettingsTests(SimpleTestCase):

    def test_log_file_covers_every_project_logger(self):
        import netarch.settings as project_settings

        log_file = str(Path(tempfile.gettempdir()) / 'netarch-settings-test.log')
        try:
            with mock.patch.dict(os.environ, {'NETARCH_LOG_FILE': log_file}):
                reloaded = importlib.reload(project_settings)
            self.assertEqual(reloaded.LOGGING['handlers']['file']['filename'], log_file)
            for name in ('graphs', 'anchors', 'estimator', 'experiments', 'core', 'utils'):
                with self.subTest(logger=name):
                    self.assertIn('file', reloaded.LOGGING['loggers'][name]['handlers'])
        finally:
            importlib.reload(project_settings)
