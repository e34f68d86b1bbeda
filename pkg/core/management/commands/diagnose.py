"""
Management command to run one statistical diagnostic and print its report
"""
from experiments import diagnostics
from experiments.emit import emit_report
from experiments.harness import run_lemma_audit
from experiments.serializers import DiagnosticReportSerializer
from graphs.generators import ModelSpec
from utils.commands import ArchaeologyCommand
from utils.exceptions import ModelSpecError

CHECKS = ('domination', 'edge-marginal', 'xk', 'xk-tail', 'height', 'lemmas')


def parse_pattern(text):
    """"1-4,2-4" -> [(1, 4), (2, 4)]; an empty string is the empty pattern."""
    pairs = []
    for chunk in filter(None, (part.strip() for part in text.split(','))):
        pieces = chunk.replace(':', '-').split('-')
        if len(pieces) != 2 or not all(piece.strip().isdigit() for piece in pieces):
            raise ModelSpecError(f"Malformed pair {chunk!r}; expected 'a-b'")
        pairs.append((int(pieces[0]), int(pieces[1])))
    return pairs


class Command(ArchaeologyCommand):
    help = 'Run a statistical diagnostic (domination, edge marginals, X_k, tree height, lemmas)'

    def add_arguments(self, parser):
        parser.add_argument(
            '--check',
            required=True,
            choices=CHECKS,
            help='Diagnostic to run',
        )
        parser.add_argument('--reps', type=int, default=10000, help='Number of replications')
        parser.add_argument('--seed', type=int, default=0, help='Master seed')
        parser.add_argument(
            '--se-mult',
            type=float,
            help='Tolerance in standard errors (default: NETARCH_SE_MULT, NETARCH_MARGINAL_SE_MULT for edge-marginal)',
        )
        parser.add_argument(
            '--model',
            default='ldag',
            choices=['ldag', 'cooper-frieze'],
            help='Model for domination and lemmas',
        )
        parser.add_argument('--n', type=int, default=6, help='Vertices (domination, edge-marginal, lemmas)')
        parser.add_argument('--l', type=int, default=2, help='Trees per l-dag (domination, lemmas)')
        parser.add_argument('--c', type=float, help='Edge density constant (cooper-frieze domination)')
        parser.add_argument(
            '--pattern',
            default='',
            help='Edge pattern for domination, e.g. "1-4,2-4"',
        )
        parser.add_argument('--i', type=int, help='Endpoint of the edge {1, i} (edge-marginal)')
        parser.add_argument('--k', type=int, help='Tree size (xk, height; xk-tail defaults to k_eps)')
        parser.add_argument('--epsilon', type=float, help='Error probability (xk-tail, height)')
        parser.add_argument('--m', type=int, default=8, help='Cycle-length budget (lemmas)')
        parser.add_argument(
            '--out',
            help='Directory to also write the report JSON into',
        )
        self.add_threads_argument(parser)

    def _require(self, options, *names):
        missing = [f"--{name}" for name in names if options.get(name) is None]
        if missing:
            raise ModelSpecError(f"--check {options['check']} requires {', '.join(missing)}")

    def _model(self, options):
        if options['model'] == 'cooper-frieze':
            self._require(options, 'c')
            return ModelSpec.cooper_frieze(options['n'], options['c'])
        return ModelSpec.ldag(options['n'], options['l'])

    def run(self, **options):
        check = options['check']
        reps, seed, se_mult = options['reps'], options['seed'], options['se_mult']

        if check == 'domination':
            pattern = parse_pattern(options['pattern'])
            if options['model'] == 'ldag':
                report = diagnostics.check_domination(
                    options['l'], options['n'], pattern, reps, seed, se_mult=se_mult
                )
            else:
                report = diagnostics.check_model_domination(
                    self._model(options), pattern, reps, seed, se_mult=se_mult
                )
        elif check == 'edge-marginal':
            self._require(options, 'i')
            report = diagnostics.check_edge_marginal(
                options['n'], options['i'], reps, seed, se_mult=se_mult
            )
        elif check == 'xk':
            self._require(options, 'k')
            report = diagnostics.check_xk_bracket(options['k'], reps, seed, se_mult=se_mult)
        elif check == 'xk-tail':
            self._require(options, 'epsilon')
            report = diagnostics.check_xk_tail(
                options['epsilon'], reps, seed, se_mult=se_mult, k=options['k']
            )
        elif check == 'height':
            self._require(options, 'k', 'epsilon')
            report = diagnostics.check_tree_height(
                options['k'], options['epsilon'], reps, seed, se_mult=se_mult
            )
        else:
            report = run_lemma_audit(
                self._model(options), options['m'], reps, seed, workers=self.workers(options)
            )

        data = DiagnosticReportSerializer(report).data
        if options['out']:
            emit_report(data, options['out'])
        self.write_json(data)
