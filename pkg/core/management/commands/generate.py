"""
Management command to sample a graph from one of the growth models
"""
from graphs.core import write_edge_list
from graphs.generators import ModelVariant, RngSeed, sample_cooper_frieze_process
from graphs.serializers import ModelSpecSerializer
from utils.commands import STDIO, ArchaeologyCommand, dump_json


class Command(ArchaeologyCommand):
    help = 'Sample a random graph and write it as an edge list'

    def add_arguments(self, parser):
        parser.add_argument(
            '--model',
            required=True,
            choices=[variant.value for variant in ModelVariant],
            help='Growth model to sample from',
        )
        parser.add_argument(
            '--n',
            type=int,
            help='Number of vertices (urrt, ldag, cooper-frieze, inhom-er)',
        )
        parser.add_argument(
            '--steps',
            type=int,
            help='Number of process steps T (cf-process)',
        )
        parser.add_argument(
            '--l',
            type=int,
            help='Number of superimposed recursive trees (ldag)',
        )
        parser.add_argument(
            '--c',
            type=float,
            help='Edge density constant (cooper-frieze, inhom-er)',
        )
        parser.add_argument(
            '--alpha',
            type=float,
            help='Probability of an edge step (cf-process)',
        )
        parser.add_argument(
            '--seed',
            type=int,
            default=0,
            help='Master seed, an unsigned 64-bit integer',
        )
        parser.add_argument(
            '--stream',
            type=int,
            default=0,
            help='Replication stream index under the master seed',
        )
        parser.add_argument(
            '--out',
            required=True,
            help='Edge-list output path; "-" writes the edge list to stdout',
        )

    def run(self, **options):
        data = {
            'variant': options['model'],
            'n': options['n'],
            'T': options['steps'],
            'l': options['l'],
            'c': options['c'],
            'alpha': options['alpha'],
        }
        serializer = ModelSpecSerializer(data={k: v for k, v in data.items() if v is not None})
        serializer.is_valid(raise_exception=True)
        spec = serializer.validated_data['spec']
        seed = RngSeed(options['seed'], options['stream'])

        summary = {'model': spec.to_dict(), 'seed': options['seed'], 'stream': options['stream']}
        if spec.variant is ModelVariant.CF_PROCESS:
            sample = sample_cooper_frieze_process(spec.alpha, spec.steps, seed)
            g = sample.graph
            summary.update({'edge_steps': sample.edge_steps, 'forced_steps': sample.forced_steps})
        else:
            g = spec.sample(seed)
        summary.update({'n': g.n, 'edges': g.edge_count})

        text = write_edge_list(g)
        if options['out'] == STDIO:
            self.stdout.write(text, ending='')
            self.stderr.write(dump_json(summary))
        else:
            self.write_text(options['out'], text)
            self.write_json(summary)
