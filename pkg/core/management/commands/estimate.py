"""
Management command to compute the root confidence set of an observed graph
"""
from estimator.serializers import ConfidenceSetSerializer
from estimator.services import estimate_root
from graphs.generators import ModelVariant
from graphs.serializers import ModelSpecSerializer
from utils.commands import ArchaeologyCommand


class Command(ArchaeologyCommand):
    help = 'Estimate the root: the confidence set S_m at m = m_eps (or --m)'

    def add_arguments(self, parser):
        parser.add_argument(
            '--in',
            dest='input',
            required=True,
            help='Edge-list file; "-" reads stdin',
        )
        parser.add_argument(
            '--model',
            required=True,
            choices=[variant.value for variant in ModelVariant],
            help='Model the graph is assumed to come from; n (or T) is read off the graph',
        )
        parser.add_argument('--l', type=int, help='Trees per l-dag (ldag)')
        parser.add_argument('--c', type=float, help='Edge density constant (cooper-frieze, inhom-er)')
        parser.add_argument('--alpha', type=float, help='Edge-step probability (cf-process)')
        parser.add_argument(
            '--epsilon',
            type=float,
            required=True,
            help='Error probability in (0, 1)',
        )
        parser.add_argument(
            '--m',
            type=int,
            help='Override the cycle-length budget (required for urrt and inhom-er)',
        )
        parser.add_argument(
            '--witness',
            action='store_true',
            help='Attach one witness double cycle per member',
        )
        self.add_threads_argument(parser)

    def run(self, **options):
        g = self.read_graph(options['input'])
        data = {
            'variant': options['model'],
            'n': g.n,
            # every process step adds exactly one edge
            'T': max(g.edge_count, 1),
            'l': options['l'],
            'c': options['c'],
            'alpha': options['alpha'],
        }
        serializer = ModelSpecSerializer(data={k: v for k, v in data.items() if v is not None})
        serializer.is_valid(raise_exception=True)

        confidence_set = estimate_root(
            g,
            serializer.validated_data['spec'],
            options['epsilon'],
            m_override=options['m'],
            workers=self.workers(options),
            with_witnesses=options['witness'],
        )
        self.write_json(ConfidenceSetSerializer(confidence_set).data)
