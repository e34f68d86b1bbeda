"""
Management command to compute the anchor set S_m of a graph
"""
from anchors.detection import compute_anchor_set, find_witness
from anchors.serializers import AnchorSetSerializer, DoubleCycleWitnessSerializer
from utils.commands import ArchaeologyCommand


class Command(ArchaeologyCommand):
    help = 'Compute S_m, the vertices anchoring a double cycle with cycles of length <= m'

    def add_arguments(self, parser):
        parser.add_argument(
            '--in',
            dest='input',
            required=True,
            help='Edge-list file; "-" reads stdin',
        )
        parser.add_argument(
            '--m',
            type=int,
            required=True,
            help='Maximum cycle length (>= 3)',
        )
        parser.add_argument(
            '--vertex',
            type=int,
            help='Only examine this vertex and report its least witness',
        )
        parser.add_argument(
            '--witness',
            action='store_true',
            help='Attach one witness double cycle per anchor',
        )
        self.add_threads_argument(parser)

    def run(self, **options):
        g = self.read_graph(options['input'])
        m = options['m']

        if options['vertex'] is not None:
            witness = find_witness(g, options['vertex'], m)
            self.write_json({
                'm': m,
                'vertex': options['vertex'],
                'anchored': witness is not None,
                'witness': DoubleCycleWitnessSerializer(witness).data if witness else None,
            })
            return

        anchor_set = compute_anchor_set(
            g, m, workers=self.workers(options), with_witnesses=options['witness']
        )
        self.write_json(AnchorSetSerializer(anchor_set).data)
