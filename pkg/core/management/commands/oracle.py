"""
Management command for the exhaustive reference computation of S_m
"""
from anchors.oracle import brute_force_anchor_set
from anchors.serializers import AnchorSetSerializer
from utils.commands import ArchaeologyCommand


class Command(ArchaeologyCommand):
    help = 'Compute S_m by enumerating every cycle pair (small graphs only)'

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
            help='Maximum cycle length (>= 3, at most NETARCH_ORACLE_MAX_M)',
        )

    def run(self, **options):
        g = self.read_graph(options['input'])
        anchor_set = brute_force_anchor_set(g, options['m'])
        self.write_json(AnchorSetSerializer(anchor_set).data)
