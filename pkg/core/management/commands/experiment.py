"""
Management command to run a seeded containment experiment from a JSON config
"""
from django.conf import settings

from experiments.calibration import compare_to_baseline, load_baseline, record_baseline
from experiments.emit import emit_result
from experiments.harness import run_containment, run_containment_sweep
from experiments.serializers import (
    ExperimentResultSerializer,
    SweepResultSerializer,
    parse_config,
)
from utils.commands import ArchaeologyCommand
from utils.exceptions import ModelSpecError


class Command(ArchaeologyCommand):
    help = 'Run a Monte Carlo containment experiment and write CSV + JSON artifacts'

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            required=True,
            help='Experiment config JSON file; "-" reads stdin',
        )
        parser.add_argument(
            '--output-dir',
            help='Artifact directory (default: config output_dir, then NETARCH_OUTPUT_DIR)',
        )
        parser.add_argument(
            '--baseline',
            help='Baseline JSON to compare the containment rate at its m against',
        )
        parser.add_argument(
            '--record-baseline',
            help='Write a pilot baseline for the largest m of this run to this path',
        )
        self.add_threads_argument(parser)

    def run(self, **options):
        config = parse_config(self.read_text(options['config']), source=options['config'])
        output_dir = (
            options['output_dir'] or config.output_dir or settings.ARCHAEOLOGY['OUTPUT_DIR']
        )
        workers = self.workers(options)

        if config.m_sweep:
            sweep = run_containment_sweep(config, workers=workers)
            summary = SweepResultSerializer(sweep).data
            rows = [row for _, result in sorted(sweep.results.items()) for row in result.rows]
            results = sweep.results
            kind = 'sweep'
        else:
            result = run_containment(config, workers=workers)
            summary = ExperimentResultSerializer(result).data
            rows = result.rows
            results = {result.m: result}
            kind = 'containment'

        csv_path, json_path = emit_result(summary, rows, output_dir, config.to_dict(), kind=kind)
        payload = {**summary, 'files': {'csv': str(csv_path), 'json': str(json_path)}}

        if options['baseline']:
            baseline = load_baseline(options['baseline'])
            if baseline['m'] not in results:
                raise ModelSpecError(f"Baseline is for m={baseline['m']}, which this run did not cover")
            payload['baseline'] = compare_to_baseline(results[baseline['m']], baseline)
        if options['record_baseline']:
            path = record_baseline(results[max(results)], options['record_baseline'])
            payload['files']['baseline'] = str(path)

        self.write_json(payload)
