"""
Base class shared by the netarch management commands
"""
import json
import logging
import os
import sys
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand

from graphs.core import read_edge_list

from .exceptions import EmissionError, InputEncodingError, command_error_for

logger = logging.getLogger(__name__)

STDIO = '-'


def dump_json(payload):
    return json.dumps(payload, sort_keys=True, indent=2)


class ArchaeologyCommand(BaseCommand):
    """
    Runs `run(**options)` and turns domain failures into CommandError with the
    exit code contract. Payloads go to stdout as JSON, logs to stderr.
    """
    requires_system_checks = []
    requires_migrations_checks = False
    stealth_options = ('stdin',)

    def execute(self, *args, **options):
        if os.environ.get('NO_COLOR'):
            options['no_color'] = True
        return super().execute(*args, **options)

    def handle(self, *args, **options):
        self.stdin = options.get('stdin') or sys.stdin
        try:
            self.run(**options)
        except Exception as exc:
            error = command_error_for(exc)
            if error is None:
                raise
            raise error from exc

    def run(self, **options):
        raise NotImplementedError('subclasses of ArchaeologyCommand must provide a run() method')

    def add_threads_argument(self, parser):
        parser.add_argument(
            '--threads',
            type=int,
            default=None,
            help='Worker processes (default: NETARCH_WORKERS). Output does not depend on it.',
        )

    def workers(self, options):
        threads = options.get('threads')
        if threads is None:
            threads = settings.ARCHAEOLOGY['WORKERS']
        return max(1, threads)

    def read_text(self, path):
        try:
            if path == STDIO:
                return self.stdin.read()
            return Path(path).read_text(encoding='utf-8')
        except UnicodeDecodeError as exc:
            raise InputEncodingError('<stdin>' if path == STDIO else path, exc) from exc
        except OSError as exc:
            raise EmissionError(path, exc.strerror or exc) from exc

    def write_text(self, path, text):
        try:
            Path(path).write_text(text, encoding='utf-8', newline='')
        except OSError as exc:
            raise EmissionError(path, exc.strerror or exc) from exc
        logger.info(f"Wrote {path}")

    def read_graph(self, path):
        return read_edge_list(self.read_text(path))

    def write_json(self, payload):
        self.stdout.write(dump_json(payload))
