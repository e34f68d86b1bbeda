"""
Writing experiment artifacts

File names embed a digest of the config payload, so a rerun with the same
config overwrites the same files with identical bytes.
"""
import json
import logging
from pathlib import Path

import pandas as pd

from utils.digest import payload_digest
from utils.exceptions import EmissionError

from .harness import CSV_COLUMNS

logger = logging.getLogger(__name__)


def dump_json(payload):
    return json.dumps(payload, sort_keys=True, indent=2) + '\n'


def rows_frame(rows):
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


def rows_csv(rows):
    return rows_frame(rows).to_csv(index=False, lineterminator='\n')


def write_artifact(path, text):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8', newline='')
    except OSError as exc:
        raise EmissionError(path, exc.strerror or exc) from exc
    logger.info(f"Wrote {path}")
    return path


def artifact_stem(kind, parameters):
    return f"{kind}-{payload_digest(parameters)}"


def emit_result(summary, rows, output_dir, parameters, kind='containment'):
    """Writes <kind>-<digest>.csv and .json; returns both paths."""
    stem = artifact_stem(kind, parameters)
    output_dir = Path(output_dir)
    csv_path = write_artifact(output_dir / f"{stem}.csv", rows_csv(rows))
    json_path = write_artifact(output_dir / f"{stem}.json", dump_json(summary))
    return csv_path, json_path


def emit_report(report_data, output_dir):
    """Writes one diagnostic report as <check>-<digest>.json."""
    stem = artifact_stem(report_data['check'], report_data['parameters'])
    return write_artifact(Path(output_dir) / f"{stem}.json", dump_json(report_data))
