"""
Pinned-seed containment baselines

A baseline stores the containment rate that a pilot run of a config reached
at one m. A rerun of the same config must meet or beat it. Committed
baselines live next to their configs in experiments/baselines/ as
<name>.config.json and <name>.json.
"""
import json
import logging
from pathlib import Path

from rest_framework import serializers

from utils.digest import payload_digest
from utils.exceptions import EmissionError, ModelSpecError

from .emit import dump_json, write_artifact
from .serializers import BaselineSerializer

logger = logging.getLogger(__name__)

BASELINE_DIR = Path(__file__).resolve().parent / 'baselines'


def baseline_files(name, directory=BASELINE_DIR):
    """(config path, baseline path) for a named baseline."""
    directory = Path(directory)
    return directory / f'{name}.config.json', directory / f'{name}.json'


def load_baseline(path):
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding='utf-8'))
    except OSError as exc:
        raise EmissionError(path, exc.strerror or exc) from exc
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise serializers.ValidationError(f"{path}: unreadable baseline ({exc})") from exc
    serializer = BaselineSerializer(data=payload)
    serializer.is_valid(raise_exception=True)
    return dict(serializer.validated_data)


def baseline_payload(result):
    return {
        'source': 'pilot',
        'config_hash': payload_digest(result.config.to_dict()),
        'm': result.m,
        'replications': result.replications,
        'containment_rate': result.containment_rate,
        'wilson_ci': list(result.wilson_ci),
    }


def record_baseline(result, path):
    """Writes the pilot baseline for `result`; returns the path."""
    path = write_artifact(Path(path), dump_json(baseline_payload(result)))
    logger.info(f"Recorded baseline at m={result.m}: containment {result.containment_rate:.4f}")
    return path


def compare_to_baseline(result, baseline):
    """
    Dict with the baseline and whether `result` meets it. A baseline recorded
    for another config or another m cannot be compared.
    """
    if baseline['m'] != result.m:
        raise ModelSpecError(f"Baseline is for m={baseline['m']}, result has m={result.m}")
    config_hash = payload_digest(result.config.to_dict())
    if baseline['config_hash'] and baseline['config_hash'] != config_hash:
        raise ModelSpecError(
            f"Baseline was recorded for config {baseline['config_hash']}, not {config_hash}"
        )
    met = result.containment_rate >= baseline['containment_rate']
    if not met:
        logger.warning(
            f"Containment {result.containment_rate:.4f} below baseline "
            f"{baseline['containment_rate']:.4f} at m={result.m}"
        )
    return {**baseline, 'observed_rate': result.containment_rate, 'met': met}
