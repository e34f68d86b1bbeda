"""
Stable digests of JSON-like payloads, used to name output artifacts
"""
import hashlib
import json


def canonical_json(payload):
    """Serialize with sorted keys and no whitespace variation"""
    return json.dumps(payload, sort_keys=True, separators=(',', ':'))


def payload_digest(payload, length=12):
    """Generate a short hex digest from a JSON-serializable payload"""
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()[:length]
