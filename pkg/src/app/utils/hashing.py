"""
Content hashing utilities for provenance
"""
import hashlib
import json
from typing import Any


def canonical_json(payload: Any) -> str:
    """Serialize with sorted keys and no whitespace variation"""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def hash_payload(payload: Any) -> str:
    """return the sha256 hex digest of a JSON-serializable payload"""
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def stable_int(label: str) -> int:
    """32-bit integer derived from a string, identical across processes"""
    return int.from_bytes(hashlib.sha256(label.encode("utf-8")).digest()[:4], "big")
