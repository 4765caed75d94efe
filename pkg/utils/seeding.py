"""
Random-stream derivation and config digests.

All randomness flows from one top-level seed. Named substreams such as
("chain", 1) or ("gap", 17) get independent generators, so any part of a
run can be reproduced on its own.
"""

import hashlib
import json
import zlib
from typing import Any, Dict, Union

import numpy as np

StreamKey = Union[int, str]


def _key_to_int(key: StreamKey) -> int:
    if isinstance(key, (int, np.integer)):
        if key < 0:
            raise ValueError(f"Stream keys must be non-negative. Got: {key}")
        return int(key)
    return zlib.crc32(str(key).encode('utf-8'))


def derive_rng(seed: int, *keys: StreamKey) -> np.random.Generator:
    """
    Build the generator for a named substream of ``seed``.

    Args:
        seed: Top-level seed of the run
        *keys: Substream name parts, e.g. ``'chain', 0``

    Returns:
        numpy Generator for that substream
    """
    if seed < 0:
        raise ValueError(f"Seed must be non-negative. Got: {seed}")
    entropy = [int(seed)] + [_key_to_int(k) for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def config_digest(values: Dict[str, Any]) -> str:
    """SHA-256 over the canonical JSON rendering of ``values`` (first 16 hex chars)."""
    canonical = json.dumps(values, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]
