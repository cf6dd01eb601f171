"""Deterministic, order-independent random streams.

Every stochastic routine in the package draws from a counter-based Philox
stream keyed by ``(seed, tag, index)``.  Stream identity depends only on
those values, never on how many draws other streams have consumed, so
results are reproducible under any evaluation order or parallel schedule.
"""

import hashlib

import numpy as np


def _tag_word(tag: str) -> int:
    digest = hashlib.sha256(tag.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """Generator for the Philox substream ``(seed, tag, index)``."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, _tag_word(tag)], dtype=np.uint64)
    counter = np.array([index & 0xFFFFFFFFFFFFFFFF, 0, 0, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
