"""Deterministic random-stream derivation.

Every stochastic routine in the package receives a ``numpy.random.Generator``
derived from (master seed, purpose tag, index).  Streams are independent of
worker count and platform, which is what makes reruns byte-identical.
"""

from zlib import crc32

import numpy as np

__all__ = ["substream"]


def _tag_to_int(tag) -> int:
    if isinstance(tag, str):
        return crc32(tag.encode("utf-8"))
    return int(tag)


def substream(master_seed: int, *path) -> np.random.Generator:
    """Return the generator for a (seed, purpose, index...) path.

    The same path always yields the same stream; distinct paths yield
    independent streams.  String path elements are hashed with CRC-32 so
    tags stay stable across sessions.
    """
    entropy = [int(master_seed)] + [_tag_to_int(t) for t in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))
