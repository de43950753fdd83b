"""Seed-split random streams.

Every randomized routine draws sample ``k`` from its own Philox stream keyed by
``(seed, tag, k)``.  Results therefore do not depend on how samples are
distributed over workers.
"""

import zlib

import numpy as np


def _tag_key(tag):
    if isinstance(tag, str):
        return zlib.crc32(tag.encode())
    return int(tag)


def substream(seed, *keys):
    """Independent generator for ``(seed, *keys)``; keys may be ints or strings."""
    entropy = [int(seed) & 0xFFFFFFFF, (int(seed) >> 32) & 0xFFFFFFFF]
    entropy += [_tag_key(k) for k in keys]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))
