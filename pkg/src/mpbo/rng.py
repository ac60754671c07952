"""Named, counter-based random streams.

Every stream is ``numpy.random.Generator(Philox4x64-10)`` keyed through a
``SeedSequence`` built from an integer seed and a path of string labels.
Labels are folded to 32-bit words with CRC-32, so a stream name such as
``make_stream(7, "landscape", "policy", 2)`` maps to the same bits on every
platform and numpy release that keeps Philox and SeedSequence stable.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["make_stream", "stream_key"]


def stream_key(*path) -> tuple[int, ...]:
    """Fold a label path into SeedSequence spawn-key words."""
    return tuple(zlib.crc32(str(part).encode("utf-8")) for part in path)


def make_stream(seed: int, *path) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    seq = np.random.SeedSequence(int(seed), spawn_key=stream_key(*path))
    return np.random.Generator(np.random.Philox(seq))
