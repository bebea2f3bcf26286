"""Counter-based random streams.

Trials are grouped in fixed-size blocks and every block draws from its own
Philox generator keyed by ``(seed, tag, block)``.  A block's numbers never
depend on how blocks are scheduled, so serial and threaded runs agree
bit for bit.
"""
from __future__ import annotations

import zlib

import numpy as np

BLOCK_SIZE = 1 << 15


def stream_tag(label: str) -> int:
    """Stable 32-bit integer for a text label."""
    return zlib.crc32(label.encode("utf-8"))


def block_generator(seed: int, tag: int, block: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(tag), int(block)))
    return np.random.Generator(np.random.Philox(seq))


def block_sizes(trials: int, block_size: int = BLOCK_SIZE) -> list[int]:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    full, rest = divmod(trials, block_size)
    return [block_size] * full + ([rest] if rest else [])
