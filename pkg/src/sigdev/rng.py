"""Counter-based random streams.

Every stochastic object in the package draws from a Philox generator keyed
by ``(seed, stream indices...)``.  Streams are therefore order-independent:
sample ``j`` of an ensemble is the same no matter which samples were drawn
before it, which makes Monte-Carlo runs reproducible and parallel-safe.
"""

from __future__ import annotations

import numpy as np

# stream tags keep unrelated consumers of the same seed apart
TAG_FBM = 0x01
TAG_GUE = 0x02
TAG_GINIBRE = 0x03

_MASK = (1 << 64) - 1


def keyed_generator(seed: int, tag: int, index: int = 0, subindex: int = 0) -> np.random.Generator:
    """Philox generator for stream (seed, tag, index, subindex).

    ``index`` may use up to 48 bits and ``subindex`` up to 8; the tag sits
    in the top byte of the second key word.
    """
    if not 0 <= subindex < (1 << 8) or not 0 <= index < (1 << 48):
        raise ValueError("stream index out of range")
    key = np.array(
        [seed & _MASK, ((tag & 0xFF) << 56) | (index << 8) | subindex],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
