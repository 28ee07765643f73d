"""Counter-based deterministic random streams.

Every stream is a Philox4x64 generator keyed by (seed, derived stream id).
The raw word stream is consumed sequentially, so a stream yields identical
output no matter how requests are chunked.  Replicas, directions, and
auxiliary draws all get their own stream id and can therefore run in any
order, or in parallel, without coordination.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

# Stream roles within one (seed, replica).
STREAM_START = 0
STREAM_FWD = 1
STREAM_BWD = 2
STREAM_UFLAG = 3
STREAM_AUX = 4

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(ids: tuple[int, ...]) -> int:
    h = 0x243F6A8885A308D3
    for x in ids:
        h = ((h ^ (int(x) & _MASK64)) * _GOLDEN) & _MASK64
        h ^= h >> 29
    return h


class BitStream:
    """A reproducible stream of bits / signed steps / uniform words.

    The stream is a pure function of (seed, *ids); chunk boundaries do not
    affect the output.
    """

    def __init__(self, seed: int, *ids: int):
        self.seed = int(seed) & _MASK64
        self.ids = tuple(int(i) for i in ids)
        self._bg = np.random.Philox(key=[self.seed, _mix(self.ids)])
        self._bits = np.empty(0, dtype=np.uint8)

    def take_bits(self, n: int) -> np.ndarray:
        """Return the next n bits as a uint8 array of 0/1."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        while self._bits.size < n:
            need_words = max(64, -(-(n - self._bits.size) // 64))
            words = self._bg.random_raw(need_words)
            fresh = np.unpackbits(words.astype(">u8").view(np.uint8))
            self._bits = np.concatenate([self._bits, fresh])
        out, self._bits = self._bits[:n], self._bits[n:]
        return out

    def take_steps(self, n: int) -> np.ndarray:
        """Return n iid +-1 increments as int8."""
        bits = self.take_bits(n)
        return (2 * bits.astype(np.int8) - 1)

    def uniform_fraction(self) -> Fraction:
        """One exact uniform draw on [0, 1) with 64-bit resolution."""
        word = int(self._bg.random_raw(1)[0])
        return Fraction(word, 1 << 64)

    def uniform_floats(self, n: int) -> np.ndarray:
        words = self._bg.random_raw(n)
        return words / float(1 << 64)


def stream(seed: int, replica: int, role: int) -> BitStream:
    """The canonical (seed, replica, role) stream."""
    return BitStream(seed, replica, role)
