"""Hand-built walk paths for fixture-level tests.

ScriptedPath mimics the WalkPath interface but replays a fixed position
sequence, so ledger and embedding behavior can be checked against hand
counts.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass
class _Cfg:
    dx: Fraction = Fraction(1)
    seed: int = 0

    @property
    def dt(self) -> Fraction:
        return self.dx * self.dx


class ScriptedPath:
    """Replays positions(0..n_fwd) forward and positions(0..-n_bwd) backward."""

    def __init__(self, fwd_positions, bwd_positions=None, dx=Fraction(1)):
        fwd = [int(x) for x in fwd_positions]
        bwd = [int(x) for x in (bwd_positions or [fwd[0]])]
        if bwd[0] != fwd[0]:
            raise ValueError("both sides must share the start position")
        self.start = fwd[0]
        self._fwd = np.asarray(fwd, dtype=np.int64)
        self._bwd = np.asarray(bwd, dtype=np.int64)
        self.cfg = _Cfg(dx=Fraction(dx))
        self.replica = 0

    @property
    def horizon_fwd(self) -> int:
        return len(self._fwd) - 1

    @property
    def horizon_bwd(self) -> int:
        return len(self._bwd) - 1

    def positions(self, n: int) -> int:
        return int(self._fwd[n]) if n >= 0 else int(self._bwd[-n])

    def full_positions(self) -> np.ndarray:
        return np.concatenate([self._bwd[:0:-1], self._fwd])
