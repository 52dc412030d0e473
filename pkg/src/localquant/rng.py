"""Counter-based deterministic random streams.

Every draw is a pure function of (master_seed, stream_id, draw index), so a
stream produces the same numbers on every platform regardless of thread
count, chunking, or evaluation order. Sub-streams are derived by mixing a tag
into the stream id, which lets independent tasks (replicates, acceptance
draws) consume non-overlapping randomness without coordination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def _mix_int(z: int) -> int:
    """SplitMix64 finalizer on a Python int (bijective avalanche mod 2**64)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to a uint64 array."""
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_A)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_B)
    return z ^ (z >> np.uint64(31))


@dataclass(frozen=True)
class RngStream:
    """Handle for one deterministic stream of draws.

    Identical (master_seed, stream_id) pairs yield identical sequences.
    Instances are immutable; derive fresh randomness with `substream`.
    """

    master_seed: int
    stream_id: int = 0

    def _base(self) -> int:
        k = _mix_int(self.master_seed)
        return _mix_int(k ^ ((self.stream_id & _MASK64) * _GOLDEN & _MASK64))

    def substream(self, tag: int) -> "RngStream":
        """Derive an independent stream keyed by `tag`."""
        # tag -> tag * odd + 1 is injective mod 2**64, so distinct tags
        # always yield distinct stream ids
        t = ((tag & _MASK64) * _GOLDEN + 1) & _MASK64
        return RngStream(self.master_seed, _mix_int(self._base() ^ t))

    def uniforms(self, n: int) -> np.ndarray:
        """`n` i.i.d. draws from the open interval (0, 1).

        Draw i is a pure function of (master_seed, stream_id, i); calling
        uniforms(k) for k < n returns a prefix of uniforms(n).
        """
        if n < 0:
            raise ValueError("n must be nonnegative")
        base = self._base()
        counters = (np.uint64(base) + np.uint64(_GOLDEN) * np.arange(1, n + 1, dtype=np.uint64)
                    if n else np.empty(0, dtype=np.uint64))
        bits = _mix_array(counters)
        # 53 significant bits, offset by half a grid step so 0.0 never occurs
        return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def normals(self, n: int) -> np.ndarray:
        """`n` i.i.d. standard normal draws (inverse-CDF of `uniforms`)."""
        return ndtri(self.uniforms(n))
