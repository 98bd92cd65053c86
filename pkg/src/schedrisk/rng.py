"""Counter-based uniform random streams.

Every uniform draw is a pure function of (seed, activity slot, replication
index, resample attempt).  This makes simulation output independent of
execution order: replications can be evaluated in any chunking or on any
number of workers, and scenario runs reuse exactly the same underlying
uniforms per activity (common random numbers) without any state handoff.

The mixing function is the splitmix64 finalizer applied after each key
component is folded in; it has full 64-bit avalanche, which is what makes
nearby (slot, replication, attempt) triples statistically independent.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
# 2**-53, so (h >> 11) + 0.5 maps to the open interval (0, 1)
_INV53 = float(2.0 ** -53)


def _mix64(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer; operates on uint64 arrays (wrapping arithmetic)
    x = (x ^ (x >> np.uint64(30))) * _MIX1
    x = (x ^ (x >> np.uint64(27))) * _MIX2
    return x ^ (x >> np.uint64(31))


class RandomField:
    """Addressable source of uniforms for one simulation seed."""

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        base = np.array([self.seed], dtype=np.uint64) + _GAMMA
        self._base = _mix64(base)

    def _slot_key(self, slot: int, attempt: int) -> np.ndarray:
        # 1-element arrays keep the wrapping arithmetic warning-free
        k = _mix64(self._base + _GAMMA * np.array([slot + 1], dtype=np.uint64))
        return _mix64(k + _GAMMA * np.array([attempt + 1], dtype=np.uint64))

    def uniforms(self, slot: int, replications: np.ndarray, attempt: int = 0) -> np.ndarray:
        """Uniforms in (0, 1) for the given replication indices.

        ``slot`` identifies the consumer (the activity's position in the
        network); ``attempt`` separates successive rejection-resampling
        draws for the same elements.
        """
        key = self._slot_key(slot, attempt)
        k = replications.astype(np.uint64, copy=False)
        h = _mix64(key + _GAMMA * (k + np.uint64(1)))
        return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _INV53


class UniformStream:
    """Uniform draws for one (activity slot, replication) pair."""

    def __init__(self, field: RandomField, slot: int, replication: int):
        self.field = field
        self.slot = slot
        self.replications = np.array([replication], dtype=np.uint64)

    def uniform(self, attempt: int = 0) -> float:
        return float(self.field.uniforms(self.slot, self.replications, attempt)[0])


class ReplicationStream:
    """Per-replication view of a RandomField, one sub-stream per activity slot."""

    def __init__(self, field: RandomField, replication: int):
        self.field = field
        self.replication = int(replication)

    def for_slot(self, slot: int) -> UniformStream:
        return UniformStream(self.field, slot, self.replication)
