"""Counter-based random substreams.

One 64-bit root seed is split into independent substreams keyed by an
arbitrary integer path (purpose code, step index, agent hash, ...). The
derivation is a pure function of (seed, path), so the order in which agents
or episodes are processed can never change the numbers they draw. Draws are
produced by a splitmix64 generator, which is cheap enough to create fresh
per agent and per step.
"""

from __future__ import annotations

import hashlib
import math

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# purpose codes for substream paths
INIT = 0
PERCEIVE = 1
DECIDE = 2
STEP = 3
SAMPLE = 4
ARM = 5
SESSION = 6


def _finalize(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & MASK64
    return z ^ (z >> 31)


def derive_key(seed: int, *path: int) -> int:
    """Mix a root seed and an integer path into a 64-bit substream key."""
    h = seed & MASK64
    for component in path:
        h = _finalize((h + (component & MASK64) * _GOLDEN) & MASK64)
    return h


def agent_token(agent_id: str) -> int:
    """Stable 64-bit token for an agent id (independent of PYTHONHASHSEED)."""
    digest = hashlib.sha256(agent_id.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


class Substream:
    """splitmix64 stream over a derived key.

    Provides the handful of draw kinds the simulator needs. All methods
    advance an internal counter; two Substreams built from the same
    (seed, path) produce identical sequences.
    """

    __slots__ = ("_state", "_spare_normal")

    def __init__(self, seed: int, *path: int):
        self._state = derive_key(seed, *path)
        self._spare_normal: float | None = None

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return _finalize(self._state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def integers(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return int(self.random() * n)

    def bit(self) -> int:
        return self.next_u64() & 1

    def normal(self, mu: float = 0.0, sigma: float = 1.0) -> float:
        """Gaussian draw via Box-Muller, caching the spare deviate."""
        if self._spare_normal is not None:
            z = self._spare_normal
            self._spare_normal = None
            return mu + sigma * z
        while True:
            u1 = self.random()
            if u1 > 1e-300:
                break
        u2 = self.random()
        radius = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare_normal = radius * math.sin(theta)
        return mu + sigma * radius * math.cos(theta)

    def choice(self, seq):
        return seq[self.integers(len(seq))]

    def spawn_seed(self, *path: int) -> int:
        """Derive a child seed for handing to an independent consumer."""
        return derive_key(self._state, *path)
