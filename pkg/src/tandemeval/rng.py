"""Seedable, portable random number generation.

Synthetic fixtures must be byte-identical across platforms and library
versions, so nothing here delegates to a platform RNG or to numpy's
distribution samplers. The uniform stream is SplitMix64 (Steele, Lea &
Flood 2014): state advances by a fixed odd gamma and each output is a
murmur-style finalizer of the state. Standard normals come from the
Box-Muller transform applied to pairs of uniforms.

The mixer is algebraic in the draw index, so blocks of draws are produced
with vectorized uint64 arithmetic while remaining identical to repeated
scalar calls.
"""

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64_MASK = 0xFFFFFFFFFFFFFFFF

# 2**-53; doubles are built from the top 53 bits of the mixed state
_TO_DOUBLE = 1.0 / 9007199254740992.0


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Deterministic uniform/normal stream seeded by a 64-bit integer."""

    def __init__(self, seed):
        self._state = np.uint64(int(seed) & _U64_MASK)

    def next_uint64(self):
        return int(self.uint64_block(1)[0])

    def uint64_block(self, n):
        """n mixed outputs, advancing the stream exactly n steps."""
        steps = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            states = self._state + steps * _GAMMA
            out = _mix(states)
            self._state = self._state + np.uint64(n) * _GAMMA
        return out

    def uniforms(self, n):
        """n doubles strictly inside (0, 1)."""
        bits = self.uint64_block(n)
        return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * _TO_DOUBLE

    def uniform(self):
        return float(self.uniforms(1)[0])

    def normals(self, n):
        """n standard-normal doubles via Box-Muller on uniform pairs."""
        m = (n + 1) // 2
        u = self.uniforms(2 * m)
        r = np.sqrt(-2.0 * np.log(u[:m]))
        theta = (2.0 * np.pi) * u[m:]
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return z[:n]

    def index_below(self, n):
        """Uniform integer in [0, n)."""
        return min(int(self.uniform() * n), n - 1)
