"""Deterministic random number generation.

Every seeded artifact in this package (generated instances, fitted
regressions, committed fixtures) is derived from SplitMix64 so that streams
are reproducible bit-for-bit across Python and numpy versions.  The stdlib
``random`` module does not promise that stability, so the generator is
spelled out here.

Update rule, all arithmetic modulo 2**64:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    output = z ^ (z >> 31)

Doubles in [0, 1) take the top 53 bits: (output >> 11) * 2**-53.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_DOUBLE_SCALE = 2.0 ** -53


class SplitMix64:
    """SplitMix64 stream seeded with a 64-bit integer."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        """Uniform double in [lo, hi)."""
        u = (self.next_u64() >> 11) * _DOUBLE_SCALE
        return lo + (hi - lo) * u

    def uniform_array(self, n: int) -> np.ndarray:
        """The next n uniforms in [0, 1), bit-identical to n uniform() calls.

        state_k after k increments equals seed + k*GAMMA mod 2**64, so the
        batch is computed directly from the counter and the scalar state is
        advanced past it.
        """
        start = np.uint64(self.state)
        ks = (np.arange(1, n + 1, dtype=np.uint64)) * np.uint64(_GAMMA)
        z = start + ks
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * _GAMMA) & _MASK64
        return (z >> np.uint64(11)).astype(np.float64) * _DOUBLE_SCALE
