"""Seedable, platform-independent PRNG for the trace simulators.

The generator is splitmix64: a 64-bit counter advanced by the golden-gamma
constant and passed through two xor-multiply mixing rounds, period 2**64.
It was chosen because it is small enough to implement identically in the
compiled and the pure-Python kernels, which keeps simulated traces
byte-identical across machines and backends for equal seeds.
"""

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


class SplitMix64:
    """Reference implementation; leakmeter._speedups mirrors it in C."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def unit(self) -> float:
        """Uniform double in [0, 1) built from the top 53 bits."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n), unbiased via threshold rejection."""
        # threshold = (2**64 - n) % n; draws below it would bias x % n
        threshold = (1 << 64) % n
        while True:
            x = self.next_u64()
            if x >= threshold:
                return x % n
