"""SplitMix64, the portable generator behind table generation and seeded keys.

SplitMix64 (Steele, Lea & Flood 2014) is used instead of :mod:`random`
because its output is a fixed arithmetic recipe that any language can
reproduce bit-for-bit from a 64-bit seed.
"""

_MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = (1 << 64) - ((1 << 64) % bound)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % bound

    def randbytes(self, n: int) -> bytes:
        """``n`` bytes, each word emitted little-endian (same name as random.Random)."""
        out = bytearray()
        while len(out) < n:
            out += self.next_u64().to_bytes(8, "little")
        return bytes(out[:n])

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates (Durstenfeld) shuffle of ``range(n)``."""
        p = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            p[i], p[j] = p[j], p[i]
        return p
