"""Pure-Python kernels: FNV-1a hashing, the splitmix64 stream, token containment.

This module is the portable reference; ``_speedups`` is its compiled twin and
must stay bit-identical. Everything downstream that needs randomness draws it
through :class:`SplitMix64` so forged datasets are reproducible across
platforms and implementations.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF

FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3

_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a over ``data``."""
    h = FNV64_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV64_PRIME) & MASK64
    return h


class SplitMix64:
    """Deterministic 64-bit generator (splitmix64 finalizer over a Weyl sequence).

    Bounded draws use rejection sampling, so every derived operation
    (``randint``, ``shuffle``, ``sample``) is exactly reproducible from the
    seed alone, independent of platform word size.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randbelow() requires n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError("randint() requires lo <= hi")
        return lo + self.randbelow(hi - lo + 1)

    def choice(self, items):
        return items[self.randbelow(len(items))]

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, items, k: int) -> list:
        """k distinct elements of ``items`` in drawn order (partial Fisher-Yates)."""
        n = len(items)
        if k < 0 or k > n:
            raise ValueError("sample() requires 0 <= k <= len(items)")
        pool = list(items)
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


def token_containment(a, b) -> bool:
    """True iff one token sequence equals or occurs contiguously inside the other.

    The empty sequence is contained in everything; callers enforce any
    stricter policy.
    """
    small, big = (a, b) if len(a) <= len(b) else (b, a)
    n, m = len(small), len(big)
    if n == 0:
        return True
    for start in range(m - n + 1):
        if big[start] != small[0]:
            continue
        if all(big[start + j] == small[j] for j in range(1, n)):
            return True
    return False
