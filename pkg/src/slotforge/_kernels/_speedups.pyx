# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; bit-identical twin of ``slotforge._kernels._native``.

Any change here must land in ``_native.py`` too — the parity test suite
compares the two implementations draw for draw.
"""

from libc.stdint cimport uint64_t

cdef uint64_t UMAX = 18446744073709551615ULL
cdef uint64_t FNV_OFFSET = 14695981039346656037ULL
cdef uint64_t FNV_PRIME = 1099511628211ULL
cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t MIX1 = 0xBF58476D1CE4E5B9ULL
cdef uint64_t MIX2 = 0x94D049BB133111EBULL

MASK64 = 0xFFFFFFFFFFFFFFFF
FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3


def fnv1a64(data) -> int:
    """64-bit FNV-1a over ``data`` (bytes)."""
    cdef const unsigned char[:] view = data
    cdef uint64_t h = FNV_OFFSET
    cdef Py_ssize_t i
    for i in range(view.shape[0]):
        h ^= view[i]
        h *= FNV_PRIME
    return h


cdef class SplitMix64:
    """Deterministic 64-bit generator (splitmix64 finalizer over a Weyl sequence)."""

    cdef uint64_t _state

    def __init__(self, seed):
        self._state = <uint64_t> (seed & 0xFFFFFFFFFFFFFFFF)

    cdef inline uint64_t _next(self):
        self._state += GOLDEN
        cdef uint64_t z = self._state
        z = (z ^ (z >> 30)) * MIX1
        z = (z ^ (z >> 27)) * MIX2
        return z ^ (z >> 31)

    def next_u64(self) -> int:
        return self._next()

    cdef uint64_t _randbelow(self, uint64_t n) except? 0:
        # Accept u < 2**64 - (2**64 mod n), i.e. u <= UMAX - rem.
        cdef uint64_t rem = (UMAX % n + 1ULL) % n
        cdef uint64_t u
        while True:
            u = self._next()
            if u <= UMAX - rem:
                return u % n

    def randbelow(self, n) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("randbelow() requires n >= 1")
        return self._randbelow(<uint64_t> n)

    def randint(self, lo, hi) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError("randint() requires lo <= hi")
        return lo + self._randbelow(<uint64_t> (hi - lo + 1))

    def choice(self, items):
        return items[self._randbelow(<uint64_t> len(items))]

    def shuffle(self, list items) -> None:
        """In-place Fisher-Yates shuffle."""
        cdef Py_ssize_t i, j
        for i in range(len(items) - 1, 0, -1):
            j = <Py_ssize_t> self._randbelow(<uint64_t> (i + 1))
            items[i], items[j] = items[j], items[i]

    def sample(self, items, k) -> list:
        """k distinct elements of ``items`` in drawn order (partial Fisher-Yates)."""
        cdef Py_ssize_t n = len(items)
        cdef Py_ssize_t kk = k
        cdef Py_ssize_t i, j
        if kk < 0 or kk > n:
            raise ValueError("sample() requires 0 <= k <= len(items)")
        cdef list pool = list(items)
        for i in range(kk):
            j = i + <Py_ssize_t> self._randbelow(<uint64_t> (n - i))
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:kk]


def token_containment(a, b) -> bool:
    """True iff one token sequence equals or occurs contiguously inside the other."""
    small = a if len(a) <= len(b) else b
    big = b if small is a else a
    cdef Py_ssize_t n = len(small)
    cdef Py_ssize_t m = len(big)
    if n == 0:
        return True
    cdef Py_ssize_t start, j
    cdef bint ok
    for start in range(m - n + 1):
        ok = True
        for j in range(n):
            if big[start + j] != small[j]:
                ok = False
                break
        if ok:
            return True
    return False
