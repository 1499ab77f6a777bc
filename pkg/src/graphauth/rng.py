"""Seeded SplitMix64 generator and the 64-bit hashing helpers used for seeds and digests.

Every random draw in the package goes through :class:`SplitMix64` so that keys,
transcripts and attack reports reproduce bit-for-bit from a seed, independent of
platform or numpy version.

Conventions (part of the determinism contract):

* ``next_u64`` is the reference SplitMix64 step: add ``0x9E3779B97F4A7C15`` to the
  state, then apply the Stafford "mix13" finalizer.
* ``random(size)`` consumes ``size`` consecutive outputs and maps each to
  ``(z >> 11) * 2**-53``, a float in ``[0, 1)``.
* ``randbelow(n)`` rejects outputs below ``2**64 mod n`` and returns ``z % n``.
* ``permutation(n)`` is a descending Fisher-Yates shuffle of ``0..n-1`` driven by
  ``randbelow(i + 1)`` for ``i = n-1 .. 1``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def fnv1a64(data: bytes | str) -> int:
    """64-bit FNV-1a hash."""
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK64
    return h


def derive_seed(seed: int, *labels: int | str) -> int:
    """Derive an independent child seed from ``seed`` along a path of labels.

    String labels are hashed with FNV-1a first.  Each step computes
    ``mix64(seed + mix64(label + GOLDEN_GAMMA))``.
    """
    s = seed & MASK64
    for label in labels:
        lab = fnv1a64(label) if isinstance(label, str) else label & MASK64
        s = mix64((s + mix64(lab + GOLDEN_GAMMA)) & MASK64)
    return s


class SplitMix64:
    """Small, explicitly seeded 64-bit generator."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def __repr__(self) -> str:
        return f"SplitMix64(state={self.state:#018x})"

    @classmethod
    def derived(cls, seed: int, *labels: int | str) -> "SplitMix64":
        return cls(derive_seed(seed, *labels))

    def spawn(self, *labels: int | str) -> "SplitMix64":
        """Child generator keyed on the current state; does not advance ``self``."""
        return SplitMix64(derive_seed(self.state, *labels))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def u64_array(self, size: int) -> np.ndarray:
        """The next ``size`` outputs as a uint64 array (same values as repeated ``next_u64``)."""
        if size <= 0:
            return np.empty(0, dtype=np.uint64)
        steps = np.arange(1, size + 1, dtype=np.uint64)
        z = np.uint64(self.state) + steps * np.uint64(GOLDEN_GAMMA)
        self.state = (self.state + size * GOLDEN_GAMMA) & MASK64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def random(self, size: int | None = None):
        if size is None:
            return (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return (self.u64_array(size) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def bernoulli(self, p: float, size: int) -> np.ndarray:
        return self.random(size) < p

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        threshold = (1 << 64) % n
        while True:
            z = self.next_u64()
            if z >= threshold:
                return z % n

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in the closed range ``[low, high]``."""
        if high < low:
            raise ValueError(f"empty range [{low}, {high}]")
        return low + self.randbelow(high - low + 1)

    def bit(self) -> int:
        return self.next_u64() >> 63

    def permutation(self, n: int) -> np.ndarray:
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.randbelow(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return np.array(perm, dtype=np.int64)

    def sample(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct values from ``range(n)``, sorted ascending (partial Fisher-Yates)."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return np.array(sorted(pool[:k]), dtype=np.int64)
