"""
Generatore SplitMix64 bit-exact.
Tutta la casualità del progetto (ricavi, sparsificazione, fixture) passa da qui.
"""

from typing import Iterator, List

from config.settings import SPLITMIX_GOLDEN, SPLITMIX_MUL_1, SPLITMIX_MUL_2, MASK_64

_TWO_64 = float(1 << 64)


class SplitMix64:
    """Stream SplitMix64 con uscite intere e reali uniformi in [0,1)."""

    def __init__(self, seed: int):
        self.state = seed & MASK_64

    def next_u64(self) -> int:
        self.state = (self.state + SPLITMIX_GOLDEN) & MASK_64
        z = self.state
        z = ((z ^ (z >> 30)) * SPLITMIX_MUL_1) & MASK_64
        z = ((z ^ (z >> 27)) * SPLITMIX_MUL_2) & MASK_64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return self.next_u64() / _TWO_64

    def uniform_range(self, low: float, high: float) -> float:
        return low + (high - low) * self.uniform()

    def randbelow(self, bound: int) -> int:
        """Intero in [0, bound) via floor(u * bound)."""
        return min(bound - 1, int(self.uniform() * bound))

    def sample_indices(self, population: int, k: int) -> List[int]:
        """Sottoinsieme uniforme di k indici (Fisher-Yates parziale), ordinato."""
        pool = list(range(population))
        for i in range(k):
            j = i + self.randbelow(population - i)
            pool[i], pool[j] = pool[j], pool[i]
        return sorted(pool[:k])

    def __iter__(self) -> Iterator[float]:
        while True:
            yield self.uniform()


def derive_seed(seed: int, offset: int) -> int:
    """Sotto-seed documentato: seed + offset modulo 2^64."""
    return (seed + offset) & MASK_64
