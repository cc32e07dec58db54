"""Integer combinatorics: Catalan and Fuss-Catalan numbers, necklaces, partitions.

Everything here returns Python ints, so no value ever overflows.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from itertools import combinations
from typing import Iterator


class Partition(tuple):
    """Weakly increasing tuple of positive integers.

    ``Partition((2, 1))`` sorts its input, so equal multisets compare equal.
    The empty partition is allowed and stands for weight zero.
    """

    def __new__(cls, parts=()):
        parts = tuple(sorted(int(p) for p in parts))
        if any(p < 1 for p in parts):
            raise ValueError(f"partition parts must be positive, got {parts}")
        return super().__new__(cls, parts)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def m(self) -> int:
        return sum(self)

    @property
    def k(self) -> int:
        return len(self)

    def multiplicities(self) -> dict[int, int]:
        """Map part size ``j`` to the number of parts equal to ``j``."""
        return dict(Counter(self))

    def __repr__(self) -> str:
        return f"Partition({tuple(self)!r})"


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("m must be nonnegative")
    return math.comb(2 * m, m) // (m + 1)


def fuss_catalan(n: int, m: int) -> int:
    """FC_n(m) = binom((n+1)m, m) / (nm + 1).

    FC_1 is the Catalan sequence, FC_0 is identically one.
    """
    if n < 0 or m < 0:
        raise ValueError("n and m must be nonnegative")
    num = math.comb((n + 1) * m, m)
    q, r = divmod(num, n * m + 1)
    assert r == 0
    return q


def totient(d: int) -> int:
    if d < 1:
        raise ValueError("totient is defined for d >= 1")
    result = d
    x = d
    p = 2
    while p * p <= x:
        if x % p == 0:
            while x % p == 0:
                x //= p
            result -= result // p
        p += 1
    if x > 1:
        result -= result // x
    return result


def _divisors(m: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(m) + 1) if m % d == 0]
    return sorted(set(small) | {m // d for d in small})


def necklace_count(m: int) -> int:
    """Number of rotation classes of words with ``m`` X's and ``m`` X-daggers."""
    if m < 1:
        raise ValueError("m must be >= 1")
    total = sum(totient(d) * math.comb(2 * m // d, m // d) for d in _divisors(m))
    q, r = divmod(total, 2 * m)
    assert r == 0
    return q


def _least_rotation_codes(codes: tuple[int, ...]) -> tuple[int, ...]:
    return min(codes[i:] + codes[:i] for i in range(len(codes)))


def enumerate_necklaces(m: int) -> list:
    """One word per rotation class, each the lexicographically least rotation.

    The ordering uses X < X-dagger and the returned list is sorted the same way.
    """
    from .wick import Word

    if m < 1:
        raise ValueError("m must be >= 1")
    length = 2 * m
    found = []
    for dpos in combinations(range(length), m):
        codes = [0] * length
        for i in dpos:
            codes[i] = 1
        codes = tuple(codes)
        # keep only words that are already their own least rotation
        if codes == _least_rotation_codes(codes):
            found.append(codes)
    found.sort()
    return [Word("".join("d" if c else "x" for c in codes)) for codes in found]


def _partitions_from(m: int, smallest: int) -> Iterator[tuple[int, ...]]:
    if m == 0:
        yield ()
        return
    for first in range(smallest, m + 1):
        if first == m or m - first >= first:
            for rest in _partitions_from(m - first, first):
                yield (first,) + rest


@lru_cache(maxsize=None)
def _partitions_cached(m: int) -> tuple[Partition, ...]:
    return tuple(sorted(Partition(p) for p in _partitions_from(m, 1)))


def partitions(m: int) -> list[Partition]:
    """All partitions of ``m`` as weakly increasing tuples, in lexicographic order."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return list(_partitions_cached(m))


def tc_leading(p: Partition) -> int:
    """Leading coefficient of the trace monomial ``p`` in <Tr (X W X^dagger)^m>-type moments.

    m! / ((m - k + 1)! * prod_j f_j!) with f_j the multiplicity of j in ``p``.
    """
    p = Partition(p)
    if p.m < 1:
        raise ValueError("tc_leading needs a partition of m >= 1")
    denom = math.factorial(p.m - p.k + 1)
    for f in p.multiplicities().values():
        denom *= math.factorial(f)
    q, r = divmod(math.factorial(p.m), denom)
    assert r == 0
    return q
