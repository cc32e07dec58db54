import math
from itertools import product

import pytest
from hypothesis import given, strategies as st

from ginibre_moments.combinatorics import (
    Partition,
    catalan,
    enumerate_necklaces,
    fuss_catalan,
    necklace_count,
    partitions,
    tc_leading,
    totient,
)


def brute_necklaces(m):
    """Rotation classes of balanced binary strings, by canonical minimal rotation."""
    seen = set()
    for bits in product("xd", repeat=2 * m):
        if bits.count("x") != m:
            continue
        s = "".join(bits)
        seen.add(min(s[r:] + s[:r] for r in range(2 * m)))
    return seen


def catalan_by_recurrence(limit):
    c = [1]
    for n in range(limit):
        c.append(sum(c[i] * c[n - i] for i in range(n + 1)))
    return c


def partition_count_by_recurrence(limit):
    # p(n) via the standard coin-change recurrence
    p = [1] + [0] * limit
    for part in range(1, limit + 1):
        for total in range(part, limit + 1):
            p[total] += p[total - part]
    return p


@pytest.mark.parametrize("m", range(1, 8))
def test_necklace_count_matches_brute_force(m):
    assert necklace_count(m) == len(brute_necklaces(m))


@pytest.mark.parametrize("m", range(1, 7))
def test_enumerated_necklaces_are_distinct_rotation_classes(m):
    words = enumerate_necklaces(m)
    assert len(words) == necklace_count(m)
    classes = {min(str(w)[r:] + str(w)[:r] for r in range(2 * m)) for w in words}
    assert classes == brute_necklaces(m)


def test_necklace_small_values():
    assert [necklace_count(m) for m in range(1, 6)] == [1, 2, 4, 10, 26]


@pytest.mark.parametrize("m", range(1, 16))
def test_necklace_lower_bound(m):
    assert necklace_count(m) >= math.comb(2 * m, m) / (2 * m)


@pytest.mark.parametrize("d", range(1, 60))
def test_totient_by_gcd_count(d):
    assert totient(d) == sum(1 for k in range(1, d + 1) if math.gcd(k, d) == 1)


def test_catalan_recurrence():
    ref = catalan_by_recurrence(25)
    assert [catalan(m) for m in range(26)] == ref


@pytest.mark.parametrize("m", range(0, 21))
def test_fuss_catalan_one_is_catalan(m):
    assert fuss_catalan(1, m) == catalan(m)


def test_fuss_catalan_values():
    assert fuss_catalan(0, 7) == 1
    assert [fuss_catalan(2, m) for m in range(6)] == [1, 1, 3, 12, 55, 273]
    assert fuss_catalan(3, 4) == 140


def test_partition_counts():
    ref = partition_count_by_recurrence(15)
    assert [len(partitions(m)) for m in range(1, 16)] == ref[1:]


def test_partitions_are_sorted_and_sum():
    ps = partitions(6)
    assert ps == sorted(ps)
    assert all(p.m == 6 and list(p) == sorted(p) for p in ps)


def test_partition_normalizes():
    p = Partition([3, 1, 2, 1])
    assert tuple(p) == (1, 1, 2, 3)
    assert p.k == 4 and p.m == 7
    assert p.multiplicities() == {1: 2, 2: 1, 3: 1}
    with pytest.raises(ValueError):
        Partition([0, 1])


@pytest.mark.parametrize("m", range(1, 11))
def test_tc_leading_sums_to_catalan(m):
    assert sum(tc_leading(p) for p in partitions(m)) == catalan(m)


@given(st.integers(1, 12))
def test_tc_leading_single_part_and_all_ones(m):
    assert tc_leading(Partition([m])) == 1
    assert tc_leading(Partition([1] * m)) == 1
