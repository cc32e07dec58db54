import json
import math
from fractions import Fraction
from importlib import resources
from itertools import permutations, product

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ginibre_moments.combinatorics import Partition, catalan, partitions, tc_leading
from ginibre_moments.wick import (
    PLANAR_CAP,
    CapacityError,
    Diagram,
    Pairing,
    TracePolynomial,
    UnsupportedDiagram,
    Word,
    WordFormatError,
    contract,
    diagram_polynomial,
    enumerate_pairings,
    genus,
    genus_crossing_sweep,
    ginibre_moment_poly,
    is_noncrossing,
    noncrossing_pairings,
    tc_coefficients,
)

LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def index_sum_oracle(loops, W, sigma=1.0):
    """(1/N^L) <prod_l Tr loop_l> summed over all Wick pairings by explicit index contraction.

    Entry (a, b) of X pairs with entry (c, e) of X^dagger as (sigma^2/N) delta(a, e) W[b, c].
    """
    N = W.shape[0]
    slots = []  # (token, row label, col label)
    label = 0
    for loop in loops:
        start = label
        for t, tok in enumerate(loop):
            nxt = start + (t + 1) % len(loop)
            slots.append((tok, start + t, nxt))
        label += len(loop)
    xs = [s for s in slots if s[0] == "x"]
    ds = [s for s in slots if s[0] == "d"]
    if len(xs) != len(ds):
        return 0.0
    eye = np.eye(N)
    total = 0.0
    for perm in permutations(range(len(ds))):
        operands = []
        for (_, a, b), j in zip(xs, perm):
            _, c, e = ds[j]
            operands += [eye, [a, e], W, [b, c]]
        total += np.einsum(*operands, [])
    m = len(xs)
    return total * (sigma**2 / N) ** m / N ** len(loops)


def random_psd(N, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((N, N))
    return a @ a.T


def balanced_words(max_m):
    for m in range(1, max_m + 1):
        for bits in product("xd", repeat=2 * m):
            if bits.count("x") == m:
                yield "".join(bits)


def numeric_value(poly, W, sigma=1.0):
    N = W.shape[0]
    traces = {j: float(np.trace(np.linalg.matrix_power(W, j))) for j in range(1, 10)}
    return float(poly.evaluate(float(N), sigma, traces))


@pytest.mark.parametrize("w", list(balanced_words(3)) + ["xxddxd" * 1 + "xd", "xxxddd" + "xd", "xdxdxdxd"])
def test_single_loop_matches_index_sums(w):
    W = random_psd(3, len(w))
    assert numeric_value(ginibre_moment_poly(w), W, 0.7) == pytest.approx(index_sum_oracle([w], W, 0.7), rel=1e-10)


@pytest.mark.parametrize("loops", [("xd", "xd"), ("xxdd", "xd"), ("xd", "dx", "xd"), ("x", "d"), ("xx", "dd")])
def test_multi_loop_matches_index_sums(loops):
    W = random_psd(3, 7)
    poly = diagram_polynomial(Diagram.of(*loops))
    assert numeric_value(poly, W) == pytest.approx(index_sum_oracle(loops, W), rel=1e-10)


def test_goldens():
    assert ginibre_moment_poly("xd") == TracePolynomial({((1,), -1): 1}, 2)
    assert ginibre_moment_poly("xdxd") == TracePolynomial({((1, 1), -2): 1, ((2,), -1): 1}, 4)
    expected = TracePolynomial({((1, 1, 1), -3): 1, ((1, 2), -2): 3, ((3,), -1): 1, ((3,), -3): 1}, 6)
    assert ginibre_moment_poly("xdxdxd") == expected


@pytest.mark.parametrize("m", range(1, 7))
def test_pairing_count_is_factorial(m):
    assert len(enumerate_pairings("xd" * m)) == math.factorial(m)
    assert len(enumerate_pairings("x" * m + "d" * m)) == math.factorial(m)


def test_unbalanced_word_is_zero():
    assert enumerate_pairings("xxd") == []
    assert ginibre_moment_poly("xxd").is_zero()
    assert tc_coefficients("xdd") == {}


def test_capacity_error_names_cap():
    with pytest.raises(CapacityError, match="cap of 8"):
        enumerate_pairings("xd" * 9)
    with pytest.raises(CapacityError, match="cap of 3"):
        ginibre_moment_poly("xd" * 4, cap=3)
    with pytest.raises(CapacityError, match=f"cap of {PLANAR_CAP}"):
        tc_coefficients("xd" * (PLANAR_CAP + 1))


@pytest.mark.parametrize("bad", ["", "xyd", "x d", "1,2;x"])
def test_bad_word_rejected(bad):
    with pytest.raises(WordFormatError):
        Word.parse(bad)


def test_exponent_form():
    assert Word.parse("2,1;1,2") == Word("xxdxdd")
    assert Word.parse("xdxd") == Word.power("xd", 2)


words = st.integers(1, 5).flatmap(
    lambda m: st.permutations(["x"] * m + ["d"] * m).map("".join)
)


@settings(max_examples=60, deadline=None)
@given(words, st.integers(0, 20))
def test_cyclic_invariance(w, r):
    assert ginibre_moment_poly(w) == ginibre_moment_poly(Word(w).rotate(r))


@settings(max_examples=60, deadline=None)
@given(words)
def test_conjugation_invariance(w):
    # Tr w^dagger = conj Tr w, and every coefficient is real
    assert ginibre_moment_poly(w) == ginibre_moment_poly(Word(w).conjugate())


@settings(max_examples=40, deadline=None)
@given(words)
def test_identity_substitution_counts_pairings(w):
    # sum over pairings of N^(cycles) at N = 1 counts pairings
    m = Word(w).weight
    poly = ginibre_moment_poly(w).substitute_identity()
    assert poly.evaluate(1) == math.factorial(m)


@settings(max_examples=40, deadline=None)
@given(words)
def test_leading_order_is_planar(w):
    d = Diagram.of(w)
    planar = [p for p in enumerate_pairings(d) if is_noncrossing(d, p)]
    assert len(planar) == sum(tc_coefficients(w).values())
    assert {p.pairs for p in planar} == {p.pairs for p in noncrossing_pairings(w)}


def test_crossing_pairing_of_xd_cubed_has_genus_one():
    d = Diagram.of("xdxdxd")
    # X_0 -> D_3, X_2 -> D_5, X_4 -> D_1 crosses every chord
    p = Pairing((((0, 0), (0, 3)), ((0, 2), (0, 5)), ((0, 4), (0, 1))))
    assert not is_noncrossing(d, p)
    assert genus(d, p) == 1
    mono = contract(d, p)
    assert mono.partition == Partition((3,)) and mono.n_power == -3


def test_crossing_pairings_of_xxdd_squared_have_positive_genus():
    d = Diagram.of("xxddxxdd")
    crossing = [p for p in enumerate_pairings(d) if not is_noncrossing(d, p)]
    assert crossing
    assert all(genus(d, p) >= 1 for p in crossing)


@pytest.mark.parametrize("m", range(1, 6))
def test_sweep_agrees_with_predicates(m):
    for w in list(balanced_words(m))[:20]:
        d = Diagram.of(w)
        ref = sorted((genus(d, p), is_noncrossing(d, p)) for p in enumerate_pairings(d))
        assert sorted(genus_crossing_sweep(w)) == ref


def test_multi_loop_predicates_unsupported():
    d = Diagram.of("xd", "xd")
    p = enumerate_pairings(d)[0]
    with pytest.raises(UnsupportedDiagram):
        genus(d, p)
    with pytest.raises(UnsupportedDiagram):
        is_noncrossing(d, p)


@pytest.mark.parametrize("m", range(1, 7))
def test_tc_of_alternating_word_matches_closed_form(m):
    assert tc_coefficients("xd" * m) == {p: tc_leading(p) for p in partitions(m)}


@pytest.mark.parametrize("m", range(1, 9))
def test_tc_of_separated_word(m):
    assert tc_coefficients("x" * m + "d" * m) == {Partition([1] * m): 1}


def test_tc_sum_rule_m4():
    tc = tc_coefficients("xdxdxdxd")
    assert tc[Partition((1, 1, 2))] == 6
    assert sum(tc.values()) == catalan(4)


def test_json_round_trip_and_schema():
    schema = json.loads(resources.files("ginibre_moments").joinpath("schemas/trace_polynomial.schema.json").read_text())
    for w in ["xd", "xdxdxd", "xxdxdd"]:
        poly = ginibre_moment_poly(w)
        data = json.loads(poly.to_json())
        jsonschema.validate(data, schema)
        keys = [(t["partition"], t["n_power"]) for t in data["terms"]]
        assert keys == sorted(keys)
        assert TracePolynomial.from_json(poly.to_json()) == poly


def test_polynomial_arithmetic():
    a = TracePolynomial.laurent({0: 1, -1: Fraction(1, 2)})
    b = TracePolynomial.laurent({-1: Fraction(-1, 2)})
    assert a + b == TracePolynomial.laurent({0: 1})
    assert a.scale(2, n_shift=1).laurent_coeffs() == {1: 2, 0: 1}
    assert (a + b.scale(-1)).evaluate(2) == Fraction(3, 2)
    assert str(ginibre_moment_poly("xdxd")) == "sigma^4*(TrW^2*N^-1 + TrW*TrW*N^-2)"
