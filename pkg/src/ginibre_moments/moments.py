"""Moments of X = A_1 ... A_n, a product of n independent Ginibre matrices.

Conditioning on all but the first factor makes X Gaussian with a random
variance profile; the moments are therefore the Ginibre trace polynomial of the
word averaged over a (multi-)Wishart ensemble.  At large N the averages factor
into Fuss-Catalan numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .combinatorics import Partition, catalan, fuss_catalan, partitions, tc_leading
from .wick import CapacityError, TracePolynomial, Word, as_word, ginibre_moment_poly, tc_coefficients
from .wishart import wishart_multitrace

LARGE_N = "large_n"
FINITE_N = "finite_n"


@dataclass(frozen=True)
class EnsembleSpec:
    """Number of factors and per-factor scales sigma_i (entries have E|a|^2 = sigma_i^2 / N)."""

    n: int
    sigmas: tuple[Fraction, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one Ginibre factor")
        sigmas = tuple(Fraction(s) for s in self.sigmas) or (Fraction(1),) * self.n
        if len(sigmas) != self.n:
            raise ValueError(f"expected {self.n} sigmas, got {len(sigmas)}")
        if any(s <= 0 for s in sigmas):
            raise ValueError("all sigmas must be positive")
        object.__setattr__(self, "sigmas", sigmas)

    @classmethod
    def parse(cls, n: int, sigmas: str | Sequence | None = None) -> "EnsembleSpec":
        """``sigmas`` may be a comma-separated string; a single value is applied to every factor."""
        if sigmas is None or sigmas == "":
            return cls(n)
        if isinstance(sigmas, str):
            sigmas = [Fraction(s.strip()) for s in sigmas.split(",") if s.strip()]
        sigmas = [Fraction(s) for s in sigmas]
        if len(sigmas) == 1 and n > 1:
            sigmas = sigmas * n
        return cls(n, tuple(sigmas))

    @property
    def sigma_squared(self) -> Fraction:
        return math.prod((s * s for s in self.sigmas), start=Fraction(1))

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma_squared)


@dataclass(frozen=True)
class MomentResult:
    word: Word
    spec: EnsembleSpec
    mode: str
    value: Fraction | TracePolynomial
    tc: dict = field(default_factory=dict)
    tc_provenance: str = "enumeration"


def _is_alternating(w: Word) -> bool:
    return w.tokens in ("xd" * w.weight, "dx" * w.weight)


def tc_for_word(w, cap: int | None = None) -> tuple[dict[Partition, int], str]:
    """Leading trace coefficients of ``w`` and where they came from.

    (XD)^m has a closed form and is only limited by an explicit ``cap``; every
    other word goes through the planar enumerator (default cap PLANAR_CAP).
    """
    w = as_word(w)
    if w.balanced and _is_alternating(w):
        if cap is not None and w.weight > cap:
            raise CapacityError(w.weight, cap, "trace coefficient evaluation")
        return {p: tc_leading(p) for p in partitions(w.weight)}, "formula"
    return tc_coefficients(w, cap), "enumeration"


def large_n_moment(w, spec: EnsembleSpec | int, cap: int | None = None) -> Fraction:
    """Leading large-N value of (1/N) <Tr w(X, X^dagger)> for the n-factor product.

    sigma^{2m} * sum_p tc(p) * prod_a FC_{n-1}(p_a).
    """
    w = as_word(w)
    spec = spec if isinstance(spec, EnsembleSpec) else EnsembleSpec(spec)
    if not w.balanced:
        return Fraction(0)
    tc, _ = tc_for_word(w, cap)
    total = sum(c * math.prod(fuss_catalan(spec.n - 1, j) for j in p) for p, c in tc.items())
    return spec.sigma_squared**w.weight * total


def finite_n_moment_n2(w, cap: int | None = None) -> TracePolynomial:
    """(1/N) <Tr w> for X = A_1 A_2, exact in N, with sigma^{2m} kept in ``sigma_power``.

    Every trace monomial of the Ginibre polynomial is replaced by its exact
    Wishart expectation.
    """
    w = as_word(w)
    poly = ginibre_moment_poly(w, cap)
    if poly.is_zero():
        return poly
    return poly.map_traces(lambda p: wishart_multitrace(p, cap))


def large_n_limit(poly: TracePolynomial) -> Fraction:
    """N^0 coefficient of a Laurent polynomial whose positive powers vanish."""
    coeffs = poly.laurent_coeffs()
    if any(k > 0 for k in coeffs):
        raise ValueError("polynomial grows with N")
    return coeffs.get(0, Fraction(0))


@lru_cache(maxsize=None)
def multi_wishart_moment(n: int, m: int) -> int:
    """Large-N (1/N) <Tr (W_1 ... W_n)^m> by recursion on the number of Wishart factors."""
    if n < 1 or m < 1:
        raise ValueError("n and m must be >= 1")
    if n == 1:
        return catalan(m)
    return sum(tc_leading(p) * math.prod(multi_wishart_moment(n - 1, j) for j in p) for p in partitions(m))


def fc_recursion_check(n: int, m: int) -> bool:
    """Whether FC_{n-1}(m) = sum_p tc(p) prod_a FC_{n-2}(p_a) holds."""
    if n < 2:
        raise ValueError("the recursion needs n >= 2")
    rhs = sum(tc_leading(p) * math.prod(fuss_catalan(n - 2, j) for j in p) for p in partitions(m))
    return fuss_catalan(n - 1, m) == rhs


def evaluate(w, spec: EnsembleSpec, finite_n: bool = False, cap: int | None = None) -> MomentResult:
    w = as_word(w)
    tc, provenance = tc_for_word(w, cap) if w.balanced else ({}, "enumeration")
    if finite_n:
        if spec.n > 2:
            raise ValueError("finite-N moments are only available for n <= 2")
        if spec.n == 1:
            value = ginibre_moment_poly(w, cap).substitute_identity()
        else:
            value = finite_n_moment_n2(w, cap)
        return MomentResult(w, spec, FINITE_N, value, tc, provenance)
    return MomentResult(w, spec, LARGE_N, large_n_moment(w, spec, cap), tc, provenance)
