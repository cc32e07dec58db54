"""Exact multi-trace moments of the square complex Wishart ensemble.

Convention: P(W) ~ exp(-N Tr W), i.e. W = A A^dagger with A an N x N Ginibre
matrix whose entries have E|A_ij|^2 = 1/N.  Values are returned as trace-free
:class:`~ginibre_moments.wick.TracePolynomial` objects (Laurent polynomials in N).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .combinatorics import Partition
from .wick import DEFAULT_CAP, CapacityError, Diagram, TracePolynomial, Word, diagram_polynomial


@lru_cache(maxsize=None)
def _multitrace(parts: tuple[int, ...]) -> TracePolynomial:
    loops = tuple(Word("xd" * j) for j in parts)
    poly = diagram_polynomial(Diagram(loops), cap=sum(parts))
    # spectator variance is the identity; undo the 1/N per loop normalization
    value = poly.substitute_identity().scale(1, n_shift=len(parts))
    return TracePolynomial(value.terms, sigma_power=0)


def wishart_multitrace(p, cap: int | None = None) -> TracePolynomial:
    """<Tr W^{m_1} ... Tr W^{m_k}> exactly in N (not normalized by N^k)."""
    p = Partition(p)
    if not p:
        raise ValueError("partition must be nonempty")
    cap = DEFAULT_CAP if cap is None else cap
    if p.m > cap:
        raise CapacityError(p.m, cap, "Wishart contraction")
    return _multitrace(tuple(p))


def normalized(value: TracePolynomial, k: int) -> TracePolynomial:
    """Divide by N^k, e.g. to read <Tr W^{m_1} ... Tr W^{m_k}> / N^k."""
    return value.scale(1, n_shift=-k)


# <W_{i1 j1} ... W_{ir jr}> as sums of (power of 1/N, delta pairs).  Slots are
# (factor, 0) for the row index and (factor, 1) for the column index.
_I, _J, _K, _L, _P, _Q = (0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)

_DELTA_FORMULAS = {
    1: [(0, [(_I, _J)])],
    2: [
        (0, [(_I, _J), (_K, _L)]),
        (1, [(_I, _L), (_K, _J)]),
    ],
    3: [
        (0, [(_P, _Q), (_K, _L), (_I, _J)]),
        (1, [(_P, _Q), (_I, _L), (_K, _J)]),
        (1, [(_K, _Q), (_P, _L), (_I, _J)]),
        (1, [(_K, _L), (_I, _Q), (_P, _J)]),
        (2, [(_I, _Q), (_P, _L), (_K, _J)]),
        (2, [(_I, _L), (_K, _Q), (_P, _J)]),
    ],
}


def _components(slots, links) -> int:
    parent = {s: s for s in slots}

    def find(s):
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    for a, b in links:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(s) for s in slots})


def wishart_low_moments_closed_form(p) -> TracePolynomial:
    """Same quantity as :func:`wishart_multitrace` for weight <= 3, by index summation.

    Uses the explicit component formulas for <W>, <WW> and <WWW>; each product of
    Kronecker deltas summed over free indices gives N^(connected index classes).
    """
    p = Partition(p)
    if not p:
        raise ValueError("partition must be nonempty")
    if p.m > 3:
        raise ValueError(f"closed-form component formulas only go up to weight 3, got {p.m}")
    slots = [(f, s) for f in range(p.m) for s in (0, 1)]
    trace_links = []
    start = 0
    for length in p:
        for t in range(length):
            f = start + t
            nxt = start + (t + 1) % length
            trace_links.append(((f, 1), (nxt, 0)))
        start += length
    coeffs: dict[int, Fraction] = {}
    for inv_power, deltas in _DELTA_FORMULAS[p.m]:
        n_exp = _components(slots, trace_links + deltas) - inv_power
        coeffs[n_exp] = coeffs.get(n_exp, Fraction(0)) + 1
    return TracePolynomial.laurent(coeffs)
