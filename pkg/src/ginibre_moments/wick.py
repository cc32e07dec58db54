"""Exact Wick contraction of trace words in X and X^dagger.

The propagator is <X_ij X^dagger_kl> = (sigma^2 / N) delta_il W_jk.  A pairing of
the X's with the X^dagger's glues the index slots of a trace diagram into closed
cycles; cycles that pick up no W give a factor N, cycles that pick up j factors
of W give Tr W^j.  Summing over all pairings yields a polynomial in the traces
Tr W^j and in 1/N that is exact at every N.

Positions are numbered around each trace loop.  Writing e_t for the index shared
by positions t and t+1, pairing X at a with X^dagger at b identifies e_{a-1} with
e_b and inserts W between e_a and e_{b-1}.  Following the slots therefore walks
the permutation t -> prev(partner(t)), and a step leaving an X position carries
one W.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .combinatorics import Partition

X = "x"
XDAG = "d"

#: largest weight for which all m! pairings are enumerated
DEFAULT_CAP = 8
#: largest weight for the non-crossing-only enumerator
PLANAR_CAP = 14


class WordFormatError(ValueError):
    """Raised for a word pattern that cannot be parsed."""


class CapacityError(ValueError):
    """Raised when an enumeration would exceed its configured weight cap."""

    def __init__(self, weight: int, cap: int, what: str = "pairing enumeration"):
        self.weight = weight
        self.cap = cap
        super().__init__(f"{what}: weight {weight} exceeds the cap of {cap}")


class UnsupportedDiagram(ValueError):
    """Raised when a single-loop predicate is asked about a multi-loop diagram."""


_EXPONENT_RE = re.compile(r"^\s*\d+\s*,\s*\d+\s*(;\s*\d+\s*,\s*\d+\s*)*;?\s*$")


class Word:
    """A cyclic trace word over {X, X^dagger}, stored as a string of 'x' and 'd'.

    Equality is literal; use :meth:`is_rotation_of` for cyclic equivalence.
    """

    __slots__ = ("tokens",)

    def __init__(self, tokens: "str | Word"):
        if isinstance(tokens, Word):
            tokens = tokens.tokens
        text = str(tokens).strip().lower()
        if not text or set(text) - {X, XDAG}:
            raise WordFormatError(f"word must be a nonempty string over 'x'/'d', got {tokens!r}")
        object.__setattr__(self, "tokens", text)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Accept either 'xxdxdd' or the exponent form 'i1,j1;i2,j2;...'."""
        text = text.strip()
        if _EXPONENT_RE.match(text):
            out = []
            for chunk in filter(None, (c.strip() for c in text.split(";"))):
                i, j = (int(v) for v in chunk.split(","))
                out.append(X * i + XDAG * j)
            return cls("".join(out))
        return cls(text)

    @classmethod
    def power(cls, base: str, times: int) -> "Word":
        return cls(base * times)

    @property
    def m_x(self) -> int:
        return self.tokens.count(X)

    @property
    def m_d(self) -> int:
        return self.tokens.count(XDAG)

    @property
    def balanced(self) -> bool:
        return self.m_x == self.m_d

    @property
    def weight(self) -> int:
        """Number of X insertions (m for a balanced word)."""
        return self.m_x

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __eq__(self, other) -> bool:
        if isinstance(other, Word):
            return self.tokens == other.tokens
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Word", self.tokens))

    def __str__(self) -> str:
        return self.tokens

    def __repr__(self) -> str:
        return f"Word({self.tokens!r})"

    def rotate(self, r: int) -> "Word":
        r %= len(self.tokens)
        return Word(self.tokens[r:] + self.tokens[:r])

    def conjugate(self) -> "Word":
        """Hermitian conjugate: reverse the word and swap X with X^dagger."""
        swap = {X: XDAG, XDAG: X}
        return Word("".join(swap[t] for t in reversed(self.tokens)))

    def is_rotation_of(self, other: "Word") -> bool:
        other = Word(other)
        return len(other) == len(self) and other.tokens in self.tokens + self.tokens

    def canonical(self) -> "Word":
        """Least rotation with X ordered before X^dagger."""
        key = self.tokens.translate(str.maketrans({X: "0", XDAG: "1"}))
        n = len(key)
        best = min(range(n), key=lambda i: key[i:] + key[:i])
        return self.rotate(best)

    def exponents(self) -> list[tuple[int, int]]:
        """Exponent form [(i_1, j_1), ...] of a rotation that starts with X."""
        toks = self.tokens
        if XDAG in toks and X in toks:
            start = next(i for i in range(len(toks)) if toks[i] == X and toks[i - 1] == XDAG)
            toks = toks[start:] + toks[:start]
        runs = [(m.group(1), m.group(2)) for m in re.finditer(r"(x*)(d*)", toks) if m.group(0)]
        return [(len(a), len(b)) for a, b in runs]


def as_word(w) -> Word:
    return w if isinstance(w, Word) else Word.parse(str(w))


@dataclass(frozen=True)
class Diagram:
    """A product of traces, one :class:`Word` per loop."""

    loops: tuple[Word, ...]

    def __post_init__(self):
        loops = tuple(as_word(w) for w in self.loops)
        if not loops:
            raise ValueError("a diagram needs at least one loop")
        object.__setattr__(self, "loops", loops)

    @classmethod
    def of(cls, *words) -> "Diagram":
        return cls(tuple(words))

    @property
    def total_insertions(self) -> int:
        return sum(len(w) for w in self.loops)

    @property
    def n_x(self) -> int:
        return sum(w.m_x for w in self.loops)

    @property
    def n_d(self) -> int:
        return sum(w.m_d for w in self.loops)

    @property
    def balanced(self) -> bool:
        return self.n_x == self.n_d

    @property
    def single_loop(self) -> bool:
        return len(self.loops) == 1

    def positions(self) -> list[tuple[int, int]]:
        return [(li, off) for li, w in enumerate(self.loops) for off in range(len(w))]

    def _flat(self) -> tuple[str, tuple[int, ...]]:
        """Concatenated tokens and the cyclic predecessor of each flat position."""
        return _flat_layout(tuple(w.tokens for w in self.loops))


@lru_cache(maxsize=4096)
def _flat_layout(loops: tuple[str, ...]) -> tuple[str, tuple[int, ...]]:
    tokens = "".join(loops)
    prev = []
    base = 0
    for w in loops:
        n = len(w)
        prev.extend(base + (i - 1) % n for i in range(n))
        base += n
    return tokens, tuple(prev)


Position = tuple[int, int]


@dataclass(frozen=True)
class Pairing:
    """Bijection between the X positions and the X^dagger positions of a diagram.

    ``pairs`` holds ``((loop, offset) of X, (loop, offset) of X^dagger)`` sorted
    by the X position.
    """

    pairs: tuple[tuple[Position, Position], ...]

    def as_dict(self) -> dict[Position, Position]:
        return dict(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class TraceMonomial:
    """coeff * N^n_power * prod_a Tr W^{partition_a}."""

    partition: Partition
    n_power: int
    coeff: Fraction = Fraction(1)


def _flat_index(d: Diagram) -> dict[Position, int]:
    out = {}
    base = 0
    for li, w in enumerate(d.loops):
        for off in range(len(w)):
            out[(li, off)] = base + off
        base += len(w)
    return out


def _partner_array(d: Diagram, p: Pairing) -> list[int]:
    idx = _flat_index(d)
    tokens, _ = d._flat()
    partner = [-1] * len(tokens)
    for xpos, dpos in p.pairs:
        a, b = idx[xpos], idx[dpos]
        if tokens[a] != X or tokens[b] != XDAG or partner[a] != -1 or partner[b] != -1:
            raise ValueError(f"pairing {p} is inconsistent with diagram {d}")
        partner[a] = b
        partner[b] = a
    if -1 in partner:
        raise ValueError(f"pairing {p} does not cover diagram {d}")
    return partner


def _cycles(tokens: str, prev: Sequence[int], partner: Sequence[int]) -> tuple[list[int], int]:
    """W-cycle lengths and number of pure delta cycles for one pairing."""
    n = len(tokens)
    seen = [False] * n
    w_parts = []
    pure = 0
    for start in range(n):
        if seen[start]:
            continue
        w = 0
        t = start
        while not seen[t]:
            seen[t] = True
            if tokens[t] == X:
                w += 1
            t = prev[partner[t]]
        if w:
            w_parts.append(w)
        else:
            pure += 1
    return w_parts, pure


def _iter_partner_arrays(tokens: str) -> Iterator[list[int]]:
    xs = [i for i, t in enumerate(tokens) if t == X]
    ds = [i for i, t in enumerate(tokens) if t == XDAG]
    partner = [-1] * len(tokens)
    for perm in permutations(ds):
        for a, b in zip(xs, perm):
            partner[a] = b
            partner[b] = a
        yield partner


def _check_cap(weight: int, cap: int | None, what: str = "pairing enumeration") -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if weight > cap:
        raise CapacityError(weight, cap, what)


def enumerate_pairings(d, cap: int | None = None) -> list[Pairing]:
    """All m! Wick pairings, ordered by X position then by matched X^dagger position.

    An unbalanced diagram has no pairings (its moment vanishes).
    """
    if not isinstance(d, Diagram):
        d = Diagram.of(d)
    if not d.balanced:
        return []
    _check_cap(d.n_x, cap)
    pos = d.positions()
    tokens, _ = d._flat()
    xs = [pos[i] for i, t in enumerate(tokens) if t == X]
    ds = [pos[i] for i, t in enumerate(tokens) if t == XDAG]
    return [Pairing(tuple(zip(xs, perm))) for perm in permutations(ds)]


def contract(d, p: Pairing) -> TraceMonomial:
    """Contribution of a single pairing.

    The full moment of a diagram with L loops and m propagators is
    sigma^{2m} / N^{m+L} * sum_p N^{pure cycles} prod Tr W^{cycle length}; the
    returned monomial is one summand with that normalization folded into
    ``n_power``.
    """
    if not isinstance(d, Diagram):
        d = Diagram.of(d)
    tokens, prev = d._flat()
    partner = _partner_array(d, p)
    parts, pure = _cycles(tokens, prev, partner)
    return TraceMonomial(Partition(parts), pure - d.n_x - len(d.loops), Fraction(1))


def _monomial_counts(loops: tuple[str, ...]) -> Counter:
    tokens, prev = _flat_layout(loops)
    m = tokens.count(X)
    shift = -m - len(loops)
    counts: Counter = Counter()
    for partner in _iter_partner_arrays(tokens):
        parts, pure = _cycles(tokens, prev, partner)
        parts.sort()
        counts[(tuple(parts), pure + shift)] += 1
    return counts


@lru_cache(maxsize=1024)
def _diagram_counts(loops: tuple[str, ...]) -> tuple[tuple[tuple[tuple[int, ...], int], int], ...]:
    return tuple(sorted(_monomial_counts(loops).items()))


class TracePolynomial:
    """Exact polynomial in Tr W^j and N, times sigma^{sigma_power}.

    ``terms`` maps ``(partition, n_power)`` to a nonzero Fraction.  A polynomial
    whose partitions are all empty is a Laurent polynomial in N; Wishart moments
    and finite-N product moments use that form.
    """

    __slots__ = ("_terms", "sigma_power")

    def __init__(self, terms: Mapping | Iterable = (), sigma_power: int = 0):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[Partition, int], Fraction] = {}
        for (part, npow), c in items:
            key = (Partition(part), int(npow))
            acc[key] = acc.get(key, Fraction(0)) + Fraction(c)
        self._terms = MappingProxyType({k: v for k, v in sorted(acc.items()) if v != 0})
        self.sigma_power = int(sigma_power)

    @property
    def terms(self) -> Mapping[tuple[Partition, int], Fraction]:
        return self._terms

    @classmethod
    def laurent(cls, coeffs: Mapping[int, Fraction | int], sigma_power: int = 0) -> "TracePolynomial":
        """Build a trace-free polynomial from ``{n_power: coefficient}``."""
        return cls({((), k): v for k, v in coeffs.items()}, sigma_power)

    def is_zero(self) -> bool:
        return not self._terms

    def is_laurent(self) -> bool:
        return all(not part for part, _ in self._terms)

    def laurent_coeffs(self) -> dict[int, Fraction]:
        if not self.is_laurent():
            raise ValueError("polynomial still contains traces of W")
        return {k: c for (_, k), c in self._terms.items()}

    def coefficient(self, partition=(), n_power: int = 0) -> Fraction:
        return self._terms.get((Partition(partition), n_power), Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TracePolynomial):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.sigma_power == other.sigma_power and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.sigma_power, tuple(self._terms.items())))

    def __add__(self, other: "TracePolynomial") -> "TracePolynomial":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.sigma_power != other.sigma_power:
            raise ValueError("cannot add polynomials with different sigma powers")
        return TracePolynomial(list(self._terms.items()) + list(other._terms.items()), self.sigma_power)

    def scale(self, factor, n_shift: int = 0) -> "TracePolynomial":
        """Multiply by ``factor * N**n_shift``."""
        factor = Fraction(factor)
        return TracePolynomial(
            {(part, k + n_shift): c * factor for (part, k), c in self._terms.items()}, self.sigma_power
        )

    def leading_coefficients(self) -> dict[Partition, Fraction]:
        """For each trace structure, the coefficient at its highest power of N."""
        best: dict[Partition, tuple[int, Fraction]] = {}
        for (part, k), c in self._terms.items():
            if part not in best or k > best[part][0]:
                best[part] = (k, c)
        return {part: c for part, (_, c) in sorted(best.items())}

    def map_traces(self, average) -> "TracePolynomial":
        """Replace each product of traces by ``average(partition)``.

        ``average`` must return a trace-free polynomial (a Laurent polynomial in N);
        the monomial's own power of N is kept.
        """
        out: dict[tuple[Partition, int], Fraction] = {}
        for (part, k), c in self._terms.items():
            if part:
                repl = average(part).laurent_coeffs()
            else:
                repl = {0: Fraction(1)}
            for j, v in repl.items():
                key = (Partition(()), k + j)
                out[key] = out.get(key, Fraction(0)) + c * v
        return TracePolynomial(out, self.sigma_power)

    def substitute_identity(self) -> "TracePolynomial":
        """Set W to the identity, so Tr W^j becomes N."""
        return TracePolynomial(
            [(((), k + len(part)), c) for (part, k), c in self._terms.items()], self.sigma_power
        )

    def evaluate(self, N, sigma=1, traces: Mapping[int, object] | None = None):
        """Numeric or exact value at a given N.

        ``traces`` maps j to the value of Tr W^j; it is required when the
        polynomial contains traces.  Fractions in, Fraction out.
        """
        total = 0
        for (part, k), c in self._terms.items():
            term = c * (Fraction(N) ** k if isinstance(N, (int, Fraction)) else N**k)
            for j in part:
                if traces is None:
                    raise ValueError("trace values are required")
                term *= traces[j]
            total += term
        return total * sigma**self.sigma_power

    def to_dict(self) -> dict:
        return {
            "sigma_power": self.sigma_power,
            "terms": [
                {"partition": list(part), "n_power": k, "num": str(c.numerator), "den": str(c.denominator)}
                for (part, k), c in self._terms.items()
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: Mapping) -> "TracePolynomial":
        return cls(
            {
                (tuple(t["partition"]), int(t["n_power"])): Fraction(int(t["num"]), int(t["den"]))
                for t in data["terms"]
            },
            int(data["sigma_power"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "TracePolynomial":
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        chunks = []
        for (part, k), c in sorted(self._terms.items(), key=lambda kv: (-kv[0][1], kv[0][0])):
            factors = [] if c == 1 and (part or k) else [str(c)]
            factors += [f"TrW^{j}" if j > 1 else "TrW" for j in part]
            if k:
                factors.append(f"N^{k}")
            chunks.append("*".join(factors))
        body = " + ".join(chunks)
        return f"sigma^{self.sigma_power}*({body})" if self.sigma_power else body

    def __repr__(self) -> str:
        return f"TracePolynomial({self})"


def diagram_polynomial(d, cap: int | None = None) -> TracePolynomial:
    """Sum of :func:`contract` over all pairings of ``d``."""
    if not isinstance(d, Diagram):
        d = Diagram.of(d)
    if not d.balanced:
        return TracePolynomial({}, 0)
    _check_cap(d.n_x, cap)
    counts = _diagram_counts(tuple(w.tokens for w in d.loops))
    return TracePolynomial({key: c for key, c in counts}, 2 * d.n_x)


def ginibre_moment_poly(w, cap: int | None = None) -> TracePolynomial:
    """(1/N) <Tr w(X W^{1/2}, W^{1/2} X^dagger)> exactly in N.

    Unbalanced words give the zero polynomial.
    """
    return diagram_polynomial(Diagram.of(as_word(w)), cap)


def _single_loop(d) -> Diagram:
    if not isinstance(d, Diagram):
        d = Diagram.of(d)
    if not d.single_loop:
        raise UnsupportedDiagram("crossing and genus are only defined for single-trace diagrams")
    return d


def _chords(d: Diagram, p: Pairing) -> list[tuple[int, int]]:
    out = []
    for (_, a), (_, b) in p.pairs:
        out.append((a, b) if a < b else (b, a))
    return out


def _crossing_free(chords: Sequence[tuple[int, int]]) -> bool:
    for i, (a, b) in enumerate(chords):
        for c, e in chords[i + 1 :]:
            if a < c < b < e or c < a < e < b:
                return False
    return True


def is_noncrossing(d, p: Pairing) -> bool:
    d = _single_loop(d)
    return _crossing_free(_chords(d, p))


def genus(d, p: Pairing) -> int:
    """Genus of the ribbon graph; the pairing is suppressed by N^(-2g)."""
    d = _single_loop(d)
    if not d.balanced:
        raise ValueError("genus needs a balanced word")
    mono = contract(d, p)
    # the normalized planar order is N^0
    deficit = -(mono.n_power + mono.partition.k)
    assert deficit >= 0 and deficit % 2 == 0
    return deficit // 2


def _noncrossing_partner_sets(tokens: str) -> list[tuple[tuple[int, int], ...]]:
    """Non-crossing X/X^dagger matchings of a linear word (the circle cut at 0)."""

    @lru_cache(maxsize=None)
    def solve(lo: int, hi: int) -> tuple[tuple[tuple[int, int], ...], ...]:
        if lo >= hi:
            return ((),)
        out = []
        first = tokens[lo]
        for j in range(lo + 1, hi, 2):
            if tokens[j] == first:
                continue
            inner = tokens[lo + 1 : j]
            if inner.count(X) * 2 != len(inner):
                continue
            pair = (lo, j) if first == X else (j, lo)
            for a in solve(lo + 1, j):
                for b in solve(j + 1, hi):
                    out.append((pair,) + a + b)
        return tuple(out)

    if tokens.count(X) * 2 != len(tokens):
        return []
    return list(solve(0, len(tokens)))


def noncrossing_pairings(w, cap: int | None = None) -> list[Pairing]:
    """Only the planar pairings of a single word; Catalan-many at most."""
    w = as_word(w)
    if not w.balanced:
        return []
    _check_cap(w.weight, PLANAR_CAP if cap is None else cap, "non-crossing enumeration")
    out = []
    for match in _noncrossing_partner_sets(w.tokens):
        out.append(Pairing(tuple(((0, a), (0, b)) for a, b in sorted(match))))
    return out


@lru_cache(maxsize=1024)
def _tc_cached(tokens: str) -> tuple[tuple[Partition, int], ...]:
    _, prev = _flat_layout((tokens,))
    counts: Counter = Counter()
    n = len(tokens)
    for match in _noncrossing_partner_sets(tokens):
        partner = [0] * n
        for a, b in match:
            partner[a] = b
            partner[b] = a
        parts, _ = _cycles(tokens, prev, partner)
        counts[Partition(parts)] += 1
    return tuple(sorted(counts.items()))


def tc_coefficients(w, cap: int | None = None) -> dict[Partition, int]:
    """Leading-order trace coefficients, one count of planar pairings per trace structure."""
    w = as_word(w)
    if not w.balanced:
        return {}
    _check_cap(w.weight, PLANAR_CAP if cap is None else cap, "non-crossing enumeration")
    return dict(_tc_cached(w.tokens))


def genus_crossing_sweep(w) -> Iterator[tuple[int, bool]]:
    """(genus, non-crossing?) for every pairing of a single balanced word.

    Same answers as :func:`genus` and :func:`is_noncrossing` without building
    :class:`Pairing` objects; used for exhaustive checks.
    """
    w = as_word(w)
    if not w.balanced:
        return
    tokens, prev = _flat_layout((w.tokens,))
    m = w.weight
    xs = [i for i, t in enumerate(tokens) if t == X]
    for partner in _iter_partner_arrays(tokens):
        parts, pure = _cycles(tokens, prev, partner)
        g2 = m + 1 - len(parts) - pure
        chords = [(a, partner[a]) if a < partner[a] else (partner[a], a) for a in xs]
        yield g2 // 2, _crossing_free(chords)
