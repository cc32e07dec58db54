"""Acceptance checks shared by ``ginibre-moments verify`` and the test suite.

Each ``criterion_k`` returns a list of :class:`Check`.  Expected values are the
reference values; a failing check is reported, never adjusted.
"""

from __future__ import annotations

import logging
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable

from .combinatorics import Partition, catalan, fuss_catalan, partitions, tc_leading
from .moments import EnsembleSpec, fc_recursion_check, finite_n_moment_n2, multi_wishart_moment
from .montecarlo import (
    DESK,
    FULL,
    MCConfig,
    eigenvalue_radial_report,
    estimate_word_moments,
    scalar_product_density_check,
    switch_word,
)
from .wick import TracePolynomial, genus_crossing_sweep, ginibre_moment_poly, tc_coefficients
from .wishart import normalized, wishart_low_moments_closed_form, wishart_multitrace

log = logging.getLogger(__name__)

EXACT = "exact"


@dataclass(frozen=True)
class Check:
    criterion: int
    name: str
    expected: str
    obtained: str
    tolerance: str
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] C{self.criterion} {self.name}: expected {self.expected}, obtained {self.obtained} ({self.tolerance})"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _laurent(coeffs: dict[int, int | Fraction], sigma_power: int = 0) -> TracePolynomial:
    return TracePolynomial.laurent(coeffs, sigma_power)


def _fmt_laurent(poly: TracePolynomial) -> str:
    coeffs = poly.laurent_coeffs()
    if not coeffs:
        return "0"
    parts = []
    for k in sorted(coeffs, reverse=True):
        c = coeffs[k]
        power = "N" if k == 1 else f"N^{k}"
        parts.append(f"{c}" if k == 0 else power if c == 1 else f"{c}*{power}")
    return " + ".join(parts)


def _exact(criterion: int, name: str, expected, obtained, fmt=str) -> Check:
    return Check(criterion, name, fmt(expected), fmt(obtained), EXACT, expected == obtained)


def _rel(criterion: int, name: str, target: float, est, rel_tol: float) -> Check:
    err = abs(est.mean - target) / target
    return Check(
        criterion,
        name,
        f"{target:g}",
        f"{est.mean:.4f} +/- {est.stderr:.4f}",
        f"relative {rel_tol:.0%}",
        err <= rel_tol,
    )


def criterion_1() -> list[Check]:
    goldens = {
        "xd": TracePolynomial({((1,), -1): 1}, 2),
        "xdxd": TracePolynomial({((1, 1), -2): 1, ((2,), -1): 1}, 4),
        "xdxdxd": TracePolynomial(
            {((1, 1, 1), -3): 1, ((1, 2), -2): 3, ((3,), -1): 1, ((3,), -3): 1}, 6
        ),
    }
    return [
        _exact(1, f"Ginibre polynomial of {w}", poly, ginibre_moment_poly(w))
        for w, poly in goldens.items()
    ]


def criterion_2() -> list[Check]:
    got = finite_n_moment_n2("xdxdxd")
    reference = _laurent({0: 12, -1: 6, -2: 12, -4: 1}, 6)
    return [
        _exact(2, "finite-N <Tr (XX^+)^3>/N for n=2 equals the reference rational function", reference, got, _fmt_laurent),
        _exact(2, "finite-N <Tr (XX^+)^3>/N has O(1) term 12", Fraction(12), got.laurent_coeffs().get(0)),
    ]


def criterion_3() -> list[Check]:
    reference = {
        (1,): {0: 1},
        (2,): {0: 2},
        (3,): {0: 5, -2: 1},
        (1, 2): {0: 2, -1: 2, -2: 2},
    }
    checks = []
    for parts, coeffs in reference.items():
        got = normalized(wishart_multitrace(parts), len(parts))
        checks.append(_exact(3, f"Wishart <{_trace_label(parts)}>/N^{len(parts)}", _laurent(coeffs), got, _fmt_laurent))
    for m in (1, 2, 3):
        for p in partitions(m):
            checks.append(
                _exact(
                    3,
                    f"Wick contraction equals delta-formula oracle for {_trace_label(p)}",
                    wishart_low_moments_closed_form(p),
                    wishart_multitrace(p),
                    _fmt_laurent,
                )
            )
    return checks


def _trace_label(parts) -> str:
    return " ".join(f"TrW^{j}" if j > 1 else "TrW" for j in sorted(parts, reverse=True))


def criterion_4() -> list[Check]:
    bad_mw = [(n, m) for n in range(1, 6) for m in range(1, 6) if multi_wishart_moment(n, m) != fuss_catalan(n, m)]
    bad_rec = [(n, m) for n in range(2, 7) for m in range(1, 6) if not fc_recursion_check(n, m)]
    return [
        Check(4, "multi-Wishart recursion equals FC_n(m), n<=5, m<=5", "no mismatches", str(bad_mw or "no mismatches"), EXACT, not bad_mw),
        Check(4, "Fuss-Catalan recursion holds for FC_1..FC_5, m<=5", "no mismatches", str(bad_rec or "no mismatches"), EXACT, not bad_rec),
    ]


def _tc_str(tc: dict) -> str:
    return "{" + ", ".join(f"{tuple(p)}: {c}" for p, c in sorted(tc.items())) + "}"


def criterion_5() -> list[Check]:
    checks = []
    for m in range(1, 7):
        formula = {p: tc_leading(p) for p in partitions(m)}
        checks.append(_exact(5, f"tc((XD)^{m}) enumeration equals closed form", formula, tc_coefficients("xd" * m), _tc_str))
    reference3 = {Partition((1, 1, 1)): 1, Partition((1, 2)): 3, Partition((3,)): 1}
    reference5 = {
        Partition((1, 1, 1, 1, 1)): 1,
        Partition((1, 1, 1, 2)): 10,
        Partition((1, 1, 3)): 10,
        Partition((1, 4)): 5,
        Partition((1, 2, 2)): 10,
        Partition((2, 3)): 5,
        Partition((5,)): 1,
    }
    checks.append(_exact(5, "tc((XD)^3) equals reference table", reference3, tc_coefficients("xd" * 3), _tc_str))
    checks.append(_exact(5, "tc((XD)^5) equals reference table", reference5, tc_coefficients("xd" * 5), _tc_str))
    tc4 = tc_coefficients("xd" * 4)
    checks.append(_exact(5, "tc((XD)^4)(1,1,2)", 6, tc4.get(Partition((1, 1, 2)))))
    checks.append(_exact(5, "sum of tc((XD)^4) equals C_4", catalan(4), sum(tc4.values())))
    return checks


def criterion_6() -> list[Check]:
    total = 0
    bad = 0
    for m in range(1, 7):
        for xs in combinations(range(2 * m), m):
            xset = set(xs)
            w = "".join("x" if i in xset else "d" for i in range(2 * m))
            for g, nc in genus_crossing_sweep(w):
                total += 1
                bad += (g == 0) != nc
    return [Check(6, f"genus 0 iff non-crossing over {total} pairings (m<=6)", "0 violations", f"{bad} violations", EXACT, bad == 0)]


def criterion_7(seed: int, desk: bool = False, threads: int = 1) -> list[Check]:
    checks = []
    presets = [("desk", DESK, 0.03)] if desk else [("full", FULL, 0.02), ("desk", DESK, 0.03)]
    words = [switch_word(m) for m in (1, 2, 3, 4)]
    for label, preset, tol in presets:
        cfg = MCConfig(EnsembleSpec(2), preset["N"], preset["samples"], seed, threads)
        for m, est in zip((1, 2, 3, 4), estimate_word_moments(words, cfg)):
            checks.append(_rel(7, f"n=2 X^{m} X^+ X (X^+)^{m} ({label} N={cfg.N}, S={cfg.samples})", 3, est, tol))
    return checks


def criterion_8(seed: int, desk: bool = False, threads: int = 1) -> list[Check]:
    preset = DESK if desk else FULL
    checks = []
    words = [switch_word(m) for m in (2, 3, 4)]
    for n in (3, 4):
        cfg = MCConfig(EnsembleSpec(n), preset["N"], preset["samples"], seed, threads)
        for m, est in zip((2, 3, 4), estimate_word_moments(words, cfg)):
            checks.append(_rel(8, f"n={n} X^{m} X^+ X (X^+)^{m} (N={cfg.N}, S={cfg.samples})", n + 1, est, 0.02))
    return checks


def criterion_9(seed: int) -> list[Check]:
    checks = []
    for n in (1, 2, 3):
        rep = eigenvalue_radial_report(MCConfig(EnsembleSpec(n), N=1000, samples=1, seed=seed))
        checks.append(
            Check(9, f"radial CDF sup-deviation from r^(2/{n}), N=1000", "<= 0.03", f"{rep.sup_dev:.4f}", "absolute 0.03", rep.sup_dev <= 0.03)
        )
    return checks


def criterion_10(seed: int) -> list[Check]:
    rep = scalar_product_density_check(100_000, seed)
    return [
        Check(10, f"scalar product |ab| bins vs quadrature ({rep.populated} populated bins)", "max z <= 3", f"max z = {rep.max_z:.3f}", "3 binomial stderr", rep.max_z <= 3),
        Check(10, "quadrature density integrates to 1", "1", f"{rep.normalization:.9f}", "absolute 1e-6", abs(rep.normalization - 1) <= 1e-6),
    ]


QUICK: dict[int, Callable[[], list[Check]]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
}


def run(full: bool = False, seed: int | None = None, desk: bool = False, threads: int = 1) -> list[Check]:
    checks: list[Check] = []
    for k, fn in QUICK.items():
        t0 = time.perf_counter()
        checks += fn()
        log.info("criterion %d done in %.2fs", k, time.perf_counter() - t0)
    if full:
        if seed is None:
            raise ValueError("the stochastic criteria need an explicit seed")
        for k, fn in ((7, criterion_7), (8, criterion_8)):
            t0 = time.perf_counter()
            checks += fn(seed, desk=desk, threads=threads)
            log.info("criterion %d done in %.2fs", k, time.perf_counter() - t0)
        checks += criterion_9(seed)
        checks += criterion_10(seed)
    return checks


def summary(checks: list[Check]) -> dict:
    passed = sum(c.passed for c in checks)
    return {"total": len(checks), "passed": passed, "failed": len(checks) - passed}
