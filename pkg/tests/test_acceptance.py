"""Acceptance criteria 1-11, one test each.

Every test records one line ``ACCEPTANCE Ck PASS|FAIL`` followed by its
individual checks; tests/conftest.py prints them in the pytest terminal
summary.  Run directly (``python3 tests/test_acceptance.py``) or through pytest.
"""

import os
import subprocess
import sys
import time

import pytest
from conftest import ACCEPTANCE_LINES

from ginibre_moments import verify
from ginibre_moments.wick import ginibre_moment_poly

SEED = 42
THREADS = os.cpu_count() or 1


def report(k: int, checks, extra_ok: bool = True, note: str = "", details: list[str] | None = None) -> None:
    lines = [c.line() for c in checks] + (details or [])
    ok = extra_ok and all(c.passed for c in checks)
    status = f"ACCEPTANCE C{k} {'PASS' if ok else 'FAIL'}{'  ' + note if note else ''}"
    ACCEPTANCE_LINES.append((k, status, lines))
    print(status, *lines, sep="\n    ")
    failed = [c.name for c in checks if not c.passed]
    assert ok, f"criterion {k} failed: {failed or note}"


def test_c01_symbolic_goldens():
    times = []
    for w in ("xd", "xdxd", "xdxdxd"):
        t0 = time.perf_counter()
        ginibre_moment_poly(w)
        times.append(time.perf_counter() - t0)
    checks = verify.criterion_1()
    report(1, checks, max(times) < 1.0, f"slowest golden {max(times):.3f}s (limit 1s)")


def test_c02_finite_n_golden():
    report(2, verify.criterion_2())


def test_c03_wishart_oracles():
    report(3, verify.criterion_3())


def test_c04_fuss_catalan_recursion():
    report(4, verify.criterion_4())


def test_c05_tc_tables():
    report(5, verify.criterion_5())


def test_c06_genus_crossing():
    t0 = time.perf_counter()
    checks = verify.criterion_6()
    dt = time.perf_counter() - t0
    report(6, checks, dt < 60, f"runtime {dt:.1f}s (limit 60s)")


@pytest.mark.slow
def test_c07_table1():
    report(7, verify.criterion_7(SEED, threads=THREADS))


@pytest.mark.slow
def test_c08_table2():
    report(8, verify.criterion_8(SEED, threads=THREADS))


def test_c09_radial_law():
    report(9, verify.criterion_9(SEED))


def test_c10_scalar_bessel():
    report(10, verify.criterion_10(SEED))


def test_c11_quick_verify_runtime():
    t0 = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "ginibre_moments.cli", "verify", "--quick"],
        capture_output=True,
        text=True,
    )
    dt = time.perf_counter() - t0
    ran = proc.returncode in (0, 2) and "checks passed" in proc.stdout
    detail = f"verify --quick finished in {dt:.1f}s with exit code {proc.returncode}"
    report(11, [], ran and dt < 120, f"runtime {dt:.1f}s (limit 120s)", [detail])


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
