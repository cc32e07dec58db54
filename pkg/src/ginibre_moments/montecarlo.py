"""Seeded Monte Carlo checks for products of Ginibre matrices.

Sample ``i`` of a run draws from its own Philox stream keyed by
``SeedSequence(seed, spawn_key=(i,))``, so results do not depend on how the
samples are split across worker threads.
"""

from __future__ import annotations

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .moments import EnsembleSpec
from .wick import X, Word, as_word

log = logging.getLogger(__name__)

DESK = {"N": 200, "samples": 500}
FULL = {"N": 500, "samples": 1500}


@dataclass(frozen=True)
class MCConfig:
    spec: EnsembleSpec
    N: int = DESK["N"]
    samples: int = DESK["samples"]
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.N < 1 or self.samples < 1:
            raise ValueError("N and samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    samples: int
    imag_mean: float = 0.0


def sample_stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_ginibre(N: int, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """N x N complex matrix, real and imaginary parts i.i.d. N(0, sigma^2 / 2N)."""
    if N < 1 or sigma <= 0:
        raise ValueError("need N >= 1 and sigma > 0")
    z = rng.standard_normal((N, N, 2))
    return (z[..., 0] + 1j * z[..., 1]) * (sigma / math.sqrt(2 * N))


def sample_product(cfg: MCConfig, index: int) -> np.ndarray:
    rng = sample_stream(cfg.seed, index)
    out = None
    for s in cfg.spec.sigmas:
        a = sample_ginibre(cfg.N, float(s), rng)
        out = a if out is None else out @ a
    return out


def _hermitian_half(tokens: str) -> str | None:
    """A prefix u with tokens equal to u + conj(u) up to rotation, if one exists."""
    n = len(tokens)
    if n % 2:
        return None
    for r in range(n):
        rot = tokens[r:] + tokens[:r]
        u = rot[: n // 2]
        if rot[n // 2 :] == Word(u).conjugate().tokens:
            return u
    return None


class _ProductCache:
    """Left-to-right products of token prefixes of one sampled X."""

    def __init__(self, x: np.ndarray):
        self.mats = {"x": x, "d": x.conj().T}
        self.cache: dict[str, np.ndarray] = dict(self.mats)

    def product(self, tokens: str) -> np.ndarray:
        hit = self.cache.get(tokens)
        if hit is not None:
            return hit
        out = self.product(tokens[:-1]) @ self.mats[tokens[-1]]
        self.cache[tokens] = out
        return out


def word_trace(tokens: str, cache: _ProductCache) -> complex:
    """Tr of the word evaluated on the sample behind ``cache``."""
    half = _hermitian_half(tokens)
    if half is not None:
        m = cache.product(half)
        return complex(np.vdot(m, m).real)
    if len(tokens) == 1:
        return complex(np.trace(cache.product(tokens)))
    # Tr(A B) without forming A B
    left = cache.product(tokens[:-1])
    return complex(np.sum(left * cache.mats[tokens[-1]].T))


def _run(cfg: MCConfig, per_sample: Callable[[int], np.ndarray], width: int) -> np.ndarray:
    out = np.empty((cfg.samples, width), dtype=complex)

    def work(indices: range) -> None:
        for i in indices:
            out[i] = per_sample(i)

    if cfg.threads == 1:
        work(range(cfg.samples))
    else:
        step = math.ceil(cfg.samples / cfg.threads)
        chunks = [range(a, min(a + step, cfg.samples)) for a in range(0, cfg.samples, step)]
        with ThreadPoolExecutor(cfg.threads) as pool:
            list(pool.map(work, chunks))
    return out


def _summarize(values: np.ndarray) -> Estimate:
    re = values.real.tolist()
    s = len(re)
    mean = math.fsum(re) / s
    if s > 1:
        var = math.fsum((v - mean) ** 2 for v in re) / (s - 1)
    else:
        var = 0.0
    imag = math.fsum(values.imag.tolist()) / s
    return Estimate(mean, math.sqrt(var / s), s, imag)


def estimate_word_moments(words: Sequence, cfg: MCConfig) -> list[Estimate]:
    """(1/N) Re Tr of each word, all evaluated on the same samples of X."""
    toks = [as_word(w).tokens for w in words]

    def per_sample(i: int) -> np.ndarray:
        cache = _ProductCache(sample_product(cfg, i))
        return np.array([word_trace(t, cache) for t in toks]) / cfg.N

    values = _run(cfg, per_sample, len(toks))
    return [_summarize(values[:, j]) for j in range(len(toks))]


def estimate_word_moment(w, cfg: MCConfig) -> Estimate:
    return estimate_word_moments([w], cfg)[0]


def switch_word(m: int) -> Word:
    """X^m X^dagger X (X^dagger)^m."""
    return Word(X * m + "d" + "x" + "d" * m)


@dataclass
class SpectrumReport:
    radii: np.ndarray
    n: int
    sigma: float
    sup_dev: float
    skipped: int = 0

    def theory_cdf(self, r) -> np.ndarray:
        return radial_cdf(np.asarray(r), self.n, self.sigma)


def radial_cdf(r, n: int, sigma: float = 1.0):
    """Fraction of eigenvalues within radius r at large N: (r/sigma)^(2/n), capped at 1."""
    return np.clip((np.asarray(r, dtype=float) / sigma) ** (2.0 / n), 0.0, 1.0)


def ks_distance(sorted_r: np.ndarray, n: int, sigma: float) -> float:
    m = len(sorted_r)
    if m == 0:
        return 1.0
    f = radial_cdf(sorted_r, n, sigma)
    hi = np.arange(1, m + 1) / m
    lo = np.arange(0, m) / m
    return float(max(np.max(hi - f), np.max(f - lo)))


def eigenvalue_radial_report(cfg: MCConfig) -> SpectrumReport:
    """Eigenvalue moduli of sampled products against the large-N radial law.

    LAPACK's general eigensolver balances the matrix, reduces it to Hessenberg
    form and runs shifted QR.
    """
    radii = []
    skipped = 0
    for i in range(cfg.samples):
        x = sample_product(cfg, i)
        try:
            ev = np.linalg.eigvals(x)
        except np.linalg.LinAlgError:
            skipped += 1
            log.warning("eigensolver did not converge on sample %d", i)
            continue
        radii.append(np.abs(ev))
    r = np.sort(np.concatenate(radii)) if radii else np.empty(0)
    sigma = cfg.spec.sigma
    return SpectrumReport(r, cfg.spec.n, sigma, ks_distance(r, cfg.spec.n, sigma), skipped)


def radial_cdf_rows(report: SpectrumReport, points: int | None = None) -> list[tuple[float, float, float]]:
    """Rows (r, empirical_cdf, theory_cdf); every eigenvalue unless ``points`` thins them."""
    r = report.radii
    m = len(r)
    idx = np.arange(m) if points is None or points >= m else np.linspace(0, m - 1, points).round().astype(int)
    theory = report.theory_cdf(r[idx])
    return [(float(r[i]), (int(i) + 1) / m, float(t)) for i, t in zip(idx, theory)]


def radial_density_rows(report: SpectrumReport, bins: int) -> list[tuple[float, float, float, int]]:
    """Rows (bin_center, density, theory, count) of eigenvalues per unit area in radial bins."""
    edge = max(report.sigma, float(report.radii[-1]) if len(report.radii) else report.sigma)
    edges = np.linspace(0.0, edge, bins + 1)
    counts, _ = np.histogram(report.radii, edges)
    total = len(report.radii)
    rows = []
    for a, b, c in zip(edges[:-1], edges[1:], counts):
        area = math.pi * float(b * b - a * a)
        mass = float(np.diff(report.theory_cdf([a, b]))[0])
        rows.append((float(a + b) / 2, float(c / total / area), mass / area, int(c)))
    return rows


# -- product of two complex Gaussian scalars ---------------------------------


class QuadratureError(RuntimeError):
    pass


def scalar_product_density(r: float) -> float:
    """Density (per unit area) of z = a b at |z| = r.

    a and b have independent N(0, 1) real and imaginary parts.  Evaluated as
    (1/4pi) int_0^inf du/u exp(-u - r^2/(4u)), which equals K_0(r) / (2 pi).
    """
    def integrand(u):
        return math.exp(-u - r * r / (4 * u)) / u

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if r == 0:
                return math.inf
            # split at the saddle u = r/2 so both halves are smooth
            pieces = [integrate.quad(integrand, 0, r / 2, limit=200), integrate.quad(integrand, r / 2, math.inf, limit=200)]
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature did not converge at |z| = {r:g}: {exc}") from exc
    return sum(v for v, _ in pieces) / (4 * math.pi)


def scalar_product_radial_mass(a: float, b: float) -> float:
    """Probability that a <= |z| < b."""
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(lambda r: 2 * math.pi * r * scalar_product_density(r), a, b, limit=200)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"quadrature did not converge on the bin [{a:g}, {b:g})") from exc
    return val


@dataclass
class ScalarProductReport:
    rows: list[tuple[float, float, float, int]]
    zscores: list[float]
    max_z: float
    samples: int
    normalization: float
    populated: int = field(default=0)


def scalar_product_density_check(
    samples: int, seed: int, bins: int = 20, r_max: float = 6.0, min_hits: int = 100
) -> ScalarProductReport:
    """Histogram |ab| and compare each populated bin with its quadrature mass.

    The deviation of a bin is |hits - expected| in units of the binomial
    standard error sqrt(samples q (1 - q)); ``max_z`` is the worst bin among
    those with at least ``min_hits`` hits.
    """
    if samples < 10_000:
        raise ValueError("need at least 10^4 samples")
    rng = sample_stream(seed, 0)
    g = rng.standard_normal((samples, 4))
    z = (g[:, 0] + 1j * g[:, 1]) * (g[:, 2] + 1j * g[:, 3])
    edges = np.linspace(0.0, r_max, bins + 1)
    counts, _ = np.histogram(np.abs(z), edges)
    rows, zs = [], []
    for a, b, c in zip(edges[:-1], edges[1:], counts):
        q = scalar_product_radial_mass(a, b)
        area = math.pi * float(b * b - a * a)
        rows.append((float(a + b) / 2, float(c / samples / area), q / area, int(c)))
        if c >= min_hits:
            zs.append(abs(c - samples * q) / math.sqrt(samples * q * (1 - q)))
    norm = scalar_product_radial_mass(0.0, 12.0) + scalar_product_radial_mass(12.0, 60.0)
    return ScalarProductReport(rows, zs, max(zs) if zs else math.inf, samples, norm, len(zs))


def log_multivariate_gamma(N: int, a: float) -> float:
    """log Gamma_N(a) = N(N-1)/2 log(pi) + sum_{k=1}^N log Gamma(a - k + 1)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if a <= N - 1:
        raise ValueError(f"complex multivariate gamma needs a > N - 1, got a={a}, N={N}")
    return N * (N - 1) / 2 * math.log(math.pi) + math.fsum(math.lgamma(a - k + 1) for k in range(1, N + 1))
