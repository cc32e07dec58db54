"""Command-line interface: ``ginibre-moments <command> ...``.

Exit codes: 0 success, 2 a verify check failed, 64 usage error, 65 capacity exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

from . import verify as verify_mod
from .combinatorics import enumerate_necklaces, fuss_catalan, necklace_count, partitions
from .moments import EnsembleSpec, evaluate
from .montecarlo import (
    DESK,
    MCConfig,
    eigenvalue_radial_report,
    estimate_word_moment,
    radial_cdf_rows,
    radial_density_rows,
    scalar_product_density_check,
)
from .wick import (
    DEFAULT_CAP,
    CapacityError,
    Diagram,
    WordFormatError,
    contract,
    enumerate_pairings,
    genus,
    ginibre_moment_poly,
    is_noncrossing,
    Word,
)

EXIT_OK = 0
EXIT_TOLERANCE = 2
EXIT_USAGE = 64
EXIT_CAPACITY = 65

MOMENT_CSV_HEADER = ["word", "factors", "mode", "sigma_power", "partition", "n_power", "num", "den"]
MC_CSV_HEADER = ["word", "factors", "size", "samples", "seed", "mean", "stderr", "imag_mean"]
CDF_CSV_HEADER = ["r", "empirical_cdf", "theory_cdf"]
DENSITY_CSV_HEADER = ["bin_center", "density", "theory", "count"]

# cap None leaves each evaluator at its own default (brute force 8, planar 14)
BUILTIN_DEFAULTS = {"size": DESK["N"], "samples": DESK["samples"], "cap": None, "threads": 1, "bins": 20}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def load_config(path: str | None) -> dict[str, int]:
    """Read ``key=value`` lines; blank lines and ``#`` comments are ignored."""
    if not path:
        return {}
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in BUILTIN_DEFAULTS:
            raise UsageError(f"{path}:{lineno}: expected one of {sorted(BUILTIN_DEFAULTS)} as key=value")
        out[key] = int(value.strip())
    return out


def _frac(x: Fraction) -> dict[str, str]:
    return {"num": str(x.numerator), "den": str(x.denominator)}


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _spec(args) -> EnsembleSpec:
    try:
        return EnsembleSpec.parse(args.factors, args.sigma)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc


def cmd_moment(args) -> int:
    word = Word.parse(args.word)
    spec = _spec(args)
    if args.finite_n and spec.n > 2:
        raise UsageError("--finite-n requires --factors <= 2")
    sigmas = [str(s) for s in spec.sigmas]
    if args.symbolic:
        poly = ginibre_moment_poly(word, args.cap)
        mode, value, tc, provenance = "symbolic", poly, {}, "enumeration"
    else:
        res = evaluate(word, spec, finite_n=args.finite_n, cap=args.cap)
        mode, value, tc, provenance = res.mode, res.value, res.tc, res.tc_provenance
    if args.format == "csv":
        if isinstance(value, Fraction):
            rows = [[word, spec.n, mode, 0, "", 0, value.numerator, value.denominator]]
        elif value.is_zero():
            rows = [[word, spec.n, mode, value.sigma_power, "", 0, 0, 1]]
        else:
            rows = [
                [word, spec.n, mode, value.sigma_power, " ".join(map(str, part)), k, c.numerator, c.denominator]
                for (part, k), c in value.terms.items()
            ]
        sys.stdout.write(_csv_text(MOMENT_CSV_HEADER, rows))
        return EXIT_OK
    payload = {
        "word": str(word),
        "factors": spec.n,
        "sigmas": sigmas,
        "mode": mode,
        "value": _frac(value) if isinstance(value, Fraction) else value.to_dict(),
        "tc": {
            "provenance": provenance,
            "coefficients": [{"partition": list(p), "value": str(c)} for p, c in sorted(tc.items())],
        },
    }
    print(_dump(payload))
    return EXIT_OK


def cmd_enumerate(args) -> int:
    lines = []
    if args.necklaces is not None:
        cap = DEFAULT_CAP if args.cap is None else args.cap
        if args.necklaces > cap:
            raise CapacityError(args.necklaces, cap, "necklace enumeration")
        words = enumerate_necklaces(args.necklaces)
        assert len(words) == necklace_count(args.necklaces)
        lines.append(f"# necklaces m={args.necklaces} count={len(words)}")
        lines += [str(w) for w in words]
    elif args.partitions is not None:
        parts = partitions(args.partitions)
        lines.append(f"# partitions m={args.partitions} count={len(parts)}")
        lines += [" ".join(map(str, p)) for p in parts]
    else:
        d = Diagram.of(Word.parse(args.pairings))
        pairings = enumerate_pairings(d, args.cap)
        lines.append(f"# pairings word={d.loops[0]} count={len(pairings)}")
        for p in pairings:
            text = " ".join(f"{a[1]}-{b[1]}" for a, b in p.pairs)
            if args.classify:
                mono = contract(d, p)
                traces = "*".join(f"TrW^{j}" if j > 1 else "TrW" for j in mono.partition)
                kind = "noncrossing" if is_noncrossing(d, p) else "crossing"
                text += f"  {kind} genus={genus(d, p)} {traces}*N^{mono.n_power}"
            lines.append(text)
    print("\n".join(lines))
    return EXIT_OK


def cmd_fc(args) -> int:
    if args.table:
        rows = [[m, fuss_catalan(args.n, m)] for m in range(args.m + 1)]
        sys.stdout.write(_csv_text(["m", "fc"], rows))
    else:
        print(fuss_catalan(args.n, args.m))
    return EXIT_OK


def cmd_mc(args) -> int:
    word = Word.parse(args.word)
    spec = _spec(args)
    cfg = MCConfig(spec, args.size, args.samples, args.seed, args.threads)
    est = estimate_word_moment(word, cfg)
    if args.format == "csv":
        row = [word, spec.n, cfg.N, cfg.samples, cfg.seed, repr(est.mean), repr(est.stderr), repr(est.imag_mean)]
        sys.stdout.write(_csv_text(MC_CSV_HEADER, [row]))
    else:
        print(
            _dump(
                {
                    "word": str(word),
                    "factors": spec.n,
                    "sigmas": [str(s) for s in spec.sigmas],
                    "size": cfg.N,
                    "samples": cfg.samples,
                    "seed": cfg.seed,
                    "mean": est.mean,
                    "stderr": est.stderr,
                    "imag_mean": est.imag_mean,
                }
            )
        )
    return EXIT_OK


def _write_csv(path: str, header, rows) -> None:
    Path(path).write_text(_csv_text(header, rows))


def cmd_spectrum(args) -> int:
    spec = _spec(args)
    report = eigenvalue_radial_report(MCConfig(spec, args.size, args.samples, args.seed, args.threads))
    if args.out:
        _write_csv(args.out, CDF_CSV_HEADER, [(repr(r), repr(e), repr(t)) for r, e, t in radial_cdf_rows(report)])
    if args.density_out:
        rows = [(repr(c), repr(d), repr(t), n) for c, d, t, n in radial_density_rows(report, args.bins)]
        _write_csv(args.density_out, DENSITY_CSV_HEADER, rows)
    print(
        _dump(
            {
                "factors": spec.n,
                "size": args.size,
                "samples": args.samples,
                "seed": args.seed,
                "eigenvalues": int(len(report.radii)),
                "skipped": report.skipped,
                "sup_dev": report.sup_dev,
            }
        )
    )
    return EXIT_OK


def cmd_bessel(args) -> int:
    rep = scalar_product_density_check(args.samples, args.seed, bins=args.bins)
    if args.out:
        _write_csv(args.out, DENSITY_CSV_HEADER, [(repr(c), repr(d), repr(t), n) for c, d, t, n in rep.rows])
    print(_dump({"samples": rep.samples, "seed": args.seed, "populated_bins": rep.populated, "max_z": rep.max_z, "normalization": rep.normalization}))
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.full and args.seed is None:
        raise UsageError("verify --full requires --seed")
    checks = verify_mod.run(full=args.full, seed=args.seed, desk=args.desk, threads=args.threads)
    summary = verify_mod.summary(checks)
    if args.format == "json":
        print(
            _dump(
                {
                    "mode": "full" if args.full else "quick",
                    "seed": args.seed,
                    "checks": [c.to_dict() for c in checks],
                    "summary": summary,
                }
            )
        )
    else:
        for c in checks:
            print(c.line())
        print(f"{summary['passed']}/{summary['total']} checks passed")
    return EXIT_OK if summary["failed"] == 0 else EXIT_TOLERANCE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ginibre-moments", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="key=value file with defaults for size, samples, cap, threads, bins")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ensemble(p, seed_required: bool):
        p.add_argument("--factors", type=int, default=1)
        p.add_argument("--sigma", help="comma-separated per-factor sigmas (one value applies to all)")
        if seed_required:
            p.add_argument("--seed", type=int, required=True)
            p.add_argument("--size", type=int)
            p.add_argument("--samples", type=int)
            p.add_argument("--threads", type=int)

    p = sub.add_parser("moment", help="exact moment of a word")
    p.add_argument("--word", required=True, help="e.g. xdxd or exponent form 2,1;1,2")
    ensemble(p, False)
    p.add_argument("--finite-n", action="store_true", help="exact in N (factors <= 2)")
    p.add_argument("--symbolic", action="store_true", help="Ginibre trace polynomial with spectator W")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("enumerate", help="necklaces, pairings or partitions")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--necklaces", type=int, metavar="M")
    g.add_argument("--pairings", metavar="WORD")
    g.add_argument("--partitions", type=int, metavar="M")
    p.add_argument("--classify", action="store_true", help="show crossing, genus and trace structure")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("fc", help="Fuss-Catalan number FC_n(m)")
    p.add_argument("n", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--table", action="store_true", help="print FC_n(0..m) as CSV")
    p.set_defaults(func=cmd_fc)

    p = sub.add_parser("mc", help="Monte Carlo estimate of a word moment")
    p.add_argument("--word", required=True)
    ensemble(p, True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("spectrum", help="eigenvalue radial law of sampled products")
    ensemble(p, True)
    p.add_argument("--bins", type=int)
    p.add_argument("--out", help="CSV of (r, empirical_cdf, theory_cdf)")
    p.add_argument("--density-out", help="CSV of (bin_center, density, theory, count)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bessel", help="density of a product of two complex Gaussian scalars")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--bins", type=int)
    p.add_argument("--out", help="CSV of (bin_center, density, theory, count)")
    p.set_defaults(func=cmd_bessel)

    p = sub.add_parser("verify", help="run the acceptance checks")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--quick", action="store_true", help="symbolic checks only (default)")
    mode.add_argument("--full", action="store_true", help="also the Monte Carlo checks")
    p.add_argument("--seed", type=int)
    p.add_argument("--desk", action="store_true", help="desk-scale Monte Carlo (N=200, 500 samples)")
    p.add_argument("--threads", type=int)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        config = {**BUILTIN_DEFAULTS, **load_config(args.config)}
        for key, value in config.items():
            if getattr(args, key, "absent") is None:
                setattr(args, key, value)
        return args.func(args)
    except (UsageError, WordFormatError) as exc:
        print(f"ginibre-moments: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"ginibre-moments: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
