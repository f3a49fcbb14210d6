"""Command-line surface for batch runs.

Subcommands
-----------
test       run the three-step suite over a manifest; writes report.json and
           results.csv
entropy    per-sample min/Shannon entropy series; writes entropy_<source>.csv
stability  ones-deviation series plus the acceptable-proportion band; writes
           deviation_<source>.csv and band.json
simulate   generate sample files plus manifests from a plan file

Exit codes: 0 pass, 1 statistical failure, 2 usage or I/O error.  Reports
are byte-identical across runs for identical inputs; timestamps come from
input metadata, never the wall clock.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .bitseq import concat_chronological, load_manifest, load_sample_set
from .entropy import (
    deviation_series,
    entropy_series,
    proportion_band_for_length,
    write_deviation_csv,
    write_entropy_csv,
)
from .errors import RandsuiteError
from .randtests import ALL_TESTS, TestId, TestParams
from .sim import load_plan, with_seed, write_experiment
from .suite import SuiteConfig, run_suite, write_report_json, write_results_csv

__all__ = ["main"]

EXIT_PASS = 0
EXIT_STATISTICAL_FAIL = 1
EXIT_ERROR = 2


def _atomic_write(path: Path, write_fn) -> None:
    """Write via a temp file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_tests(selection: str) -> tuple[TestId, ...]:
    if selection == "all":
        return ALL_TESTS
    names = [s.strip() for s in selection.split(",") if s.strip()]
    try:
        return tuple(TestId(name) for name in names)
    except ValueError:
        valid = ", ".join(t.value for t in ALL_TESTS)
        raise RandsuiteError(f"unknown test in --tests {selection!r}; valid ids: {valid}")


def _suite_config(args) -> SuiteConfig:
    params = TestParams(alpha=args.alpha, block_size_m=args.block_size,
                        pattern_len_m=args.apen_m,
                        enforce_min_length=not args.no_min_length_enforcement)
    return SuiteConfig(params=params, tests=_parse_tests(args.tests),
                       band_coefficient=args.band_coefficient)


def cmd_test(args) -> int:
    manifest = load_manifest(args.manifest[0])
    sample_set = load_sample_set(manifest)
    report = run_suite(sample_set, _suite_config(args))
    out = Path(args.out)
    _atomic_write(out / "report.json", lambda p: write_report_json(report, p))
    _atomic_write(out / "results.csv", lambda p: write_results_csv(report, p))
    for test_id in report.config.tests:
        agg = report.per_test[test_id]
        uni = ("uniformity_p=%.6f %s" % (agg.uniformity_p,
                                         "ok" if agg.uniformity_ok else "NOT UNIFORM")
               if agg.uniformity_ok is not None else "uniformity skipped (m < 55)")
        print(f"{test_id.value:16s} proportion={agg.pass_proportion:.6f} "
              f"(band > {agg.band.lower:.6f}) "
              f"{'ok' if agg.proportion_ok else 'OUT OF BAND'}; {uni}")
    print(f"overall: {'PASS' if report.overall_pass else 'FAIL'} "
          f"({report.sample_count} samples)")
    return EXIT_PASS if report.overall_pass else EXIT_STATISTICAL_FAIL


def cmd_entropy(args) -> int:
    out = Path(args.out)
    for manifest_path in args.manifest:
        manifest = load_manifest(manifest_path)
        series = entropy_series(load_sample_set(manifest))
        target = out / f"entropy_{series.source_id}.csv"
        _atomic_write(target, lambda p, s=series: write_entropy_csv(s, p))
        print(f"{series.source_id}: {len(series)} points -> {target}")
    return EXIT_PASS


def cmd_stability(args) -> int:
    out = Path(args.out)
    band_summary = {
        "alpha": args.alpha,
        "band_convention": "derived by inverting the frequency test: "
                           "|p - 1/2| <= sqrt(2)*erfc_inv(alpha)/(2*sqrt(n))",
        "sources": {},
    }
    all_inside = True
    for manifest_path in args.manifest:
        manifest = load_manifest(manifest_path)
        sample_set = load_sample_set(manifest)
        joined = concat_chronological(sample_set)
        series = deviation_series(joined, stride=args.stride)
        target = out / f"deviation_{series.source_id}.csv"
        _atomic_write(target, lambda p, s=series: write_deviation_csv(s, p))
        lower, upper = proportion_band_for_length(joined.n, args.alpha)
        proportion = joined.count_ones() / joined.n
        inside = lower < proportion < upper
        all_inside = all_inside and inside
        band_summary["sources"][series.source_id] = {
            "n": joined.n,
            "proportion_of_ones": proportion,
            "band_lower": lower,
            "band_upper": upper,
            "inside": inside,
        }
        print(f"{series.source_id}: proportion={proportion:.6f} "
              f"band=({lower:.6f}, {upper:.6f}) "
              f"{'ok' if inside else 'OUT OF BAND'} -> {target}")
    _atomic_write(out / "band.json",
                  lambda p: Path(p).write_text(
                      json.dumps(band_summary, indent=2, sort_keys=True) + "\n"))
    return EXIT_PASS if all_inside else EXIT_STATISTICAL_FAIL


def cmd_simulate(args) -> int:
    plan = load_plan(args.plan)
    if args.seed is not None:
        plan = with_seed(plan, args.seed)
    manifests = write_experiment(plan, args.out)
    for path in manifests:
        print(f"wrote {path}")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="randsuite",
        description="Statistical randomness testing and noisy-qubit simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, manifests):
        if manifests == 1:
            p.add_argument("--manifest", required=True, nargs=1,
                           help="manifest JSON file")
        else:
            p.add_argument("--manifest", required=True, nargs="+",
                           help="one or more manifest JSON files")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--alpha", type=float, default=0.01,
                       help="per-sample significance level (default 0.01)")

    p_test = sub.add_parser("test", help="run the test suite over a manifest")
    add_common(p_test, manifests=1)
    p_test.add_argument("--band-coefficient", type=float, default=3.0,
                        help="proportion-band width coefficient (default 3.0)")
    p_test.add_argument("--tests", default="all",
                        help="comma-separated test ids (default all): "
                             + ",".join(t.value for t in ALL_TESTS))
    p_test.add_argument("--block-size", type=int, default=128,
                        help="block size M for block_frequency (default 128)")
    p_test.add_argument("--apen-m", type=int, default=2,
                        help="pattern length m for approx_entropy (default 2)")
    p_test.add_argument("--no-min-length-enforcement", action="store_true",
                        help="allow sequences below the per-test minimum lengths")
    p_test.set_defaults(fn=cmd_test)

    p_entropy = sub.add_parser("entropy", help="per-sample entropy series")
    add_common(p_entropy, manifests="+")
    p_entropy.set_defaults(fn=cmd_entropy)

    p_stab = sub.add_parser("stability", help="ones-deviation series and proportion band")
    add_common(p_stab, manifests="+")
    p_stab.add_argument("--stride", type=int, default=8192,
                        help="bits between deviation points (default 8192)")
    p_stab.set_defaults(fn=cmd_stability)

    p_sim = sub.add_parser("simulate", help="generate sample files from a plan")
    p_sim.add_argument("--plan", required=True, help="experiment plan JSON file")
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.add_argument("--seed", type=int, default=None,
                       help="override the plan's master seed")
    p_sim.set_defaults(fn=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (RandsuiteError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
