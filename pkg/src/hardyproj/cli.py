"""Command line entry point: ``hardyproj <suite> [flags]`` and ``hardyproj report``."""

from __future__ import annotations

import argparse
import sys

from . import harness


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < harness.U64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hardyproj", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for suite in harness.SUITES:
        sp = sub.add_parser(suite, help=f"run the {suite} suite")
        sp.add_argument("--config", help="INI file with [experiment] and [params] sections")
        sp.add_argument("--seed", type=_u64)
        sp.add_argument("--out", help="write JSON records here")
        sp.add_argument("--samples", type=_positive)
        sp.add_argument("--grid", type=_positive)
        sp.add_argument("--csv", help="also write the CSV table here")
    rp = sub.add_parser("report", help="tabulate JSON records")
    rp.add_argument("records", nargs="+", help="JSON record files")
    rp.add_argument("--out", help="write the CSV here instead of stdout")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report":
        records = [r for path in args.records for r in harness.load_records(path)]
    else:
        over = {"seed": args.seed, "samples": args.samples, "grid": args.grid, "out": args.out}
        try:
            if args.config:
                cfg = harness.load_config(args.config, args.command, **over)
            else:
                cfg = harness.ExperimentConfig(args.command, **{k: v for k, v in over.items()
                                                                 if v is not None})
            records = harness.run_suite(cfg)
        except harness.ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    rep = harness.report(records)
    target = args.out if args.command == "report" else args.csv
    if target:
        with open(target, "w") as fh:
            fh.write(rep.csv)
    elif args.command == "report":
        sys.stdout.write(rep.csv)
    sys.stderr.write(rep.summary) if args.command == "report" else sys.stdout.write(rep.summary)
    return 0 if harness.all_passed(records) else 1


if __name__ == "__main__":
    sys.exit(main())
