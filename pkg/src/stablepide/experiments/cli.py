"""Command line entry point."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..errors import AccuracyError, AssumptionViolated, InvalidParameters
from .config import load_config
from .runners import (
    report_constants,
    run_clt_experiment,
    run_consistency_audit,
    run_rate_experiment,
    run_regularity_audit,
    run_solve,
)

COMMANDS = {
    "solve": (run_solve, "solve once at the first Delta and print u(T, x) at the probes"),
    "rate": (run_rate_experiment, "error against the reference over the Delta ladder"),
    "clt": (run_clt_experiment, "normalized sums with Delta = 1/n over n_list"),
    "regularity": (run_regularity_audit, "Lipschitz, time-increment and truncation audits"),
    "consistency": (run_consistency_audit, "consistency residual against its bound"),
    "constants": (report_constants, "assumption and remainder constants per Delta"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key = value config file")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1, help="ladder entries run concurrently")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized audit points")
    common.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms")

    p = argparse.ArgumentParser(prog="stablepide", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, help=help_text, parents=[common])
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed, timing=True if args.timing else None)
        runner = COMMANDS[args.command][0]
        report = runner(cfg, threads=max(1, args.threads))
    except (InvalidParameters, AssumptionViolated, AccuracyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    text = report.render(args.format)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if report.passes and not report.passed:
        failed = ", ".join(k for k, v in report.passes.items() if not v)
        print(f"check failed: {failed}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
