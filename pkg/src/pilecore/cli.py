"""pilecore-bench: replay an interaction script headlessly and report timings.

Exit codes: 0 success, 2 script parse error, 3 command or replay failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import generate_synthetic_dataset, parse_dataset_ref, replay
from .errors import PilingError, ScriptParseError
from .script import parse_script


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilecore-bench",
        description="Replay a piling interaction script and measure per-command latency.",
    )
    parser.add_argument("--script", required=True, help="script file to replay")
    parser.add_argument(
        "--dataset",
        default=None,
        help="synthetic dataset as kind:count, e.g. points:1000 or matrix:500",
    )
    parser.add_argument("--seed", type=int, default=None, help="engine RNG seed")
    parser.add_argument("--repeat", type=int, default=None, help="runs per report")
    parser.add_argument("--csv", default=None, help="also write per-verb stats as CSV")
    parser.add_argument("--out", default=None, help="write the JSON report to a file")
    parser.add_argument(
        "--async-cluster",
        action="store_true",
        help="run cluster groupings off-thread through the transactional commit path",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    try:
        script_text = Path(args.script).read_bytes()
    except OSError as exc:
        print(f"cannot read script: {exc}", file=sys.stderr)
        return 2

    try:
        script = parse_script(script_text)
    except ScriptParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2

    dataset_ref = args.dataset or script.header.dataset or "points:1000"
    seed = args.seed if args.seed is not None else (script.header.seed or 0)
    try:
        kind, count = parse_dataset_ref(dataset_ref)
        dataset = generate_synthetic_dataset(count, kind=kind, seed=seed)
        report = replay(
            script,
            dataset,
            seed=seed,
            repeat=args.repeat,
            async_cluster=args.async_cluster,
        )
    except PilingError as exc:
        print(f"replay failed: {exc}", file=sys.stderr)
        return 3

    payload = json.dumps(report.to_json(), indent=2, sort_keys=True)
    print(payload)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return 0


if __name__ == "__main__":
    sys.exit(main())
