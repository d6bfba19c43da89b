#!/usr/bin/env python3
"""Run the bundled benchmark script at a few dataset sizes and print a table.

Convenience wrapper around pilecore-bench for quick local measurements; the
CLI itself is the canonical entry point.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from pilecore.bench import generate_synthetic_dataset, replay  # noqa: E402
from pilecore.script import parse_script  # noqa: E402


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="100,500,1000", help="comma-separated item counts")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument(
        "--script", default=str(REPO_ROOT / "scripts" / "bench_default.pile")
    )
    args = parser.parse_args()

    script = parse_script(Path(args.script).read_bytes())
    sizes = [int(s) for s in args.sizes.split(",")]
    print(f"{'items':>7}  {'init ms':>8}  {'slowest command':>24}  {'hash':>16}")
    for n in sizes:
        dataset = generate_synthetic_dataset(n, kind="points", seed=args.seed)
        report = replay(script, dataset, seed=args.seed, repeat=args.repeat)
        slowest = max(report.command_stats, key=lambda s: s.mean_ms)
        print(
            f"{n:>7}  {report.init_ms:>8.2f}  "
            f"{slowest.verb + ' ' + format(slowest.mean_ms, '.2f') + 'ms':>24}  "
            f"{report.final_state_hash:>16}"
        )


if __name__ == "__main__":
    main()
