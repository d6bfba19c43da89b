#!/usr/bin/env python3
"""Matrix-pattern exploration demo.

Builds a collection of small matrices that are supposed to show a dark dot in
the center (plus noisy outliers), pilings them up by feature similarity, and
writes the serialized engine state + resolved styles as a fixture the browser
frontend renders. Run with --serve to expose the live engine over HTTP.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from pilecore import Canvas, Engine  # noqa: E402

FIXTURE_DIR = REPO_ROOT / "frontend" / "fixtures"
SIZE = 12


def center_dot_matrix(rng, strength, noise):
    yy, xx = np.mgrid[0:SIZE, 0:SIZE]
    center = (SIZE - 1) / 2.0
    blob = np.exp(-(((xx - center) ** 2 + (yy - center) ** 2) / 8.0))
    grid = strength * blob + rng.normal(scale=noise, size=(SIZE, SIZE))
    return np.clip(grid, 0.0, 1.5)


def build_dataset(n=48, seed=7):
    rng = np.random.default_rng(seed)
    items = []
    for i in range(n):
        outlier = i % 12 == 11
        strength = rng.uniform(0.1, 0.35) if outlier else rng.uniform(0.7, 1.2)
        noise = rng.uniform(0.15, 0.3) if outlier else rng.uniform(0.02, 0.08)
        grid = center_dot_matrix(rng, strength, noise)
        items.append(
            {
                "id": str(i),
                "src": {
                    "kind": "matrix",
                    "rows": SIZE,
                    "cols": SIZE,
                    "values": [float(v) for v in grid.reshape(-1)],
                },
                "features": [float(v) for v in grid.mean(axis=1)],
                "metadata": {
                    "quality": "outlier" if outlier else "clean",
                    "strength": float(strength),
                },
            }
        )
    return items


def build_engine(seed=7):
    engine = Engine(
        build_dataset(seed=seed),
        canvas=Canvas(width=960, height=720, columns=8),
        seed=seed,
    )
    engine.arrange_by("data", "strength")
    engine.group_by("cluster", 6)
    engine.set_property("pileScale", "@scaleByLogCount")
    engine.set_property("pileBadgeKey", "quality")
    return engine


def write_fixture(engine, path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fixture = {
        "state": json.loads(engine.serialize()),
        "styles": {
            str(pid): style.to_json() for pid, style in engine.resolve_styles().items()
        },
        "activeDepth": engine.state.active_depth,
        "hash": f"{engine.state_hash():016x}",
    }
    path.write_text(json.dumps(fixture, indent=2, sort_keys=True) + "\n")
    return fixture


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(FIXTURE_DIR / "matrix_state.json"))
    parser.add_argument("--serve", action="store_true", help="serve the engine over HTTP")
    parser.add_argument("--port", type=int, default=8900)
    args = parser.parse_args()

    engine = build_engine()
    fixture = write_fixture(engine, Path(args.out))
    print(f"{len(engine.state.piles)} piles over {len(engine.state.items)} matrices")
    print(f"state hash {fixture['hash']}")
    print(f"fixture written to {args.out}")

    if args.serve:
        from pilecore.server import serve

        serve(engine, port=args.port)


if __name__ == "__main__":
    main()
