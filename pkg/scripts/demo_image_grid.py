#!/usr/bin/env python3
"""Image-grid grouping demo.

A collection of color-swatch "photos" arranged on a 2D grid by subject family
(x) and relative size (y), with every grid cell's occupants grouped into one
pile: the compiling-training-data workflow at toy scale. Writes the state +
styles fixture for the browser frontend; --serve exposes the live engine.
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

FAMILIES = ["car", "bus", "bike", "truck", "train", "boat"]


def build_dataset(n=72, seed=11):
    rng = np.random.default_rng(seed)
    items = []
    for i in range(n):
        family = int(rng.integers(0, len(FAMILIES)))
        size = float(rng.uniform(0.05, 1.0))
        hue = family * 60 + float(rng.uniform(-18, 18))
        items.append(
            {
                "id": str(i),
                "src": {
                    "kind": "swatch",
                    "hue": hue % 360,
                    "lightness": 0.35 + 0.4 * size,
                    "label": FAMILIES[family],
                },
                "features": [float(family), size],
                "metadata": {
                    "family": FAMILIES[family],
                    "familyIndex": family,
                    "size": size,
                },
            }
        )
    return items


def build_engine(seed=11):
    engine = Engine(
        build_dataset(seed=seed),
        canvas=Canvas(width=960, height=720, columns=6),
        seed=seed,
    )
    engine.arrange_by("data", ["familyIndex", "size"])
    engine.group_by("grid")
    engine.set_property("pileBadgeKey", "family")
    engine.set_property("pileBorderSize", 2.0)
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
    parser.add_argument("--out", default=str(FIXTURE_DIR / "images_state.json"))
    parser.add_argument("--serve", action="store_true", help="serve the engine over HTTP")
    parser.add_argument("--port", type=int, default=8900)
    args = parser.parse_args()

    engine = build_engine()
    fixture = write_fixture(engine, Path(args.out))
    print(f"{len(engine.state.piles)} piles over {len(engine.state.items)} swatches")
    print(f"state hash {fixture['hash']}")
    print(f"fixture written to {args.out}")

    if args.serve:
        from pilecore.server import serve

        serve(engine, port=args.port)


if __name__ == "__main__":
    main()
