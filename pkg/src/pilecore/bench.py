"""Headless replay of interaction scripts with per-command latency stats.

Latency wraps the engine transaction only; no rendering happens here, so the
numbers measure pure state-update cost. Animated transactions additionally
tick their animation plan 60 times to report the achievable engine-side frame
rate; published end-to-end frame rates also include GPU work, which this
harness deliberately excludes.

The whole script runs ``repeat`` times from a fresh engine; the final state
digest must be identical across repeats or the run fails (determinism is the
contract being benchmarked).
"""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

from .engine import Engine
from .errors import PilingError
from .interaction import GestureEvent, tick_animation
from .model import Canvas, mix_seed
from .script import Command, InteractionScript

ANIMATION_TICKS = 60


def generate_synthetic_dataset(
    n: int,
    kind: str = "points",
    seed: int = 0,
    extent: tuple[float, float] = (1000.0, 800.0),
) -> list[dict[str, Any]]:
    """Deterministic items: ids "0".."n-1", anchors inside the extent, a
    categorical field, and either 8-dim point features or 16x16 matrices
    (with 16 row-mean features)."""
    import numpy as np

    if n < 0:
        raise PilingError(f"item count must be non-negative, got {n}")
    if kind not in ("points", "matrix"):
        raise PilingError(f"unknown dataset kind {kind!r}")
    rng = np.random.default_rng(mix_seed(seed, kind))
    categories = ["a", "b", "c", "d", "e", "f", "g", "h"]
    items: list[dict[str, Any]] = []
    for i in range(n):
        anchor = [float(rng.uniform(0, extent[0])), float(rng.uniform(0, extent[1]))]
        metadata = {
            "cat": categories[int(rng.integers(0, len(categories)))],
            "size": float(rng.uniform(0, 100)),
            "weight": float(rng.uniform(0, 10)),
        }
        if kind == "points":
            features = [float(v) for v in rng.normal(size=8)]
            src = None
        else:
            grid = rng.normal(size=(16, 16))
            features = [float(v) for v in grid.mean(axis=1)]
            src = {
                "rows": 16,
                "cols": 16,
                "values": [float(v) for v in grid.reshape(-1)],
            }
        items.append(
            {"id": str(i), "src": src, "features": features, "metadata": metadata,
             "anchor": anchor}
        )
    return items


def parse_dataset_ref(ref: str) -> tuple[str, int]:
    kind, _, count = ref.partition(":")
    if kind not in ("points", "matrix") or not count.isdigit():
        raise PilingError(f"dataset must look like points:N or matrix:N, got {ref!r}")
    return kind, int(count)


@dataclass(frozen=True)
class CommandStats:
    verb: str
    count: int
    mean_ms: float
    stddev_ms: float
    min_ms: float
    max_ms: float

    def to_json(self) -> dict[str, Any]:
        return {
            "verb": self.verb,
            "count": self.count,
            "meanMs": self.mean_ms,
            "stddevMs": self.stddev_ms,
            "minMs": self.min_ms,
            "maxMs": self.max_ms,
        }


@dataclass(frozen=True)
class PerfReport:
    init_ms: float
    repeats: int
    n_items: int
    command_stats: tuple[CommandStats, ...]
    animated_fps: dict[str, float]
    final_state_hash: str

    def to_json(self) -> dict[str, Any]:
        return {
            "initMs": self.init_ms,
            "repeats": self.repeats,
            "items": self.n_items,
            "commands": [s.to_json() for s in self.command_stats],
            "animatedTicksPerSecond": self.animated_fps,
            "finalStateHash": self.final_state_hash,
        }

    def to_csv(self) -> str:
        lines = ["verb,count,mean_ms,stddev_ms,min_ms,max_ms"]
        for s in self.command_stats:
            lines.append(
                f"{s.verb},{s.count},{s.mean_ms:.6f},{s.stddev_ms:.6f},"
                f"{s.min_ms:.6f},{s.max_ms:.6f}"
            )
        return "\n".join(lines) + "\n"


def _apply_command(engine: Engine, command: Command, async_pool: ThreadPoolExecutor | None):
    verb, args = command.verb, command.args
    if verb == "arrangeBy":
        return engine.arrange_by(args[0], args[1] or None)
    if verb == "groupBy":
        if async_pool is not None and args[0] == "cluster":
            # off-path compute, transactional commit (stale-checked)
            state, read_epoch = engine.begin_read()
            from .grouping import group_by
            from .engine import _group_spec

            future = async_pool.submit(group_by, state, _group_spec(args[0], args[1]))
            return engine.commit(future.result(), read_epoch)
        return engine.group_by(args[0], args[1])
    if verb == "splitBy":
        return engine.split_by(args[0], args[1])
    if verb == "merge":
        return engine.merge_piles(args[0], list(args[1]))
    if verb == "lasso":
        return engine.lasso_group(list(args[0]))
    if verb in ("down", "move", "up"):
        kind = {"down": "pointerDown", "move": "pointerMove", "up": "pointerUp"}[verb]
        return engine.apply_gesture(
            GestureEvent(kind=kind, x=args[0], y=args[1], time_ms=command.time_ms)
        )
    if verb == "dblclick":
        return engine.apply_gesture(
            GestureEvent(kind="doubleClick", target=args[0], time_ms=command.time_ms)
        )
    if verb == "ctx":
        return engine.apply_gesture(
            GestureEvent(
                kind="contextAction",
                action=args[0],
                target=args[1],
                time_ms=command.time_ms,
            )
        )
    if verb == "zoom":
        center = (engine.state.canvas.width / 2.0, engine.state.canvas.height / 2.0)
        return engine.apply_gesture(
            GestureEvent(kind="wheelZoom", factor=args[0], x=center[0], y=center[1],
                         time_ms=command.time_ms)
        )
    if verb == "set":
        return engine.set_property(args[0], args[1])
    raise PilingError(f"unhandled verb {verb!r}")


def replay(
    script: InteractionScript,
    dataset: list[dict[str, Any]],
    seed: int | None = None,
    repeat: int | None = None,
    canvas: Canvas | None = None,
    async_cluster: bool = False,
) -> PerfReport:
    """Run the script against a fresh engine ``repeat`` times and aggregate
    per-verb latency. A command failure aborts with the failing index."""
    seed = seed if seed is not None else (script.header.seed or 0)
    repeat = repeat if repeat is not None else (script.header.repeat or 1)
    if canvas is None and script.header.canvas is not None:
        w, h, columns = script.header.canvas
        canvas = Canvas(width=w, height=h, columns=columns)

    samples: dict[str, list[float]] = {}
    tick_rates: dict[str, list[float]] = {}
    final_hashes: list[int] = []
    init_ms = 0.0
    pool = ThreadPoolExecutor(max_workers=1) if async_cluster else None

    try:
        for _ in range(max(repeat, 1)):
            t0 = time.perf_counter()
            engine = Engine(dataset, canvas=canvas, seed=seed)
            init_ms = (time.perf_counter() - t0) * 1000.0

            for index, command in enumerate(script.commands):
                t0 = time.perf_counter()
                try:
                    delta = _apply_command(engine, command, pool)
                except PilingError as exc:
                    raise PilingError(
                        f"command {index} (line {command.line}, {command.verb}) failed: {exc}"
                    ) from exc
                elapsed_ms = (time.perf_counter() - t0) * 1000.0
                samples.setdefault(command.verb, []).append(elapsed_ms)

                if delta is not None and delta.animation is not None:
                    t0 = time.perf_counter()
                    for tick in range(ANIMATION_TICKS):
                        tick_animation(delta.animation, tick / (ANIMATION_TICKS - 1))
                    tick_seconds = time.perf_counter() - t0
                    tick_rates.setdefault(command.verb, []).append(
                        ANIMATION_TICKS / tick_seconds if tick_seconds > 0 else float("inf")
                    )

            final_hashes.append(engine.state_hash())
    finally:
        if pool is not None:
            pool.shutdown(wait=False)

    if len(set(final_hashes)) > 1:
        raise PilingError(
            f"replay is non-deterministic: digests {sorted(set(final_hashes))}"
        )

    stats = tuple(
        CommandStats(
            verb=verb,
            count=len(values),
            mean_ms=statistics.fmean(values),
            stddev_ms=statistics.pstdev(values) if len(values) > 1 else 0.0,
            min_ms=min(values),
            max_ms=max(values),
        )
        for verb, values in sorted(samples.items())
    )
    animated = {
        verb: statistics.fmean(rates) for verb, rates in sorted(tick_rates.items())
    }
    return PerfReport(
        init_ms=init_ms,
        repeats=max(repeat, 1),
        n_items=len(dataset),
        command_stats=stats,
        animated_fps=animated,
        final_state_hash=f"{final_hashes[0]:016x}" if final_hashes else "",
    )
