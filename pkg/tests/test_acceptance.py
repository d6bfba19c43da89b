"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``)."""

from __future__ import annotations

import json
import math
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

from pilecore.aggregation import (
    GALLERY_SIZES,
    MatrixDatum,
    aggregate_matrices,
    foreshortened_preview,
    gallery_layout,
)
from pilecore.arrangement import arrange_by, zoom_update
from pilecore.bench import generate_synthetic_dataset
from pilecore.clustering import default_cluster_count
from pilecore.errors import (
    PropertyRangeError,
    SpecifierValueError,
    UnsupportedGallerySizeError,
)
from pilecore.geometry import point_in_polygon
from pilecore.grouping import group_by, lasso_group, merge_piles, split_by
from pilecore.interaction import (
    browse_separately,
    end_temporary_disperse,
    leave_layer,
    temporary_disperse,
)
from pilecore.model import (
    ArrangeBySpec,
    Canvas,
    GroupBySpec,
    SplitBySpec,
    Zoom,
    init_state,
    validate_partition,
)
from pilecore.serialize import state_hash
from pilecore.viewspec import register_specifier, resolve_styles, set_property

REPO_ROOT = Path(__file__).resolve().parent.parent
BUNDLED_SCRIPT = REPO_ROOT / "scripts" / "bench_default.pile"


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def partition(state):
    return frozenset(frozenset(p.item_ids) for p in state.piles.values())


# --------------------------------------------------------------------------
# partition fuzz: 10,000 randomized operations in scripted sequences


def fuzz_state(rng):
    dataset = generate_synthetic_dataset(200, kind="points", seed=rng.randrange(2**31))
    return init_state(dataset, canvas=Canvas(width=1000, height=800, columns=10),
                      seed=rng.randrange(2**31))


def random_operation(rng, state):
    visible = [p.pile_id for p in state.active_piles()]
    roll = rng.random()
    if roll < 0.18 and len(visible) >= 2:
        target, source = rng.sample(visible, 2)
        return merge_piles(state, target, [source])
    if roll < 0.33:
        cx, cy = rng.uniform(0, 1000), rng.uniform(0, 800)
        r = rng.uniform(40, 350)
        return lasso_group(
            state,
            [(cx - r, cy - r), (cx + r, cy - r), (cx + r, cy + r), (cx - r, cy + r)],
        )
    if roll < 0.53:
        kind = rng.choice(["overlap", "distance", "grid", "column", "row",
                           "category", "cluster"])
        if kind == "distance":
            spec = GroupBySpec(type="distance", threshold=rng.uniform(20, 150))
        elif kind == "category":
            spec = GroupBySpec(type="category", key="cat")
        elif kind == "cluster":
            spec = GroupBySpec(type="cluster", k=rng.choice([None, 2, 3, 5]))
        else:
            spec = GroupBySpec(type=kind)
        return group_by(state, spec)
    if roll < 0.68:
        kind = rng.choice(["overlap", "distance", "category", "cluster"])
        if kind == "distance":
            spec = SplitBySpec(type="distance", threshold=rng.uniform(20, 150))
        elif kind == "category":
            spec = SplitBySpec(type="category", key="cat")
        elif kind == "cluster":
            spec = SplitBySpec(type="cluster", k=rng.choice([2, 3]))
        else:
            spec = SplitBySpec(type="overlap")
        return split_by(state, spec)
    if roll < 0.78:
        if state.dispersion_backup is not None and rng.random() < 0.5:
            return end_temporary_disperse(state)
        pile_id = rng.choice(visible)
        return temporary_disperse(state, pile_id)
    if roll < 0.9:
        if state.active_depth > 0 and rng.random() < 0.6:
            return leave_layer(state)
        if state.active_depth < 2:
            return browse_separately(state, rng.choice(visible))
        return leave_layer(state)
    factor = rng.choice([0.5, 0.8, 1.25, 2.0])
    z = state.zoom
    return zoom_update(state, Zoom(scale=z.scale * factor, tx=z.tx, ty=z.ty))


def test_partition_fuzz_10000_operations():
    with criterion("partition-fuzz"):
        rng = random.Random(20240607)
        started = time.perf_counter()
        operations = 0
        violations = 0
        while operations < 10_000:
            state = fuzz_state(rng)
            expected_items = frozenset(state.items)
            last_epoch = state.epoch
            for _ in range(25):
                state = random_operation(rng, state)
                operations += 1
                validate_partition(state)
                if frozenset(state.items) != expected_items:
                    violations += 1
                if state.epoch <= last_epoch:
                    violations += 1
                last_epoch = state.epoch
                if operations >= 10_000:
                    break
        elapsed = time.perf_counter() - started
        assert violations == 0
        assert operations == 10_000
        assert elapsed < 60.0, f"fuzz took {elapsed:.1f}s"


# --------------------------------------------------------------------------
# default cluster count


@pytest.mark.parametrize(
    "n,expected_k", [(4, 2), (8, 2), (50, 5), (200, 10), (2000, 32)]
)
def test_default_k_formula(n, expected_k):
    with criterion(f"default-k(n={n})"):
        assert default_cluster_count(n) == expected_k
        dataset = generate_synthetic_dataset(n, kind="points", seed=5)
        state = init_state(dataset, seed=5)
        grouped = group_by(state, GroupBySpec(type="cluster"))
        assert len(grouped.piles) == expected_k


# --------------------------------------------------------------------------
# aggregator equivalence against a brute-force oracle


def brute_force_stat(matrices, kind):
    rows, cols = matrices[0].shape
    out = [0.0] * (rows * cols)
    out_mask = [False] * (rows * cols)
    for cell in range(rows * cols):
        values = [m.values[cell] for m in matrices if not m.mask[cell]]
        if not values:
            out_mask[cell] = True
            continue
        mean = sum(values) / len(values)
        if kind == "mean":
            out[cell] = mean
        else:
            var = sum((v - mean) ** 2 for v in values) / len(values)
            out[cell] = var if kind == "variance" else math.sqrt(var)
    return out, out_mask


def brute_force_strip(matrix, axis, reducer):
    grid = matrix.grid().tolist()
    mask = matrix.mask_grid().tolist()
    if axis == "cols":
        grid = [list(row) for row in zip(*grid)]
        mask = [list(row) for row in zip(*mask)]
    lanes = list(zip(*grid))
    lane_masks = list(zip(*mask))
    out, out_mask = [], []
    for lane, lane_mask in zip(lanes, lane_masks):
        values = [v for v, m in zip(lane, lane_mask) if not m]
        if not values:
            out.append(0.0)
            out_mask.append(True)
            continue
        if reducer == "mean":
            out.append(sum(values) / len(values))
        elif reducer == "max":
            out.append(max(values))
        else:
            out.append(min(values))
        out_mask.append(False)
    return out, out_mask


def test_aggregator_oracle_equivalence_1000_stacks():
    with criterion("aggregator-oracle"):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            rows = int(rng.integers(1, 6))
            cols = int(rng.integers(1, 6))
            depth = int(rng.integers(1, 7))
            stack = [
                MatrixDatum(
                    rows=rows,
                    cols=cols,
                    values=rng.normal(size=rows * cols) * 10,
                    mask=rng.random(rows * cols) < 0.2,
                )
                for _ in range(depth)
            ]
            for kind in ("mean", "variance", "std"):
                got = aggregate_matrices(stack, kind)
                want, want_mask = brute_force_stat(stack, kind)
                assert got.mask.tolist() == want_mask
                for g, w, masked in zip(got.values, want, want_mask):
                    if not masked:
                        assert g == pytest.approx(w, rel=1e-12, abs=1e-12)
            probe = stack[0]
            for axis in ("rows", "cols"):
                for reducer in ("mean", "max", "min"):
                    values, mask = foreshortened_preview(probe, axis, reducer)
                    want, want_mask = brute_force_strip(probe, axis, reducer)
                    assert mask.tolist() == want_mask
                    for g, w, masked in zip(values, want, want_mask):
                        if not masked:
                            assert g == pytest.approx(w, rel=1e-12, abs=1e-12)


# --------------------------------------------------------------------------
# gallery sizes


def test_gallery_size_contract():
    with criterion("gallery-sizes"):
        assert set(GALLERY_SIZES) == {1, 2, 3, 4, 6, 8, 9}
        for k in GALLERY_SIZES:
            slots = gallery_layout(k, (97, 61))
            assert len(slots) == k
            covered = set()
            for x, y, w, h in slots:
                assert w > 0 and h > 0
                cells = {(px, py) for px in range(x, x + w) for py in range(y, y + h)}
                assert not (cells & covered)
                covered |= cells
            assert len(covered) == 97 * 61
        for k in list(range(-3, 0)) + [0, 5, 7] + list(range(10, 21)):
            with pytest.raises(UnsupportedGallerySizeError):
                gallery_layout(k, (100, 100))


# --------------------------------------------------------------------------
# round-trips


def anchored_state(rng, n, categories="abcd"):
    items = [
        {
            "id": str(i),
            "anchor": [rng.uniform(0, 900), rng.uniform(0, 700)],
            "metadata": {"cat": rng.choice(categories)},
        }
        for i in range(n)
    ]
    state = init_state(items)
    state = arrange_by(state, ArrangeBySpec(type="xy"))
    from dataclasses import replace

    return replace(state, arrangement=None)


def test_disperse_round_trip_restores_hash():
    with criterion("round-trip-disperse"):
        rng = random.Random(3)
        for _ in range(25):
            state = anchored_state(rng, rng.randint(3, 10))
            first = sorted(state.piles)[0]
            state = merge_piles(state, first, sorted(state.piles)[1:])
            before = state_hash(state)
            dispersed = temporary_disperse(state, first)
            restored = end_temporary_disperse(dispersed)
            assert state_hash(restored) == before


def test_browse_no_edit_round_trip_restores_hash():
    with criterion("round-trip-browse"):
        rng = random.Random(4)
        for _ in range(25):
            state = anchored_state(rng, rng.randint(3, 10))
            first = sorted(state.piles)[0]
            state = merge_piles(state, first, sorted(state.piles)[1:])
            before = state_hash(state)
            layered = browse_separately(state, first)
            back = leave_layer(layered)
            assert state_hash(back) == before


def test_group_split_category_round_trip_100_datasets():
    with criterion("round-trip-category"):
        rng = random.Random(5)
        for _ in range(100):
            state = anchored_state(rng, rng.randint(4, 24), categories="abcdef")
            grouped = group_by(state, GroupBySpec(type="category", key="cat"))
            category_partition = partition(grouped)
            split = split_by(grouped, SplitBySpec(type="category", key="cat"))
            # splitting by the grouped key hands back the same item-set
            # partition the grouping established
            assert partition(split) == category_partition
            again = split_by(
                group_by(split, GroupBySpec(type="category", key="cat")),
                SplitBySpec(type="category", key="cat"),
            )
            assert partition(again) == category_partition
            validate_partition(split)


# --------------------------------------------------------------------------
# lasso containment oracle


def crossing_count_oracle(point, polygon):
    px, py = point
    crossings = 0
    n = len(polygon)
    for i in range(n):
        ax, ay = polygon[i]
        bx, by = polygon[(i + 1) % n]
        if ay == by:
            continue
        lo, hi = (ay, by) if ay < by else (by, ay)
        if not (lo <= py < hi):
            continue
        t = (py - ay) / (by - ay)
        if ax + t * (bx - ax) > px:
            crossings += 1
    return crossings % 2 == 1


def test_lasso_containment_vs_oracle_10k():
    with criterion("lasso-oracle"):
        rng = random.Random(77)
        disagreements = 0
        for _ in range(10_000):
            n = rng.randint(3, 10)
            polygon = [(rng.uniform(-10, 10), rng.uniform(-10, 10)) for _ in range(n)]
            point = (rng.uniform(-12, 12), rng.uniform(-12, 12))
            if point_in_polygon(point, polygon) != crossing_count_oracle(point, polygon):
                disagreements += 1
        assert disagreements == 0


# --------------------------------------------------------------------------
# zoom split / merge with hysteresis


def test_zoom_interval_scenario():
    with criterion("zoom-split-merge"):
        canvas = Canvas(width=160, height=160, columns=10)  # 16-unit boxes
        items = [
            {"id": "0", "anchor": [50.0, 80.0]},
            {"id": "1", "anchor": [60.0, 80.0]},
        ]
        state = init_state(items, canvas=canvas)
        state = arrange_by(state, ArrangeBySpec(type="xy"))
        merged = group_by(state, GroupBySpec(type="overlap"))
        assert partition(merged) == frozenset({frozenset({"0", "1"})})

        zoomed = zoom_update(merged, Zoom(scale=2.0))
        assert partition(zoomed) == frozenset({frozenset({"0"}), frozenset({"1"})})

        back = zoom_update(zoomed, Zoom(scale=1.0))
        assert partition(back) == partition(merged)

        # hysteresis band: overlap of 1 unit at scale 1.5 (< 10% of 16) keeps
        # split piles split, while an already-merged pile stays merged
        band_split = zoom_update(zoomed, Zoom(scale=1.5))
        assert partition(band_split) == partition(zoomed)
        band_merged = zoom_update(merged, Zoom(scale=1.5))
        assert partition(band_merged) == partition(merged)

        once = zoom_update(merged, Zoom(scale=2.0))
        twice = zoom_update(once, Zoom(scale=2.0))
        assert state_hash(once) == state_hash(twice)


# --------------------------------------------------------------------------
# replay determinism across repeats and processes


def run_bench(tmp_path, tag):
    out = tmp_path / f"report-{tag}.json"
    result = subprocess.run(
        [
            sys.executable,
            "-m",
            "pilecore.cli",
            "--script", str(BUNDLED_SCRIPT),
            "--dataset", "points:1000",
            "--seed", "42",
            "--repeat", "10",
            "--out", str(out),
        ],
        capture_output=True,
        text=True,
        cwd=REPO_ROOT,
    )
    assert result.returncode == 0, result.stderr
    return json.loads(out.read_text())


def test_replay_determinism_bundled_script(tmp_path):
    with criterion("replay-determinism"):
        first = run_bench(tmp_path, "a")
        second = run_bench(tmp_path, "b")
        assert first["repeats"] == 10
        assert first["items"] == 1000
        assert first["finalStateHash"] == second["finalStateHash"]
        assert first["commands"], "latency report must carry per-command stats"
        for stats in first["commands"]:
            assert stats["count"] >= 10
        print(
            "  informational desk-scale latency (ms): "
            + ", ".join(
                f"{s['verb']}={s['meanMs']:.2f}" for s in first["commands"]
            )
        )


# --------------------------------------------------------------------------
# brightness range enforcement


def test_brightness_range_enforced():
    with criterion("brightness-range"):
        state = init_state([{"id": "0"}, {"id": "1"}])
        for bad in (1.5, -1.01, 2.0, float("inf")):
            with pytest.raises(PropertyRangeError):
                set_property(state, "itemBrightness", bad)
        ok = set_property(state, "itemBrightness", 1.0)
        assert resolve_styles(ok)[0].brightness == (1.0,)

        register_specifier("overdriveBrightness", lambda item, index, pile: 1.0 + index)
        flagged = set_property(state, "itemBrightness", "@overdriveBrightness")
        merged = merge_piles(flagged, 0, [1])
        with pytest.raises(SpecifierValueError):
            resolve_styles(merged)
