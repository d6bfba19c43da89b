"""Pile layouts and within-pile item offsets.

Layout parameters (columns, cell size, padding) live on the canvas; cell
width is canvas width over columns and cell height follows from the item
aspect ratio. Grids are row-major and 0-based throughout.

``arrange_by`` both applies and registers a layout; grouping operations
re-apply the registered layout through ``reapply_arrangement`` so the grid
re-packs after piles merge or split. ``zoom_update`` re-evaluates a
registered proximity grouping at the new scale with a hysteresis band:
co-piled items stay together while their boxes still touch, and piles only
merge once boxes overlap by more than a tenth of a cell, which keeps the
partition from flickering at the boundary.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from .embedding import embed_2d
from .errors import (
    GridBoundsError,
    MissingAccessorError,
    PilingError,
)
from .geometry import UnionFind
from .model import (
    ArrangeBySpec,
    Canvas,
    Pile,
    PilingState,
    Vec2,
    Zoom,
    grid_cell_center,
    max_z,
    restore_dispersion,
)

MERGE_HYSTERESIS_FRACTION = 0.1


@dataclass(frozen=True, slots=True)
class ItemOffsetPolicy:
    """How items sit relative to their pile position.

    orderly: offset grows by (dx, dy) per step away from the top, cover at 0.
    random: direction and magnitude drawn from a generator seeded by
    (seed, pile id), bounded by max_offset / max_rotation.
    """

    mode: str = "orderly"
    dx: float = 5.0
    dy: float = 5.0
    max_offset: float = 10.0
    max_rotation: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("orderly", "random"):
            raise PilingError(f"unknown item offset mode {self.mode!r}")
        if self.mode == "random" and self.max_offset < 0:
            raise PilingError("max offset must be non-negative")
        if self.mode == "orderly" and not (
            math.isfinite(self.dx) and math.isfinite(self.dy)
        ):
            raise PilingError("orderly offset step must be finite")


def item_offsets(pile: Pile, policy: ItemOffsetPolicy) -> list[tuple[float, float, float]]:
    """Per-item (dx, dy, rotation), aligned with pile.item_ids (bottom-up).

    The cover (last id) is unoffset in orderly mode; deeper items shift one
    step further per position below the top. Random offsets are reproducible
    per (seed, pile id).
    """
    n = len(pile.item_ids)
    if policy.mode == "orderly":
        return [
            ((n - 1 - i) * policy.dx, (n - 1 - i) * policy.dy, 0.0)
            for i in range(n)
        ]
    rng = random.Random(f"{policy.seed}/{pile.pile_id}")
    out = []
    for _ in range(n):
        radius = rng.uniform(0.0, policy.max_offset)
        angle = rng.uniform(0.0, 2.0 * math.pi)
        rotation = rng.uniform(-policy.max_rotation, policy.max_rotation)
        out.append((radius * math.cos(angle), radius * math.sin(angle), rotation))
    return out


def _numeric(value: Any, key: str, pile_id: int) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MissingAccessorError(key, [pile_id])
    return float(value)


def _item_value(state: PilingState, item_id: str, key: str, pile_id: int) -> float:
    item = state.items[item_id]
    if key == "anchor.x" or key == "anchor.y":
        if item.anchor is None:
            raise MissingAccessorError("anchor", [pile_id])
        return item.anchor[0] if key == "anchor.x" else item.anchor[1]
    if key not in item.metadata:
        raise MissingAccessorError(key, [pile_id])
    return _numeric(item.metadata[key], key, pile_id)


def pile_value(state: PilingState, pile: Pile, key: str, reducer: str = "cover") -> float:
    """Pile-level value for a data key: the cover item's value by default, or
    a mean/min/max reduction over all member items."""
    if reducer == "cover":
        return _item_value(state, pile.cover_id, key, pile.pile_id)
    values = [_item_value(state, i, key, pile.pile_id) for i in pile.item_ids]
    if reducer == "mean":
        return sum(values) / len(values)
    if reducer == "min":
        return min(values)
    return max(values)


def _collect_values(
    state: PilingState, piles: list[Pile], key: str, reducer: str
) -> dict[int, float]:
    values: dict[int, float] = {}
    failing: list[int] = []
    for pile in piles:
        try:
            values[pile.pile_id] = pile_value(state, pile, key, reducer)
        except MissingAccessorError:
            failing.append(pile.pile_id)
    if failing:
        raise MissingAccessorError(key, failing)
    return values


def _grid_order_positions(canvas: Canvas, ordered: list[Pile]) -> dict[int, Vec2]:
    return {
        pile.pile_id: grid_cell_center(canvas, slot)
        for slot, pile in enumerate(ordered)
    }


def _normalized(values: dict[int, float]) -> dict[int, float]:
    lo = min(values.values())
    hi = max(values.values())
    if hi - lo <= 0.0:
        return {k: 0.5 for k in values}
    return {k: (v - lo) / (hi - lo) for k, v in values.items()}


def _positions_for(state: PilingState, spec: ArrangeBySpec, piles: list[Pile]) -> dict[int, Vec2]:
    canvas = state.canvas
    if spec.type == "index":
        index_of = {item_id: i for i, item_id in enumerate(state.items)}
        ordered = sorted(piles, key=lambda p: (index_of[p.cover_id], p.pile_id))
        return _grid_order_positions(canvas, ordered)

    if spec.type == "ij":
        row_key, col_key = spec.keys
        rows = _collect_values(state, piles, row_key, spec.reducer)
        cols = _collect_values(state, piles, col_key, spec.reducer)
        positions = {}
        for pile in piles:
            i, j = int(rows[pile.pile_id]), int(cols[pile.pile_id])
            if i < 0 or j < 0 or j >= canvas.columns:
                raise GridBoundsError(pile.pile_id, j, canvas.columns)
            positions[pile.pile_id] = ((j + 0.5) * canvas.cell_width,
                                       (i + 0.5) * canvas.cell_height)
        return positions

    if spec.type in ("xy", "uv"):
        if spec.keys:
            x_key, y_key = spec.keys
            xs = _collect_values(state, piles, x_key, spec.reducer)
            ys = _collect_values(state, piles, y_key, spec.reducer)
        else:
            xs = _collect_values(state, piles, "anchor.x", spec.reducer)
            ys = _collect_values(state, piles, "anchor.y", spec.reducer)
        positions = {}
        for pile in piles:
            x, y = xs[pile.pile_id], ys[pile.pile_id]
            if spec.type == "uv":
                if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                    raise PilingError(
                        f"uv coordinates for pile {pile.pile_id} outside [0,1]: ({x}, {y})"
                    )
                x, y = x * canvas.width, y * canvas.height
            positions[pile.pile_id] = (x, y)
        return positions

    # data-driven
    if len(spec.keys) == 1:
        values = _collect_values(state, piles, spec.keys[0], spec.reducer)
        ordered = sorted(piles, key=lambda p: (values[p.pile_id], p.pile_id))
        return _grid_order_positions(canvas, ordered)
    if len(spec.keys) == 2:
        xs = _normalized(_collect_values(state, piles, spec.keys[0], spec.reducer))
        ys = _normalized(_collect_values(state, piles, spec.keys[1], spec.reducer))
        return {
            p.pile_id: (xs[p.pile_id] * canvas.width, ys[p.pile_id] * canvas.height)
            for p in piles
        }
    columns = [_collect_values(state, piles, key, spec.reducer) for key in spec.keys]
    matrix = [[col[p.pile_id] for col in columns] for p in piles]
    if len(piles) == 1:
        return {piles[0].pile_id: (canvas.width / 2.0, canvas.height / 2.0)}
    projected = embed_2d(matrix)
    return {
        p.pile_id: (u * canvas.width, v * canvas.height)
        for p, (u, v) in zip(piles, projected)
    }


def _apply_positions(state: PilingState, positions: dict[int, Vec2]) -> PilingState:
    piles = dict(state.piles)
    for pile_id, (x, y) in positions.items():
        pile = piles[pile_id]
        if (pile.x, pile.y) != (x, y):
            piles[pile_id] = replace(pile, x=x, y=y)
    return replace(state, piles=piles)


def arrange_by(state: PilingState, spec: ArrangeBySpec) -> PilingState:
    """Position the visible piles per the requested layout and register it as the
    layout for automatic re-arrangement after grouping."""
    positions = _positions_for(state, spec, state.active_piles())
    state = _apply_positions(state, positions)
    return replace(state, arrangement=spec, epoch=state.epoch + 1)


def reapply_arrangement(state: PilingState) -> PilingState:
    """Re-run the registered layout on the current pile set (no epoch bump;
    runs inside the transaction that changed the piles).

    Skipped while a browse layer is open: the layer is its own workspace and
    the registered layout belongs to the base piling."""
    if state.arrangement is None or state.layers:
        return state
    positions = _positions_for(state, state.arrangement, state.active_piles())
    return _apply_positions(state, positions)


def rearrange_after_grouping(state: PilingState) -> PilingState:
    """Public form of the automatic re-layout: bumps the epoch; a no-op (except
    for the epoch) when no arrangement is registered."""
    return replace(reapply_arrangement(state), epoch=state.epoch + 1)


def _screen_position(zoom_from: Zoom, zoom_to: Zoom, p: Vec2) -> Vec2:
    ratio = zoom_to.scale / zoom_from.scale
    return (
        (p[0] - zoom_from.tx) * ratio + zoom_to.tx,
        (p[1] - zoom_from.ty) * ratio + zoom_to.ty,
    )


def zoom_update(state: PilingState, new_zoom: Zoom) -> PilingState:
    """Rescale to a new zoom and re-evaluate the registered proximity grouping.

    Items with anchors re-partition by box connectivity at the new scale:
    current co-members stay together while their boxes still touch; piles
    join when boxes overlap by more than the hysteresis margin. Piles whose
    items carry no anchors (and all piles when no proximity grouping is
    registered) simply rescale. Calling twice at the same zoom is a no-op.
    """
    if state.zoom_grouping is None or state.zoom_grouping.type not in ("overlap", "distance"):
        piles = {
            pid: replace(p, x=_screen_position(state.zoom, new_zoom, p.position)[0],
                         y=_screen_position(state.zoom, new_zoom, p.position)[1])
            for pid, p in state.piles.items()
        }
        return replace(state, piles=piles, zoom=new_zoom, epoch=state.epoch + 1)

    state = restore_dispersion(state)
    depth = state.active_depth
    active = [p for p in state.active_piles()]
    anchored = [p for p in active if all(state.items[i].anchor is not None for i in p.item_ids)]
    anchored_ids = {p.pile_id for p in anchored}

    box_w = state.canvas.cell_width
    box_h = state.canvas.cell_height
    margin = (
        state.zoom_grouping.threshold
        if state.zoom_grouping.type == "distance" and state.zoom_grouping.threshold
        else box_w
    ) * MERGE_HYSTERESIS_FRACTION

    item_ids = [i for p in anchored for i in p.item_ids]
    owner = {i: p.pile_id for p in anchored for i in p.item_ids}
    screen = {
        i: new_zoom.apply(state.items[i].anchor)  # type: ignore[arg-type]
        for i in item_ids
    }

    uf = UnionFind(item_ids)
    if item_ids:
        pos = np.array([screen[i] for i in item_ids])
        owners = np.array([owner[i] for i in item_ids])
        dx = np.abs(pos[:, 0, None] - pos[None, :, 0])
        dy = np.abs(pos[:, 1, None] - pos[None, :, 1])
        if state.zoom_grouping.type == "distance":
            threshold = state.zoom_grouping.threshold or box_w
            dist = np.hypot(dx, dy)
            stay = dist <= threshold
            join = dist <= threshold - margin
        else:
            # equal-size boxes: pairwise overlap is box extent minus center gap
            overlap = np.minimum(box_w - dx, box_h - dy)
            stay = overlap >= 0.0
            join = overlap > margin
        same_owner = owners[:, None] == owners[None, :]
        adjacency = (same_owner & stay) | join
        for a, b in np.argwhere(np.triu(adjacency, k=1)):
            uf.union(item_ids[a], item_ids[b])

    index_of = {item_id: i for i, item_id in enumerate(state.items)}
    components = sorted(
        uf.components(), key=lambda members: min(index_of[m] for m in members)
    )

    piles = {pid: p for pid, p in state.piles.items() if pid not in anchored_ids}
    by_item_set = {frozenset(p.item_ids): p for p in anchored}
    next_id = state.next_pile_id
    z = max_z(state.piles.values()) + 1
    for members in components:
        member_set = frozenset(members)
        centroid = (
            sum(screen[m][0] for m in members) / len(members),
            sum(screen[m][1] for m in members) / len(members),
        )
        existing = by_item_set.get(member_set)
        if existing is not None:
            piles[existing.pile_id] = replace(existing, x=centroid[0], y=centroid[1])
            continue
        ordered = tuple(sorted(members, key=lambda m: index_of[m]))
        piles[next_id] = Pile(pile_id=next_id, item_ids=ordered, x=centroid[0],
                              y=centroid[1], z=z, layer=depth)
        next_id += 1
        z += 1

    for pid, pile in list(piles.items()):
        if pile.layer == depth and pid not in anchored_ids and pid in state.piles:
            moved = _screen_position(state.zoom, new_zoom, pile.position)
            piles[pid] = replace(pile, x=moved[0], y=moved[1])

    return replace(
        state,
        piles=piles,
        zoom=new_zoom,
        epoch=state.epoch + 1,
        next_pile_id=next_id,
    )
