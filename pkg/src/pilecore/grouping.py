"""Manual and automatic grouping: merges, lasso capture, groupBy, splitBy.

All operations conserve the item multiset and keep the one-pile-per-item
partition intact. They act on the visible layer only, restore any active
temporary dispersion first (a dispersed pile behaves as one unit), and re-run
the registered arrangement before returning so grids re-pack automatically.

Merge-order conventions where the gesture defines none: parallel captures
(lasso, proximity components) concatenate members by ascending pile id;
category and cluster groups order items by ascending item id.
"""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Iterable, Sequence

from .arrangement import reapply_arrangement
from .bounds import pile_bounds
from .clustering import default_cluster_count, kmeans
from .errors import (
    HiddenPileError,
    MissingFeaturesError,
    MissingMetadataError,
    PolygonError,
    SelfMergeError,
    UnknownPileError,
)
from .geometry import UnionFind, point_in_polygon, rects_overlap
from .model import (
    GroupBySpec,
    Pile,
    PilingState,
    SplitBySpec,
    Vec2,
    max_z,
    mix_seed,
    restore_dispersion,
)

SPLIT_OFFSET_FRACTION = 1.0  # children sit one cell size away from the parent


def _require_active_pile(state: PilingState, pile_id: int) -> Pile:
    pile = state.piles.get(pile_id)
    if pile is None:
        raise UnknownPileError(pile_id)
    if pile.layer != state.active_depth:
        raise HiddenPileError(pile_id)
    return pile


def _merge_into(state: PilingState, target_id: int, source_ids: Sequence[int],
                position: Vec2 | None = None) -> PilingState:
    """Append each source's items onto the target (sources stack on top in the
    given order), delete the sources, raise the target to the top z."""
    piles = dict(state.piles)
    target = piles[target_id]
    item_ids = list(target.item_ids)
    for source_id in source_ids:
        item_ids.extend(piles[source_id].item_ids)
        del piles[source_id]
    x, y = position if position is not None else target.position
    piles[target_id] = replace(
        target,
        item_ids=tuple(item_ids),
        x=x,
        y=y,
        z=max_z(state.piles.values()) + 1,
    )
    return replace(state, piles=piles)


def merge_piles(state: PilingState, target_id: int, source_ids: Sequence[int]) -> PilingState:
    """Sequential grouping: drop the sources onto the target in order."""
    state = restore_dispersion(state)
    _require_active_pile(state, target_id)
    seen = {target_id}
    for source_id in source_ids:
        _require_active_pile(state, source_id)
        if source_id == target_id:
            raise SelfMergeError(target_id)
        if source_id in seen:
            raise SelfMergeError(source_id)
        seen.add(source_id)
    state = _merge_into(state, target_id, source_ids)
    state = reapply_arrangement(state)
    return replace(state, epoch=state.epoch + 1, hover=None)


def lasso_group(state: PilingState, polygon: Sequence[Vec2]) -> PilingState:
    """Parallel grouping: merge every visible pile whose position falls inside
    the polygon (even-odd rule) into one pile at their centroid.

    Fewer than two captured piles leave the piling unchanged (the transaction
    still counts).
    """
    if len(polygon) < 3:
        raise PolygonError("lasso needs at least 3 points")
    state = restore_dispersion(state)
    captured = [
        p for p in state.active_piles() if point_in_polygon(p.position, polygon)
    ]
    if len(captured) < 2:
        return replace(state, epoch=state.epoch + 1)
    captured.sort(key=lambda p: p.pile_id)
    centroid = (
        sum(p.x for p in captured) / len(captured),
        sum(p.y for p in captured) / len(captured),
    )
    state = _merge_into(
        state,
        captured[0].pile_id,
        [p.pile_id for p in captured[1:]],
        position=centroid,
    )
    state = reapply_arrangement(state)
    return replace(state, epoch=state.epoch + 1, hover=None)


def _merge_components(state: PilingState, groups: Iterable[list[int]]) -> PilingState:
    """Merge each multi-pile component (ascending pile id) at its centroid."""
    for group in groups:
        if len(group) < 2:
            continue
        members = [state.piles[pid] for pid in sorted(group)]
        centroid = (
            sum(p.x for p in members) / len(members),
            sum(p.y for p in members) / len(members),
        )
        state = _merge_into(
            state, members[0].pile_id, [p.pile_id for p in members[1:]], centroid
        )
    return state


def _proximity_components(state: PilingState, spec: GroupBySpec) -> list[list[int]]:
    piles = state.active_piles()
    uf = UnionFind([p.pile_id for p in piles])
    if spec.type == "overlap":
        boxes = {p.pile_id: pile_bounds(state, p) for p in piles}
        for i, a in enumerate(piles):
            for b in piles[i + 1:]:
                if rects_overlap(boxes[a.pile_id], boxes[b.pile_id]):
                    uf.union(a.pile_id, b.pile_id)
    else:
        threshold = spec.threshold or 0.0
        for i, a in enumerate(piles):
            for b in piles[i + 1:]:
                if math.hypot(a.x - b.x, a.y - b.y) <= threshold:
                    uf.union(a.pile_id, b.pile_id)
    return uf.components()


def _group_by_proximity(state: PilingState, spec: GroupBySpec) -> PilingState:
    # merging moves piles to centroids and grows their extent, so iterate
    # until no two visible piles trigger the predicate (pile count strictly
    # shrinks every round, so this terminates)
    while True:
        components = _proximity_components(state, spec)
        if all(len(group) < 2 for group in components):
            return state
        state = _merge_components(state, components)


def _layout_cell(state: PilingState, pile: Pile, mode: str) -> tuple[int, int]:
    canvas = state.canvas
    col = min(int(pile.x // canvas.cell_width), canvas.columns - 1)
    row = int(pile.y // canvas.cell_height)
    if mode == "column":
        return (0, col)
    if mode == "row":
        return (row, 0)
    return (row, col)


def _group_by_layout(state: PilingState, spec: GroupBySpec) -> PilingState:
    groups: dict[tuple[int, int], list[int]] = {}
    for pile in state.active_piles():
        groups.setdefault(_layout_cell(state, pile, spec.type), []).append(pile.pile_id)

    canvas = state.canvas
    for cell in sorted(groups):
        members = sorted(groups[cell])
        if len(members) < 2:
            continue
        row, col = cell
        piles = [state.piles[pid] for pid in members]
        if spec.type == "grid":
            position = ((col + 0.5) * canvas.cell_width, (row + 0.5) * canvas.cell_height)
        elif spec.type == "column":
            position = ((col + 0.5) * canvas.cell_width,
                        sum(p.y for p in piles) / len(piles))
        else:
            position = (sum(p.x for p in piles) / len(piles),
                        (row + 0.5) * canvas.cell_height)
        state = _merge_into(state, members[0], members[1:], position)
    return state


def _item_position(state: PilingState, item_id: str, source: dict[str, Vec2]) -> Vec2:
    item = state.items[item_id]
    if item.anchor is not None:
        return item.anchor
    return source[item_id]


def _rebuild_groups(
    state: PilingState, groups: list[tuple[str, ...]]
) -> PilingState:
    """Replace the visible piles by fresh piles, one per item group. Groups
    whose item set matches an existing pile keep that pile untouched."""
    depth = state.active_depth
    source_position = {
        item_id: pile.position
        for pile in state.active_piles()
        for item_id in pile.item_ids
    }
    existing = {frozenset(p.item_ids): p for p in state.active_piles()}
    piles = {
        pid: p for pid, p in state.piles.items() if p.layer != depth
    }
    next_id = state.next_pile_id
    z = max_z(state.piles.values()) + 1
    for group in groups:
        key = frozenset(group)
        survivor = existing.get(key)
        if survivor is not None:
            piles[survivor.pile_id] = survivor
            continue
        centroid = (
            sum(_item_position(state, i, source_position)[0] for i in group) / len(group),
            sum(_item_position(state, i, source_position)[1] for i in group) / len(group),
        )
        piles[next_id] = Pile(
            pile_id=next_id,
            item_ids=group,
            x=centroid[0],
            y=centroid[1],
            z=z,
            layer=depth,
        )
        next_id += 1
        z += 1
    return replace(state, piles=piles, next_pile_id=next_id)


def _visible_items(state: PilingState) -> list[str]:
    return [i for p in state.active_piles() for i in p.item_ids]


def _group_by_category(state: PilingState, key: str) -> PilingState:
    item_ids = _visible_items(state)
    missing = [i for i in item_ids if key not in state.items[i].metadata]
    if missing:
        raise MissingMetadataError(key, sorted(missing))
    by_value: dict[str, list[str]] = {}
    for item_id in item_ids:
        by_value.setdefault(str(state.items[item_id].metadata[key]), []).append(item_id)
    groups = [tuple(sorted(members)) for _, members in sorted(by_value.items())]
    return _rebuild_groups(state, groups)


def _group_by_cluster(state: PilingState, spec: GroupBySpec) -> PilingState:
    item_ids = _visible_items(state)
    missing = [i for i in item_ids if state.items[i].features is None]
    if missing:
        raise MissingFeaturesError(sorted(missing))
    k = spec.k or default_cluster_count(len(item_ids))
    k = min(k, len(item_ids))
    seed = mix_seed(state.rng_seed, "cluster", state.epoch)
    assignments, _ = kmeans(
        [state.items[i].features for i in item_ids], k=k, seed=seed
    )
    clusters: dict[int, list[str]] = {}
    for item_id, cluster in zip(item_ids, assignments):
        clusters.setdefault(cluster, []).append(item_id)
    groups = [tuple(sorted(clusters[c])) for c in sorted(clusters)]
    return _rebuild_groups(state, groups)


def group_by(state: PilingState, spec: GroupBySpec) -> PilingState:
    """Automatic grouping. Proximity types (overlap, distance) also register
    themselves for re-evaluation on zoom."""
    state = restore_dispersion(state)
    if spec.type in ("overlap", "distance"):
        state = _group_by_proximity(state, spec)
        state = replace(state, zoom_grouping=spec)
    elif spec.type in ("grid", "column", "row"):
        state = _group_by_layout(state, spec)
    elif spec.type == "category":
        state = _group_by_category(state, spec.key)  # type: ignore[arg-type]
    else:
        state = _group_by_cluster(state, spec)
    if spec.type not in ("overlap", "distance"):
        state = reapply_arrangement(state)
    return replace(state, epoch=state.epoch + 1, hover=None)


def _split_pile_groups(
    state: PilingState, pile: Pile, spec: SplitBySpec
) -> list[tuple[str, ...]]:
    """Partition one pile's own items per the split subroutine, preserving the
    pile's internal order inside each part."""
    ids = pile.item_ids
    if len(ids) < 2:
        return [ids]

    if spec.type == "category":
        missing = [i for i in ids if spec.key not in state.items[i].metadata]
        if missing:
            raise MissingMetadataError(spec.key or "", sorted(missing))
        by_value: dict[str, list[str]] = {}
        for item_id in ids:
            by_value.setdefault(str(state.items[item_id].metadata[spec.key]), []).append(item_id)
        return [tuple(members) for _, members in sorted(by_value.items())]

    if spec.type == "cluster":
        missing = [i for i in ids if state.items[i].features is None]
        if missing:
            raise MissingFeaturesError(sorted(missing))
        k = spec.k or default_cluster_count(len(ids))
        k = min(k, len(ids))
        seed = mix_seed(state.rng_seed, "split", state.epoch, pile.pile_id)
        assignments, _ = kmeans([state.items[i].features for i in ids], k=k, seed=seed)
        clusters: dict[int, list[str]] = {}
        for item_id, cluster in zip(ids, assignments):
            clusters.setdefault(cluster, []).append(item_id)
        return [tuple(clusters[c]) for c in sorted(clusters)]

    # proximity split on the items' own positions (anchors); items without
    # anchors stay with the cover's part
    anchored = [i for i in ids if state.items[i].anchor is not None]
    floating = [i for i in ids if state.items[i].anchor is None]
    if len(anchored) < 2:
        return [ids]
    uf = UnionFind(anchored)
    w, h = state.canvas.cell_width, state.canvas.cell_height
    for idx, a in enumerate(anchored):
        pa = state.zoom.apply(state.items[a].anchor)  # type: ignore[arg-type]
        for b in anchored[idx + 1:]:
            pb = state.zoom.apply(state.items[b].anchor)  # type: ignore[arg-type]
            if spec.type == "distance":
                joined = math.hypot(pa[0] - pb[0], pa[1] - pb[1]) <= (spec.threshold or w)
            else:
                joined = min(w - abs(pa[0] - pb[0]), h - abs(pa[1] - pb[1])) >= 0.0
            if joined:
                uf.union(a, b)
    components = uf.components()
    order = {item_id: i for i, item_id in enumerate(ids)}
    parts = [sorted(group, key=lambda i: order[i]) for group in components]
    if floating:
        if pile.cover_id in set(anchored):
            target = next(p for p in parts if pile.cover_id in p)
        else:
            target = parts[0]
        target.extend(floating)
        target.sort(key=lambda i: order[i])
    parts.sort(key=lambda p: order[p[0]])
    return [tuple(p) for p in parts]


def split_by(state: PilingState, spec: SplitBySpec) -> PilingState:
    """Refine every visible pile by the subroutine applied to its own items.

    A pile whose items all fall into one part is left untouched; children of a
    real split sit on a ring around the parent position, one cell size out.
    """
    state = restore_dispersion(state)
    depth = state.active_depth
    piles = dict(state.piles)
    next_id = state.next_pile_id
    z = max_z(state.piles.values()) + 1
    radius = state.canvas.cell_width * SPLIT_OFFSET_FRACTION

    for pile in state.active_piles():
        parts = _split_pile_groups(state, pile, spec)
        if len(parts) < 2:
            continue
        del piles[pile.pile_id]
        for i, part in enumerate(parts):
            angle = 2.0 * math.pi * i / len(parts)
            piles[next_id] = Pile(
                pile_id=next_id,
                item_ids=part,
                x=pile.x + radius * math.cos(angle),
                y=pile.y + radius * math.sin(angle),
                z=z,
                layer=depth,
            )
            next_id += 1
            z += 1

    state = replace(state, piles=piles, next_pile_id=next_id)
    state = reapply_arrangement(state)
    return replace(state, epoch=state.epoch + 1, hover=None)
