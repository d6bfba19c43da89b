"""Gesture semantics and browsing: the pointer state machine, hit-testing,
temporary dispersion, layered browsing, hover raising, and animation plans.

Gesture handling is total: events that make no sense in the current mode
(a pointer-up while idle, coordinates on empty canvas) are ignored rather
than raised, so noisy UI streams can never wedge the engine. Only applied
transactions advance the epoch; ignored events leave the state untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

from .arrangement import zoom_update
from .bounds import item_rects, item_size, pile_bounds
from .errors import ItemNotInPileError, LayerDepthError, UnknownPileError
from .grouping import lasso_group, merge_piles
from .model import (
    Browsing,
    Dragging,
    Idle,
    LassoActive,
    LassoArmed,
    LayerFrame,
    Pile,
    PilingState,
    Vec2,
    Zoom,
    max_z,
    restore_dispersion,
)

LASSO_CIRCLE_RADIUS = 24.0
LASSO_ARM_TIMEOUT_MS = 3000.0
CLICK_SLOP = 2.0
DEFAULT_ANIMATION_MS = 250.0
MAX_LAYER_DEPTH = 2


@dataclass(frozen=True, slots=True)
class GestureEvent:
    kind: str  # pointerDown | pointerMove | pointerUp | doubleClick | contextAction | wheelZoom
    x: float = 0.0
    y: float = 0.0
    time_ms: float = 0.0
    target: int | None = None  # pre-resolved pile id (doubleClick / contextAction)
    action: str | None = None  # contextAction verb: browseSeparately | leave
    factor: float = 1.0  # wheelZoom multiplier
    modifiers: frozenset[str] = frozenset()

    @property
    def position(self) -> Vec2:
        return (self.x, self.y)


@dataclass(frozen=True, slots=True)
class Keyframe:
    start: Vec2
    end: Vec2
    start_scale: float = 1.0
    end_scale: float = 1.0


@dataclass(frozen=True, slots=True)
class AnimationPlan:
    keyframes: Mapping[int, Keyframe]
    duration_ms: float = DEFAULT_ANIMATION_MS
    easing: str = "cubic-in-out"
    epoch: int = 0


def ease(easing: str, t: float) -> float:
    if easing == "linear":
        return t
    # cubic in-out
    if t < 0.5:
        return 4.0 * t * t * t
    u = 2.0 * t - 2.0
    return 0.5 * u * u * u + 1.0


def tick_animation(plan: AnimationPlan, t: float) -> dict[int, tuple[float, float, float]]:
    """Interpolated (x, y, scale) per pile at normalized time t in [0, 1]."""
    t = min(max(t, 0.0), 1.0)
    shaped = ease(plan.easing, t)
    out = {}
    for pile_id, frame in plan.keyframes.items():
        x = frame.start[0] + (frame.end[0] - frame.start[0]) * shaped
        y = frame.start[1] + (frame.end[1] - frame.start[1]) * shaped
        scale = frame.start_scale + (frame.end_scale - frame.start_scale) * shaped
        out[pile_id] = (x, y, scale)
    return out


def plan_between(old: PilingState, new: PilingState) -> AnimationPlan | None:
    """Straight-line moves for piles that survived a transaction in place."""
    keyframes = {}
    for pile_id, pile in new.piles.items():
        before = old.piles.get(pile_id)
        if before is not None and before.position != pile.position:
            keyframes[pile_id] = Keyframe(start=before.position, end=pile.position)
    if not keyframes:
        return None
    return AnimationPlan(keyframes=keyframes, epoch=new.epoch)


def hit_test(
    state: PilingState, point: Vec2, exclude: int | None = None
) -> tuple[int, str | None] | None:
    """Topmost visible pile under the point, with the preview item id when the
    point falls on a partially exposed item rather than the cover."""
    candidates = [
        p
        for p in state.active_piles()
        if p.pile_id != exclude and pile_bounds(state, p).contains(point)
    ]
    for pile in sorted(candidates, key=lambda p: (p.z, p.pile_id), reverse=True):
        rects = item_rects(state, pile)
        for index in range(len(rects) - 1, -1, -1):
            if rects[index].contains(point):
                if index == len(rects) - 1 and not pile.dispersed:
                    return (pile.pile_id, None)  # the cover itself
                return (pile.pile_id, pile.item_ids[index])
    if candidates:
        top = max(candidates, key=lambda p: (p.z, p.pile_id))
        return (top.pile_id, None)
    return None


def temporary_disperse(state: PilingState, pile_id: int) -> PilingState:
    """Spread a pile into a local grid centered on its position; the items stay
    one logical pile. Dispersing while another dispersion is active restores
    the first one; dispersing a singleton changes nothing."""
    if pile_id not in state.piles:
        raise UnknownPileError(pile_id)
    if state.dispersion_backup is not None and state.dispersion_backup.pile_id == pile_id:
        return end_temporary_disperse(state)
    state = restore_dispersion(state)
    pile = state.piles[pile_id]
    if len(pile.item_ids) < 2:
        return replace(state, epoch=state.epoch + 1)

    n = len(pile.item_ids)
    columns = math.ceil(math.sqrt(n))
    rows = math.ceil(n / columns)
    w, h = item_size(state)
    pitch_x, pitch_y = w + state.canvas.padding, h + state.canvas.padding
    offsets = []
    for i in range(n):
        r, c = divmod(i, columns)
        offsets.append((
            (c - (columns - 1) / 2.0) * pitch_x,
            (r - (rows - 1) / 2.0) * pitch_y,
        ))
    piles = dict(state.piles)
    piles[pile_id] = replace(
        pile,
        dispersed=True,
        dispersed_offsets=tuple(offsets),
        z=max_z(state.piles.values()) + 1,
    )
    return replace(
        state,
        piles=piles,
        dispersion_backup=pile,
        epoch=state.epoch + 1,
        hover=None,
    )


def end_temporary_disperse(state: PilingState) -> PilingState:
    """Restore the dispersed pile exactly as saved."""
    backup = state.dispersion_backup
    if backup is None:
        return replace(state, epoch=state.epoch + 1)
    piles = dict(state.piles)
    piles[backup.pile_id] = backup
    return replace(
        state, piles=piles, dispersion_backup=None, epoch=state.epoch + 1, hover=None
    )


def _layer_grid(state: PilingState, n: int) -> list[Vec2]:
    columns = math.ceil(math.sqrt(n))
    rows = math.ceil(n / columns)
    w, h = item_size(state)
    pitch_x, pitch_y = w + state.canvas.padding, h + state.canvas.padding
    cx, cy = state.canvas.width / 2.0, state.canvas.height / 2.0
    return [
        (
            cx + (i % columns - (columns - 1) / 2.0) * pitch_x,
            cy + (i // columns - (rows - 1) / 2.0) * pitch_y,
        )
        for i in range(n)
    ]


def browse_separately(state: PilingState, pile_id: int) -> PilingState:
    """Open a browse layer: hide everything else and spread the pile's items
    as singleton piles on the layer for sub-piling."""
    if pile_id not in state.piles:
        raise UnknownPileError(pile_id)
    if state.active_depth >= MAX_LAYER_DEPTH:
        raise LayerDepthError(state.active_depth)
    state = restore_dispersion(state)
    pile = state.piles[pile_id]
    if pile.layer != state.active_depth:
        raise UnknownPileError(pile_id)

    depth = state.active_depth + 1
    positions = _layer_grid(state, len(pile.item_ids))
    piles = {pid: p for pid, p in state.piles.items() if pid != pile_id}
    next_id = state.next_pile_id
    z = max_z(state.piles.values()) + 1
    entry = []
    for i, item_id in enumerate(pile.item_ids):
        piles[next_id] = Pile(
            pile_id=next_id,
            item_ids=(item_id,),
            x=positions[i][0],
            y=positions[i][1],
            z=z + i,
            layer=depth,
        )
        entry.append(frozenset((item_id,)))
        next_id += 1

    frame = LayerFrame(source_pile=pile, entry_partition=frozenset(entry))
    return replace(
        state,
        piles=piles,
        layers=state.layers + (frame,),
        next_pile_id=next_id,
        epoch=state.epoch + 1,
        mode=Idle(),
        hover=None,
    )


def leave_layer(state: PilingState) -> PilingState:
    """Commit the top browse layer back.

    Untouched layers (the partition still equals the entry partition) restore
    the original pile exactly; edited layers replace it with one pile per
    layer pile, fanned around the original position.
    """
    if not state.layers:
        return replace(state, epoch=state.epoch + 1)
    state = restore_dispersion(state)
    frame = state.layers[-1]
    depth = state.active_depth
    layer_piles = [p for _, p in sorted(state.piles.items()) if p.layer == depth]
    partition = frozenset(frozenset(p.item_ids) for p in layer_piles)
    piles = {pid: p for pid, p in state.piles.items() if p.layer != depth}
    next_id = state.next_pile_id

    if partition == frame.entry_partition:
        piles[frame.source_pile.pile_id] = frame.source_pile
    else:
        parent = frame.source_pile
        radius = state.canvas.cell_width
        z = max_z(piles.values()) + 1 if piles else 0
        n = len(layer_piles)
        for i, layer_pile in enumerate(layer_piles):
            angle = 2.0 * math.pi * i / n
            offset = (radius * math.cos(angle), radius * math.sin(angle)) if n > 1 else (0.0, 0.0)
            piles[next_id] = Pile(
                pile_id=next_id,
                item_ids=layer_pile.item_ids,
                x=parent.x + offset[0],
                y=parent.y + offset[1],
                z=z + i,
                layer=parent.layer,
            )
            next_id += 1

    return replace(
        state,
        piles=piles,
        layers=state.layers[:-1],
        next_pile_id=next_id,
        epoch=state.epoch + 1,
        mode=Idle(),
        hover=None,
    )


def hover_preview(state: PilingState, pile_id: int, item_id: str) -> PilingState:
    """Temporarily raise one item to the top of its pile's render order; the
    logical grouping order is untouched."""
    if pile_id not in state.piles:
        raise UnknownPileError(pile_id)
    if item_id not in state.piles[pile_id].item_ids:
        raise ItemNotInPileError(item_id, pile_id)
    return replace(state, hover=(pile_id, item_id), epoch=state.epoch + 1)


def clear_hover(state: PilingState) -> PilingState:
    if state.hover is None:
        return replace(state, epoch=state.epoch + 1)
    return replace(state, hover=None, epoch=state.epoch + 1)


def render_order(state: PilingState, pile_id: int) -> tuple[str, ...]:
    """Item ids in draw order (bottom to top) with any hovered item raised."""
    pile = state.piles[pile_id]
    if state.hover is None or state.hover[0] != pile_id:
        return pile.item_ids
    raised = state.hover[1]
    return tuple(i for i in pile.item_ids if i != raised) + (raised,)


def _raise_pile(state: PilingState, pile_id: int) -> PilingState:
    piles = dict(state.piles)
    piles[pile_id] = replace(piles[pile_id], z=max_z(state.piles.values()) + 1)
    return replace(state, piles=piles)


def _reposition(state: PilingState, pile_id: int, position: Vec2) -> PilingState:
    piles = dict(state.piles)
    piles[pile_id] = replace(piles[pile_id], x=position[0], y=position[1])
    return replace(state, piles=piles)


def apply_gesture(
    state: PilingState, event: GestureEvent
) -> tuple[PilingState, AnimationPlan | None]:
    """Advance the pointer state machine by one event.

    pointer-down on a pile starts a drag; release over another pile merges
    onto it (drop target by cursor containment, dragged pile excluded),
    release over empty canvas repositions. Pointer-down on empty canvas arms
    the lasso circle; a second down inside the circle starts collecting the
    lasso path, and release groups everything inside it. Double-click toggles
    temporary dispersion, the context menu opens/leaves browse layers, and
    wheel events zoom about the cursor.
    """
    mode = state.mode

    def commit(s: PilingState) -> PilingState:
        return replace(s, epoch=s.epoch + 1)

    # stale lasso circle times out back to idle (its own transaction)
    if isinstance(mode, LassoArmed) and event.time_ms - mode.armed_at_ms > LASSO_ARM_TIMEOUT_MS:
        state = commit(replace(state, mode=Idle()))
        mode = state.mode

    if event.kind == "wheelZoom":
        factor = event.factor
        if factor <= 0 or not math.isfinite(factor):
            return state, None
        z = state.zoom
        new_zoom = Zoom(
            scale=z.scale * factor,
            tx=event.x - factor * (event.x - z.tx),
            ty=event.y - factor * (event.y - z.ty),
        )
        new_state = zoom_update(state, new_zoom)
        return new_state, plan_between(state, new_state)

    if event.kind == "doubleClick":
        target = event.target
        if target is None:
            hit = hit_test(state, event.position)
            target = hit[0] if hit else None
        if target is None:
            if state.dispersion_backup is not None:
                return end_temporary_disperse(state), None
            return state, None
        if target not in state.piles or state.piles[target].layer != state.active_depth:
            return state, None
        return temporary_disperse(state, target), None

    if event.kind == "contextAction":
        if event.action == "leave":
            if not state.layers:
                return state, None
            new_state = leave_layer(state)
            return new_state, plan_between(state, new_state)
        if event.action == "browseSeparately":
            target = event.target
            if target is None:
                hit = hit_test(state, event.position)
                target = hit[0] if hit else None
            if (
                target is None
                or target not in state.piles
                or state.piles[target].layer != state.active_depth
                or state.active_depth >= MAX_LAYER_DEPTH
            ):
                return state, None
            new_state = browse_separately(state, target)
            return new_state, plan_between(state, new_state)
        return state, None

    if event.kind == "pointerDown":
        if isinstance(mode, LassoArmed):
            dx = event.x - mode.x
            dy = event.y - mode.y
            if math.hypot(dx, dy) <= LASSO_CIRCLE_RADIUS:
                return (
                    commit(replace(state, mode=LassoActive(points=(event.position,)))),
                    None,
                )
        hit = hit_test(state, event.position)
        if hit is not None:
            pile = state.piles[hit[0]]
            mode = Dragging(
                pile_id=pile.pile_id,
                grab_dx=event.x - pile.x,
                grab_dy=event.y - pile.y,
                last_x=event.x,
                last_y=event.y,
            )
            return commit(replace(state, mode=mode, hover=None)), None
        return commit(replace(
            state,
            mode=LassoArmed(x=event.x, y=event.y, armed_at_ms=event.time_ms),
            hover=None,
        )), None

    if event.kind == "pointerMove":
        if isinstance(mode, Dragging):
            moved = mode.moved + math.hypot(event.x - mode.last_x, event.y - mode.last_y)
            if mode.pile_id in state.piles:
                state = _reposition(
                    state, mode.pile_id, (event.x - mode.grab_dx, event.y - mode.grab_dy)
                )
            return commit(replace(
                state,
                mode=replace(mode, last_x=event.x, last_y=event.y, moved=moved),
            )), None
        if isinstance(mode, LassoActive):
            return commit(replace(
                state, mode=replace(mode, points=mode.points + (event.position,))
            )), None
        if isinstance(mode, Browsing):
            hit = hit_test(state, event.position)
            if hit is not None and hit[0] == mode.pile_id and hit[1] is not None:
                if state.hover != (hit[0], hit[1]):
                    return hover_preview(state, hit[0], hit[1]), None
                return state, None
            if state.hover is not None:
                return clear_hover(state), None
            return state, None
        return state, None

    if event.kind == "pointerUp":
        if isinstance(mode, Dragging):
            state = replace(state, mode=Idle())
            if mode.pile_id not in state.piles:
                return commit(state), None
            if mode.moved <= CLICK_SLOP:
                return commit(replace(state, mode=Browsing(pile_id=mode.pile_id))), None
            drop = hit_test(state, event.position, exclude=mode.pile_id)
            if drop is not None:
                before = state
                merged = merge_piles(state, drop[0], [mode.pile_id])
                return merged, plan_between(before, merged)
            new_state = _reposition(
                state, mode.pile_id, (event.x - mode.grab_dx, event.y - mode.grab_dy)
            )
            new_state = _raise_pile(new_state, mode.pile_id)
            return commit(new_state), None
        if isinstance(mode, LassoActive):
            state = replace(state, mode=Idle())
            if len(mode.points) >= 3:
                return lasso_group(state, list(mode.points)), None
            return commit(state), None
        return state, None

    return state, None
