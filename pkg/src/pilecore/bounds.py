"""Rendered pile extents: per-item rectangles and their union.

Items render at cell size (minus padding), centered on the pile position plus
their resolved offsets, so a pile's bounding box is the cover box extended by
the farthest preview offset. These boxes drive overlap grouping, hit-testing,
and drop-target resolution.
"""

from __future__ import annotations

from .geometry import Rect, rect_around
from .model import Pile, PilingState
from .viewspec import resolve_offset_policy
from .arrangement import item_offsets


def item_size(state: PilingState) -> tuple[float, float]:
    canvas = state.canvas
    return (
        max(canvas.cell_width - canvas.padding, 1e-9),
        max(canvas.cell_height - canvas.padding, 1e-9),
    )


def pile_offsets(state: PilingState, pile: Pile) -> list[tuple[float, float, float]]:
    """Resolved (dx, dy, rotation) per item; dispersion overrides the policy."""
    if pile.dispersed and pile.dispersed_offsets is not None:
        return [(dx, dy, 0.0) for dx, dy in pile.dispersed_offsets]
    return item_offsets(pile, resolve_offset_policy(state, pile))


def item_rects(state: PilingState, pile: Pile) -> list[Rect]:
    """One rectangle per item, aligned with pile.item_ids (bottom to top)."""
    w, h = item_size(state)
    return [
        rect_around((pile.x + dx, pile.y + dy), w, h)
        for dx, dy, _ in pile_offsets(state, pile)
    ]


def pile_bounds(state: PilingState, pile: Pile) -> Rect:
    rects = item_rects(state, pile)
    out = rects[0]
    for r in rects[1:]:
        out = out.union(r)
    return out
