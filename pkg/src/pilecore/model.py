"""Canonical piling state: items, piles, canvas, zoom, interaction bookkeeping.

The state is a plain immutable value. Operations elsewhere in the package are
pure functions ``PilingState -> PilingState`` that bump the transaction
counter (``epoch``) on every applied transaction. The partition rule is the
one global invariant: every item id sits in exactly one pile at all times.

Pile ids come from a monotone counter and are never reused, so replay scripts
can reference piles stably across an entire session.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence

from .errors import (
    DuplicateIdError,
    FeatureLengthError,
    NonFiniteFeatureError,
    PilingError,
)

ENGINE_VERSION = "1"

Scalar = Any  # number | string | bool in metadata maps
Vec2 = tuple[float, float]


@dataclass(frozen=True, slots=True)
class Item:
    """An immutable user datum. ``src`` is an opaque payload handle the engine
    never interprets; it is carried through serialization untouched."""

    id: str
    src: Any = None
    features: tuple[float, ...] | None = None
    metadata: Mapping[str, Scalar] = field(default_factory=dict)
    anchor: Vec2 | None = None


@dataclass(frozen=True, slots=True)
class Pile:
    """An ordered group of item ids. The last id is the top of the pile (the
    cover); earlier ids are previews. ``layer`` > 0 marks piles living on a
    browse layer; ``dispersed_offsets`` is set while temporarily dispersed."""

    pile_id: int
    item_ids: tuple[str, ...]
    x: float
    y: float
    z: int = 0
    layer: int = 0
    dispersed: bool = False
    dispersed_offsets: tuple[Vec2, ...] | None = None

    @property
    def position(self) -> Vec2:
        return (self.x, self.y)

    @property
    def cover_id(self) -> str:
        return self.item_ids[-1]

    def __post_init__(self) -> None:
        if not self.item_ids:
            raise PilingError(f"pile {self.pile_id} has no items")
        if len(set(self.item_ids)) != len(self.item_ids):
            raise PilingError(f"pile {self.pile_id} carries duplicate item ids")


@dataclass(frozen=True, slots=True)
class Canvas:
    width: float = 1000.0
    height: float = 800.0
    columns: int = 10
    cell_aspect: float = 1.0
    padding: float = 0.0

    @property
    def cell_width(self) -> float:
        return self.width / self.columns

    @property
    def cell_height(self) -> float:
        return self.cell_width / self.cell_aspect

    def __post_init__(self) -> None:
        if self.columns < 1:
            raise PilingError("canvas needs at least one column")
        if self.width <= 0 or self.height <= 0:
            raise PilingError("canvas extent must be positive")
        if self.cell_aspect <= 0:
            raise PilingError("cell aspect must be positive")


@dataclass(frozen=True, slots=True)
class Zoom:
    scale: float = 1.0
    tx: float = 0.0
    ty: float = 0.0

    def apply(self, p: Vec2) -> Vec2:
        return (self.scale * p[0] + self.tx, self.scale * p[1] + self.ty)


# Pointer-gesture modes. Browse layers are tracked separately on the state
# (they compose with pointer gestures: a drag can happen on a layer).
@dataclass(frozen=True, slots=True)
class Idle:
    kind: str = "idle"


@dataclass(frozen=True, slots=True)
class Dragging:
    pile_id: int
    grab_dx: float
    grab_dy: float
    last_x: float
    last_y: float
    moved: float = 0.0
    kind: str = "dragging"


@dataclass(frozen=True, slots=True)
class LassoArmed:
    x: float
    y: float
    armed_at_ms: float
    kind: str = "lassoArmed"


@dataclass(frozen=True, slots=True)
class LassoActive:
    points: tuple[Vec2, ...]
    kind: str = "lassoActive"


@dataclass(frozen=True, slots=True)
class Browsing:
    pile_id: int
    kind: str = "browsing"


PointerMode = Idle | Dragging | LassoArmed | LassoActive | Browsing


@dataclass(frozen=True, slots=True)
class LayerFrame:
    """One open browse layer: the snapshot of the browsed pile and the item-set
    partition present right after entry (used to detect the no-edit case)."""

    source_pile: Pile
    entry_partition: frozenset[frozenset[str]]


@dataclass(frozen=True, slots=True)
class ArrangeBySpec:
    type: str  # index | ij | xy | uv | data
    keys: tuple[str, ...] = ()
    reducer: str = "cover"  # cover | mean | min | max

    def __post_init__(self) -> None:
        if self.type not in ("index", "ij", "xy", "uv", "data"):
            raise PilingError(f"unknown arrangement type {self.type!r}")
        if self.reducer not in ("cover", "mean", "min", "max"):
            raise PilingError(f"unknown pile reducer {self.reducer!r}")
        if self.type == "ij" and len(self.keys) != 2:
            raise PilingError("ij arrangement needs two keys (row, column)")
        if self.type == "data" and not self.keys:
            raise PilingError("data arrangement needs at least one key")


@dataclass(frozen=True, slots=True)
class GroupBySpec:
    type: str  # distance | overlap | grid | column | row | category | cluster
    threshold: float | None = None  # distance
    key: str | None = None  # category
    k: int | None = None  # cluster

    def __post_init__(self) -> None:
        if self.type not in ("distance", "overlap", "grid", "column", "row", "category", "cluster"):
            raise PilingError(f"unknown grouping type {self.type!r}")
        if self.type == "distance":
            if self.threshold is None or self.threshold <= 0:
                raise PilingError("distance grouping needs a positive threshold")
        if self.type == "category" and not self.key:
            raise PilingError("category grouping needs a metadata key")
        if self.k is not None and self.k < 2:
            raise PilingError("cluster count must be at least 2")


@dataclass(frozen=True, slots=True)
class SplitBySpec:
    type: str  # overlap | distance | category | cluster
    threshold: float | None = None
    key: str | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        if self.type not in ("overlap", "distance", "category", "cluster"):
            raise PilingError(f"unknown split type {self.type!r}")
        if self.type == "distance":
            if self.threshold is None or self.threshold <= 0:
                raise PilingError("distance split needs a positive threshold")
        if self.type == "category" and not self.key:
            raise PilingError("category split needs a metadata key")
        if self.k is not None and self.k < 2:
            raise PilingError("cluster count must be at least 2")


@dataclass(frozen=True, slots=True)
class PilingState:
    """Complete snapshot of one piling session.

    ``items`` keeps ingestion order (dict order), which is what the ``index``
    arrangement sorts by. ``piles`` maps pile id to pile. ``view_config`` maps
    property name to either a static scalar or a named-specifier reference.
    """

    items: Mapping[str, Item]
    piles: Mapping[int, Pile]
    canvas: Canvas = Canvas()
    view_config: Mapping[str, Any] = field(default_factory=dict)
    rng_seed: int = 0
    epoch: int = 0
    zoom: Zoom = Zoom()
    next_pile_id: int = 0
    arrangement: ArrangeBySpec | None = None
    zoom_grouping: GroupBySpec | None = None
    dispersion_backup: Pile | None = None
    mode: PointerMode = Idle()
    layers: tuple[LayerFrame, ...] = ()
    hover: tuple[int, str] | None = None  # (pile id, raised item id)

    @property
    def active_depth(self) -> int:
        return len(self.layers)

    def pile(self, pile_id: int) -> Pile:
        return self.piles[pile_id]

    def active_piles(self) -> list[Pile]:
        """Piles on the currently visible layer, ascending pile id."""
        depth = self.active_depth
        return [p for _, p in sorted(self.piles.items()) if p.layer == depth]

    def partition(self) -> frozenset[frozenset[str]]:
        """The item-set partition induced by the piles (all layers)."""
        return frozenset(frozenset(p.item_ids) for p in self.piles.values())


def validate_partition(state: PilingState) -> None:
    """Raise if any item is missing from the piles or piled more than once."""
    seen: dict[str, int] = {}
    for pile in state.piles.values():
        for item_id in pile.item_ids:
            if item_id in seen:
                raise PilingError(
                    f"item {item_id!r} on piles {seen[item_id]} and {pile.pile_id}"
                )
            seen[item_id] = pile.pile_id
    missing = state.items.keys() - seen.keys()
    if missing:
        raise PilingError(f"items on no pile: {sorted(missing)[:10]}")
    unknown = seen.keys() - state.items.keys()
    if unknown:
        raise PilingError(f"piled ids without items: {sorted(unknown)[:10]}")


def grid_cell_center(canvas: Canvas, position: int) -> Vec2:
    """Center of the grid cell at a 0-based row-major sort position."""
    row, col = divmod(position, canvas.columns)
    return ((col + 0.5) * canvas.cell_width, (row + 0.5) * canvas.cell_height)


def _ingest_items(raw: Sequence[Item | Mapping[str, Any]],
                  expected_len: int | None) -> tuple[dict[str, Item], int | None]:
    """Validate and key a list of items. Missing ids default to the list index
    (fixed here at ingestion, so later reorderings never re-key an item)."""
    items: dict[str, Item] = {}
    feature_len = expected_len
    for index, entry in enumerate(raw):
        if isinstance(entry, Item):
            item = entry
            if item.id is None or item.id == "":
                item = replace(item, id=str(index))
        else:
            item = Item(
                id=str(entry.get("id", index)),
                src=entry.get("src"),
                features=tuple(entry["features"]) if entry.get("features") is not None else None,
                metadata=dict(entry.get("metadata", {})),
                anchor=tuple(entry["anchor"]) if entry.get("anchor") is not None else None,
            )
        if item.features is not None:
            feats = tuple(float(v) for v in item.features)
            if feature_len is None:
                feature_len = len(feats)
            elif len(feats) != feature_len:
                raise FeatureLengthError(feature_len, len(feats), item.id)
            if any(not math.isfinite(v) for v in feats):
                raise NonFiniteFeatureError(item.id)
            item = replace(item, features=feats)
        if item.anchor is not None:
            item = replace(item, anchor=(float(item.anchor[0]), float(item.anchor[1])))
        if item.id in items:
            raise DuplicateIdError(item.id)
        items[item.id] = item
    return items, feature_len


def init_state(
    raw_items: Sequence[Item | Mapping[str, Any]],
    canvas: Canvas | None = None,
    view_config: Mapping[str, Any] | None = None,
    seed: int = 0,
) -> PilingState:
    """Build the initial state: one singleton pile per item, positioned by the
    default gridded arrangement in ingestion order. Epoch starts at 0."""
    canvas = canvas or Canvas()
    items, _ = _ingest_items(raw_items, None)
    piles: dict[int, Pile] = {}
    for index, item_id in enumerate(items):
        cx, cy = grid_cell_center(canvas, index)
        piles[index] = Pile(pile_id=index, item_ids=(item_id,), x=cx, y=cy, z=index)
    return PilingState(
        items=items,
        piles=piles,
        canvas=canvas,
        view_config=dict(view_config or {}),
        rng_seed=int(seed),
        epoch=0,
        next_pile_id=len(piles),
    )


def update_items(state: PilingState, raw_items: Sequence[Item | Mapping[str, Any]]) -> PilingState:
    """Re-join a fresh item list against the current state by id.

    Matching ids are replaced in place (pile membership preserved), ids absent
    from the new list are dropped from their piles (empty piles deleted), and
    new ids join as singleton piles appended to the grid.
    """
    state = restore_dispersion(state)
    existing_len = None
    for item in state.items.values():
        if item.features is not None:
            existing_len = len(item.features)
            break
    new_items, _ = _ingest_items(raw_items, existing_len)

    merged: dict[str, Item] = {}
    for item_id, item in state.items.items():
        if item_id in new_items:
            merged[item_id] = new_items[item_id]
    appended = [i for i in new_items if i not in state.items]
    for item_id in appended:
        merged[item_id] = new_items[item_id]

    piles: dict[int, Pile] = {}
    max_z = max((p.z for p in state.piles.values()), default=-1)
    for pile_id, pile in state.piles.items():
        kept = tuple(i for i in pile.item_ids if i in merged)
        if kept:
            piles[pile_id] = replace(pile, item_ids=kept) if kept != pile.item_ids else pile
    next_id = state.next_pile_id
    slot = len(piles)
    for offset, item_id in enumerate(appended):
        cx, cy = grid_cell_center(state.canvas, slot + offset)
        piles[next_id] = Pile(pile_id=next_id, item_ids=(item_id,), x=cx, y=cy,
                              z=max_z + 1 + offset)
        next_id += 1

    return replace(
        state,
        items=merged,
        piles=piles,
        epoch=state.epoch + 1,
        next_pile_id=next_id,
        hover=None,
    )


def restore_dispersion(state: PilingState) -> PilingState:
    """Fold an active temporary dispersion back into a regular pile.

    Internal step (no epoch bump): partition-changing operations call this
    first so a dispersed pile always acts as a single unit. Keeps the pile's
    current position so a drag during dispersion is not undone.
    """
    backup = state.dispersion_backup
    if backup is None:
        return state
    piles = dict(state.piles)
    current = piles.get(backup.pile_id)
    if current is not None:
        piles[backup.pile_id] = replace(current, dispersed=False, dispersed_offsets=None)
    return replace(state, piles=piles, dispersion_backup=None)


def max_z(piles: Iterable[Pile]) -> int:
    return max((p.z for p in piles), default=-1)


def mix_seed(*parts: object) -> int:
    """Stable 64-bit sub-seed from the session seed plus salts (pile id,
    epoch, ...). Hash-based so it is identical across processes."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
