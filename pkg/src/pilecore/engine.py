"""Single-writer engine facade over the pure state operations.

All mutations funnel through one lock so transactions apply strictly in
arrival order; snapshots handed out are immutable values, safe to share with
any thread. Long computations can read a snapshot off the update path and
try to commit later: the commit is rejected when the epoch moved past the
read epoch (the result is stale and gets discarded).

Every mutation returns a StateDelta, the message-style boundary the UI
consumes: the new epoch, the piles that changed or vanished, and an optional
animation plan for position transitions.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

from . import aggregation, grouping, interaction, viewspec
from .arrangement import ArrangeBySpec, arrange_by, rearrange_after_grouping, zoom_update
from .errors import PilingError, StaleEpochError
from .interaction import AnimationPlan, GestureEvent, plan_between
from .model import (
    Canvas,
    GroupBySpec,
    Item,
    Pile,
    PilingState,
    SplitBySpec,
    Zoom,
    init_state,
    update_items,
    validate_partition,
)
from .serialize import deserialize, serialize, state_hash
from .viewspec import ResolvedStyle


@dataclass(frozen=True)
class StateDelta:
    """What a transaction changed, keyed for cheap UI reconciliation."""

    epoch: int
    changed_piles: tuple[Pile, ...]
    removed_piles: tuple[int, ...]
    animation: AnimationPlan | None = None

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "epoch": self.epoch,
            "changedPiles": [
                {
                    "id": p.pile_id,
                    "itemIds": list(p.item_ids),
                    "x": p.x,
                    "y": p.y,
                    "z": p.z,
                    "layer": p.layer,
                    "dispersed": p.dispersed,
                    "dispersedOffsets": [list(o) for o in p.dispersed_offsets]
                    if p.dispersed_offsets
                    else None,
                }
                for p in self.changed_piles
            ],
            "removedPiles": list(self.removed_piles),
            "animationPlan": None,
        }
        if self.animation is not None:
            doc["animationPlan"] = {
                "durationMs": self.animation.duration_ms,
                "easing": self.animation.easing,
                "epoch": self.animation.epoch,
                "keyframes": {
                    str(pid): {
                        "start": list(frame.start),
                        "end": list(frame.end),
                        "startScale": frame.start_scale,
                        "endScale": frame.end_scale,
                    }
                    for pid, frame in self.animation.keyframes.items()
                },
            }
        return doc


def diff_states(old: PilingState, new: PilingState,
                animation: AnimationPlan | None = None) -> StateDelta:
    changed = tuple(
        pile
        for pile_id, pile in sorted(new.piles.items())
        if old.piles.get(pile_id) != pile
    )
    removed = tuple(sorted(pid for pid in old.piles if pid not in new.piles))
    return StateDelta(epoch=new.epoch, changed_piles=changed, removed_piles=removed,
                      animation=animation)


class Engine:
    """Owns the canonical state and serializes every mutation."""

    def __init__(
        self,
        items: Sequence[Item | Mapping[str, Any]] = (),
        canvas: Canvas | None = None,
        view_config: Mapping[str, Any] | None = None,
        seed: int = 0,
        check_invariants: bool = False,
    ):
        self._lock = threading.Lock()
        self._state = init_state(items, canvas=canvas, view_config=view_config, seed=seed)
        self._check = check_invariants
        self._style_cache: tuple[int, dict[int, ResolvedStyle]] | None = None

    @classmethod
    def from_state(cls, state: PilingState, check_invariants: bool = False) -> "Engine":
        engine = cls.__new__(cls)
        engine._lock = threading.Lock()
        engine._state = state
        engine._check = check_invariants
        engine._style_cache = None
        return engine

    @property
    def state(self) -> PilingState:
        return self._state

    @property
    def epoch(self) -> int:
        return self._state.epoch

    def state_hash(self) -> int:
        return state_hash(self._state)

    def serialize(self) -> bytes:
        return serialize(self._state)

    @classmethod
    def from_serialized(cls, data: bytes | str) -> "Engine":
        return cls.from_state(deserialize(data))

    # -- transactional core ------------------------------------------------

    def _apply(
        self,
        fn: Callable[[PilingState], PilingState],
        animation: AnimationPlan | None = None,
        plan_moves: bool = False,
    ) -> StateDelta:
        with self._lock:
            old = self._state
            new = fn(old)
            if self._check:
                validate_partition(new)
            self._state = new
            plan = animation
            if plan is None and plan_moves:
                plan = plan_between(old, new)
            return diff_states(old, new, plan)

    def begin_read(self) -> tuple[PilingState, int]:
        """Snapshot plus its epoch, for off-path computations."""
        state = self._state
        return state, state.epoch

    def commit(self, new_state: PilingState, read_epoch: int) -> StateDelta:
        """Commit a state computed off the update path; rejected as stale when
        the engine advanced past the epoch the computation read."""
        with self._lock:
            if self._state.epoch != read_epoch:
                raise StaleEpochError(read_epoch, self._state.epoch)
            old = self._state
            if self._check:
                validate_partition(new_state)
            self._state = new_state
            return diff_states(old, new_state)

    # -- operations ---------------------------------------------------------

    def update_items(self, items: Sequence[Item | Mapping[str, Any]]) -> StateDelta:
        return self._apply(lambda s: update_items(s, items))

    def merge_piles(self, target_id: int, source_ids: Sequence[int]) -> StateDelta:
        return self._apply(lambda s: grouping.merge_piles(s, target_id, source_ids),
                           plan_moves=True)

    def lasso_group(self, polygon: Sequence[tuple[float, float]]) -> StateDelta:
        return self._apply(lambda s: grouping.lasso_group(s, polygon), plan_moves=True)

    def group_by(self, type: str, objective: Any = None, **kwargs: Any) -> StateDelta:
        spec = _group_spec(type, objective, **kwargs)
        return self._apply(lambda s: grouping.group_by(s, spec), plan_moves=True)

    def split_by(self, type: str, objective: Any = None, **kwargs: Any) -> StateDelta:
        spec = _split_spec(type, objective, **kwargs)
        return self._apply(lambda s: grouping.split_by(s, spec), plan_moves=True)

    def arrange_by(self, type: str, objective: Any = None, reducer: str = "cover") -> StateDelta:
        keys: tuple[str, ...]
        if objective is None:
            keys = ()
        elif isinstance(objective, str):
            keys = (objective,)
        else:
            keys = tuple(objective)
        spec = ArrangeBySpec(type=type, keys=keys, reducer=reducer)
        return self._apply(lambda s: arrange_by(s, spec), plan_moves=True)

    def rearrange(self) -> StateDelta:
        return self._apply(rearrange_after_grouping, plan_moves=True)

    def set_zoom(self, scale: float, tx: float = 0.0, ty: float = 0.0) -> StateDelta:
        return self._apply(lambda s: zoom_update(s, Zoom(scale=scale, tx=tx, ty=ty)),
                           plan_moves=True)

    def set_property(self, name: str, value: Any) -> StateDelta:
        return self._apply(lambda s: viewspec.set_property(s, name, value))

    def apply_gesture(self, event: GestureEvent) -> StateDelta:
        with self._lock:
            old = self._state
            new, plan = interaction.apply_gesture(old, event)
            if self._check:
                validate_partition(new)
            self._state = new
            return diff_states(old, new, plan)

    def temporary_disperse(self, pile_id: int) -> StateDelta:
        return self._apply(lambda s: interaction.temporary_disperse(s, pile_id))

    def end_temporary_disperse(self) -> StateDelta:
        return self._apply(interaction.end_temporary_disperse)

    def browse_separately(self, pile_id: int) -> StateDelta:
        return self._apply(lambda s: interaction.browse_separately(s, pile_id),
                           plan_moves=True)

    def leave_layer(self) -> StateDelta:
        return self._apply(interaction.leave_layer, plan_moves=True)

    def hover_preview(self, pile_id: int, item_id: str) -> StateDelta:
        return self._apply(lambda s: interaction.hover_preview(s, pile_id, item_id))

    def clear_hover(self) -> StateDelta:
        return self._apply(interaction.clear_hover)

    # -- read-side ----------------------------------------------------------

    def aggregate(self, pile_id: int, spec: "aggregation.AggregatorSpec"):
        """Pile summary over the message boundary; read-only, no transaction."""
        state = self._state
        if pile_id not in state.piles:
            raise PilingError(f"unknown pile id: {pile_id}")
        return aggregation.apply_aggregator(state, state.piles[pile_id], spec)

    def resolve_styles(self) -> dict[int, ResolvedStyle]:
        """Resolved styles for the current epoch, cached until the next
        transaction (styles are pure over the snapshot)."""
        state = self._state
        cached = self._style_cache
        if cached is not None and cached[0] == state.epoch:
            return cached[1]
        styles = viewspec.resolve_styles(state)
        self._style_cache = (state.epoch, styles)
        return styles


def _group_spec(type: str, objective: Any = None, **kwargs: Any) -> GroupBySpec:
    if type == "distance":
        return GroupBySpec(type=type, threshold=float(objective), **kwargs)
    if type == "category":
        return GroupBySpec(type=type, key=str(objective), **kwargs)
    if type == "cluster":
        k = kwargs.pop("k", None)
        if objective is not None:
            k = int(objective)
        return GroupBySpec(type=type, k=k, **kwargs)
    return GroupBySpec(type=type, **kwargs)


def _split_spec(type: str, objective: Any = None, **kwargs: Any) -> SplitBySpec:
    if type == "distance":
        return SplitBySpec(type=type, threshold=float(objective), **kwargs)
    if type == "category":
        return SplitBySpec(type=type, key=str(objective), **kwargs)
    if type == "cluster":
        k = kwargs.pop("k", None)
        if objective is not None:
            k = int(objective)
        return SplitBySpec(type=type, k=k, **kwargs)
    return SplitBySpec(type=type, **kwargs)
