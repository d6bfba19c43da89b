"""Declarative view properties: global, pile-scoped, and item-scoped.

A property value is either a static scalar (validated against the property's
range when set) or a reference to a named specifier: a pure function
``pile -> value`` for pile scope or ``(item, index, pile) -> value`` for item
scope, where the index counts from the bottom of the pile (0) to the top.
Specifiers are looked up by name in a process-wide registry so serialized
states and replay scripts stay deterministic; in the state document a
reference appears as ``{"$specifier": name}``.

Resolution walks every visible pile once, invoking pile specifiers once per
pile and item specifiers once per (item, index, pile), and validates every
produced value (finite, in range). The engine caches resolved styles per
epoch, which is safe because states are immutable between transactions.
"""

from __future__ import annotations

import difflib
import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Mapping

from . import aggregation
from .arrangement import ItemOffsetPolicy, item_offsets, reapply_arrangement
from .errors import (
    PropertyRangeError,
    SpecifierValueError,
    UnknownPropertyError,
    UnknownSpecifierError,
)
from .model import Pile, PilingState, mix_seed

SPECIFIER_KEY = "$specifier"


@dataclass(frozen=True, slots=True)
class PropertyDef:
    name: str
    scope: str  # global | pile | item
    default: Any
    kind: str  # number | integer | string | choice | pair
    minimum: float | None = None
    maximum: float | None = None
    choices: tuple[str, ...] | None = None

    def check(self, value: Any) -> str | None:
        """Reason the static value is invalid, or None when acceptable."""
        if self.kind in ("number", "integer"):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return "expected a number"
            if not math.isfinite(float(value)):
                return "value must be finite"
            if self.kind == "integer" and int(value) != value:
                return "expected an integer"
            if self.minimum is not None and value < self.minimum:
                return f"minimum is {self.minimum}"
            if self.maximum is not None and value > self.maximum:
                return f"maximum is {self.maximum}"
        elif self.kind == "string":
            if not isinstance(value, str):
                return "expected a string"
        elif self.kind == "choice":
            if value not in (self.choices or ()):
                return f"expected one of {self.choices}"
        elif self.kind == "pair":
            if (
                not isinstance(value, (list, tuple))
                or len(value) != 2
                or not all(isinstance(v, (int, float)) and math.isfinite(v) for v in value)
            ):
                return "expected a pair of finite numbers"
        return None


PROPERTIES: dict[str, PropertyDef] = {
    p.name: p
    for p in [
        PropertyDef("columns", "global", 10, "integer", minimum=1),
        PropertyDef("cellAspect", "global", 1.0, "number", minimum=1e-9),
        PropertyDef("padding", "global", 0.0, "number", minimum=0.0),
        PropertyDef("pileScale", "pile", 1.0, "number", minimum=1e-9),
        PropertyDef("pileBorderSize", "pile", 1.0, "number", minimum=0.0),
        PropertyDef("pileBorderColor", "pile", "#888888", "string"),
        PropertyDef("pileLabel", "pile", "", "string"),
        PropertyDef("pileBadgeKey", "pile", "", "string"),
        PropertyDef("itemOffsetMode", "pile", "orderly", "choice",
                    choices=("orderly", "random")),
        PropertyDef("itemOffsetStep", "pile", (5.0, 5.0), "pair"),
        PropertyDef("itemOffsetMax", "pile", 10.0, "number", minimum=0.0),
        PropertyDef("itemRotationMax", "pile", 0.0, "number", minimum=0.0),
        PropertyDef("itemBrightness", "item", 0.0, "number", minimum=-1.0, maximum=1.0),
        PropertyDef("itemOpacity", "item", 1.0, "number", minimum=0.0, maximum=1.0),
        PropertyDef("itemTint", "item", "#ffffff", "string"),
    ]
}

_GLOBAL_CANVAS_FIELDS = {"columns": "columns", "cellAspect": "cell_aspect", "padding": "padding"}

_specifiers: dict[str, Callable] = {}


def register_specifier(name: str, fn: Callable) -> None:
    """Register a pure style function under a stable name."""
    _specifiers[name] = fn


def specifier(name: str) -> Callable:
    if name not in _specifiers:
        raise UnknownSpecifierError(name)
    return _specifiers[name]


def specifier_ref(name: str) -> dict[str, str]:
    """The serializable form of a specifier reference."""
    return {SPECIFIER_KEY: name}


def is_specifier_ref(value: Any) -> bool:
    return isinstance(value, Mapping) and SPECIFIER_KEY in value


# Built-in specifiers kept deliberately small; applications register their own.
register_specifier("scaleByLogCount", lambda pile: 1.0 + 0.1 * math.log2(len(pile.item_ids)))
register_specifier(
    "brightnessByIndex", lambda item, index, pile: -index / len(pile.item_ids)
)


def set_property(state: PilingState, name: str, value: Any) -> PilingState:
    """Update one view property; static values are range-checked immediately,
    specifier references only need to resolve to a registered name."""
    if name not in PROPERTIES:
        nearest = difflib.get_close_matches(name, PROPERTIES, n=1)
        raise UnknownPropertyError(name, nearest[0] if nearest else None)
    definition = PROPERTIES[name]

    if is_specifier_ref(value) or (isinstance(value, str) and value.startswith("@")):
        name_ref = value[SPECIFIER_KEY] if is_specifier_ref(value) else value[1:]
        specifier(name_ref)  # must exist
        if definition.scope == "global":
            raise PropertyRangeError(name, value, "global properties take static values")
        stored: Any = {SPECIFIER_KEY: name_ref}
    else:
        if isinstance(value, (list, tuple)):
            value = tuple(float(v) for v in value)
        reason = definition.check(value)
        if reason is not None:
            raise PropertyRangeError(name, value, reason)
        stored = list(value) if isinstance(value, tuple) else value

    if name in _GLOBAL_CANVAS_FIELDS:
        if name == "columns":
            value = int(value)
        canvas = replace(state.canvas, **{_GLOBAL_CANVAS_FIELDS[name]: value})
        state = replace(state, canvas=canvas)
        state = reapply_arrangement(state)
        return replace(state, epoch=state.epoch + 1)

    config = dict(state.view_config)
    config[name] = stored
    return replace(state, view_config=config, epoch=state.epoch + 1)


def _validated(definition: PropertyDef, value: Any, pile_id: int) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        raise SpecifierValueError(definition.name, pile_id, value)
    reason = definition.check(value)
    if reason is not None:
        raise SpecifierValueError(definition.name, pile_id, value)
    return value


def resolve_pile_property(state: PilingState, pile: Pile, name: str) -> Any:
    definition = PROPERTIES[name]
    value = state.view_config.get(name, definition.default)
    if is_specifier_ref(value):
        value = specifier(value[SPECIFIER_KEY])(pile)
        return _validated(definition, value, pile.pile_id)
    if isinstance(value, list):
        value = tuple(value)
    return value


def resolve_offset_policy(state: PilingState, pile: Pile) -> ItemOffsetPolicy:
    mode = resolve_pile_property(state, pile, "itemOffsetMode")
    step = resolve_pile_property(state, pile, "itemOffsetStep")
    return ItemOffsetPolicy(
        mode=mode,
        dx=float(step[0]),
        dy=float(step[1]),
        max_offset=float(resolve_pile_property(state, pile, "itemOffsetMax")),
        max_rotation=float(resolve_pile_property(state, pile, "itemRotationMax")),
        seed=mix_seed(state.rng_seed, "offsets"),
    )


@dataclass(frozen=True, slots=True)
class ResolvedStyle:
    """Concrete per-pile style values the renderer consumes directly."""

    scale: float
    border_size: float
    border_color: str
    label: str
    badges: dict[str, int] | None
    offset_mode: str
    offsets: tuple[tuple[float, float, float], ...]
    brightness: tuple[float, ...]
    opacity: tuple[float, ...]
    tint: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {
            "scale": self.scale,
            "borderSize": self.border_size,
            "borderColor": self.border_color,
            "label": self.label,
            "badges": self.badges,
            "offsetMode": self.offset_mode,
            "offsets": [list(o) for o in self.offsets],
            "brightness": list(self.brightness),
            "opacity": list(self.opacity),
            "tint": list(self.tint),
        }


def _resolve_item_values(state: PilingState, pile: Pile, name: str) -> tuple:
    definition = PROPERTIES[name]
    value = state.view_config.get(name, definition.default)
    if is_specifier_ref(value):
        fn = specifier(value[SPECIFIER_KEY])
        out = []
        for index, item_id in enumerate(pile.item_ids):
            produced = fn(state.items[item_id], index, pile)
            out.append(_validated(definition, produced, pile.pile_id))
        return tuple(out)
    return tuple(value for _ in pile.item_ids)


def resolve_styles(state: PilingState) -> dict[int, ResolvedStyle]:
    """Resolve every visible pile's style. Pure; same state gives the same map."""
    styles: dict[int, ResolvedStyle] = {}
    for pile in state.active_piles():
        policy = resolve_offset_policy(state, pile)
        if pile.dispersed and pile.dispersed_offsets is not None:
            offsets = tuple((dx, dy, 0.0) for dx, dy in pile.dispersed_offsets)
        else:
            offsets = tuple(item_offsets(pile, policy))
        badge_key = resolve_pile_property(state, pile, "pileBadgeKey")
        badges = (
            aggregation.badge_counts(state, pile, badge_key) if badge_key else None
        )
        styles[pile.pile_id] = ResolvedStyle(
            scale=float(resolve_pile_property(state, pile, "pileScale")),
            border_size=float(resolve_pile_property(state, pile, "pileBorderSize")),
            border_color=resolve_pile_property(state, pile, "pileBorderColor"),
            label=resolve_pile_property(state, pile, "pileLabel"),
            badges=badges,
            offset_mode=policy.mode,
            offsets=offsets,
            brightness=_resolve_item_values(state, pile, "itemBrightness"),
            opacity=_resolve_item_values(state, pile, "itemOpacity"),
            tint=_resolve_item_values(state, pile, "itemTint"),
        )
    return styles
