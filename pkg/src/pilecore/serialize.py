"""Canonical state serialization and the 64-bit state digest.

The wire format is JSON with lexicographically sorted keys and floats printed
with 17 significant digits, so serializing the same state twice yields
byte-identical output and ``float -> text -> float`` round-trips exactly.

The digest deliberately skips the transaction counter and the pile-id
allocator: those advance on every transaction, while the digest has to answer
"is this the same piling?" for replay determinism checks and for round-trip
operations (disperse/end, browse/leave) that must restore the hash exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any

from .errors import StateParseError
from .model import (
    ENGINE_VERSION,
    ArrangeBySpec,
    Browsing,
    Canvas,
    Dragging,
    GroupBySpec,
    Idle,
    Item,
    LassoActive,
    LassoArmed,
    LayerFrame,
    Pile,
    PilingState,
    PointerMode,
    Zoom,
)

_HASH_EXCLUDED_KEYS = ("epoch", "nextPileId")


def _canonical_fragment(value: Any, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float in state document")
        if value == 0.0:
            out.append("0")  # normalize -0.0
        else:
            out.append(format(value, ".17g"))
    elif isinstance(value, str):
        out.append(json.dumps(value, ensure_ascii=False))
    elif isinstance(value, (list, tuple)):
        out.append("[")
        for i, entry in enumerate(value):
            if i:
                out.append(",")
            _canonical_fragment(entry, out)
        out.append("]")
    elif isinstance(value, dict):
        out.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                out.append(",")
            out.append(json.dumps(str(key), ensure_ascii=False))
            out.append(":")
            _canonical_fragment(value[key], out)
        out.append("}")
    else:
        raise TypeError(f"value not serializable into state document: {value!r}")


def canonical_json(document: Any) -> bytes:
    """Render a JSON-able document into canonical UTF-8 bytes."""
    out: list[str] = []
    _canonical_fragment(document, out)
    return "".join(out).encode("utf-8")


def _item_doc(item: Item) -> dict[str, Any]:
    return {
        "id": item.id,
        "src": item.src,
        "features": list(item.features) if item.features is not None else None,
        "metadata": dict(item.metadata),
        "anchor": list(item.anchor) if item.anchor is not None else None,
    }


def _pile_doc(pile: Pile) -> dict[str, Any]:
    return {
        "id": pile.pile_id,
        "itemIds": list(pile.item_ids),
        "x": pile.x,
        "y": pile.y,
        "z": pile.z,
        "layer": pile.layer,
        "dispersed": pile.dispersed,
        "dispersedOffsets": (
            [list(o) for o in pile.dispersed_offsets]
            if pile.dispersed_offsets is not None
            else None
        ),
    }


def _mode_doc(mode: PointerMode) -> dict[str, Any]:
    doc: dict[str, Any] = {"kind": mode.kind}
    if isinstance(mode, Dragging):
        doc.update(pileId=mode.pile_id, grabDx=mode.grab_dx, grabDy=mode.grab_dy,
                   lastX=mode.last_x, lastY=mode.last_y, moved=mode.moved)
    elif isinstance(mode, LassoArmed):
        doc.update(x=mode.x, y=mode.y, armedAtMs=mode.armed_at_ms)
    elif isinstance(mode, LassoActive):
        doc.update(points=[list(p) for p in mode.points])
    elif isinstance(mode, Browsing):
        doc.update(pileId=mode.pile_id)
    return doc


def _arrange_doc(spec: ArrangeBySpec | None) -> dict[str, Any] | None:
    if spec is None:
        return None
    return {"type": spec.type, "keys": list(spec.keys), "reducer": spec.reducer}


def _group_doc(spec: GroupBySpec | None) -> dict[str, Any] | None:
    if spec is None:
        return None
    return {"type": spec.type, "threshold": spec.threshold, "key": spec.key, "k": spec.k}


def state_document(state: PilingState) -> dict[str, Any]:
    """The full JSON document for a state (everything needed to round-trip)."""
    return {
        "version": ENGINE_VERSION,
        "seed": state.rng_seed,
        "canvas": {
            "width": state.canvas.width,
            "height": state.canvas.height,
            "columns": state.canvas.columns,
            "cellAspect": state.canvas.cell_aspect,
            "padding": state.canvas.padding,
        },
        "items": [_item_doc(i) for i in state.items.values()],
        "piles": [_pile_doc(p) for _, p in sorted(state.piles.items())],
        "viewConfig": dict(state.view_config),
        "epoch": state.epoch,
        "zoom": {"scale": state.zoom.scale, "tx": state.zoom.tx, "ty": state.zoom.ty},
        "nextPileId": state.next_pile_id,
        "arrangement": _arrange_doc(state.arrangement),
        "zoomGrouping": _group_doc(state.zoom_grouping),
        "dispersionBackup": _pile_doc(state.dispersion_backup)
        if state.dispersion_backup is not None
        else None,
        "mode": _mode_doc(state.mode),
        "layers": [
            {
                "pile": _pile_doc(frame.source_pile),
                "entry": sorted(sorted(part) for part in frame.entry_partition),
            }
            for frame in state.layers
        ],
        "hover": [state.hover[0], state.hover[1]] if state.hover is not None else None,
    }


def serialize(state: PilingState) -> bytes:
    return canonical_json(state_document(state))


def _parse_item(doc: dict[str, Any]) -> Item:
    return Item(
        id=doc["id"],
        src=doc.get("src"),
        features=tuple(doc["features"]) if doc.get("features") is not None else None,
        metadata=dict(doc.get("metadata", {})),
        anchor=tuple(doc["anchor"]) if doc.get("anchor") is not None else None,
    )


def _parse_pile(doc: dict[str, Any]) -> Pile:
    offsets = doc.get("dispersedOffsets")
    return Pile(
        pile_id=doc["id"],
        item_ids=tuple(doc["itemIds"]),
        x=doc["x"],
        y=doc["y"],
        z=doc.get("z", 0),
        layer=doc.get("layer", 0),
        dispersed=doc.get("dispersed", False),
        dispersed_offsets=tuple((o[0], o[1]) for o in offsets) if offsets is not None else None,
    )


def _parse_mode(doc: dict[str, Any]) -> PointerMode:
    kind = doc.get("kind", "idle")
    if kind == "idle":
        return Idle()
    if kind == "dragging":
        return Dragging(pile_id=doc["pileId"], grab_dx=doc["grabDx"], grab_dy=doc["grabDy"],
                        last_x=doc["lastX"], last_y=doc["lastY"], moved=doc.get("moved", 0.0))
    if kind == "lassoArmed":
        return LassoArmed(x=doc["x"], y=doc["y"], armed_at_ms=doc["armedAtMs"])
    if kind == "lassoActive":
        return LassoActive(points=tuple((p[0], p[1]) for p in doc["points"]))
    if kind == "browsing":
        return Browsing(pile_id=doc["pileId"])
    raise ValueError(f"unknown pointer mode {kind!r}")


def deserialize(data: bytes | str) -> PilingState:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise StateParseError(exc.msg, exc.pos) from None
    try:
        canvas_doc = doc["canvas"]
        canvas = Canvas(
            width=canvas_doc["width"],
            height=canvas_doc["height"],
            columns=canvas_doc["columns"],
            cell_aspect=canvas_doc.get("cellAspect", 1.0),
            padding=canvas_doc.get("padding", 0.0),
        )
        items = {d["id"]: _parse_item(d) for d in doc["items"]}
        piles = {d["id"]: _parse_pile(d) for d in doc["piles"]}
        zoom_doc = doc.get("zoom", {})
        arrange_doc = doc.get("arrangement")
        group_doc = doc.get("zoomGrouping")
        backup_doc = doc.get("dispersionBackup")
        hover_doc = doc.get("hover")
        return PilingState(
            items=items,
            piles=piles,
            canvas=canvas,
            view_config=dict(doc.get("viewConfig", {})),
            rng_seed=doc.get("seed", 0),
            epoch=doc.get("epoch", 0),
            zoom=Zoom(scale=zoom_doc.get("scale", 1.0), tx=zoom_doc.get("tx", 0.0),
                      ty=zoom_doc.get("ty", 0.0)),
            next_pile_id=doc.get("nextPileId", (max(piles) + 1) if piles else 0),
            arrangement=ArrangeBySpec(type=arrange_doc["type"],
                                      keys=tuple(arrange_doc.get("keys", ())),
                                      reducer=arrange_doc.get("reducer", "cover"))
            if arrange_doc
            else None,
            zoom_grouping=GroupBySpec(type=group_doc["type"],
                                      threshold=group_doc.get("threshold"),
                                      key=group_doc.get("key"), k=group_doc.get("k"))
            if group_doc
            else None,
            dispersion_backup=_parse_pile(backup_doc) if backup_doc else None,
            mode=_parse_mode(doc.get("mode", {"kind": "idle"})),
            layers=tuple(
                LayerFrame(
                    source_pile=_parse_pile(frame["pile"]),
                    entry_partition=frozenset(
                        frozenset(part) for part in frame["entry"]
                    ),
                )
                for frame in doc.get("layers", ())
            ),
            hover=(hover_doc[0], hover_doc[1]) if hover_doc is not None else None,
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise StateParseError(f"state document missing or malformed field: {exc}", 0) from None


def state_hash(state: PilingState) -> int:
    """64-bit digest over the canonical document minus volatile counters.

    Equal pilings hash equal; any difference in items, piles, view config,
    canvas, zoom, or interaction bookkeeping changes the digest with
    overwhelming probability.
    """
    doc = state_document(state)
    for key in _HASH_EXCLUDED_KEYS:
        doc.pop(key, None)
    digest = hashlib.blake2b(canonical_json(doc), digest_size=8).digest()
    return int.from_bytes(digest, "big")
