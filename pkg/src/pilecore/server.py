"""HTTP bridge exposing the engine boundary to a browser frontend.

Endpoints mirror the message-style contract: the full serialized state plus
resolved styles for (re)attachment, and one operation endpoint that applies a
transaction and answers with the state delta the UI reconciles against.

Requires the ``ui`` extra (fastapi + uvicorn).
"""

from __future__ import annotations

import json
from typing import Any

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .aggregation import AggregatorSpec, aggregate_to_json
from .engine import Engine
from .errors import PilingError
from .interaction import GestureEvent


class OpRequest(BaseModel):
    op: str
    args: dict[str, Any] = {}


def styles_json(engine: Engine) -> dict[str, Any]:
    return {
        str(pile_id): style.to_json()
        for pile_id, style in engine.resolve_styles().items()
    }


def _dispatch(engine: Engine, op: str, args: dict[str, Any]):
    if op == "groupBy":
        return engine.group_by(args["type"], args.get("objective"))
    if op == "splitBy":
        return engine.split_by(args["type"], args.get("objective"))
    if op == "arrangeBy":
        return engine.arrange_by(args["type"], args.get("objective"))
    if op == "merge":
        return engine.merge_piles(args["target"], args["sources"])
    if op == "lasso":
        return engine.lasso_group([tuple(p) for p in args["polygon"]])
    if op == "set":
        return engine.set_property(args["name"], args["value"])
    if op == "gesture":
        return engine.apply_gesture(
            GestureEvent(
                kind=args["kind"],
                x=args.get("x", 0.0),
                y=args.get("y", 0.0),
                time_ms=args.get("timeMs", 0.0),
                target=args.get("target"),
                action=args.get("action"),
                factor=args.get("factor", 1.0),
            )
        )
    if op == "disperse":
        return engine.temporary_disperse(args["pileId"])
    if op == "browseSeparately":
        return engine.browse_separately(args["pileId"])
    if op == "leaveLayer":
        return engine.leave_layer()
    if op == "hover":
        return engine.hover_preview(args["pileId"], args["itemId"])
    if op == "clearHover":
        return engine.clear_hover()
    raise PilingError(f"unknown operation {op!r}")


def create_app(engine: Engine) -> FastAPI:
    app = FastAPI(title="pilecore bridge")

    @app.get("/state")
    def get_state() -> dict[str, Any]:
        return {
            "state": json.loads(engine.serialize()),
            "styles": styles_json(engine),
            "activeDepth": engine.state.active_depth,
        }

    @app.post("/aggregate")
    def post_aggregate(request: OpRequest) -> dict[str, Any]:
        args = request.args
        try:
            spec = AggregatorSpec(
                kind=request.op,
                k=int(args.get("k", 1)),
                seed=int(args.get("seed", 0)),
                axis=args.get("axis", "rows"),
                reducer=args.get("reducer", "mean"),
            )
            result = engine.aggregate(args["pileId"], spec)
        except PilingError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except KeyError as exc:
            raise HTTPException(status_code=422, detail=f"missing argument {exc}") from exc
        return {"pileId": args["pileId"], "kind": request.op,
                "result": aggregate_to_json(result)}

    @app.get("/hash")
    def get_hash() -> dict[str, str]:
        return {"hash": f"{engine.state_hash():016x}"}

    @app.post("/op")
    def post_op(request: OpRequest) -> dict[str, Any]:
        try:
            delta = _dispatch(engine, request.op, request.args)
        except PilingError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        except KeyError as exc:
            raise HTTPException(status_code=422, detail=f"missing argument {exc}") from exc
        return {
            "delta": delta.to_json(),
            "styles": styles_json(engine),
            "activeDepth": engine.state.active_depth,
        }

    return app


def serve(engine: Engine, host: str = "127.0.0.1", port: int = 8900) -> None:
    import uvicorn

    uvicorn.run(create_app(engine), host=host, port=port)
