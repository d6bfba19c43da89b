"""Interaction-script parsing for headless replay.

Line grammar (UTF-8, ``#`` starts a comment):

    @seed 42                      header directives (defaults; CLI overrides)
    @dataset points:1000
    @canvas 1000 800 10
    @repeat 10
    <timestampMs> <verb> <args...>

Verbs: ``arrangeBy type [keys...]``, ``groupBy type [objective]``,
``splitBy type [objective]``, ``merge target source...``,
``lasso x,y x,y x,y...``, ``down x y``, ``move x y``, ``up x y``,
``dblclick pileId``, ``ctx browseSeparately pileId``, ``ctx leave``,
``zoom factor``, ``set name value``. Timestamps must be non-decreasing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import ScriptParseError

VERBS = {
    "arrangeBy", "groupBy", "splitBy", "merge", "lasso",
    "down", "move", "up", "dblclick", "ctx", "zoom", "set",
}

GROUP_TYPES = {"distance", "overlap", "grid", "column", "row", "category", "cluster"}
SPLIT_TYPES = {"overlap", "distance", "category", "cluster"}
ARRANGE_TYPES = {"index", "ij", "xy", "uv", "data"}


@dataclass(frozen=True, slots=True)
class Command:
    time_ms: float
    verb: str
    args: tuple[Any, ...]
    line: int


@dataclass(frozen=True, slots=True)
class ScriptHeader:
    seed: int | None = None
    dataset: str | None = None  # "points:1000" | "matrix:500"
    canvas: tuple[float, float, int] | None = None  # width height columns
    repeat: int | None = None


@dataclass(frozen=True, slots=True)
class InteractionScript:
    header: ScriptHeader
    commands: tuple[Command, ...] = field(default_factory=tuple)


def _parse_float(token: str, line: int, what: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ScriptParseError(f"{what} must be a number, got {token!r}", line) from None


def _parse_int(token: str, line: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ScriptParseError(f"{what} must be an integer, got {token!r}", line) from None


def _parse_point(token: str, line: int) -> tuple[float, float]:
    parts = token.split(",")
    if len(parts) != 2:
        raise ScriptParseError(f"expected x,y pair, got {token!r}", line)
    return (_parse_float(parts[0], line, "x"), _parse_float(parts[1], line, "y"))


def _need(args: list[str], count: int, line: int, verb: str) -> None:
    if len(args) != count:
        raise ScriptParseError(
            f"{verb} takes {count} argument(s), got {len(args)}", line
        )


def _parse_command(time_ms: float, verb: str, args: list[str], line: int) -> Command:
    if verb == "arrangeBy":
        if not args or args[0] not in ARRANGE_TYPES:
            raise ScriptParseError(
                f"arrangeBy needs a type from {sorted(ARRANGE_TYPES)}", line
            )
        return Command(time_ms, verb, (args[0], tuple(args[1:])), line)

    if verb in ("groupBy", "splitBy"):
        valid = GROUP_TYPES if verb == "groupBy" else SPLIT_TYPES
        if not args or args[0] not in valid:
            raise ScriptParseError(f"{verb} needs a type from {sorted(valid)}", line)
        kind = args[0]
        rest = args[1:]
        if kind == "distance":
            _need(rest, 1, line, f"{verb} distance")
            return Command(time_ms, verb, (kind, _parse_float(rest[0], line, "threshold")), line)
        if kind == "category":
            _need(rest, 1, line, f"{verb} category")
            return Command(time_ms, verb, (kind, rest[0]), line)
        if kind == "cluster":
            if len(rest) > 1:
                raise ScriptParseError(f"{verb} cluster takes at most one k", line)
            k = _parse_int(rest[0], line, "k") if rest else None
            return Command(time_ms, verb, (kind, k), line)
        if rest:
            raise ScriptParseError(f"{verb} {kind} takes no objective", line)
        return Command(time_ms, verb, (kind, None), line)

    if verb == "merge":
        if len(args) < 2:
            raise ScriptParseError("merge needs a target and at least one source", line)
        ids = [_parse_int(a, line, "pile id") for a in args]
        return Command(time_ms, verb, (ids[0], tuple(ids[1:])), line)

    if verb == "lasso":
        if len(args) < 3:
            raise ScriptParseError("lasso needs at least 3 points", line)
        return Command(time_ms, verb, (tuple(_parse_point(a, line) for a in args),), line)

    if verb in ("down", "move", "up"):
        _need(args, 2, line, verb)
        return Command(
            time_ms,
            verb,
            (_parse_float(args[0], line, "x"), _parse_float(args[1], line, "y")),
            line,
        )

    if verb == "dblclick":
        _need(args, 1, line, verb)
        return Command(time_ms, verb, (_parse_int(args[0], line, "pile id"),), line)

    if verb == "ctx":
        if not args:
            raise ScriptParseError("ctx needs an action", line)
        if args[0] == "leave":
            _need(args, 1, line, "ctx leave")
            return Command(time_ms, verb, ("leave", None), line)
        if args[0] == "browseSeparately":
            _need(args, 2, line, "ctx browseSeparately")
            return Command(
                time_ms, verb, ("browseSeparately", _parse_int(args[1], line, "pile id")), line
            )
        raise ScriptParseError(f"unknown ctx action {args[0]!r}", line)

    if verb == "zoom":
        _need(args, 1, line, verb)
        return Command(time_ms, verb, (_parse_float(args[0], line, "factor"),), line)

    if verb == "set":
        if len(args) < 2:
            raise ScriptParseError("set needs a property name and a value", line)
        raw = " ".join(args[1:])
        if raw.startswith("@"):
            value: Any = raw
        else:
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
        return Command(time_ms, verb, (args[0], value), line)

    raise ScriptParseError(f"unknown command {verb!r}", line)


def _parse_header_directive(header: dict, tokens: list[str], line: int) -> None:
    directive = tokens[0]
    if directive == "@seed":
        _need(tokens[1:], 1, line, "@seed")
        header["seed"] = _parse_int(tokens[1], line, "seed")
    elif directive == "@dataset":
        _need(tokens[1:], 1, line, "@dataset")
        header["dataset"] = tokens[1]
    elif directive == "@canvas":
        _need(tokens[1:], 3, line, "@canvas")
        header["canvas"] = (
            _parse_float(tokens[1], line, "width"),
            _parse_float(tokens[2], line, "height"),
            _parse_int(tokens[3], line, "columns"),
        )
    elif directive == "@repeat":
        _need(tokens[1:], 1, line, "@repeat")
        header["repeat"] = _parse_int(tokens[1], line, "repeat")
    else:
        raise ScriptParseError(f"unknown directive {directive!r}", line)


def parse_script(data: bytes | str) -> InteractionScript:
    """Parse script text; any structural problem reports its line number."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ScriptParseError(f"not valid UTF-8: {exc.reason}", 0) from None

    header: dict = {}
    commands: list[Command] = []
    last_time = None
    for line_no, raw_line in enumerate(data.splitlines(), start=1):
        text = raw_line.split("#", 1)[0].strip()
        if not text:
            continue
        tokens = text.split()
        if tokens[0].startswith("@"):
            if commands:
                raise ScriptParseError("header directives must precede commands", line_no)
            _parse_header_directive(header, tokens, line_no)
            continue
        if len(tokens) < 2:
            raise ScriptParseError("expected '<timestampMs> <verb> ...'", line_no)
        time_ms = _parse_float(tokens[0], line_no, "timestamp")
        verb = tokens[1]
        if verb not in VERBS:
            raise ScriptParseError(f"unknown command {verb!r}", line_no)
        if last_time is not None and time_ms < last_time:
            raise ScriptParseError(
                f"timestamp {time_ms:g} decreases (previous {last_time:g})", line_no
            )
        last_time = time_ms
        commands.append(_parse_command(time_ms, verb, tokens[2:], line_no))

    return InteractionScript(header=ScriptHeader(**header), commands=tuple(commands))
