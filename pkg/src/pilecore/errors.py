"""Exception types raised by the piling engine.

Every engine error derives from PilingError so callers (CLI, server, UI
bridge) can catch one base class and report the message.
"""

from __future__ import annotations


class PilingError(Exception):
    """Base class for all engine errors."""


class DuplicateIdError(PilingError):
    def __init__(self, item_id: str):
        super().__init__(f"duplicate item id: {item_id!r}")
        self.item_id = item_id


class FeatureLengthError(PilingError):
    def __init__(self, expected: int, got: int, item_id: str):
        super().__init__(
            f"feature vector of item {item_id!r} has length {got}, expected {expected}"
        )
        self.expected = expected
        self.got = got
        self.item_id = item_id


class NonFiniteFeatureError(PilingError):
    def __init__(self, item_id: str):
        super().__init__(f"item {item_id!r} carries a non-finite feature value")
        self.item_id = item_id


class UnknownPileError(PilingError):
    def __init__(self, pile_id: int):
        super().__init__(f"unknown pile id: {pile_id}")
        self.pile_id = pile_id


class SelfMergeError(PilingError):
    def __init__(self, pile_id: int):
        super().__init__(f"pile {pile_id} cannot be merged into itself")
        self.pile_id = pile_id


class HiddenPileError(PilingError):
    def __init__(self, pile_id: int):
        super().__init__(f"pile {pile_id} is not on the active layer")
        self.pile_id = pile_id


class PolygonError(PilingError):
    pass


class MissingMetadataError(PilingError):
    def __init__(self, key: str, item_ids: list[str]):
        shown = ", ".join(repr(i) for i in item_ids[:10])
        super().__init__(f"metadata key {key!r} missing on items: {shown}")
        self.key = key
        self.item_ids = item_ids


class MissingFeaturesError(PilingError):
    def __init__(self, item_ids: list[str]):
        shown = ", ".join(repr(i) for i in item_ids[:10])
        super().__init__(f"items without feature vectors: {shown}")
        self.item_ids = item_ids


class ClusterCountError(PilingError):
    def __init__(self, k: int, n: int):
        super().__init__(f"cannot form {k} clusters from {n} vectors")
        self.k = k
        self.n = n


class ShapeMismatchError(PilingError):
    def __init__(self, shape_a: tuple[int, int], shape_b: tuple[int, int]):
        super().__init__(f"matrix shapes differ: {shape_a} vs {shape_b}")
        self.shape_a = shape_a
        self.shape_b = shape_b


class EmptyInputError(PilingError):
    pass


class UnsupportedGallerySizeError(PilingError):
    def __init__(self, k: int):
        super().__init__(f"unsupported gallery size {k}; supported: 1, 2, 3, 4, 6, 8, 9")
        self.k = k


class UnknownPropertyError(PilingError):
    def __init__(self, name: str, nearest: str | None = None):
        hint = f" (did you mean {nearest!r}?)" if nearest else ""
        super().__init__(f"unknown view property {name!r}{hint}")
        self.name = name
        self.nearest = nearest


class PropertyRangeError(PilingError):
    def __init__(self, name: str, value: object, reason: str):
        super().__init__(f"value {value!r} for property {name!r} out of range: {reason}")
        self.name = name
        self.value = value


class SpecifierValueError(PilingError):
    def __init__(self, name: str, pile_id: int, value: object):
        super().__init__(
            f"specifier for property {name!r} produced invalid value {value!r} on pile {pile_id}"
        )
        self.name = name
        self.pile_id = pile_id
        self.value = value


class UnknownSpecifierError(PilingError):
    def __init__(self, name: str):
        super().__init__(f"no specifier registered under name {name!r}")
        self.name = name


class LayerDepthError(PilingError):
    def __init__(self, depth: int):
        super().__init__(f"cannot open another browse layer at depth {depth}")
        self.depth = depth


class ItemNotInPileError(PilingError):
    def __init__(self, item_id: str, pile_id: int):
        super().__init__(f"item {item_id!r} is not on pile {pile_id}")
        self.item_id = item_id
        self.pile_id = pile_id


class GridBoundsError(PilingError):
    def __init__(self, pile_id: int, col: int, columns: int):
        super().__init__(f"pile {pile_id}: column {col} outside grid of {columns} columns")
        self.pile_id = pile_id


class MissingAccessorError(PilingError):
    def __init__(self, key: str, pile_ids: list[int]):
        shown = ", ".join(str(p) for p in pile_ids[:10])
        super().__init__(f"arrangement key {key!r} unresolvable for piles: {shown}")
        self.key = key
        self.pile_ids = pile_ids


class StateParseError(PilingError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"malformed state document at byte {offset}: {message}")
        self.offset = offset


class ScriptParseError(PilingError):
    def __init__(self, message: str, line: int):
        super().__init__(f"script line {line}: {message}")
        self.line = line


class StaleEpochError(PilingError):
    def __init__(self, read_epoch: int, current_epoch: int):
        super().__init__(
            f"transaction read at epoch {read_epoch} but state is at {current_epoch}"
        )
        self.read_epoch = read_epoch
        self.current_epoch = current_epoch
