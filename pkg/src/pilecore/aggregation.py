"""Pile summaries: cell-wise matrix statistics, representative members,
one-axis foreshortened previews, gallery slot tilings, and badge histograms.

Matrix statistics ignore masked cells; an output cell is masked only when the
cell is masked in every input. Variance is the population variance (the pile
is the whole population being summarized), and std is its square root.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .clustering import kmeans
from .errors import (
    ClusterCountError,
    EmptyInputError,
    MissingFeaturesError,
    MissingMetadataError,
    ShapeMismatchError,
    UnsupportedGallerySizeError,
)
from .model import Pile, PilingState

GALLERY_SIZES = (1, 2, 3, 4, 6, 8, 9)

AGGREGATOR_KINDS = ("mean", "variance", "std", "representative", "foreshortened")


@dataclass(frozen=True)
class MatrixDatum:
    """A small dense matrix with an optional missing-cell mask (True = missing).

    ``values`` and ``mask`` are flat row-major arrays of length rows*cols.
    """

    rows: int
    cols: int
    values: np.ndarray
    mask: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ShapeMismatchError((self.rows, self.cols), (1, 1))
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if values.size != self.rows * self.cols:
            raise ShapeMismatchError((self.rows, self.cols),
                                     (1, int(values.size)))
        object.__setattr__(self, "values", values)
        if self.mask is None:
            object.__setattr__(self, "mask", np.zeros(values.size, dtype=bool))
        else:
            mask = np.asarray(self.mask, dtype=bool).reshape(-1)
            if mask.size != values.size:
                raise ShapeMismatchError((self.rows, self.cols), (1, int(mask.size)))
            object.__setattr__(self, "mask", mask)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def grid(self) -> np.ndarray:
        return self.values.reshape(self.rows, self.cols)

    def mask_grid(self) -> np.ndarray:
        return self.mask.reshape(self.rows, self.cols)

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "MatrixDatum":
        return cls(rows=int(doc["rows"]), cols=int(doc["cols"]),
                   values=np.asarray(doc["values"], dtype=np.float64),
                   mask=np.asarray(doc["mask"], dtype=bool) if doc.get("mask") else None)

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "rows": self.rows,
            "cols": self.cols,
            "values": [float(v) for v in self.values],
        }
        if self.mask.any():
            doc["mask"] = [bool(m) for m in self.mask]
        return doc


def aggregate_matrices(matrices: Sequence[MatrixDatum], kind: str) -> MatrixDatum:
    """Cell-wise mean, variance, or std over a stack of same-shape matrices."""
    if not matrices:
        raise EmptyInputError("cannot aggregate an empty matrix list")
    if kind not in ("mean", "variance", "std"):
        raise EmptyInputError(f"unknown aggregation kind {kind!r}")
    shape = matrices[0].shape
    for m in matrices[1:]:
        if m.shape != shape:
            raise ShapeMismatchError(shape, m.shape)

    stack = np.stack([m.values for m in matrices])
    masks = np.stack([m.mask for m in matrices])
    valid = ~masks
    counts = valid.sum(axis=0)
    out_mask = counts == 0
    safe_counts = np.maximum(counts, 1)

    total = np.where(valid, stack, 0.0).sum(axis=0)
    mean = total / safe_counts
    if kind == "mean":
        out = mean
    else:
        squared = np.where(valid, (stack - mean[None, :]) ** 2, 0.0).sum(axis=0)
        variance = squared / safe_counts
        out = variance if kind == "variance" else np.sqrt(variance)
    out = np.where(out_mask, 0.0, out)
    return MatrixDatum(rows=shape[0], cols=shape[1], values=out, mask=out_mask)


def foreshortened_preview(
    matrix: MatrixDatum, axis: str, reducer: str = "mean"
) -> tuple[np.ndarray, np.ndarray]:
    """Collapse one axis into a strip: ``axis='rows'`` collapses the rows and
    yields one value per column, ``axis='cols'`` one value per row.

    Returns (values, mask); a strip entry is masked when its whole lane was.
    """
    if axis not in ("rows", "cols"):
        raise EmptyInputError(f"unknown axis {axis!r}")
    if reducer not in ("mean", "max", "min"):
        raise EmptyInputError(f"unknown reducer {reducer!r}")
    grid = matrix.grid()
    mask = matrix.mask_grid()
    np_axis = 0 if axis == "rows" else 1
    data = np.ma.masked_array(grid, mask=mask)
    if reducer == "mean":
        reduced = data.mean(axis=np_axis)
    elif reducer == "max":
        reduced = data.max(axis=np_axis)
    else:
        reduced = data.min(axis=np_axis)
    out_mask = np.ma.getmaskarray(reduced).copy()
    out = np.where(out_mask, 0.0, np.ma.filled(reduced, 0.0))
    return out, out_mask


def representative_items(
    state: PilingState,
    pile: Pile,
    k: int,
    seed: int,
    feature_source: Callable[[Any], Sequence[float]] | None = None,
) -> list[str]:
    """The k member items nearest the k cluster centroids of the pile.

    Each item represents at most one centroid (greedy by ascending distance);
    the result is ordered by cluster size, largest first.
    """
    if not 1 <= k <= len(pile.item_ids):
        raise ClusterCountError(k, len(pile.item_ids))
    vectors = []
    missing = []
    for item_id in pile.item_ids:
        item = state.items[item_id]
        feats = feature_source(item) if feature_source else item.features
        if feats is None:
            missing.append(item_id)
        else:
            vectors.append([float(v) for v in feats])
    if missing:
        raise MissingFeaturesError(missing)

    assignments, centroids = kmeans(vectors, k=k, seed=seed)
    x = np.asarray(vectors, dtype=np.float64)
    sizes = Counter(assignments)

    candidates = []
    for idx, item_id in enumerate(pile.item_ids):
        for cluster in range(k):
            d = float(np.sum((x[idx] - centroids[cluster]) ** 2))
            candidates.append((d, idx, cluster))
    candidates.sort()

    chosen: dict[int, int] = {}
    used_items: set[int] = set()
    for _, idx, cluster in candidates:
        if cluster in chosen or idx in used_items:
            continue
        chosen[cluster] = idx
        used_items.add(idx)
        if len(chosen) == k:
            break

    ordered = sorted(chosen, key=lambda c: (-sizes.get(c, 0), c))
    return [pile.item_ids[chosen[c]] for c in ordered]


def gallery_layout(
    k: int, cover_size: tuple[float, float]
) -> list[tuple[int, int, int, int]]:
    """Slot rectangles (x, y, w, h) tiling the cover exactly, in integer pixel
    space with any remainder pushed into the last row/column.

    Supported sizes: 1 (the full cover), 2, 3 (large left slot + two stacked
    right), 4, 6, 8, and 9.
    """
    if k not in GALLERY_SIZES:
        raise UnsupportedGallerySizeError(k)
    width, height = int(cover_size[0]), int(cover_size[1])

    def edges(total: int, parts: int) -> list[int]:
        cuts = [total * i // parts for i in range(parts)]
        cuts.append(total)
        return cuts

    if k == 1:
        return [(0, 0, width, height)]
    if k == 3:
        left_w = width * 2 // 3
        ys = edges(height, 2)
        return [
            (0, 0, left_w, height),
            (left_w, ys[0], width - left_w, ys[1] - ys[0]),
            (left_w, ys[1], width - left_w, ys[2] - ys[1]),
        ]
    grid_shape = {2: (1, 2), 4: (2, 2), 6: (2, 3), 8: (2, 4), 9: (3, 3)}[k]
    rows, cols = grid_shape
    xs = edges(width, cols)
    ys = edges(height, rows)
    slots = []
    for r in range(rows):
        for c in range(cols):
            slots.append((xs[c], ys[r], xs[c + 1] - xs[c], ys[r + 1] - ys[r]))
    return slots


def badge_counts(state: PilingState, pile: Pile, metadata_key: str) -> dict[str, int]:
    """Exact histogram of a categorical metadata key across the pile."""
    missing = [i for i in pile.item_ids if metadata_key not in state.items[i].metadata]
    if missing:
        raise MissingMetadataError(metadata_key, missing)
    counts = Counter(str(state.items[i].metadata[metadata_key]) for i in pile.item_ids)
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class AggregatorSpec:
    """Which summary to compute for a pile and how.

    mean/variance/std synthesize one matrix from the members' matrix
    payloads; representative picks the k nearest-to-centroid member ids;
    foreshortened collapses each member matrix into a one-axis strip.
    """

    kind: str
    k: int = 1
    seed: int = 0
    axis: str = "rows"
    reducer: str = "mean"

    def __post_init__(self) -> None:
        if self.kind not in AGGREGATOR_KINDS:
            raise EmptyInputError(f"unknown aggregator kind {self.kind!r}")
        if self.k < 1:
            raise EmptyInputError("representative count must be at least 1")
        if self.axis not in ("rows", "cols"):
            raise EmptyInputError(f"unknown axis {self.axis!r}")
        if self.reducer not in ("mean", "max", "min"):
            raise EmptyInputError(f"unknown reducer {self.reducer!r}")


def _member_matrices(state: PilingState, pile: Pile) -> list[MatrixDatum]:
    matrices = []
    for item_id in pile.item_ids:
        src = state.items[item_id].src
        if not isinstance(src, Mapping) or "rows" not in src or "values" not in src:
            raise EmptyInputError(
                f"item {item_id!r} carries no matrix payload to aggregate"
            )
        matrices.append(MatrixDatum.from_json(src))
    return matrices


def apply_aggregator(state: PilingState, pile: Pile, spec: AggregatorSpec):
    """Run one aggregator against a pile.

    Returns a MatrixDatum for the synthesized kinds, an ordered id list for
    representative, or one (values, mask) strip per member item for
    foreshortened.
    """
    if spec.kind in ("mean", "variance", "std"):
        return aggregate_matrices(_member_matrices(state, pile), spec.kind)
    if spec.kind == "representative":
        return representative_items(state, pile, k=spec.k, seed=spec.seed)
    strips = [
        foreshortened_preview(m, spec.axis, spec.reducer)
        for m in _member_matrices(state, pile)
    ]
    return strips


def aggregate_to_json(result) -> Any:
    """Wire form of an apply_aggregator result for the message boundary."""
    if isinstance(result, MatrixDatum):
        return result.to_json()
    if isinstance(result, list) and result and isinstance(result[0], tuple):
        return [
            {"values": [float(v) for v in values], "mask": [bool(m) for m in mask]}
            for values, mask in result
        ]
    return list(result)
