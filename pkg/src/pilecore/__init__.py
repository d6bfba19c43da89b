"""pilecore: a headless, deterministic state engine for interactive visual
piling of small multiples (grouping, arranging, previewing, browsing, and
aggregating piles), with a scripted-replay benchmark harness."""

from .aggregation import (
    AggregatorSpec,
    MatrixDatum,
    aggregate_matrices,
    apply_aggregator,
    badge_counts,
    foreshortened_preview,
    gallery_layout,
    representative_items,
)
from .arrangement import (
    ItemOffsetPolicy,
    arrange_by,
    item_offsets,
    rearrange_after_grouping,
    zoom_update,
)
from .clustering import default_cluster_count, kmeans
from .embedding import embed_2d, pca_scores
from .engine import Engine, StateDelta, diff_states
from .errors import PilingError
from .grouping import group_by, lasso_group, merge_piles, split_by
from .interaction import (
    AnimationPlan,
    GestureEvent,
    apply_gesture,
    browse_separately,
    end_temporary_disperse,
    hit_test,
    hover_preview,
    leave_layer,
    render_order,
    temporary_disperse,
    tick_animation,
)
from .model import (
    ArrangeBySpec,
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
from .viewspec import (
    ResolvedStyle,
    register_specifier,
    resolve_styles,
    set_property,
    specifier_ref,
)

__all__ = [
    "AggregatorSpec",
    "AnimationPlan",
    "ArrangeBySpec",
    "Canvas",
    "Engine",
    "GestureEvent",
    "GroupBySpec",
    "Item",
    "ItemOffsetPolicy",
    "MatrixDatum",
    "Pile",
    "PilingError",
    "PilingState",
    "ResolvedStyle",
    "SplitBySpec",
    "StateDelta",
    "Zoom",
    "aggregate_matrices",
    "apply_aggregator",
    "apply_gesture",
    "arrange_by",
    "badge_counts",
    "browse_separately",
    "default_cluster_count",
    "deserialize",
    "diff_states",
    "embed_2d",
    "end_temporary_disperse",
    "foreshortened_preview",
    "gallery_layout",
    "group_by",
    "hit_test",
    "hover_preview",
    "init_state",
    "item_offsets",
    "kmeans",
    "lasso_group",
    "leave_layer",
    "merge_piles",
    "pca_scores",
    "rearrange_after_grouping",
    "register_specifier",
    "render_order",
    "representative_items",
    "resolve_styles",
    "serialize",
    "set_property",
    "specifier_ref",
    "split_by",
    "state_hash",
    "temporary_disperse",
    "tick_animation",
    "update_items",
    "validate_partition",
    "zoom_update",
]
