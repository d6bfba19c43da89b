from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pilecore.errors import (
    DuplicateIdError,
    FeatureLengthError,
    NonFiniteFeatureError,
    StateParseError,
)
from pilecore.model import (
    Canvas,
    init_state,
    update_items,
    validate_partition,
)
from pilecore.serialize import deserialize, serialize, state_hash


def make_items(n, **extra):
    return [dict(src=f"payload-{i}", **extra) for i in range(n)]


def test_default_ids_are_list_indices_in_grid_order():
    state = init_state(make_items(4), canvas=Canvas(width=100, height=100, columns=2))
    assert sorted(state.items) == ["0", "1", "2", "3"]
    assert len(state.piles) == 4
    # row-major: cells are 50x50, centers at 25/75
    positions = [state.piles[i].position for i in range(4)]
    assert positions == [(25.0, 25.0), (75.0, 25.0), (25.0, 75.0), (75.0, 75.0)]
    assert state.epoch == 0
    validate_partition(state)


def test_empty_dataset_is_valid():
    state = init_state([])
    assert state.items == {}
    assert state.piles == {}
    validate_partition(state)


def test_duplicate_id_rejected_by_name():
    with pytest.raises(DuplicateIdError) as err:
        init_state([{"id": "a"}, {"id": "a"}])
    assert err.value.item_id == "a"


def test_inconsistent_feature_length_reports_both():
    with pytest.raises(FeatureLengthError) as err:
        init_state([{"features": [1.0, 2.0]}, {"features": [1.0, 2.0, 3.0]}])
    assert err.value.expected == 2
    assert err.value.got == 3


def test_non_finite_features_rejected():
    with pytest.raises(NonFiniteFeatureError):
        init_state([{"features": [1.0, float("nan")]}])


def test_update_items_join_contract():
    state = init_state([{"id": "a"}, {"id": "b"}, {"id": "c"}])
    updated = update_items(
        state,
        [
            {"id": "a", "src": "a-v2"},
            {"id": "c", "src": "c-v2"},
            {"id": "d", "src": "d-new"},
        ],
    )
    assert set(updated.items) == {"a", "c", "d"}
    assert updated.items["a"].src == "a-v2"
    # a and c keep their piles, b's pile is gone, d gets a fresh singleton
    surviving = {p.item_ids for p in updated.piles.values()}
    assert ("a",) in surviving and ("c",) in surviving and ("d",) in surviving
    assert len(updated.piles) == 3
    assert updated.epoch == state.epoch + 1
    validate_partition(updated)


def test_update_items_identity_only_bumps_epoch():
    state = init_state([{"id": "a", "src": 1}, {"id": "b", "src": 2}])
    updated = update_items(state, [{"id": "a", "src": 1}, {"id": "b", "src": 2}])
    assert updated.items == state.items
    assert updated.piles == state.piles
    assert updated.epoch == state.epoch + 1


def test_update_items_empty_list_clears_everything():
    state = init_state(make_items(3))
    updated = update_items(state, [])
    assert updated.items == {}
    assert updated.piles == {}
    validate_partition(updated)


def test_update_items_preserves_merged_pile_membership():
    from pilecore.grouping import merge_piles

    state = init_state([{"id": "a", "src": 1}, {"id": "b", "src": 1}, {"id": "c", "src": 1}])
    merged = merge_piles(state, 0, [1])  # pile (a, b) plus singleton c
    updated = update_items(
        merged,
        [{"id": "a", "src": 2}, {"id": "b", "src": 2}, {"id": "c", "src": 2}],
    )
    assert updated.piles[0].item_ids == ("a", "b")
    assert updated.items["a"].src == 2
    validate_partition(updated)


def test_update_items_removal_shrinks_merged_pile():
    from pilecore.grouping import merge_piles

    state = init_state([{"id": "a"}, {"id": "b"}, {"id": "c"}])
    merged = merge_piles(state, 0, [1, 2])
    updated = update_items(merged, [{"id": "a"}, {"id": "c"}])
    assert updated.piles[0].item_ids == ("a", "c")
    validate_partition(updated)


def test_update_items_rejects_duplicate_and_bad_features():
    state = init_state([{"id": "a", "features": [1.0, 2.0]}])
    with pytest.raises(DuplicateIdError):
        update_items(state, [{"id": "x"}, {"id": "x"}])
    with pytest.raises(FeatureLengthError):
        update_items(state, [{"id": "b", "features": [1.0, 2.0, 3.0]}])


def test_update_items_idempotent():
    state = init_state(make_items(5))
    batch = [{"id": "1", "src": "x"}, {"id": "9", "src": "new"}]
    once = update_items(state, batch)
    twice = update_items(once, batch)
    assert once.items == twice.items
    assert {p.item_ids for p in once.piles.values()} == {
        p.item_ids for p in twice.piles.values()
    }


def test_serialize_roundtrip_identity():
    state = init_state(
        [
            {"id": "a", "src": {"rows": 2}, "features": [0.5, 1.5], "metadata": {"cat": "x"}},
            {"id": "b", "src": None, "features": [2.0, 3.0], "anchor": [10.0, 20.0]},
        ],
        canvas=Canvas(width=640, height=480, columns=4),
        seed=7,
    )
    data = serialize(state)
    restored = deserialize(data)
    assert restored == state
    assert serialize(restored) == data


def test_serialize_twice_identical_bytes():
    state = init_state(make_items(6), seed=3)
    assert serialize(state) == serialize(state)


def test_roundtrip_of_deep_interaction_state():
    from pilecore.arrangement import arrange_by
    from pilecore.grouping import group_by, merge_piles
    from pilecore.interaction import (
        GestureEvent,
        apply_gesture,
        browse_separately,
        hover_preview,
        temporary_disperse,
    )
    from pilecore.model import ArrangeBySpec, GroupBySpec

    items = [
        {"id": str(i), "anchor": [i * 30.0, 40.0], "metadata": {"cat": "ab"[i % 2]}}
        for i in range(6)
    ]
    state = init_state(items, seed=11)
    state = arrange_by(state, ArrangeBySpec(type="xy"))
    state = group_by(state, GroupBySpec(type="distance", threshold=35.0))
    merged_id = sorted(state.piles)[0]
    state = browse_separately(state, sorted(state.piles, key=lambda p: -len(state.piles[p].item_ids))[0])
    layer_ids = sorted(p.pile_id for p in state.active_piles())
    if len(layer_ids) >= 2:
        state = merge_piles(state, layer_ids[0], [layer_ids[1]])
        state = temporary_disperse(state, layer_ids[0])
        state = hover_preview(state, layer_ids[0], state.piles[layer_ids[0]].item_ids[0])
    state, _ = apply_gesture(state, GestureEvent("pointerDown", 1.0, 1.0, time_ms=5.0))
    state, _ = apply_gesture(state, GestureEvent("pointerDown", 2.0, 2.0, time_ms=6.0))
    state, _ = apply_gesture(state, GestureEvent("pointerMove", 9.0, 9.0, time_ms=7.0))

    assert state.layers and state.dispersion_backup is not None
    assert state.mode.kind == "lassoActive"
    restored = deserialize(serialize(state))
    assert restored == state
    assert state_hash(restored) == state_hash(state)
    assert serialize(restored) == serialize(state)
    del merged_id


def test_deserialize_malformed_reports_offset():
    with pytest.raises(StateParseError) as err:
        deserialize("{")
    assert err.value.offset >= 0


def test_hash_differs_when_one_pile_moves():
    from dataclasses import replace

    state = init_state(make_items(4))
    pile = state.piles[2]
    moved = replace(
        state, piles={**state.piles, 2: replace(pile, x=pile.x + 1.0)}
    )
    assert state_hash(moved) != state_hash(state)


def test_hash_ignores_epoch():
    from dataclasses import replace

    state = init_state(make_items(4))
    assert state_hash(replace(state, epoch=99)) == state_hash(state)


def test_empty_state_hash_pinned():
    # determinism anchor for this engine version; recompute if the
    # serialization schema ever changes deliberately
    state = init_state([], canvas=Canvas(), seed=0)
    assert state_hash(state) == EMPTY_STATE_HASH


EMPTY_STATE_HASH = 9473725899033775887


@given(st.integers(0, 200), st.integers(0, 2**32 - 1))
def test_init_state_partition_always_valid(n, seed):
    state = init_state([{} for _ in range(n)], seed=seed)
    validate_partition(state)
    assert len(state.piles) == n
