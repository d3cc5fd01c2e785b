"""Tests for condition data: cross-ratios, pairings, instances, keys."""

from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crosskont import CrossRatio, Instance, Pairing, canonical_key, validate
from crosskont.conditions import EndCondition, all_pairings, canonical_pairing

from corpus import CORPUS


def test_cross_ratio_entries_form_a_set():
    cr = CrossRatio.of(4, 1, 3, 2)
    assert list(cr) == [1, 2, 3, 4]
    assert 3 in cr
    assert 5 not in cr
    assert cr == CrossRatio.of(1, 2, 3, 4)


def test_cross_ratio_requires_four_distinct_entries():
    with pytest.raises(ValueError):
        CrossRatio.of(1, 2, 3, 3)
    with pytest.raises(ValueError):
        CrossRatio.of(1, 2, 3)


def test_pairing_normal_form_orders_pairs_and_sides():
    swapped = Pairing.of((3, 4), (1, 2))
    assert swapped == Pairing.of((1, 2), (3, 4))
    assert swapped.first == (1, 2)
    assert Pairing.of((4, 3), (2, 1)).second == (3, 4)


def test_pairing_rejects_overlapping_pairs():
    with pytest.raises(ValueError):
        Pairing.of((1, 2), (2, 3))


def test_all_pairings_cover_the_three_groupings():
    cr = CrossRatio.of(1, 2, 3, 5)
    groups = all_pairings(cr)
    assert len(set(groups)) == 3
    for pairing in groups:
        assert set(pairing.entries) == set(cr)
    assert canonical_pairing(cr) == Pairing.of((1, 2), (3, 5))


def test_end_condition_weights():
    assert EndCondition.point().weight == 1
    assert EndCondition.line(3).weight == 3
    assert EndCondition.free().weight == 1
    with pytest.raises(ValueError):
        EndCondition("point", 0)
    with pytest.raises(ValueError):
        EndCondition("bogus")


def test_build_collects_conditions_by_label():
    inst = Instance.build(
        2, points=[3, 1, 2], lines={4: 2, 5: 3}, crossratios=[[1, 2, 3, 4]]
    )
    assert inst.points == (1, 2, 3)
    assert inst.lines == (4, 5)
    assert inst.free == ()
    assert inst.weight(5) == 3
    assert inst.condition(1).kind == "point"


def test_build_rejects_bad_labels():
    with pytest.raises(ValueError):
        Instance.build(1, points=[1, 1])
    with pytest.raises(ValueError):
        Instance.build(1, points=[0, 2])


def test_relabel_moves_conditions_and_crossratios():
    inst = Instance.build(
        1, points=[1, 2], lines={3: 2}, free=[4], crossratios=[[1, 2, 3, 4]]
    )
    moved = inst.relabel({1: 10, 2: 20, 3: 30, 4: 40})
    assert moved.points == (10, 20)
    assert moved.weight(30) == 2
    assert moved.crossratios[0] == CrossRatio.of(10, 20, 30, 40)
    with pytest.raises(ValueError):
        inst.relabel({1: 9, 2: 9, 3: 3, 4: 4})


def test_validate_accepts_well_posed_instances():
    assert validate(Instance.build(1, points=[1, 2]))
    assert validate(Instance.build(2, points=[1, 2, 3, 4, 5], lines={6: 2}))
    assert validate(
        Instance.build(0, lines={1: 1, 2: 1}, free=[3, 4], crossratios=[[1, 2, 3, 4]])
    )


def test_validate_names_the_dimension_equation():
    report = validate(Instance.build(1, points=[1], free=[2]))
    assert not report
    assert "3*1 - 1 = 2" in report.reason
    assert "#points + #crossratios - #free" in report.reason


def test_validate_flags_stray_cross_ratio_entries():
    inst = Instance.build(2, points=[1, 2, 3, 4], free=[5], crossratios=[[1, 2, 3, 9]])
    report = validate(inst)
    assert not report
    assert "9" in report.reason


def test_validate_ignores_multi_line_count():
    # multi lines do not enter the dimension count
    for weights in ({}, {6: 1}, {6: 2, 7: 1}, {6: 1, 7: 1, 8: 1}):
        inst = Instance.build(2, points=[1, 2, 3, 4, 5], lines=weights)
        assert validate(inst)


def _key_of_permuted(inst: Instance, perm: tuple[int, ...]) -> object:
    labels = sorted(inst.labels)
    return canonical_key(inst.relabel(dict(zip(labels, perm))))


def test_canonical_key_invariant_under_all_permutations_of_small_instances():
    small = [inst for inst in CORPUS if len(inst.labels) <= 6][:8]
    assert small
    for inst in small:
        key = canonical_key(inst)
        for perm in itertools.permutations(sorted(inst.labels)):
            assert _key_of_permuted(inst, perm) == key


def test_canonical_key_separates_weights_and_kinds():
    a = Instance.build(1, points=[1, 2], lines={3: 1})
    b = Instance.build(1, points=[1, 2], lines={3: 2})
    c = Instance.build(1, points=[1, 2])
    assert canonical_key(a) != canonical_key(b)
    assert canonical_key(a) != canonical_key(c)


def test_canonical_key_separates_cross_ratio_shape():
    a = Instance.build(
        2, points=[1, 2, 3], lines={4: 1, 5: 1}, crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]]
    )
    b = Instance.build(
        2, points=[1, 2, 3], lines={4: 1, 5: 1}, crossratios=[[1, 2, 3, 4], [1, 2, 4, 5]]
    )
    assert canonical_key(a) != canonical_key(b)


def test_canonical_key_ignores_cross_ratio_listing_order():
    a = Instance.build(
        2, points=[1, 2, 3], lines={4: 1, 5: 1}, crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]]
    )
    b = Instance.build(
        2, points=[1, 2, 3], lines={4: 1, 5: 1}, crossratios=[[1, 2, 3, 5], [1, 2, 3, 4]]
    )
    assert canonical_key(a) == canonical_key(b)


def _same_instance_up_to_cr_order(a: Instance, b: Instance) -> bool:
    crs = lambda inst: sorted(tuple(sorted(cr)) for cr in inst.crossratios)
    return a.degree == b.degree and a.conditions == b.conditions and crs(a) == crs(b)


def _isomorphic(a: Instance, b: Instance) -> bool:
    if a.degree != b.degree or len(a.labels) != len(b.labels):
        return False
    la, lb = sorted(a.labels), sorted(b.labels)
    return any(
        _same_instance_up_to_cr_order(a.relabel(dict(zip(la, perm))), b)
        for perm in itertools.permutations(lb)
    )


def test_canonical_key_collision_free_on_small_corpus():
    small = [inst for inst in CORPUS if len(inst.labels) <= 5]
    assert len(small) >= 6
    for a, b in itertools.combinations(small, 2):
        if canonical_key(a) == canonical_key(b):
            assert _isomorphic(a, b)


@given(data=st.data())
def test_canonical_key_invariant_under_random_relabelling(data):
    inst = data.draw(st.sampled_from(CORPUS))
    labels = sorted(inst.labels)
    perm = data.draw(st.permutations(labels))
    assert _key_of_permuted(inst, tuple(perm)) == canonical_key(inst)


@given(data=st.data())
def test_validate_is_relabel_invariant(data):
    inst = data.draw(st.sampled_from(CORPUS))
    labels = sorted(inst.labels)
    perm = data.draw(st.permutations(labels))
    moved = inst.relabel(dict(zip(labels, perm)))
    assert validate(moved).ok == validate(inst).ok
