"""Tests for the counting engine: base cases, recursion, invariance."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crosskont import (
    Instance,
    ResourceLimitError,
    ValidationError,
    admissible_line_pair,
    evaluate,
    evaluate_invariance_battery,
    kontsevich,
)
from crosskont.engine import Engine, base_degree_zero, base_no_crossratios

from corpus import CORPUS, SMALL

WORKED = Instance.build(
    2, points=[1, 2, 3], lines={4: 1, 5: 1}, crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]]
)
WORKED23 = Instance.build(
    2, points=[1, 2, 3], lines={4: 2, 5: 3}, crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]]
)

KNOWN_COUNTS = {1: 1, 2: 1, 3: 12, 4: 620, 5: 87304, 6: 26312976}


def test_kontsevich_known_values():
    for degree, expected in KNOWN_COUNTS.items():
        assert kontsevich(degree) == expected


def test_kontsevich_rejects_nonpositive_degrees():
    with pytest.raises(ValueError):
        kontsevich(0)
    with pytest.raises(ValueError):
        kontsevich(-2)


def test_kontsevich_matches_the_standalone_table():
    script = Path(__file__).resolve().parent.parent / "tools" / "kontsevich_oracle.py"
    out = subprocess.run(
        [sys.executable, str(script), "6"], capture_output=True, text=True, check=True
    )
    for line in out.stdout.splitlines():
        degree, value = line.split()
        assert kontsevich(int(degree)) == int(value)


def test_point_only_instances_reduce_to_the_table():
    assert evaluate(Instance.build(1, points=[1, 2])) == 1
    assert evaluate(Instance.build(2, points=[1, 2, 3, 4, 5])) == 1
    assert evaluate(Instance.build(3, points=list(range(1, 9)))) == 12


def test_multi_lines_scale_the_table_by_weight_times_degree():
    assert evaluate(Instance.build(1, points=[1, 2], lines={3: 5})) == 5
    assert (
        evaluate(Instance.build(2, points=[1, 2, 3, 4, 5], lines={6: 2, 7: 3}))
        == 1 * (2 * 2) * (3 * 2)
    )
    assert (
        evaluate(Instance.build(3, points=list(range(1, 9)), lines={9: 1, 10: 2}))
        == 12 * (1 * 3) * (2 * 3)
    )


def test_free_ends_without_cross_ratios_leave_nothing_rigid():
    assert evaluate(Instance.build(1, points=[1, 2, 3], free=[4])) == 0
    assert evaluate(Instance.build(2, points=[1, 2, 3, 4, 5, 6], free=[7])) == 0


def test_degree_zero_rigid_stars():
    assert evaluate(Instance.build(0, lines={1: 2, 2: 3}, free=[3])) == 6
    assert evaluate(Instance.build(0, points=[1], free=[2, 3])) == 1
    assert (
        evaluate(Instance.build(0, lines={1: 2, 2: 3}, free=[3, 4], crossratios=[[1, 2, 3, 4]]))
        == 6
    )
    assert (
        evaluate(Instance.build(0, points=[1], free=[2, 3, 4], crossratios=[[1, 2, 3, 4]])) == 1
    )


def test_degree_zero_loose_shapes_count_zero():
    assert evaluate(Instance.build(0, points=[1], lines={2: 2}, free=[3, 4])) == 0
    assert evaluate(Instance.build(0, points=[1, 2], free=[3, 4, 5])) == 0
    assert evaluate(Instance.build(0, lines={1: 3}, free=[2])) == 0
    assert evaluate(Instance.build(0, lines={1: 1, 2: 1, 3: 1}, free=[4])) == 0


def test_base_functions_agree_without_cross_ratios():
    for inst in CORPUS:
        if inst.crossratios:
            continue
        assert base_no_crossratios(inst) == evaluate(inst)
        if inst.degree == 0:
            assert base_degree_zero(inst) == base_no_crossratios(inst)


def test_worked_example_value():
    assert evaluate(WORKED) == 1
    assert evaluate(WORKED23) == 6


def test_worked_example_battery_is_flat():
    report = evaluate_invariance_battery(WORKED23)
    assert report.ok
    assert report.value == 6
    assert len(report.variants) == 6
    assert {v.value for v in report.variants} == {6}
    assert not report.mismatches


def test_battery_varies_every_pairing_of_each_cross_ratio():
    inst = Instance.build(1, points=[1, 2], lines={3: 2}, free=[4], crossratios=[[1, 2, 3, 4]])
    report = evaluate_invariance_battery(inst)
    assert report.ok
    assert len(report.variants) == 3
    assert len({v.pairing for v in report.variants}) == 3


def test_battery_is_empty_without_cross_ratios():
    report = evaluate_invariance_battery(Instance.build(1, points=[1, 2]))
    assert report.ok
    assert report.variants == ()


def test_line_only_instance_counts_through_admissible_groupings():
    inst = Instance.build(
        1,
        lines={1: 1, 2: 1, 3: 1, 4: 1, 5: 1},
        crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]],
    )
    assert evaluate(inst) == 1
    report = evaluate_invariance_battery(inst)
    assert report.ok
    assert len(report.variants) == 6
    assert {v.value for v in report.variants} == {1}


def test_admissible_line_pair_blocks_tied_groupings():
    inst = Instance.build(
        1,
        lines={1: 1, 2: 1, 3: 1, 4: 1, 5: 1},
        crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]],
    )
    # grouping two labels the other cross-ratio also holds, with its
    # remaining entries both multi lines, starves the far side
    for a, b in ((1, 2), (1, 3), (2, 3)):
        assert not admissible_line_pair(inst, 1, a, b)
    for a, b in ((1, 5), (2, 5), (3, 5)):
        assert admissible_line_pair(inst, 1, a, b)


def test_resource_budget_is_enforced():
    with pytest.raises(ResourceLimitError):
        evaluate(WORKED, max_nodes=1)


def test_ill_posed_instances_are_rejected():
    with pytest.raises(ValidationError, match="dimension count"):
        evaluate(Instance.build(1, points=[1], free=[2]))
    with pytest.raises(ValidationError, match="not an end"):
        evaluate(Instance.build(2, points=[1, 2, 3, 4], free=[5], crossratios=[[1, 2, 3, 9]]))


def test_memoized_reevaluation_is_stable():
    engine = Engine()
    first = engine.evaluate(WORKED23)
    assert engine.evaluate(WORKED23) == first == 6
    assert Engine().evaluate(WORKED23) == first


def test_trace_shows_both_resolution_steps():
    value, node = Engine().evaluate_traced(WORKED23)
    assert value == 6
    assert node.rule == "split"
    assert node.last == 1
    assert len(node.terms) == 1
    outer = node.terms[0]
    assert outer.left.value * outer.right.value == 6
    assert outer.left.rule == "split"
    assert len(outer.left.terms) == 1
    inner = outer.left.terms[0]
    assert inner.left.rule == "base"
    assert inner.right.rule == "base"


def test_trace_marks_memoized_hits():
    engine = Engine()
    engine.evaluate(WORKED23)
    _, node = engine.evaluate_traced(WORKED23)
    assert node.rule == "memo"
    assert node.value == 6


def test_parallel_evaluation_matches_serial():
    for inst in (WORKED, WORKED23, *SMALL[:6]):
        assert evaluate(inst, jobs=4) == evaluate(inst)


@given(data=st.data())
def test_count_is_relabel_invariant(data):
    inst = data.draw(st.sampled_from(SMALL))
    labels = sorted(inst.labels)
    perm = data.draw(st.permutations(labels))
    moved = inst.relabel(dict(zip(labels, perm)))
    assert evaluate(moved) == evaluate(inst)


@given(data=st.data())
def test_count_is_multilinear_in_line_weights(data):
    candidates = [inst for inst in SMALL if inst.lines]
    inst = data.draw(st.sampled_from(candidates))
    label = data.draw(st.sampled_from(sorted(inst.lines)))
    factor = data.draw(st.integers(min_value=2, max_value=4))
    scaled = Instance(
        inst.degree,
        tuple(
            (lab, cond if lab != label else type(cond)(cond.kind, cond.weight * factor))
            for lab, cond in inst.conditions
        ),
        inst.crossratios,
    )
    assert evaluate(scaled) == factor * evaluate(inst)
