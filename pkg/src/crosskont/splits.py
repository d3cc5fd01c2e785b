"""Splitting an instance along one of its cross-ratios.

Resolving the pairing of one cross-ratio deforms the curves into pairs
of curves joined by one contracted edge; on the level of instances this
splits the degree, the conditions and the remaining cross-ratios in two.
The deficiency of a side,

    delta = 3 d_i - (#points_i + #crossratios_i - #free_i),

measures how far that side is from being zero-dimensional on its own.
Only the deficiency vectors (1, 1), (0, 2) and (2, 0) contribute to the
recursion; the connecting edge then carries multi line conditions of
weight one on both sides, or a free end on the zero-deficiency side and
a point on the other.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .conditions import (
    CrossRatio,
    EndCondition,
    Instance,
    Label,
    Pairing,
)

ONE_ONE = "1/1"
TWO_ZERO_SIDE1_FIXED = "2/0 side 1 fixed"
TWO_ZERO_SIDE2_FIXED = "2/0 side 2 fixed"

_E_CONDITIONS = {
    ONE_ONE: (EndCondition.line(1), EndCondition.line(1)),
    TWO_ZERO_SIDE1_FIXED: (EndCondition.free(), EndCondition.point()),
    TWO_ZERO_SIDE2_FIXED: (EndCondition.point(), EndCondition.free()),
}


@dataclass(frozen=True, slots=True)
class SplitSide:
    """Degree and condition shares of one side of a split."""

    degree: int
    labels: frozenset[Label]
    crossratios: frozenset[int]

    def deficiency(self, inst: Instance) -> int:
        points = sum(1 for x in self.labels if inst.condition(x).kind == "point")
        free = sum(1 for x in self.labels if inst.condition(x).kind == "free")
        return 3 * self.degree - (points + len(self.crossratios) - free)


@dataclass(frozen=True, slots=True)
class Split:
    """A contributing split: two sides plus its deficiency class.

    ``side1`` holds the resolved pairing's first pair; cross-ratio
    indices refer to the parent instance with the resolved one left
    out.
    """

    side1: SplitSide
    side2: SplitSide
    kind: str


@dataclass(frozen=True, slots=True)
class SubInstancePair:
    """The two sub-instances of a split, with their fresh edge labels."""

    side1: Instance
    side2: Instance
    e1: Label
    e2: Label


def respecting_pairing(cr: CrossRatio) -> Pairing:
    """The pairing grouping the two smallest entries of ``cr``.

    Summing over splits that put this pairing's first pair on side 1
    visits every curve once, without the double count that symmetric
    splits would otherwise cause.
    """
    a, b, c, d = cr.ordered
    return Pairing.of((a, b), (c, d))


def enumerate_splits(inst: Instance, last: int, pairing: Pairing) -> list[Split]:
    """All contributing splits of ``inst`` along one cross-ratio.

    Parameters
    ----------
    inst : Instance
        A valid instance.
    last : int
        Index into ``inst.crossratios`` of the resolved cross-ratio.
    pairing : Pairing
        Grouping of that cross-ratio's entries; the first pair is
        pinned to side 1 and the second to side 2.

    Returns
    -------
    list of Split
        Every distribution of the degree and of the remaining labels
        whose deficiency vector is (1, 1), (0, 2) or (2, 0), in a fixed
        deterministic order.  A remaining cross-ratio follows the side
        holding at least three of its entries; distributions putting
        two entries on each side are dropped, and each side of a kept
        split holds at least three entries of each of its cross-ratios.
    """
    resolved = inst.crossratios[last]
    if pairing.entries != resolved.entries:
        raise ValueError("pairing does not match the resolved cross-ratio")
    pinned1 = frozenset(pairing.first)
    pinned2 = frozenset(pairing.second)
    movable = sorted(set(inst.labels) - resolved.entries)
    others = [(j, cr) for j, cr in enumerate(inst.crossratios) if j != last]
    splits: list[Split] = []
    for d1 in range(inst.degree + 1):
        d2 = inst.degree - d1
        for chosen in itertools.chain.from_iterable(
            itertools.combinations(movable, k) for k in range(len(movable) + 1)
        ):
            labels1 = pinned1 | frozenset(chosen)
            labels2 = pinned2 | (frozenset(movable) - frozenset(chosen))
            crs1, crs2 = [], []
            ok = True
            for j, cr in others:
                c = len(cr.entries & labels1)
                if c == 2:
                    ok = False
                    break
                (crs1 if c >= 3 else crs2).append(j)
            if not ok:
                continue
            side1 = SplitSide(d1, labels1, frozenset(crs1))
            side2 = SplitSide(d2, labels2, frozenset(crs2))
            delta = (side1.deficiency(inst), side2.deficiency(inst))
            if delta == (1, 1):
                kind = ONE_ONE
            elif delta == (0, 2):
                kind = TWO_ZERO_SIDE1_FIXED
            elif delta == (2, 0):
                kind = TWO_ZERO_SIDE2_FIXED
            else:
                continue
            splits.append(Split(side1, side2, kind))
    return splits


def build_subinstances(inst: Instance, split: Split) -> SubInstancePair:
    """Materialize the two sub-instances of a split.

    The connecting edge becomes a fresh contracted end on each side,
    labelled one and two past the largest label of ``inst``; it carries
    a weight-one multi line condition on both sides of a 1/1 split, and
    a free end on the fixed side with a point on the other for a 2/0
    split.  Cross-ratios keep their relative order and have their
    entries from the other side replaced by the fresh end.
    """
    e1 = max(inst.labels) + 1
    e2 = e1 + 1
    cond1, cond2 = _E_CONDITIONS[split.kind]

    def side_instance(side: SplitSide, e: Label, cond: EndCondition) -> Instance:
        conds = tuple(
            sorted([(x, inst.condition(x)) for x in side.labels] + [(e, cond)])
        )
        crs = tuple(
            CrossRatio(
                frozenset(x if x in side.labels else e for x in inst.crossratios[j].entries)
            )
            for j in sorted(side.crossratios)
        )
        return Instance(side.degree, conds, crs)

    sub1 = side_instance(split.side1, e1, cond1)
    sub2 = side_instance(split.side2, e2, cond2)
    return SubInstancePair(sub1, sub2, e1, e2)
