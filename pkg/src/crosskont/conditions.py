"""Data model for counting problems on rational plane tropical curves.

A curve of degree d has d non-contracted ends in each of the directions
(-1, 0), (0, -1) and (1, 1), plus contracted ends.  Every contracted end
carries a label (a positive integer) and one of three conditions: it is
pinned to a point, it lies on a multi line of some positive weight, or
it is free.  A degenerated tropical cross-ratio is a set of four labels.
The counting problem is zero-dimensional exactly when

    3 d - 1 = #points + #crossratios - #free.

Instances are immutable and hashable; ``canonical_key`` produces a
relabelling-invariant fingerprint that the recursion engine uses for
memoization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple

Label = int
Count = int

POINT = "point"
LINE = "line"
FREE = "free"

_KINDS = (POINT, LINE, FREE)


@dataclass(frozen=True, slots=True)
class EndCondition:
    """Condition carried by one contracted end.

    ``weight`` is the weight of the multi line and must be 1 for the
    other two kinds.
    """

    kind: str
    weight: int = 1

    def __post_init__(self) -> None:
        if self.kind not in _KINDS:
            raise ValueError(f"unknown condition kind {self.kind!r}")
        if self.weight < 1:
            raise ValueError(f"weight must be positive, got {self.weight}")
        if self.kind != LINE and self.weight != 1:
            raise ValueError(f"{self.kind} conditions carry no weight")

    @classmethod
    def point(cls) -> "EndCondition":
        return cls(POINT)

    @classmethod
    def line(cls, weight: int = 1) -> "EndCondition":
        return cls(LINE, weight)

    @classmethod
    def free(cls) -> "EndCondition":
        return cls(FREE)


@dataclass(frozen=True, slots=True)
class CrossRatio:
    """Degenerated tropical cross-ratio: a set of four end labels."""

    entries: frozenset[Label]

    def __post_init__(self) -> None:
        if len(self.entries) != 4:
            raise ValueError(f"a cross-ratio needs 4 distinct entries, got {sorted(self.entries)}")

    @classmethod
    def of(cls, *labels: Label) -> "CrossRatio":
        return cls(frozenset(labels))

    @property
    def ordered(self) -> tuple[Label, Label, Label, Label]:
        a, b, c, d = sorted(self.entries)
        return a, b, c, d

    def __contains__(self, label: Label) -> bool:
        return label in self.entries

    def __iter__(self) -> Iterator[Label]:
        return iter(sorted(self.entries))


@dataclass(frozen=True, slots=True)
class Pairing:
    """One of the three ways to group a cross-ratio's entries in two pairs.

    Normal form: each pair is sorted and the pair holding the smallest
    entry comes first, so equal groupings compare equal.
    """

    first: tuple[Label, Label]
    second: tuple[Label, Label]

    def __post_init__(self) -> None:
        labels = (*self.first, *self.second)
        if len(set(labels)) != 4:
            raise ValueError(f"pairing entries must be 4 distinct labels, got {labels}")
        if self.first != tuple(sorted(self.first)) or self.second != tuple(sorted(self.second)):
            raise ValueError("pairs must be sorted; use Pairing.of")
        if min(self.second) < min(self.first):
            raise ValueError("pair holding the smallest label must come first; use Pairing.of")

    @classmethod
    def of(cls, first: Iterable[Label], second: Iterable[Label]) -> "Pairing":
        a = tuple(sorted(first))
        b = tuple(sorted(second))
        if min(b) < min(a):
            a, b = b, a
        return cls(a, b)

    @property
    def entries(self) -> frozenset[Label]:
        return frozenset(self.first) | frozenset(self.second)

    def side_of(self, label: Label) -> int:
        """1 if ``label`` sits in the first pair, 2 in the second."""
        if label in self.first:
            return 1
        if label in self.second:
            return 2
        raise KeyError(label)


def all_pairings(cr: CrossRatio) -> tuple[Pairing, Pairing, Pairing]:
    """The three pairings of a cross-ratio, smallest entry always first."""
    a, b, c, d = cr.ordered
    return (
        Pairing.of((a, b), (c, d)),
        Pairing.of((a, c), (b, d)),
        Pairing.of((a, d), (b, c)),
    )


def canonical_pairing(cr: CrossRatio) -> Pairing:
    """Pairing grouping the two smallest entries, used as a default."""
    a, b, c, d = cr.ordered
    return Pairing.of((a, b), (c, d))


@dataclass(frozen=True, slots=True)
class Instance:
    """One counting problem: a degree plus labelled conditions.

    ``conditions`` maps each contracted-end label to its condition and
    is stored sorted by label, so structurally equal instances are equal
    as values.  Use :meth:`build` instead of the raw constructor.
    """

    degree: int
    conditions: tuple[tuple[Label, EndCondition], ...]
    crossratios: tuple[CrossRatio, ...]

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        labels = [label for label, _ in self.conditions]
        if any(label < 1 for label in labels):
            raise ValueError("labels must be positive integers")
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate end labels")
        if list(labels) != sorted(labels):
            raise ValueError("conditions must be sorted by label; use Instance.build")

    @classmethod
    def build(
        cls,
        degree: int,
        points: Iterable[Label] = (),
        lines: Mapping[Label, int] | Iterable[tuple[Label, int]] = (),
        free: Iterable[Label] = (),
        crossratios: Iterable[CrossRatio | Iterable[Label]] = (),
    ) -> "Instance":
        """Assemble an instance from labels grouped by condition kind.

        ``lines`` maps labels to multi line weights.  Cross-ratios may
        be given as ``CrossRatio`` values or as plain 4-element
        iterables of labels.
        """
        point_labels = list(points)
        line_items = list(lines.items() if isinstance(lines, Mapping) else lines)
        free_labels = list(free)
        conds: dict[Label, EndCondition] = {}
        for label in point_labels:
            conds[label] = EndCondition.point()
        for label, weight in line_items:
            conds[label] = EndCondition.line(weight)
        for label in free_labels:
            conds[label] = EndCondition.free()
        if len(conds) != len(point_labels) + len(line_items) + len(free_labels):
            raise ValueError("a label may carry only one condition")
        crs = tuple(
            cr if isinstance(cr, CrossRatio) else CrossRatio.of(*cr) for cr in crossratios
        )
        return cls(degree, tuple(sorted(conds.items())), crs)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(label for label, _ in self.conditions)

    @property
    def points(self) -> tuple[Label, ...]:
        return tuple(label for label, c in self.conditions if c.kind == POINT)

    @property
    def lines(self) -> tuple[Label, ...]:
        return tuple(label for label, c in self.conditions if c.kind == LINE)

    @property
    def free(self) -> tuple[Label, ...]:
        return tuple(label for label, c in self.conditions if c.kind == FREE)

    def condition(self, label: Label) -> EndCondition:
        for other, cond in self.conditions:
            if other == label:
                return cond
        raise KeyError(label)

    def weight(self, label: Label) -> int:
        return self.condition(label).weight

    def relabel(self, mapping: Mapping[Label, Label]) -> "Instance":
        """Apply a label bijection, leaving unmapped labels in place."""
        image = [mapping.get(label, label) for label in self.labels]
        if len(set(image)) != len(image):
            raise ValueError("relabelling is not injective on the instance")
        conds = tuple(sorted((mapping.get(label, label), cond) for label, cond in self.conditions))
        crs = tuple(
            CrossRatio(frozenset(mapping.get(x, x) for x in cr.entries)) for cr in self.crossratios
        )
        return Instance(self.degree, conds, crs)


class Validation(NamedTuple):
    """Outcome of :func:`validate`; truthy iff the instance is well posed."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate(inst: Instance) -> Validation:
    """Check that an instance is a well posed zero-dimensional count.

    Parameters
    ----------
    inst : Instance
        Structurally consistent instance (labels partition into kinds).

    Returns
    -------
    Validation
        Truthy iff ``3 d - 1 = #points + #crossratios - #free`` and
        every cross-ratio entry refers to a contracted end of ``inst``.
        On failure ``reason`` names the violated rule.
    """
    known = set(inst.labels)
    for cr in inst.crossratios:
        stray = cr.entries - known
        if stray:
            return Validation(False, f"cross-ratio entry {min(stray)} is not an end of the instance")
    n = len(inst.points)
    l = len(inst.crossratios)
    f = len(inst.free)
    lhs = 3 * inst.degree - 1
    rhs = n + l - f
    if lhs != rhs:
        return Validation(
            False,
            f"dimension count off: 3*{inst.degree} - 1 = {lhs} but #points + #crossratios - #free = {rhs}",
        )
    return Validation(True)


_KIND_RANK = {POINT: 0, LINE: 1, FREE: 2}


def _refine(inst: Instance) -> list[list[Label]]:
    """Partition labels into blocks stable under condition and membership data."""
    crs = [cr.entries for cr in inst.crossratios]
    color: dict[Label, object] = {
        label: (_KIND_RANK[cond.kind], cond.weight, sum(label in cr for cr in crs))
        for label, cond in inst.conditions
    }
    while True:
        sig = {
            label: (
                color[label],
                tuple(
                    sorted(
                        tuple(sorted(repr(color[other]) for other in cr))
                        for cr in crs
                        if label in cr
                    )
                ),
            )
            for label in inst.labels
        }
        ranking = {value: rank for rank, value in enumerate(sorted(set(map(repr, sig.values()))))}
        new_color = {label: ranking[repr(sig[label])] for label in inst.labels}
        if len(set(new_color.values())) == len(set(map(repr, color.values()))):
            break
        color = new_color
    blocks: dict[int, list[Label]] = {}
    for label in inst.labels:
        blocks.setdefault(new_color[label], []).append(label)
    return [sorted(blocks[c]) for c in sorted(blocks)]


def _encode(inst: Instance, order: list[Label]) -> tuple:
    index = {label: i for i, label in enumerate(order)}
    conds = tuple(
        (index[label], _KIND_RANK[cond.kind], cond.weight) for label, cond in inst.conditions
    )
    crs = tuple(sorted(tuple(sorted(index[x] for x in cr.entries)) for cr in inst.crossratios))
    return (inst.degree, tuple(sorted(conds)), crs)


def canonical_key(inst: Instance) -> bytes:
    """Fingerprint invariant under relabelling of the contracted ends.

    Two instances that differ only by a bijection of their labels (and
    by the listed order of their cross-ratios) get equal keys, and
    instances with different condition data get distinct keys.  Labels
    are first split by condition kind, weight and cross-ratio
    memberships, the partition is refined to a fixpoint, and the
    lexicographically least encoding over the remaining block
    symmetries is returned.
    """
    blocks = _refine(inst)
    in_some_cr = set().union(*(cr.entries for cr in inst.crossratios)) if inst.crossratios else set()
    # Blocks disjoint from every cross-ratio are fully interchangeable.
    choices = [
        [tuple(block)] if not (set(block) & in_some_cr) else list(itertools.permutations(block))
        for block in blocks
    ]
    best = None
    for arrangement in itertools.product(*choices):
        order = [label for block in arrangement for label in block]
        encoded = _encode(inst, order)
        if best is None or encoded < best:
            best = encoded
    return repr(best).encode()
