"""Recursive evaluation of counting instances.

The count attached to an instance satisfies a Kontsevich style
recursion: resolving the pairing of one cross-ratio writes the count as
a sum, over all contributing splits, of products of the two sides'
counts.  With at least one point condition any cross-ratio and any of
its three pairings may be resolved; without points the resolved
cross-ratio must contain an admissible pair of multi line entries,
which then sits alone on a degree-zero side (see
:func:`admissible_line_pair`).  All sound choices leave the value
unchanged, which :func:`evaluate_invariance_battery` exercises
explicitly.

Recursion anchors: instances without cross-ratios reduce to the plane
Kontsevich numbers via line factors, and degree-zero instances reduce
to a single vertex whose cross-ratio multiplicity is counted directly.
"""

from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

from .conditions import (
    Count,
    Instance,
    LINE,
    Pairing,
    all_pairings,
    canonical_key,
    validate,
)
from .resolution import VertexProfile, Quadruple, cross_ratio_multiplicity
from .splits import (
    Split,
    SubInstancePair,
    TWO_ZERO_SIDE1_FIXED,
    TWO_ZERO_SIDE2_FIXED,
    build_subinstances,
    enumerate_splits,
    respecting_pairing,
)

DEFAULT_MAX_NODES = 1_000_000


class ValidationError(ValueError):
    """The instance handed to the engine is not well posed."""


class ResourceLimitError(RuntimeError):
    """The recursion visited more instances than the configured budget."""


@functools.lru_cache(maxsize=None)
def kontsevich(d: int) -> Count:
    """Number of rational plane curves of degree d through 3d - 1 points.

    Exact integers from the recursion

        N_d = sum over d1 + d2 = d of
              (d1^2 d2^2 C(3d-4, 3d1-2) - d1^3 d2 C(3d-4, 3d1-1)) N_d1 N_d2

    anchored at N_1 = 1.
    """
    if d < 1:
        raise ValueError(f"degree must be >= 1, got {d}")
    if d == 1:
        return 1
    total = 0
    for d1 in range(1, d):
        d2 = d - d1
        total += (
            d1 * d1 * d2 * d2 * math.comb(3 * d - 4, 3 * d1 - 2)
            - d1**3 * d2 * math.comb(3 * d - 4, 3 * d1 - 1)
        ) * kontsevich(d1) * kontsevich(d2)
    return total


def base_no_crossratios(inst: Instance) -> Count:
    """Count for a valid instance without cross-ratios.

    For positive degree the points pin down ``kontsevich(d)`` curves,
    each multi line contributes its weight times d intersection points,
    and any free end makes the count vanish (the points are then in
    excess).  A degree-zero map contracts to a single vertex, which is
    rigid in exactly two shapes: pinned to the intersection of two
    multi lines with one free end (the product of the two weights), or
    pinned to one point with two free ends (count one).  Any other
    degree-zero shape leaves the vertex loose or over-determined.
    """
    lines = inst.lines
    if inst.degree == 0:
        if not inst.points and len(lines) == 2 and len(inst.free) == 1:
            return inst.weight(lines[0]) * inst.weight(lines[1])
        if len(inst.points) == 1 and not lines and len(inst.free) == 2:
            return 1
        return 0
    if inst.free:
        return 0
    product = kontsevich(inst.degree)
    for label in lines:
        product *= inst.weight(label) * inst.degree
    return product


def base_degree_zero(inst: Instance) -> Count:
    """Count for a valid degree-zero instance with cross-ratios.

    Such curves are stars: one vertex carrying every contracted end.
    The vertex is rigid in the same two shapes as without cross-ratios,
    two multi lines with l + 1 free ends or one point with l + 2 free
    ends, and each then counts its cross-ratio multiplicity, weighted
    by the product of the line weights in the first shape.
    """
    lines = inst.lines
    l = len(inst.crossratios)
    if not inst.points and len(lines) == 2 and len(inst.free) == l + 1:
        scale = inst.weight(lines[0]) * inst.weight(lines[1])
    elif len(inst.points) == 1 and not lines and len(inst.free) == l + 2:
        scale = 1
    else:
        return 0
    profile = VertexProfile(
        frozenset(inst.labels),
        tuple(Quadruple.of(j, cr.entries) for j, cr in enumerate(inst.crossratios)),
    )
    return scale * cross_ratio_multiplicity(profile)


def admissible_line_pair(inst: Instance, last: int, a: int, b: int) -> bool:
    """Whether grouping the line labels a, b of cross-ratio ``last`` is sound.

    Isolating a and b on a degree-zero side strands any other
    cross-ratio that contains both of them together with two further
    multi line entries: those two are forced to the far side, the
    grouped pair stays behind, and the cross-ratio can no longer be
    satisfied on either.  Such a grouping cannot be the pair of ends
    that pins down a contributing curve, so resolving along it loses
    curves instead of splitting them.  Free entries do not obstruct,
    they may join the degree-zero side.
    """
    for j, cr in enumerate(inst.crossratios):
        if j == last or a not in cr or b not in cr:
            continue
        rest = cr.entries - {a, b}
        if all(inst.condition(x).kind == LINE for x in rest):
            return False
    return True


@dataclass(frozen=True, slots=True)
class _Choice:
    """Root-level override of the resolved cross-ratio and pairing."""

    last: int
    pairing: Pairing
    line_pair: tuple[int, int] | None = None


@dataclass(frozen=True)
class TraceTerm:
    """One split's contribution to a recursion node."""

    split: Split
    pair: SubInstancePair
    left: "TraceNode"
    right: "TraceNode"

    @property
    def term(self) -> Count:
        return self.left.value * self.right.value


@dataclass(frozen=True)
class TraceNode:
    """One evaluated instance in the recursion tree.

    For split rules ``value`` equals the sum of the terms; memo hits
    and base cases carry no terms.
    """

    instance: Instance
    rule: str
    value: Count
    last: int | None = None
    pairing: Pairing | None = None
    terms: tuple[TraceTerm, ...] = ()


class Engine:
    """Memoized evaluator for counting instances.

    The memo is keyed on :func:`canonical_key`, so relabelled repeats
    of the same sub-instance are computed once.  With ``jobs > 1`` the
    top-level split terms are evaluated on a thread pool; results are
    identical to the sequential ones.
    """

    def __init__(self, max_nodes: int = DEFAULT_MAX_NODES, jobs: int = 1) -> None:
        if max_nodes < 1:
            raise ValueError("max_nodes must be positive")
        if jobs < 1:
            raise ValueError("jobs must be positive")
        self.max_nodes = max_nodes
        self.jobs = jobs
        self._memo: dict[bytes, Count] = {}
        self._nodes = 0

    def evaluate(self, inst: Instance) -> Count:
        value, _ = self._eval(inst, trace=False, root=True)
        return value

    def evaluate_traced(self, inst: Instance) -> tuple[Count, TraceNode]:
        value, node = self._eval(inst, trace=True, root=True)
        assert node is not None
        return value, node

    def _eval(
        self,
        inst: Instance,
        trace: bool,
        root: bool = False,
        override: Optional[_Choice] = None,
    ) -> tuple[Count, Optional[TraceNode]]:
        check = validate(inst)
        if not check:
            raise ValidationError(check.reason)
        key = canonical_key(inst) if override is None else None
        if key is not None and key in self._memo:
            value = self._memo[key]
            node = TraceNode(inst, "memo", value) if trace else None
            return value, node
        self._nodes += 1
        if self._nodes > self.max_nodes:
            raise ResourceLimitError(f"more than {self.max_nodes} recursion nodes")
        node: Optional[TraceNode] = None
        if not inst.crossratios:
            value = base_no_crossratios(inst)
            rule = "base"
        elif inst.degree == 0:
            value = base_degree_zero(inst)
            rule = "star"
        elif inst.points:
            value, node = self._split_with_points(inst, trace, root, override)
            rule = "split"
        else:
            value, node = self._split_without_points(inst, trace, root, override)
            rule = "split"
        if key is not None:
            self._memo[key] = value
        if trace and rule != "split":
            node = TraceNode(inst, rule, value)
        return value, node

    def _terms(
        self,
        inst: Instance,
        splits: list[Split],
        trace: bool,
        root: bool,
    ) -> tuple[Count, list[TraceTerm]]:
        pairs = [(split, build_subinstances(inst, split)) for split in splits]

        def one(entry: tuple[Split, SubInstancePair]):
            split, pair = entry
            v1, n1 = self._eval(pair.side1, trace)
            v2, n2 = self._eval(pair.side2, trace)
            return v1 * v2, (split, pair, n1, n2)

        if root and self.jobs > 1 and len(pairs) > 1:
            with ThreadPoolExecutor(max_workers=self.jobs) as pool:
                evaluated = list(pool.map(one, pairs))
        else:
            evaluated = [one(entry) for entry in pairs]
        total = sum(value for value, _ in evaluated)
        terms = []
        if trace:
            for _, (split, pair, n1, n2) in evaluated:
                assert n1 is not None and n2 is not None
                terms.append(TraceTerm(split, pair, n1, n2))
        return total, terms

    def _split_with_points(
        self,
        inst: Instance,
        trace: bool,
        root: bool,
        override: Optional[_Choice],
    ) -> tuple[Count, Optional[TraceNode]]:
        if override is not None:
            last, pairing = override.last, override.pairing
        else:
            last = len(inst.crossratios) - 1
            pairing = respecting_pairing(inst.crossratios[last])
        splits = enumerate_splits(inst, last, pairing)
        value, terms = self._terms(inst, splits, trace, root)
        node = (
            TraceNode(inst, "split", value, last, pairing, tuple(terms)) if trace else None
        )
        return value, node

    def _split_without_points(
        self,
        inst: Instance,
        trace: bool,
        root: bool,
        override: Optional[_Choice],
    ) -> tuple[Count, Optional[TraceNode]]:
        def line_entries(j: int) -> list[int]:
            return [x for x in inst.crossratios[j] if inst.condition(x).kind == LINE]

        if override is not None:
            last = override.last
            assert override.line_pair is not None
            a, b = override.line_pair
            pairing = override.pairing
        else:
            chosen = None
            for j in range(len(inst.crossratios) - 1, -1, -1):
                for a, b in itertools.combinations(line_entries(j), 2):
                    if admissible_line_pair(inst, j, a, b):
                        chosen = (j, a, b)
                        break
                if chosen is not None:
                    break
            if chosen is None:
                node = TraceNode(inst, "no line pair", 0) if trace else None
                return 0, node
            last, a, b = chosen
            rest = inst.crossratios[last].entries - {a, b}
            pairing = Pairing.of((a, b), rest)
        kept = []
        for split in enumerate_splits(inst, last, pairing):
            side = split.side1 if a in split.side1.labels else split.side2
            fixed = TWO_ZERO_SIDE1_FIXED if side is split.side1 else TWO_ZERO_SIDE2_FIXED
            if split.kind != fixed:
                continue
            side_lines = {x for x in side.labels if inst.condition(x).kind == LINE}
            if side.degree == 0 and side_lines == {a, b}:
                kept.append(split)
        value, terms = self._terms(inst, kept, trace, root)
        node = (
            TraceNode(inst, "split", value, last, pairing, tuple(terms)) if trace else None
        )
        return value, node


def evaluate(inst: Instance, *, max_nodes: int = DEFAULT_MAX_NODES, jobs: int = 1) -> Count:
    """Count the curves of a valid instance.

    Raises :class:`ValidationError` for ill posed instances and
    :class:`ResourceLimitError` when the recursion exceeds
    ``max_nodes`` distinct evaluations.
    """
    return Engine(max_nodes=max_nodes, jobs=jobs).evaluate(inst)


@dataclass(frozen=True)
class BatteryVariant:
    """One alternative root resolution and the value it produced."""

    last: int
    pairing: Pairing
    value: Count


@dataclass(frozen=True)
class BatteryReport:
    """Outcome of an invariance battery run."""

    instance: Instance
    value: Count
    variants: tuple[BatteryVariant, ...]

    @property
    def ok(self) -> bool:
        return all(v.value == self.value for v in self.variants)

    @property
    def mismatches(self) -> tuple[BatteryVariant, ...]:
        return tuple(v for v in self.variants if v.value != self.value)


def evaluate_invariance_battery(
    inst: Instance, *, max_nodes: int = DEFAULT_MAX_NODES
) -> BatteryReport:
    """Evaluate an instance under every admissible root resolution.

    With point conditions this varies the resolved cross-ratio over all
    of them and the pairing over all three groupings; without points it
    varies the resolved cross-ratio over those containing two multi
    line entries and the grouping over every admissible line pair
    inside it.  Each
    variant runs on a fresh engine with the override applied at the
    root only, so no memoized value crosses variants.  The report's
    ``ok`` flag says whether every variant agreed with the default
    evaluation.
    """
    value = Engine(max_nodes=max_nodes).evaluate(inst)
    variants: list[BatteryVariant] = []
    if inst.crossratios and inst.degree > 0:
        if inst.points:
            for last, cr in enumerate(inst.crossratios):
                for pairing in all_pairings(cr):
                    engine = Engine(max_nodes=max_nodes)
                    got, _ = engine._eval(
                        inst, trace=False, root=True, override=_Choice(last, pairing)
                    )
                    variants.append(BatteryVariant(last, pairing, got))
        else:
            for last, cr in enumerate(inst.crossratios):
                lines = [x for x in cr if inst.condition(x).kind == LINE]
                for a, b in itertools.combinations(lines, 2):
                    if not admissible_line_pair(inst, last, a, b):
                        continue
                    rest = cr.entries - {a, b}
                    pairing = Pairing.of((a, b), rest)
                    engine = Engine(max_nodes=max_nodes)
                    got, _ = engine._eval(
                        inst, trace=False, root=True, override=_Choice(last, pairing, (a, b))
                    )
                    variants.append(BatteryVariant(last, pairing, got))
    return BatteryReport(inst, value, tuple(variants))
