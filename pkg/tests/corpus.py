"""Deterministic instance corpus shared by the test modules.

A fixed seed drives every draw, so the corpus is identical from run to
run.  Hand-built instances pin down the closed-form reductions, the
rigid degree-zero shapes and the running two-cross-ratio example;
random instances fill the rest of the range (degree at most 2, at most
three cross-ratios, three multi lines and two free ends).
"""

from __future__ import annotations

import itertools
import random

from crosskont import Instance, canonical_key, validate

SEED = 20260815
SIZE = 64


def _handmade() -> list[Instance]:
    return [
        Instance.build(1, points=[1, 2]),
        Instance.build(1, points=[1, 2], lines={3: 5}),
        Instance.build(2, points=[1, 2, 3, 4, 5]),
        Instance.build(2, points=[1, 2, 3, 4, 5], lines={6: 2, 7: 3}),
        Instance.build(0, lines={1: 2, 2: 3}, free=[3]),
        Instance.build(0, points=[1], free=[2, 3]),
        Instance.build(0, lines={1: 1, 2: 1}, free=[3, 4], crossratios=[[1, 2, 3, 4]]),
        Instance.build(
            2, points=[1, 2, 3], lines={4: 1, 5: 1}, crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]]
        ),
        Instance.build(
            2, points=[1, 2, 3], lines={4: 2, 5: 3}, crossratios=[[1, 2, 3, 4], [1, 2, 3, 5]]
        ),
        Instance.build(1, points=[1, 2], lines={3: 2}, free=[4], crossratios=[[1, 2, 3, 4]]),
        Instance.build(
            2, points=[1, 2, 3, 4, 5], lines={6: 2}, free=[7], crossratios=[[2, 5, 6, 7]]
        ),
    ]


def _random_fill(rng: random.Random, want: int, seen: set) -> list[Instance]:
    out: list[Instance] = []
    while len(out) < want:
        degree = rng.choice([0, 1, 1, 2, 2])
        crossings = rng.randint(0, 3)
        free = rng.randint(0, 2)
        lines = rng.randint(0, 3)
        points = 3 * degree - 1 - crossings + free
        if points < 0:
            continue
        labels = list(range(1, points + lines + free + 1))
        if crossings and len(labels) < 4:
            continue
        rng.shuffle(labels)
        point_labels = labels[:points]
        line_labels = labels[points : points + lines]
        free_labels = labels[points + lines :]
        quads = list(itertools.combinations(sorted(labels), 4))
        if crossings > len(quads):
            continue
        inst = Instance.build(
            degree,
            points=point_labels,
            lines={lab: rng.randint(1, 3) for lab in line_labels},
            free=free_labels,
            crossratios=rng.sample(quads, crossings),
        )
        if not validate(inst):
            continue
        key = canonical_key(inst)
        if key in seen:
            continue
        seen.add(key)
        out.append(inst)
    return out


def build_corpus(seed: int = SEED, size: int = SIZE) -> list[Instance]:
    base = _handmade()
    assert all(validate(inst) for inst in base)
    seen = {canonical_key(inst) for inst in base}
    rng = random.Random(seed)
    return base + _random_fill(rng, size - len(base), seen)


CORPUS = build_corpus()

SMALL = [inst for inst in CORPUS if len(inst.labels) <= 8]
