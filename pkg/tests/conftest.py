"""Shared seeded generators for randomized checks.

Plain random.Random with explicit seeds, so every "N seeded instances"
driver is reproducible without hypothesis in the loop.
"""

from __future__ import annotations

import random
from fractions import Fraction

from lchkit.dga import Chord, DGASpec, Polynomial
from lchkit.models import CircleMorseData

PARTS = (0, 1)


def _endpoints(rng: random.Random) -> list[tuple[int, str]]:
    eps: list[tuple[int, str]] = []
    for part in PARTS:
        for comp in range(rng.randint(1, 2)):
            eps.append((part, f"c{comp}"))
    return eps


def random_valid_spec(
    seed: int,
    max_generators: int = 12,
    duplicate_actions: bool = False,
) -> DGASpec:
    """A random spec that passes validation, with d*d = 0 by layering.

    Chords are split into a zero layer (empty differential) and an upper
    layer whose differentials only mention zero-layer chords, so the square
    of the differential vanishes identically. Crossing chords (part 1 back
    to part 0) get large actions, which keeps long words rare and the
    word basis small.
    """
    rng = random.Random(seed)
    endpoints = _endpoints(rng)
    count = rng.randint(3, max_generators)
    denominator = rng.choice([1, 2, 4])

    chords: list[Chord] = []
    actions: list[Fraction] = []
    for idx in range(count):
        src = rng.choice(endpoints)
        # bias toward forward chords so 01-words exist
        if rng.random() < 0.7:
            candidates = [e for e in endpoints if e[0] != src[0]]
        else:
            candidates = endpoints
        dst = rng.choice(candidates)
        backward = src[0] == 1 and dst[0] == 0
        low, high = (30, 60) if backward else (1, 40)
        reusable = [a for a in actions if Fraction(low) <= a * denominator <= high]
        if duplicate_actions and reusable and rng.random() < 0.5:
            action = rng.choice(reusable)
        else:
            action = Fraction(rng.randint(low, high), denominator)
        actions.append(action)
        chords.append(Chord(f"g{idx}", src, dst, action))

    zero_layer = [c for c in chords if rng.random() < 0.6]
    if not zero_layer:
        zero_layer = chords[:1]
    zero_ids = {c.id for c in zero_layer}

    differential: dict[str, Polynomial] = {}
    for c in chords:
        if c.id in zero_ids:
            continue
        words: list[tuple[str, ...]] = []
        for z in zero_layer:
            if z.source == c.source and z.target == c.target and z.action < c.action:
                words.append((z.id,))
        for z1 in zero_layer:
            if z1.source != c.source:
                continue
            for z2 in zero_layer:
                if (
                    z2.source == z1.target
                    and z2.target == c.target
                    and z1.action + z2.action < c.action
                ):
                    words.append((z1.id, z2.id))
        if not words:
            continue
        rng.shuffle(words)
        chosen = words[: rng.randint(0, min(3, len(words)))]
        if chosen:
            differential[c.id] = Polynomial.of(*chosen)

    return DGASpec(
        name=f"random_{seed}",
        chords=chords,
        differential=differential,
    )


def equal_action_permutation(spec: DGASpec, seed: int) -> DGASpec:
    """Relabel ids within each equal-action group by a random permutation.

    The result is isomorphic as a filtered complex, so its barcode must be
    identical; only internal tie-breaking order changes.
    """
    rng = random.Random(seed)
    groups: dict[Fraction, list[str]] = {}
    for c in spec.chords.values():
        groups.setdefault(c.action, []).append(c.id)
    mapping: dict[str, str] = {}
    for ids in groups.values():
        shuffled = ids[:]
        rng.shuffle(shuffled)
        mapping.update(zip(ids, shuffled))

    chords = [
        Chord(mapping[c.id], c.source, c.target, c.action)
        for c in spec.chords.values()
    ]
    differential = {
        mapping[gen]: Polynomial.of(
            *(tuple(mapping[x] for x in word) for word in poly.words)
        )
        for gen, poly in spec.differential.items()
    }
    return DGASpec(
        name=spec.name + "_relabel",
        chords=chords,
        differential=differential,
    )


def random_morse_data(seed: int, max_pairs: int = 5) -> CircleMorseData:
    """Admissible random circle critical data with at most 2*max_pairs points."""
    rng = random.Random(seed)
    pairs = rng.randint(1, max_pairs)
    denominator = rng.choice([1, 2, 4])
    used: set[Fraction] = set()

    def fresh(lo: Fraction) -> Fraction:
        while True:
            value = lo + Fraction(rng.randint(1, 50), denominator)
            if value not in used:
                used.add(value)
                return value

    mins = [fresh(Fraction(0)) for _ in range(pairs)]
    points: list[tuple[str, Fraction]] = []
    for idx in range(pairs):
        left = mins[idx]
        right = mins[(idx + 1) % pairs]
        points.append(("min", left))
        points.append(("max", fresh(max(left, right))))
    return CircleMorseData(tuple(points))


def random_composable_word(
    spec: DGASpec, rng: random.Random, max_len: int = 5
) -> tuple[str, ...] | None:
    """A random endpoint-chained word over the spec's chords, or None."""
    chords = list(spec.chords.values())
    first = rng.choice(chords)
    word = [first.id]
    tail = first.target
    for _ in range(rng.randint(0, max_len - 1)):
        nexts = [c for c in chords if c.source == tail]
        if not nexts:
            break
        chosen = rng.choice(nexts)
        word.append(chosen.id)
        tail = chosen.target
    return tuple(word)
