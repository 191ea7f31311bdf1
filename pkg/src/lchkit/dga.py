"""Chords, composable words, and the differential graded algebra they span.

The algebra is free, noncommutative, and unital over the two-element field.
Generators are chords, each with a positive rational action and endpoints
(part, component) on a two-part space. A word is a nonempty chord sequence
in which each chord starts where the previous one ended; its action is the
sum of the factors' actions (the empty word is the unit, action zero).

Differentials are input data, validated but never derived: each generator
maps to a polynomial whose words share the generator's endpoints and have
strictly smaller action, and the Leibniz extension must square to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

__all__ = [
    "BudgetExceeded",
    "Chord",
    "DGASpec",
    "Endpoint",
    "Polynomial",
    "UnknownChord",
    "ValidationReport",
    "Violation",
    "Word",
    "WordBasis",
    "apply_differential",
    "enumerate_basis",
    "enumerate_words",
    "is_ij_composable",
    "validate",
    "word_action",
]

Endpoint = tuple[int, str]
Word = tuple[str, ...]


class UnknownChord(KeyError):
    """A word references a chord id the spec does not define."""


class BudgetExceeded(RuntimeError):
    """Word enumeration hit its configured basis-size cap."""


@dataclass(frozen=True)
class Chord:
    """One generator: an id, source and target endpoints, and an action.

    Endpoints are (part, component) pairs with part in {0, 1}. Positivity
    of the action is a validity condition reported by :func:`validate`, not
    a construction-time constraint, so that invalid inputs can be loaded
    and diagnosed.
    """

    id: str
    source: Endpoint
    target: Endpoint
    action: Fraction

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("chord id must be non-empty")
        for end in (self.source, self.target):
            part, component = end
            if part not in (0, 1):
                raise ValueError(f"chord {self.id}: part must be 0 or 1, got {part!r}")
            if not isinstance(component, str):
                raise ValueError(f"chord {self.id}: component must be a token")
        if not isinstance(self.action, Fraction):
            raise ValueError(f"chord {self.id}: action must be an exact rational")


@dataclass(frozen=True)
class Polynomial:
    """A set of words with coefficients in the two-element field.

    Presence means coefficient one; addition is symmetric difference, so
    adding a word twice removes it.
    """

    words: frozenset[Word] = frozenset()

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls(frozenset())

    @classmethod
    def of(cls, *words: Sequence[str]) -> "Polynomial":
        return cls(frozenset(tuple(w) for w in words))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.words ^ other.words)

    def __bool__(self) -> bool:
        return bool(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def sorted_words(self) -> list[Word]:
        return sorted(self.words, key=lambda w: (len(w), w))

    def __repr__(self) -> str:
        if not self.words:
            return "Polynomial(0)"
        inner = " + ".join(
            ".".join(w) if w else "1" for w in self.sorted_words()
        )
        return f"Polynomial({inner})"


@dataclass(frozen=True)
class DGASpec:
    """An immutable chord algebra presentation.

    chords maps id to Chord; differential maps id to Polynomial, with an
    absent entry meaning zero. The note field carries free-form metadata,
    e.g. which rational stand-ins replace irrational geometric actions.
    """

    name: str
    chords: Mapping[str, Chord]
    differential: Mapping[str, Polynomial]
    note: str = ""

    def __init__(
        self,
        name: str,
        chords: Iterable[Chord],
        differential: Mapping[str, Polynomial] | None = None,
        note: str = "",
    ) -> None:
        by_id: dict[str, Chord] = {}
        for chord in chords:
            if chord.id in by_id:
                raise ValueError(f"duplicate chord id {chord.id!r}")
            by_id[chord.id] = chord
        diff = {
            gen: poly for gen, poly in (differential or {}).items() if poly
        }
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "chords", MappingProxyType(by_id))
        object.__setattr__(self, "differential", MappingProxyType(diff))
        object.__setattr__(self, "note", note)

    def chord(self, chord_id: str) -> Chord:
        try:
            return self.chords[chord_id]
        except KeyError:
            raise UnknownChord(chord_id) from None

    def differential_of(self, chord_id: str) -> Polynomial:
        self.chord(chord_id)  # raises UnknownChord for bad ids
        return self.differential.get(chord_id, Polynomial.zero())


@dataclass(frozen=True)
class Violation:
    kind: str
    generator: str | None
    detail: str
    residual: Polynomial | None = None

    def __str__(self) -> str:
        where = f" [{self.generator}]" if self.generator else ""
        return f"{self.kind}{where}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def lines(self) -> list[str]:
        if self.ok:
            return ["valid"]
        return [str(v) for v in self.violations]


# ----------------------------------------------------------------------
# word-level operations


def word_action(spec: DGASpec, word: Word) -> Fraction:
    """Sum of the factors' actions; the empty word (unit) has action zero."""
    total = Fraction(0)
    for chord_id in word:
        total += spec.chord(chord_id).action
    return total


def _is_composable(spec: DGASpec, word: Word) -> bool:
    for prev_id, next_id in zip(word, word[1:]):
        if spec.chord(prev_id).target != spec.chord(next_id).source:
            return False
    return True


def is_ij_composable(spec: DGASpec, word: Word, i: int, j: int) -> bool:
    """Whether a composable word starts on part i and ends on part j."""
    if not word:
        raise ValueError("the empty word has no endpoints")
    if not _is_composable(spec, word):
        raise ValueError(f"word {word!r} is not composable")
    first = spec.chord(word[0])
    last = spec.chord(word[-1])
    return first.source[0] == i and last.target[0] == j


def apply_differential(spec: DGASpec, poly: Polynomial) -> Polynomial:
    """Leibniz extension of the generator differentials, with cancellation.

    d(c_1 ... c_k) is the sum over positions m of c_1 ... d(c_m) ... c_k;
    the unit differentiates to zero.
    """
    out: set[Word] = set()
    for word in poly.words:
        for m, chord_id in enumerate(word):
            for dword in spec.differential_of(chord_id).words:
                new_word = word[:m] + dword + word[m + 1:]
                out.symmetric_difference_update((new_word,))
    return Polynomial(frozenset(out))


# ----------------------------------------------------------------------
# validation


def validate(spec: DGASpec) -> ValidationReport:
    """Report every structural violation; an empty report means valid.

    Checks, per generator g and word w in d(g): positive actions, word
    composability, endpoint agreement between w and g (the unit is accepted
    only for generators with equal source and target), strict action
    lowering, and d(d(g)) = 0.
    """
    violations: list[Violation] = []

    for chord in spec.chords.values():
        if chord.action <= 0:
            violations.append(Violation(
                "NonPositiveAction", chord.id,
                f"action {chord.action} is not positive",
            ))

    unresolved = False
    for gen_id, poly in spec.differential.items():
        if gen_id not in spec.chords:
            violations.append(Violation(
                "UnknownChord", gen_id, "differential of an undeclared chord",
            ))
            unresolved = True
            continue
        gen = spec.chords[gen_id]
        for word in poly.sorted_words():
            missing = [cid for cid in word if cid not in spec.chords]
            if missing:
                violations.append(Violation(
                    "UnknownChord", gen_id,
                    f"word {word!r} references undeclared chords {missing}",
                ))
                unresolved = True
                continue
            if not _is_composable(spec, word):
                violations.append(Violation(
                    "NonComposableWord", gen_id,
                    f"word {word!r} has mismatched consecutive endpoints",
                ))
                continue
            if word:
                first = spec.chords[word[0]]
                last = spec.chords[word[-1]]
                if first.source != gen.source or last.target != gen.target:
                    violations.append(Violation(
                        "EndpointMismatch", gen_id,
                        f"word {word!r} runs "
                        f"{first.source}->{last.target}, generator runs "
                        f"{gen.source}->{gen.target}",
                    ))
            elif gen.source != gen.target:
                violations.append(Violation(
                    "EndpointMismatch", gen_id,
                    "unit term requires equal source and target endpoints",
                ))
            action = word_action(spec, word)
            if action >= gen.action:
                violations.append(Violation(
                    "ActionNotLowered", gen_id,
                    f"word {word!r} has action {action}, not below "
                    f"{gen.action}",
                ))

    if not unresolved:
        for gen_id, poly in spec.differential.items():
            residual = apply_differential(spec, poly)
            if residual:
                violations.append(Violation(
                    "DSquaredNonzero", gen_id,
                    f"d(d({gen_id})) = {residual!r}",
                    residual=residual,
                ))

    return ValidationReport(tuple(violations))


# ----------------------------------------------------------------------
# word enumeration


@dataclass(frozen=True)
class WordBasis:
    """Ordered ij-words under an action bound.

    complete is set when the bound never cut off a branch that could still
    have produced an ij-word; the listed words then span the entire
    ij-subspace, not just its bounded part.
    """

    words: tuple[tuple[Word, Fraction], ...]
    complete: bool

    def __len__(self) -> int:
        return len(self.words)


def enumerate_basis(
    spec: DGASpec,
    i: int,
    j: int,
    bound: Fraction,
    max_words: int | None = None,
) -> WordBasis:
    """All ij-composable words of action strictly below the bound.

    Output is sorted by (action, length, lexicographic ids) and is fully
    deterministic. Enumeration is a depth-first search over the chord
    composability graph; positive actions guarantee termination.

    Raises:
        BudgetExceeded: more than max_words words fit under the bound.
        ValueError: non-positive bound or a chord of non-positive action.
    """
    if bound <= 0:
        raise ValueError("enumeration bound must be positive")
    for chord in spec.chords.values():
        if chord.action <= 0:
            raise ValueError(
                f"chord {chord.id} has non-positive action; enumeration "
                "would not terminate"
            )

    outgoing: dict[Endpoint, list[Chord]] = {}
    for chord in spec.chords.values():
        outgoing.setdefault(chord.source, []).append(chord)
    for chords in outgoing.values():
        chords.sort(key=lambda c: (c.action, c.id))

    # Endpoints from which some word can still end on part j: either the
    # endpoint already lies on part j, or a chord from it leads to such an
    # endpoint. Used to decide whether cutting a branch loses ij-words.
    heads_to_j: set[Endpoint] = set()
    frontier = {
        end
        for chord in spec.chords.values()
        for end in (chord.source, chord.target)
        if end[0] == j
    }
    while frontier:
        heads_to_j |= frontier
        frontier = {
            chord.source
            for chord in spec.chords.values()
            if chord.target in heads_to_j and chord.source not in heads_to_j
        }

    starts = sorted(
        {c.source for c in spec.chords.values() if c.source[0] == i},
        key=lambda e: e[1],
    )
    found: list[tuple[Word, Fraction]] = []
    complete = True
    stack: list[tuple[Endpoint, Fraction, Word]] = [
        (start, Fraction(0), ()) for start in starts
    ]
    while stack:
        at, action, prefix = stack.pop()
        for chord in outgoing.get(at, ()):
            total = action + chord.action
            if total >= bound:
                if chord.target in heads_to_j:
                    complete = False
                continue
            word = prefix + (chord.id,)
            if chord.target[0] == j:
                found.append((word, total))
                if max_words is not None and len(found) > max_words:
                    raise BudgetExceeded(
                        f"more than {max_words} words of action below "
                        f"{bound}; raise the budget or lower the bound"
                    )
            stack.append((chord.target, total, word))

    found.sort(key=lambda wa: (wa[1], len(wa[0]), wa[0]))
    return WordBasis(tuple(found), complete)


def enumerate_words(
    spec: DGASpec, i: int, j: int, bound: Fraction
) -> list[tuple[Word, Fraction]]:
    """List view of :func:`enumerate_basis` without a budget cap."""
    return list(enumerate_basis(spec, i, j, bound).words)
