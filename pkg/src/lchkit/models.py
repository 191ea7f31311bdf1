"""Canonical example specs and the independent circle sublevel oracle.

Every constructor returns a plain DGASpec that passes validation, so each
one is also reachable through the CLI generator and the generic pipeline.
Irrational geometric actions have no place here: constructors take exact
rationals and record them as-is.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dga import Chord, DGASpec, Polynomial
from .lch import certify_infinite
from .persistence import Bar, Barcode, Death
from .rationals import format_rational

__all__ = [
    "CircleMorseData",
    "InvalidAlternation",
    "NonAdmissibleValues",
    "NonzeroDifferential",
    "OrderingViolation",
    "morse_circle_spec",
    "morse_sublevel_oracle",
    "stabilize_zero_diff",
    "stabilized_two_fiber_spec",
    "two_chord_spec",
    "two_fiber_spec",
]


class OrderingViolation(ValueError):
    """Chord actions violate the required strict ordering."""


class InvalidAlternation(ValueError):
    """Critical points do not alternate min/max around the circle."""


class NonAdmissibleValues(ValueError):
    """Critical values cannot come from a circle function."""


class NonzeroDifferential(ValueError):
    """Stabilization refused: it is only defined for zero differentials."""


_SRC = (0, "pt")
_DST = (1, "pt")


def two_fiber_spec(L: Fraction) -> DGASpec:
    """Two chords of equal action L, one in each direction, zero differential.

    The 01-words are the odd-length alternating words a, aba, ababa, ... of
    actions L, 3L, 5L, ...
    """
    if L <= 0:
        raise ValueError("chord action must be positive")
    return DGASpec(
        name=f"two_fiber_L{format_rational(L).replace('/', '_')}",
        chords=[
            Chord("a", _SRC, _DST, L),
            Chord("b", _DST, _SRC, L),
        ],
    )


def stabilize_zero_diff(spec: DGASpec, delta: Fraction = Fraction(0)) -> DGASpec:
    """Double every chord with action offsets {0, delta}, zero differential.

    Only specs whose differential vanishes on the 01-paths are accepted:
    there is no general combinatorial formula for a stabilized differential,
    so anything else is refused rather than guessed.
    """
    if delta < 0:
        raise ValueError("stabilization offset must be non-negative")
    if not certify_infinite(spec):
        raise NonzeroDifferential(
            f"spec {spec.name!r} has a nonzero differential on its 01-paths; "
            "stabilization is only defined for zero differentials"
        )
    doubled = []
    for chord in spec.chords.values():
        doubled.append(Chord(f"{chord.id}1", chord.source, chord.target, chord.action))
        doubled.append(Chord(
            f"{chord.id}2", chord.source, chord.target, chord.action + delta
        ))
    return DGASpec(name=f"{spec.name}_stab", chords=doubled)


def stabilized_two_fiber_spec(L: Fraction) -> DGASpec:
    """Four chords of equal action L: the two-fiber pair doubled in place.

    The number of 01-words of action (2k-1)L is 2^(2k-1).
    """
    spec = stabilize_zero_diff(two_fiber_spec(L), Fraction(0))
    return DGASpec(
        name=f"stabilized_two_fiber_L{format_rational(L).replace('/', '_')}",
        chords=spec.chords.values(),
    )


def two_chord_spec(a_len: Fraction, A_len: Fraction, case: str) -> DGASpec:
    """Two parallel chords a and A with 0 < |a| < |A| and a one-case differential.

    case "dA_zero" leaves the differential empty; case "dA_equals_a" sets
    d(A) = a. These are the only options for a rank-one differential here.
    """
    if not 0 < a_len < A_len:
        raise OrderingViolation(
            f"need 0 < a_len < A_len, got a_len={a_len}, A_len={A_len}"
        )
    if case not in ("dA_zero", "dA_equals_a"):
        raise ValueError(f"case must be 'dA_zero' or 'dA_equals_a', got {case!r}")
    differential = {}
    if case == "dA_equals_a":
        differential["A"] = Polynomial.of(("a",))
    return DGASpec(
        name=f"two_chord_{case}",
        chords=[
            Chord("a", _SRC, _DST, a_len),
            Chord("A", _SRC, _DST, A_len),
        ],
        differential=differential,
    )


# ----------------------------------------------------------------------
# circle Morse data


@dataclass(frozen=True)
class CircleMorseData:
    """Cyclic critical sequence of a Morse function on the circle.

    points lists (kind, value) around the circle, kinds strictly
    alternating between "min" and "max", values distinct and positive.
    """

    points: tuple[tuple[str, Fraction], ...]

    def __post_init__(self) -> None:
        pts = tuple(self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2 or len(pts) % 2 != 0:
            raise InvalidAlternation(
                "need an even number (>= 2) of alternating critical points"
            )
        for kind, value in pts:
            if kind not in ("min", "max"):
                raise InvalidAlternation(f"unknown critical kind {kind!r}")
            if value <= 0:
                raise NonAdmissibleValues(f"critical value {value} is not positive")
        for idx, (kind, _) in enumerate(pts):
            next_kind = pts[(idx + 1) % len(pts)][0]
            if kind == next_kind:
                raise InvalidAlternation(
                    f"positions {idx} and {(idx + 1) % len(pts)} are both {kind}"
                )
        values = [v for _, v in pts]
        if len(set(values)) != len(values):
            raise NonAdmissibleValues("critical values must be distinct")

    def neighbors(self, idx: int) -> tuple[int, int]:
        n = len(self.points)
        return ((idx - 1) % n, (idx + 1) % n)


def _check_admissible(data: CircleMorseData) -> None:
    for idx, (kind, value) in enumerate(data.points):
        if kind != "max":
            continue
        for nb in data.neighbors(idx):
            if data.points[nb][1] >= value:
                raise NonAdmissibleValues(
                    f"max {value} at position {idx} does not exceed its "
                    f"neighboring min {data.points[nb][1]}"
                )


def morse_circle_spec(
    data: CircleMorseData, shift: Fraction = Fraction(0)
) -> DGASpec:
    """One chord per critical point; d(max) = sum of its adjacent mins.

    Actions are the raw critical values minus the optional shift (default
    zero; all shifted values must stay positive). On a two-point circle the
    two neighbors of the max coincide, so its differential cancels to zero.
    """
    _check_admissible(data)
    chords = []
    differential = {}
    for idx, (kind, value) in enumerate(data.points):
        action = value - shift
        if action <= 0:
            raise NonAdmissibleValues(
                f"shift {shift} pushes critical value {value} out of (0, +inf)"
            )
        marker = "m" if kind == "min" else "M"
        chords.append(Chord(f"{marker}{idx}", _SRC, _DST, action))
        if kind == "max":
            left, right = data.neighbors(idx)
            terms = Polynomial.of((f"m{left}",)) + Polynomial.of((f"m{right}",))
            if terms:
                differential[f"M{idx}"] = terms
    return DGASpec(
        name=f"morse_circle_{len(data.points)}pts",
        chords=chords,
        differential=differential,
    )


def morse_sublevel_oracle(data: CircleMorseData) -> Barcode:
    """Sublevel-set persistence of the circle function, degree-summed.

    Sweeps critical values upward: a min births a component, a max either
    merges the two neighboring components (the younger one dies) or closes
    the circle, birthing the single infinite loop class. One component
    survives forever. Independent of the chord algebra pipeline.
    """
    _check_admissible(data)
    parent: dict[int, int] = {}
    birth: dict[int, Fraction] = {}

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    # Each arc between consecutive critical points drains to one min as the
    # level rises; past a processed max the two sides communicate. Track,
    # for each max, the component on each side via the adjacent mins.
    bars: list[Bar] = []
    order = sorted(range(len(data.points)), key=lambda i: data.points[i][1])
    for idx in order:
        kind, value = data.points[idx]
        if kind == "min":
            parent[idx] = idx
            birth[idx] = value
            continue
        left, right = data.neighbors(idx)
        root_l, root_r = find(left), find(right)
        if root_l == root_r:
            bars.append(Bar(value, Death.infinite()))  # the loop class
            continue
        elder, younger = (
            (root_l, root_r) if birth[root_l] <= birth[root_r] else (root_r, root_l)
        )
        bars.append(Bar(birth[younger], Death.finite(value)))
        parent[younger] = elder
    roots = {find(i) for i in parent}
    for root in roots:
        bars.append(Bar(birth[root], Death.infinite()))
    return Barcode(bars)
