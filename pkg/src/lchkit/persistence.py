"""Barcodes of filtered complexes and their derived invariants.

Bars are left-open right-closed intervals (birth, death]. Births come from
a strict filtration: the stage-r space is spanned by basis elements of
action strictly below r. Deaths come in three flavors:

* finite: the class dies at a known action value,
* infinite: the class provably never dies,
* censored at r: the class is alive at the truncation bound r and its true
  death is unknown. Censoring is first-class; it is never silently promoted
  to infinity.

All values are exact rationals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from . import z2
from .rationals import format_rational, parse_rational

__all__ = [
    "ActionNotLowered",
    "Bar",
    "Barcode",
    "BeyondTruncation",
    "Bondedness",
    "Death",
    "LminValue",
    "additive_shift",
    "barcode_from_filtered_complex",
    "is_homologically_bonded",
    "l_min_s",
    "multiplicative_shift",
    "parse_barcode",
    "rank_between",
    "serialize_barcode",
]


class ActionNotLowered(ValueError):
    """A boundary entry's action is not strictly below its column's action."""


class BeyondTruncation(ValueError):
    """A query exceeds the truncation bound the barcode was computed under."""


@dataclass(frozen=True)
class Death:
    """Death state of a bar: finite value, infinite, or censored at a bound."""

    kind: str
    value: Fraction | None

    FINITE = "finite"
    INFINITE = "infinite"
    CENSORED = "censored"

    def __post_init__(self) -> None:
        if self.kind in (Death.FINITE, Death.CENSORED):
            if not isinstance(self.value, Fraction):
                raise ValueError(f"{self.kind} death needs an exact value")
        elif self.kind == Death.INFINITE:
            if self.value is not None:
                raise ValueError("infinite death carries no value")
        else:
            raise ValueError(f"unknown death kind {self.kind!r}")

    @classmethod
    def finite(cls, value: Fraction) -> "Death":
        return cls(Death.FINITE, value)

    @classmethod
    def infinite(cls) -> "Death":
        return cls(Death.INFINITE, None)

    @classmethod
    def censored(cls, at: Fraction) -> "Death":
        return cls(Death.CENSORED, at)

    @property
    def is_finite(self) -> bool:
        return self.kind == Death.FINITE

    @property
    def is_infinite(self) -> bool:
        return self.kind == Death.INFINITE

    @property
    def is_censored(self) -> bool:
        return self.kind == Death.CENSORED

    def sort_key(self) -> tuple[int, Fraction]:
        if self.is_finite:
            return (0, self.value)
        if self.is_censored:
            return (1, self.value)
        return (2, Fraction(0))

    def token(self) -> str:
        if self.is_finite:
            return format_rational(self.value)
        if self.is_censored:
            return f"cens@{format_rational(self.value)}"
        return "inf"

    @classmethod
    def from_token(cls, token: str) -> "Death":
        if token == "inf":
            return cls.infinite()
        if token.startswith("cens@"):
            return cls.censored(parse_rational(token[len("cens@"):]))
        return cls.finite(parse_rational(token))


@dataclass(frozen=True)
class Bar:
    """One interval (birth, death] with a positive multiplicity."""

    birth: Fraction
    death: Death
    multiplicity: int = 1

    def __post_init__(self) -> None:
        if not isinstance(self.birth, Fraction) or self.birth <= 0:
            raise ValueError(f"birth must be a positive rational, got {self.birth!r}")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")
        if self.death.is_finite and self.death.value <= self.birth:
            raise ValueError(
                f"finite death {self.death.value} must exceed birth {self.birth}"
            )
        if self.death.is_censored and self.death.value <= self.birth:
            raise ValueError(
                f"censoring bound {self.death.value} must exceed birth {self.birth}"
            )

    def alive_at(self, t: Fraction) -> bool:
        """Whether the bar is alive at stage t, i.e. birth < t <= death.

        A censored bar counts as alive up to its censoring bound.
        """
        if self.birth >= t:
            return False
        if self.death.is_infinite:
            return True
        return self.death.value >= t


class Bondedness(Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class LminValue:
    """Result of an l_min query: smallest qualifying birth, or None (+inf).

    ratio records the s the query was made at (None means s = infinity);
    uncertain is set when censored bars could lower the reported value.
    """

    value: Fraction | None
    ratio: Fraction | None
    uncertain: bool = False

    @property
    def is_finite(self) -> bool:
        return self.value is not None


class Barcode:
    """Canonical multiset of bars, optionally tagged with a truncation bound.

    Bars with identical (birth, death) are merged with summed multiplicity
    and the result is sorted by (birth, death), so equal barcodes compare
    equal structurally.
    """

    __slots__ = ("bars", "truncation")

    def __init__(self, bars: Iterable[Bar] = (), truncation: Fraction | None = None):
        merged: dict[tuple[Fraction, Death], int] = {}
        for bar in bars:
            key = (bar.birth, bar.death)
            merged[key] = merged.get(key, 0) + bar.multiplicity
        canonical = tuple(
            Bar(birth, death, mult)
            for (birth, death), mult in sorted(
                merged.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key())
            )
        )
        object.__setattr__(self, "bars", canonical)
        object.__setattr__(self, "truncation", truncation)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Barcode is immutable")

    def __iter__(self) -> Iterator[Bar]:
        return iter(self.bars)

    def __len__(self) -> int:
        return len(self.bars)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Barcode):
            return NotImplemented
        return self.bars == other.bars and self.truncation == other.truncation

    def __hash__(self) -> int:
        return hash((self.bars, self.truncation))

    def __repr__(self) -> str:
        inner = ", ".join(
            f"({format_rational(b.birth)}, {b.death.token()}]x{b.multiplicity}"
            for b in self.bars
        )
        trunc = (
            "" if self.truncation is None
            else f", truncation={format_rational(self.truncation)}"
        )
        return f"Barcode([{inner}]{trunc})"

    @property
    def total_multiplicity(self) -> int:
        return sum(b.multiplicity for b in self.bars)

    # ------------------------------------------------------------------
    # rank function

    def rank_between(self, s: Fraction, t: Fraction) -> int:
        """Rank of the structure map from stage s to stage t.

        Counts total multiplicity of bars born strictly before s and still
        alive at t. Requires 0 < s <= t; t may not exceed the truncation.
        """
        if not 0 < s <= t:
            raise ValueError(f"need 0 < s <= t, got s={s}, t={t}")
        if self.truncation is not None and t > self.truncation:
            raise BeyondTruncation(
                f"t={t} exceeds truncation {self.truncation}; deaths beyond the "
                "bound are unknown"
            )
        return sum(
            b.multiplicity for b in self.bars if b.birth < s and b.alive_at(t)
        )

    # ------------------------------------------------------------------
    # shifts

    def multiplicative_shift(self, c: Fraction) -> "Barcode":
        """Divide every endpoint (and the truncation) by c > 0."""
        if c <= 0:
            raise ValueError("multiplicative shift needs c > 0")
        shifted = [
            Bar(
                b.birth / c,
                Death(b.death.kind, None if b.death.value is None else b.death.value / c),
                b.multiplicity,
            )
            for b in self.bars
        ]
        trunc = None if self.truncation is None else self.truncation / c
        return Barcode(shifted, truncation=trunc)

    def additive_shift(self, c: Fraction) -> "Barcode":
        """Move every endpoint left by c >= 0.

        Bars whose death drops to or below zero are removed; bars whose
        birth drops to or below zero while the death stays positive cannot
        be represented over (0, +inf) and are dropped with a warning.
        """
        if c < 0:
            raise ValueError("additive shift needs c >= 0")
        out: list[Bar] = []
        for b in self.bars:
            new_birth = b.birth - c
            if b.death.value is not None and b.death.value - c <= 0:
                continue
            if new_birth <= 0:
                warnings.warn(
                    f"bar ({format_rational(b.birth)}, {b.death.token()}] shifted "
                    f"out of (0, +inf) by {format_rational(c)}; dropped",
                    stacklevel=2,
                )
                continue
            new_death = Death(
                b.death.kind, None if b.death.value is None else b.death.value - c
            )
            out.append(Bar(new_birth, new_death, b.multiplicity))
        trunc = self.truncation
        if trunc is not None:
            trunc = trunc - c
            if trunc <= 0:
                trunc = None
        return Barcode(out, truncation=trunc)

    # ------------------------------------------------------------------
    # invariants

    def l_min_s(self, s: Fraction | None) -> LminValue:
        """Smallest left end among bars of multiplicative length exceeding s.

        s is a rational > 1, or None for s = infinity (infinite bars only).
        A finite bar qualifies iff death/birth > s, strictly. A censored bar
        qualifies with certainty iff its censoring bound already forces the
        ratio above s; otherwise it may or may not qualify and the result is
        flagged uncertain when such a bar could lower the reported value.
        """
        if s is not None and s <= 1:
            raise ValueError(f"s must exceed 1, got {s}")
        best: Fraction | None = None
        maybe_lower: list[Fraction] = []
        for b in self.bars:
            if b.death.is_infinite:
                certain = True
            elif b.death.is_finite:
                certain = s is not None and b.death.value > s * b.birth
            else:  # censored
                certain = s is not None and b.death.value > s * b.birth
                if not certain:
                    maybe_lower.append(b.birth)
            if certain and (best is None or b.birth < best):
                best = b.birth
        uncertain = any(best is None or birth < best for birth in maybe_lower)
        return LminValue(value=best, ratio=s, uncertain=uncertain)

    def bondedness(self) -> Bondedness:
        """Whether an infinite bar exists (yes / no / unknown under censoring)."""
        if any(b.death.is_infinite for b in self.bars):
            return Bondedness.YES
        if any(b.death.is_censored for b in self.bars):
            return Bondedness.UNKNOWN
        return Bondedness.NO


# ----------------------------------------------------------------------
# construction from a filtered complex


def barcode_from_filtered_complex(
    basis: Sequence[tuple[str, Fraction]],
    boundaries: Sequence[z2.Z2Column],
    r_max: Fraction,
    complete: bool = False,
) -> Barcode:
    """Reduce a filtered complex and read off its barcode.

    Args:
        basis: (label, action) pairs, sorted non-decreasing by action under
            a deterministic tie-break. Actions must be positive and strictly
            below r_max.
        boundaries: one column per basis position; every entry must have
            strictly smaller action than its column (the differential lowers
            the filtration).
        r_max: the enumeration bound the basis was computed under. Classes
            alive at the top are censored at this bound.
        complete: set when the basis provably spans the whole complex, in
            which case surviving classes are genuinely infinite and the
            barcode carries no truncation.

    Raises:
        ActionNotLowered: a boundary entry does not lower the action.
        ValueError: on unsorted or out-of-range basis actions.
    """
    if len(basis) != len(boundaries):
        raise ValueError("basis and boundary lists differ in length")
    actions = [a for _, a in basis]
    for a in actions:
        if a <= 0:
            raise ValueError("basis actions must be positive")
        if a >= r_max:
            raise ValueError(
                f"basis action {a} not below the enumeration bound {r_max}"
            )
    for earlier, later in zip(actions, actions[1:]):
        if later < earlier:
            raise ValueError("basis must be sorted non-decreasing by action")
    for j, col in enumerate(boundaries):
        for r in col.entries:
            if r >= len(basis):
                raise ValueError(f"column {j} references row {r} outside the basis")
            if actions[r] >= actions[j]:
                raise ActionNotLowered(
                    f"column {basis[j][0]} (action {actions[j]}) has entry "
                    f"{basis[r][0]} (action {actions[r]}); the differential must "
                    "strictly lower the action"
                )

    reduced = z2.reduce(boundaries)
    bars: list[Bar] = []
    for col, row in reduced.pairings.items():
        if actions[row] == actions[col]:  # zero-length bar; cannot happen after
            continue                      # the strictness check, kept defensively
        bars.append(Bar(actions[row], Death.finite(actions[col])))
    tail = Death.infinite() if complete else Death.censored(r_max)
    for row in sorted(reduced.essentials):
        bars.append(Bar(actions[row], tail))
    return Barcode(bars, truncation=None if complete else r_max)


# ----------------------------------------------------------------------
# functional aliases for the barcode methods


def rank_between(barcode: Barcode, s: Fraction, t: Fraction) -> int:
    return barcode.rank_between(s, t)


def multiplicative_shift(barcode: Barcode, c: Fraction) -> Barcode:
    return barcode.multiplicative_shift(c)


def additive_shift(barcode: Barcode, c: Fraction) -> Barcode:
    return barcode.additive_shift(c)


def l_min_s(barcode: Barcode, s: Fraction | None) -> LminValue:
    return barcode.l_min_s(s)


def is_homologically_bonded(barcode: Barcode) -> Bondedness:
    return barcode.bondedness()


# ----------------------------------------------------------------------
# serialization: one line per bar, "birth death multiplicity"


def serialize_barcode(barcode: Barcode) -> str:
    """Line-oriented form: header comments, then one `birth death mult` line per bar."""
    lines = []
    if barcode.truncation is not None:
        lines.append(f"# truncation: {format_rational(barcode.truncation)}")
    for b in barcode.bars:
        lines.append(
            f"{format_rational(b.birth)} {b.death.token()} {b.multiplicity}"
        )
    return "\n".join(lines) + "\n"


def parse_barcode(text: str) -> Barcode:
    """Inverse of :func:`serialize_barcode`. Unknown comment lines are skipped."""
    truncation: Fraction | None = None
    bars: list[Bar] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("truncation:"):
                truncation = parse_rational(body[len("truncation:"):].strip())
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 'birth death multiplicity'")
        birth = parse_rational(parts[0])
        death = Death.from_token(parts[1])
        mult = int(parts[2])
        bars.append(Bar(birth, death, mult))
    return Barcode(bars, truncation=truncation)
