"""From a validated chord algebra to the barcode of its 01-subspace.

The stage-r space is spanned by 01-composable words of action strictly
below r. The differential restricts to it and lowers the action, so column
reduction of the boundary matrix yields the barcode directly.

Classes alive at the enumeration bound are censored by default. They are
promoted to genuinely infinite bars in exactly two situations:

* the word enumeration terminated without the action bound ever cutting a
  viable branch, so the basis spans the whole 01-subspace and the homology
  computation is exact, or
* every chord on a 01-composability path has zero differential, which
  forces the differential to vanish on the whole 01-subspace at every
  truncation (:func:`certify_infinite`).

Anything else would be a guess: a class alive at the bound can die later
in the full, infinite-dimensional complex.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .dga import BudgetExceeded, DGASpec, Polynomial, enumerate_basis, validate
from .dga import apply_differential as _d
from .persistence import Bar, Barcode, Death, barcode_from_filtered_complex
from .z2 import Z2Column

__all__ = [
    "BudgetExceeded",
    "DEFAULT_BASIS_CAP",
    "LCHResult",
    "ValidationFailed",
    "certify_infinite",
    "lch_barcode",
    "rescale_form",
]

DEFAULT_BASIS_CAP = 100_000


class ValidationFailed(ValueError):
    """The spec failed structural validation; carries the report."""

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.lines()))


@dataclass(frozen=True)
class LCHResult:
    """Barcode of the 01-subspace computed under a truncation bound."""

    barcode: Barcode
    basis_size: int
    certified_infinite: bool
    truncation: Fraction


def certify_infinite(spec: DGASpec) -> bool:
    """Whether the differential vanishes on every chord touching a 01-path.

    A chord takes part in some 01-composable word exactly when its source
    is forward-reachable from a part-0 endpoint and its target can still
    head to a part-1 endpoint. Zero differentials on all such chords force
    the differential to vanish on the whole 01-subspace, so every bar of
    every truncation is genuinely infinite.

    Assumes the spec already passed validation.
    """
    chords = spec.chords.values()
    forward = {e for c in chords for e in (c.source, c.target) if e[0] == 0}
    grew = True
    while grew:
        grew = False
        for c in chords:
            if c.source in forward and c.target not in forward:
                forward.add(c.target)
                grew = True
    backward = {e for c in chords for e in (c.source, c.target) if e[0] == 1}
    grew = True
    while grew:
        grew = False
        for c in chords:
            if c.target in backward and c.source not in backward:
                backward.add(c.source)
                grew = True
    return not any(
        spec.differential_of(c.id)
        for c in chords
        if c.source in forward and c.target in backward
    )


def lch_barcode(
    spec: DGASpec,
    r_max: Fraction,
    max_basis: int = DEFAULT_BASIS_CAP,
) -> LCHResult:
    """Enumerate the 01-basis under r_max, reduce, and read off the barcode.

    Raises:
        ValidationFailed: the spec has structural violations.
        BudgetExceeded: the basis would exceed max_basis words; the cap
            exists so an exponentially large basis fails loudly instead of
            being silently cut below r_max.
    """
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    report = validate(spec)
    if not report.ok:
        raise ValidationFailed(report)

    basis = enumerate_basis(spec, 0, 1, r_max, max_words=max_basis)
    position = {word: idx for idx, (word, _) in enumerate(basis.words)}
    columns = []
    for word, _ in basis.words:
        image = _d(spec, Polynomial.of(word))
        columns.append(Z2Column(tuple(sorted(position[w] for w in image))))

    named = [(".".join(word), action) for word, action in basis.words]
    barcode = barcode_from_filtered_complex(
        named, columns, r_max, complete=basis.complete
    )
    certified = basis.complete or certify_infinite(spec)
    if certified and not basis.complete:
        barcode = Barcode(
            (
                Bar(b.birth, Death.infinite(), b.multiplicity)
                if b.death.is_censored else b
                for b in barcode.bars
            ),
            truncation=barcode.truncation,
        )
    return LCHResult(
        barcode=barcode,
        basis_size=len(basis.words),
        certified_infinite=certified,
        truncation=r_max,
    )


def rescale_form(result: LCHResult, c: Fraction) -> LCHResult:
    """Barcode of the same pair under the rescaled form: endpoints times c.

    Rescaling the ambient form by c > 0 multiplies every action by c, which
    is the multiplicative shift of the barcode by 1/c.
    """
    if c <= 0:
        raise ValueError("scale factor must be positive")
    return replace(
        result,
        barcode=result.barcode.multiplicative_shift(Fraction(1) / c),
        truncation=result.truncation * c,
    )
