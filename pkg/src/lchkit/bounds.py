"""Closed-form chord existence bounds with applicability checking.

Every calculator takes exact rationals and returns a BoundReport carrying
the value, whether the underlying theorem's hypotheses hold, and which
named conditions failed when they do not. No floating point enters this
module; callers comparing against measured quantities convert at the
boundary.

l_min arguments accept either a raw rational (trusted) or an LminValue as
returned by the barcode query, in which case the ratio it was computed at
must match the s_plus/s_minus of the call. The theorems pair the cobordism
ratio with l_min at exactly that ratio; a silent mismatch would void the
guarantee.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .models import OrderingViolation
from .persistence import LminValue

__all__ = [
    "BoundReport",
    "DegenerateCobordism",
    "EmptyGrid",
    "NonPositive",
    "NotSeparating",
    "OrderingViolation",
    "ParameterOutOfRange",
    "RatioMismatch",
    "chord_bound_autonomous",
    "chord_bound_timedep",
    "chord_time_vs_pb",
    "cooperative_bound",
    "delta_separation_value",
    "pb_plus_lower_bound",
    "two_chords_bound",
]


class DegenerateCobordism(ValueError):
    """The momentum window is empty: s_minus >= s_plus."""


class NotSeparating(ValueError):
    """The separation value is not positive."""


class ParameterOutOfRange(ValueError):
    """A parameter left its admissible open interval."""


class EmptyGrid(ValueError):
    """No grid point satisfies the infimum's domain constraint."""


class NonPositive(ValueError):
    """An argument required to be positive is not."""


class RatioMismatch(ValueError):
    """An l_min value was computed at a different ratio than the bound uses."""


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one bound formula.

    value is the formula's output (None when it cannot be evaluated);
    applicable tells whether the theorem's hypotheses hold, and when it is
    False the violated_conditions name what failed and the value carries no
    guarantee. details holds formula-specific intermediate quantities.
    """

    value: Fraction | None
    applicable: bool
    violated_conditions: tuple[str, ...]
    formula_id: str
    details: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.applicable and not self.violated_conditions:
            raise ValueError("inapplicable reports must name violated conditions")


def _coerce_lmin(
    value: LminValue | Fraction | None, expected_ratio: Fraction | None
) -> Fraction | None:
    """Unwrap an l_min argument to a rational or None (+inf)."""
    if isinstance(value, LminValue):
        if value.ratio != expected_ratio:
            raise RatioMismatch(
                f"l_min was computed at ratio {value.ratio}, but this bound "
                f"pairs with ratio {expected_ratio}"
            )
        return value.value
    return value


def delta_separation_value(inf_on_Y1: Fraction, sup_on_Y0: Fraction) -> Fraction:
    """Separation of two level regions: inf over Y1 minus sup over Y0."""
    return inf_on_Y1 - sup_on_Y0


def pb_plus_lower_bound(
    l_min_value: LminValue | Fraction | None,
    s_minus: Fraction,
    s_plus: Fraction,
) -> BoundReport:
    """Lower bound 1/((s_plus - s_minus) * l_min) for the pb+ invariant."""
    if not 0 < s_minus < s_plus:
        raise DegenerateCobordism(f"need 0 < s_minus < s_plus, got {s_minus}, {s_plus}")
    l_min = _coerce_lmin(l_min_value, s_plus / s_minus)
    if l_min is None:
        return BoundReport(
            value=None,
            applicable=False,
            violated_conditions=("l_min_finite",),
            formula_id="pb_plus_from_lmin",
        )
    if l_min <= 0:
        raise NonPositive(f"l_min must be positive, got {l_min}")
    return BoundReport(
        value=1 / ((s_plus - s_minus) * l_min),
        applicable=True,
        violated_conditions=(),
        formula_id="pb_plus_from_lmin",
    )


def chord_bound_autonomous(
    l_min_value: LminValue | Fraction | None,
    s_minus: Fraction,
    s_plus: Fraction,
    delta: Fraction,
) -> BoundReport:
    """Chord time-length bound (s_plus - s_minus) * l_min / delta."""
    if not 0 < s_minus < s_plus:
        raise DegenerateCobordism(f"need 0 < s_minus < s_plus, got {s_minus}, {s_plus}")
    if delta <= 0:
        raise NotSeparating(f"separation must be positive, got {delta}")
    l_min = _coerce_lmin(l_min_value, s_plus / s_minus)
    if l_min is None:
        return BoundReport(
            value=None,
            applicable=False,
            violated_conditions=("l_min_finite",),
            formula_id="chord_time_autonomous",
        )
    if l_min <= 0:
        raise NonPositive(f"l_min must be positive, got {l_min}")
    return BoundReport(
        value=(s_plus - s_minus) * l_min / delta,
        applicable=True,
        violated_conditions=(),
        formula_id="chord_time_autonomous",
    )


def chord_bound_timedep(
    l_hat: LminValue | Fraction | None,
    s_minus: Fraction,
    s_plus: Fraction,
    delta: Fraction,
    e: Fraction,
    sup_dHdt_on_window: Fraction,
    c_min: Fraction,
    c_max: Fraction,
) -> BoundReport:
    """Time-dependent chord bound T = (s_plus - s_minus) * l_hat / ((1-2e) * delta).

    l_hat must be the stabilized invariant at ratio s_plus/s_minus. The
    report carries E = e*delta and the threshold E/T; it is applicable only
    when the separation is positive, l_hat is finite, and the supplied
    sup |dH/dt| over the window [c_min - E, c_max + E] is STRICTLY below
    E/T. Equality fails the gate.
    """
    if not 0 < e < Fraction(1, 2):
        raise ParameterOutOfRange(f"e must lie in (0, 1/2), got {e}")
    if not 0 < s_minus < s_plus:
        raise DegenerateCobordism(f"need 0 < s_minus < s_plus, got {s_minus}, {s_plus}")
    if c_min > c_max:
        raise ValueError(f"window is empty: c_min={c_min} > c_max={c_max}")
    if sup_dHdt_on_window < 0:
        raise NonPositive("sup |dH/dt| cannot be negative")
    l_val = _coerce_lmin(l_hat, s_plus / s_minus)
    violated: list[str] = []
    if delta <= 0:
        violated.append("delta_positive")
    if l_val is None:
        violated.append("l_min_finite")
    elif l_val <= 0:
        raise NonPositive(f"l_hat must be positive, got {l_val}")
    if violated:
        return BoundReport(
            value=None,
            applicable=False,
            violated_conditions=tuple(violated),
            formula_id="chord_time_timedep",
            details={"E": e * delta if delta > 0 else None},
        )
    E = e * delta
    T = (s_plus - s_minus) * l_val / ((1 - 2 * e) * delta)
    threshold = E / T
    if not sup_dHdt_on_window < threshold:
        violated.append("dHdt_below_threshold")
    return BoundReport(
        value=T,
        applicable=not violated,
        violated_conditions=tuple(violated),
        formula_id="chord_time_timedep",
        details={
            "E": E,
            "T": T,
            "threshold": threshold,
            "window": (c_min - E, c_max + E),
        },
    )


def cooperative_bound(
    l_min_fn,
    inf_h: Fraction,
    C: Fraction,
    l_min_inf: LminValue | Fraction | None,
    grid: Iterable[Fraction],
) -> BoundReport:
    """Chord bound for cooperative Hamiltonians, minimized over a grid of s.

    Evaluates (s - 1) * l_min(s) / (s * inf_h - C) at every grid point with
    s * inf_h > C, and additionally the s -> infinity branch
    l_min_inf / inf_h when l_min_inf is finite. The infimum over all s > 1
    is a step-function minimum the grid can only approach from above, so
    the returned value is a valid (possibly non-optimal) bound; refine the
    grid to tighten it.

    Raises EmptyGrid when no grid point clears C / inf_h, even if the
    infinite branch alone would produce a value.
    """
    if inf_h <= 0:
        raise NonPositive(f"inf_h must be positive, got {inf_h}")
    if C <= inf_h:
        raise ParameterOutOfRange(f"need C > inf_h, got C={C}, inf_h={inf_h}")
    usable = [s for s in grid if s * inf_h > C]
    if not usable:
        raise EmptyGrid(f"no grid point exceeds C/inf_h = {C / inf_h}")

    best: Fraction | None = None
    best_s: Fraction | None = None
    for s in sorted(usable):
        l_s = _coerce_lmin(l_min_fn(s), s)
        if l_s is None:
            continue
        candidate = (s - 1) * l_s / (s * inf_h - C)
        if best is None or candidate < best:
            best, best_s = candidate, s

    mu = _coerce_lmin(l_min_inf, None)
    branch = "grid"
    value = best
    details: dict[str, object] = {"grid_size": len(usable)}
    if best_s is not None:
        details["winning_s"] = best_s
    if mu is not None:
        mu_value = mu / inf_h
        details["mu"] = mu_value
        if value is None or mu_value < value:
            value, branch = mu_value, "infinite_bars"
    if value is None:
        return BoundReport(
            value=None,
            applicable=False,
            violated_conditions=("l_min_finite_somewhere",),
            formula_id="cooperative_chord_time",
            details=details,
        )
    details["branch"] = branch
    return BoundReport(
        value=value,
        applicable=True,
        violated_conditions=(),
        formula_id="cooperative_chord_time",
        details=details,
    )


def two_chords_bound(
    a_len: Fraction,
    A_len: Fraction,
    c: Fraction,
    Cup: Fraction,
) -> BoundReport:
    """Chord bound a(A - a) / (A c - a C) under the slope gate C/c < A/a."""
    if not 0 < a_len < A_len:
        raise OrderingViolation(f"need 0 < a_len < A_len, got {a_len}, {A_len}")
    if c <= 0:
        raise NonPositive(f"c must be positive, got {c}")
    if Cup < c:
        raise ParameterOutOfRange(f"need C >= c, got C={Cup}, c={c}")
    if not Cup / c < A_len / a_len:
        return BoundReport(
            value=None,
            applicable=False,
            violated_conditions=("C_over_c_below_A_over_a",),
            formula_id="two_chords_chord_time",
            details={"C_over_c": Cup / c, "A_over_a": A_len / a_len},
        )
    value = a_len * (A_len - a_len) / (A_len * c - a_len * Cup)
    return BoundReport(
        value=value,
        applicable=True,
        violated_conditions=(),
        formula_id="two_chords_chord_time",
        details={"C_over_c": Cup / c, "A_over_a": A_len / a_len},
    )


def chord_time_vs_pb(p: Fraction, delta: Fraction) -> Fraction:
    """Chord time-length bound 1/(p * delta) from a pb+ lower bound p."""
    if p <= 0:
        raise NonPositive(f"p must be positive, got {p}")
    if delta <= 0:
        raise NonPositive(f"delta must be positive, got {delta}")
    return 1 / (p * delta)
