"""Exact rational parsing and formatting.

All filtration values (chord actions, bar endpoints, bound parameters) are
`fractions.Fraction` instances. Floats are rejected everywhere: a float that
sneaks into the filtration would silently break exact comparisons.

The value +infinity has no Fraction representation; by convention it is
spelled ``None`` in code and ``"inf"`` in serialized form.
"""

from __future__ import annotations

from fractions import Fraction

INF_TOKEN = "inf"


def parse_rational(value: str | int) -> Fraction:
    """Parse an exact rational from ``"p/q"``, ``"n"``, or a plain int.

    Args:
        value: textual rational like ``"3/2"`` or ``"-1"``, or an int.

    Returns:
        The exact Fraction.

    Raises:
        ValueError: on floats, empty strings, or malformed input.
    """
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ValueError(
            f"floating-point value {value!r} rejected; use an exact 'p/q' string"
        )
    if not isinstance(value, str):
        raise ValueError(f"not a rational: {value!r}")
    text = value.strip()
    if not text:
        raise ValueError("empty rational")
    if any(ch in text for ch in ".eE"):
        raise ValueError(f"non-exact rational {value!r}; use 'p/q' form")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {value!r}") from exc


def parse_extended(value: str | int) -> Fraction | None:
    """Like :func:`parse_rational` but accepts ``"inf"`` for +infinity (None)."""
    if isinstance(value, str) and value.strip().lower() in (INF_TOKEN, "+inf", "infinity"):
        return None
    return parse_rational(value)


def format_rational(value: Fraction) -> str:
    """Render a Fraction as ``p/q``, or plain ``p`` when the denominator is 1."""
    return str(value)


def format_extended(value: Fraction | None) -> str:
    """Render a Fraction or the +infinity convention (None -> ``"inf"``)."""
    if value is None:
        return INF_TOKEN
    return format_rational(value)
