"""Barcode rendering to standalone SVG.

The action axis is logarithmic, so a bar's drawn length is proportional to
log(death) - log(birth), the multiplicative extent that the stretching
invariants measure. Finite bars are solid segments, infinite bars carry an
arrowhead, censored bars are dashed and stop at the censoring boundary,
which is also drawn as a vertical dashed rule when the barcode is
truncated.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .persistence import Bar, Barcode
from .rationals import format_extended

__all__ = ["svg_barcode"]

_WIDTH = 720
_ROW = 22
_MARGIN_L = 72
_MARGIN_R = 56
_MARGIN_T = 44
_MARGIN_B = 40
_ARROW = 12


def _fmt(x: float) -> str:
    """Fixed-notation coordinate with a stable short form."""
    s = f"{x:.2f}"
    return s.rstrip("0").rstrip(".") if "." in s else s


def _axis_domain(bars: tuple[Bar, ...], truncation: Fraction | None):
    values = [float(b.birth) for b in bars]
    for b in bars:
        if b.death.value is not None:
            values.append(float(b.death.value))
    if truncation is not None:
        values.append(float(truncation))
    lo = min(values)
    hi = max(values)
    if hi <= lo:
        hi = lo * 4.0
    return lo, hi


def svg_barcode(barcode: Barcode, title: str = "", comment: str = "") -> str:
    """Render a barcode as a self-contained SVG document string.

    comment, when given, is embedded verbatim as an XML comment right after
    the declaration (used for run manifests).
    """
    bars = barcode.bars
    height = _MARGIN_T + _ROW * max(1, len(bars)) + _MARGIN_B
    parts = ['<?xml version="1.0" encoding="UTF-8"?>']
    if comment:
        parts.append("<!-- " + comment.replace("--", "- -") + " -->")
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
        f'height="{height}" viewBox="0 0 {_WIDTH} {height}">'
    )
    parts.append(
        "<defs><marker id='arrow' viewBox='0 0 10 10' refX='8' refY='5' "
        "markerWidth='7' markerHeight='7' orient='auto-start-reverse'>"
        "<path d='M 0 1 L 9 5 L 0 9 z' fill='#1f6feb'/></marker></defs>"
    )
    parts.append(f'<rect width="{_WIDTH}" height="{height}" fill="white"/>')
    if title:
        parts.append(
            f'<text x="{_MARGIN_L}" y="24" font-family="sans-serif" '
            f'font-size="14" fill="#24292f">{_escape(title)}</text>'
        )

    if not bars:
        parts.append(
            f'<text x="{_MARGIN_L}" y="{_MARGIN_T + 16}" font-family="sans-serif" '
            'font-size="13" fill="#57606a">empty barcode</text>'
        )
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    lo, hi = _axis_domain(bars, barcode.truncation)
    span = math.log(hi) - math.log(lo)
    x0 = float(_MARGIN_L)
    x1 = float(_WIDTH - _MARGIN_R - _ARROW)

    def xpos(value: float) -> float:
        return x0 + (math.log(value) - math.log(lo)) / span * (x1 - x0)

    axis_y = height - _MARGIN_B + 8

    # axis line and ticks at the distinct endpoint values
    parts.append(
        f'<line x1="{_fmt(x0)}" y1="{axis_y}" x2="{_fmt(x1 + _ARROW)}" '
        f'y2="{axis_y}" stroke="#57606a" stroke-width="1"/>'
    )
    ticks: list[Fraction] = sorted(
        {b.birth for b in bars}
        | {b.death.value for b in bars if b.death.value is not None}
        | ({barcode.truncation} if barcode.truncation is not None else set())
    )
    if len(ticks) > 12:
        stride = math.ceil(len(ticks) / 12)
        ticks = ticks[::stride]
    for tick in ticks:
        tx = xpos(float(tick))
        parts.append(
            f'<line x1="{_fmt(tx)}" y1="{axis_y - 4}" x2="{_fmt(tx)}" '
            f'y2="{axis_y + 4}" stroke="#57606a" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(tx)}" y="{axis_y + 18}" font-family="sans-serif" '
            f'font-size="11" fill="#57606a" text-anchor="middle">'
            f"{_escape(str(tick))}</text>"
        )

    if barcode.truncation is not None:
        tx = xpos(float(barcode.truncation))
        parts.append(
            f'<line x1="{_fmt(tx)}" y1="{_MARGIN_T - 8}" x2="{_fmt(tx)}" '
            f'y2="{axis_y}" stroke="#9a6700" stroke-width="1" '
            'stroke-dasharray="2 4"/>'
        )

    for row, bar in enumerate(bars):
        y = _MARGIN_T + _ROW * row + _ROW // 2
        bx = xpos(float(bar.birth))
        if bar.death.kind == "infinite":
            parts.append(
                f'<line x1="{_fmt(bx)}" y1="{y}" x2="{_fmt(x1)}" y2="{y}" '
                'stroke="#1f6feb" stroke-width="3" marker-end="url(#arrow)"/>'
            )
            label_x = x1 + _ARROW + 4
        elif bar.death.kind == "censored":
            ex = xpos(float(bar.death.value))
            parts.append(
                f'<line x1="{_fmt(bx)}" y1="{y}" x2="{_fmt(ex)}" y2="{y}" '
                'stroke="#8a8f98" stroke-width="3" stroke-dasharray="6 4"/>'
            )
            label_x = ex + 6
        else:
            ex = xpos(float(bar.death.value))
            parts.append(
                f'<line x1="{_fmt(bx)}" y1="{y}" x2="{_fmt(ex)}" y2="{y}" '
                'stroke="#1f6feb" stroke-width="3"/>'
            )
            label_x = ex + 6
        parts.append(
            f'<circle cx="{_fmt(bx)}" cy="{y}" r="3" fill="white" '
            'stroke="#1f6feb" stroke-width="1.5"/>'
        )
        if bar.multiplicity > 1:
            parts.append(
                f'<text x="{_fmt(label_x)}" y="{y + 4}" font-family="sans-serif" '
                f'font-size="11" fill="#24292f">&#215;{bar.multiplicity}</text>'
            )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
    )
