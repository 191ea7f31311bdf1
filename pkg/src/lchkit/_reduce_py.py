"""Pure-Python column reduction kernel over GF(2).

Columns are held as arbitrary-precision integers used as bitmasks, so the
inner XOR is a single CPython big-int operation. This is the fallback for
the compiled kernel in ``_reduce_c``; both expose the same contract:

    reduce_columns(cols) -> (reduced supports, {column index: pivot row})

where ``cols`` is a sequence of strictly increasing row-index sequences.
Input validity is the caller's responsibility.
"""

from __future__ import annotations

from typing import Sequence

KERNEL_NAME = "python"


def _mask_of(support: Sequence[int]) -> int:
    m = 0
    for r in support:
        m |= 1 << r
    return m


def _support_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        lsb = mask & -mask
        out.append(lsb.bit_length() - 1)
        mask ^= lsb
    return tuple(out)


def reduce_columns(
    cols: Sequence[Sequence[int]],
) -> tuple[list[tuple[int, ...]], dict[int, int]]:
    """Left-to-right persistence reduction.

    While a column's lowest entry collides with the low of an earlier
    nonzero column, add that column (XOR). Returns the reduced supports and
    the pairing map column -> pivot row.
    """
    masks: list[int] = []
    low_owner: dict[int, int] = {}
    pairings: dict[int, int] = {}
    for j, support in enumerate(cols):
        m = _mask_of(support)
        while m:
            low = m.bit_length() - 1
            owner = low_owner.get(low)
            if owner is None:
                low_owner[low] = j
                pairings[j] = low
                break
            m ^= masks[owner]
        masks.append(m)
    return [_support_of(m) for m in masks], pairings
