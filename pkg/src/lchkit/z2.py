"""Sparse linear algebra over the two-element field.

This module carries the reduction kernel behind barcode computation. Two
interchangeable kernels exist: a compiled Cython one and a pure-Python
fallback. The compiled kernel is preferred when importable; set
``LCHKIT_Z2_BACKEND=python`` or ``=compiled`` to force a choice.

Row and column indices are positions in a caller-supplied total order;
this module never sees filtration values.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from . import _reduce_py

try:
    from . import _reduce_c
except ImportError:  # extension not built
    _reduce_c = None

_FORCED = os.environ.get("LCHKIT_Z2_BACKEND")
if _FORCED == "python":
    _kernel = _reduce_py
elif _FORCED == "compiled":
    if _reduce_c is None:
        raise ImportError(
            "LCHKIT_Z2_BACKEND=compiled but the compiled kernel is not available"
        )
    _kernel = _reduce_c
else:
    _kernel = _reduce_c if _reduce_c is not None else _reduce_py

BACKEND: str = _kernel.KERNEL_NAME


def available_kernels() -> dict[str, object]:
    """Kernels importable in this environment, keyed by name."""
    kernels: dict[str, object] = {_reduce_py.KERNEL_NAME: _reduce_py}
    if _reduce_c is not None:
        kernels[_reduce_c.KERNEL_NAME] = _reduce_c
    return kernels


class FiltrationViolation(ValueError):
    """A column refers to a row at or after its own position."""


@dataclass(frozen=True)
class Z2Column:
    """A vector over GF(2), stored as its strictly increasing support."""

    entries: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        prev = -1
        for r in self.entries:
            if r <= prev:
                raise ValueError(
                    f"support must be strictly increasing, got {self.entries}"
                )
            prev = r

    def __bool__(self) -> bool:
        return bool(self.entries)


def add_columns(a: Z2Column, b: Z2Column) -> Z2Column:
    """Symmetric difference of supports (addition over GF(2))."""
    out: list[int] = []
    i, j = 0, 0
    ea, eb = a.entries, b.entries
    while i < len(ea) and j < len(eb):
        if ea[i] < eb[j]:
            out.append(ea[i]); i += 1
        elif ea[i] > eb[j]:
            out.append(eb[j]); j += 1
        else:
            i += 1; j += 1
    out.extend(ea[i:])
    out.extend(eb[j:])
    return Z2Column(tuple(out))


@dataclass(frozen=True)
class ReducedMatrix:
    """Result of the left-to-right reduction.

    pairings maps column index -> pivot row index. essentials holds the row
    indices that are never a pivot and whose own column reduced to zero.
    """

    columns: tuple[Z2Column, ...]
    pairings: Mapping[int, int]
    essentials: frozenset[int]

    def __post_init__(self) -> None:
        if not isinstance(self.pairings, MappingProxyType):
            object.__setattr__(self, "pairings", MappingProxyType(dict(self.pairings)))


def reduce(columns: Sequence[Z2Column], backend: str | None = None) -> ReducedMatrix:
    """Run the persistence column reduction.

    Args:
        columns: boundary columns in filtration order. Column ``j`` may only
            reference rows ``< j``.
        backend: kernel override ("python" or "compiled"); default is the
            module-selected kernel.

    Raises:
        FiltrationViolation: if a column references a row at or after its
            own position.
    """
    supports = []
    for j, col in enumerate(columns):
        if col.entries and col.entries[-1] >= j:
            raise FiltrationViolation(
                f"column {j} contains row {col.entries[-1]} >= its own position"
            )
        supports.append(col.entries)

    kern = _kernel if backend is None else available_kernels()[backend]
    reduced, pairings = kern.reduce_columns(supports)

    pivot_rows = set(pairings.values())
    essentials = frozenset(
        i for i, support in enumerate(reduced) if not support and i not in pivot_rows
    )
    return ReducedMatrix(
        columns=tuple(Z2Column(tuple(s)) for s in reduced),
        pairings=MappingProxyType(dict(pairings)),
        essentials=essentials,
    )


def rank(columns: Sequence[Z2Column]) -> int:
    """Rank via dense Gaussian elimination, independent of the reduction kernel."""
    if not columns:
        return 0
    nrows = max((c.entries[-1] for c in columns if c.entries), default=-1) + 1
    if nrows == 0:
        return 0
    mat = np.zeros((nrows, len(columns)), dtype=np.uint8)
    for j, c in enumerate(columns):
        for r in c.entries:
            mat[r, j] = 1
    rk = 0
    for col in range(mat.shape[1]):
        pivots = np.nonzero(mat[rk:, col])[0]
        if pivots.size == 0:
            continue
        piv = pivots[0] + rk
        if piv != rk:
            mat[[rk, piv]] = mat[[piv, rk]]
        hits = np.nonzero(mat[:, col])[0]
        for r in hits:
            if r != rk:
                mat[r, :] ^= mat[rk, :]
        rk += 1
        if rk == nrows:
            break
    return rk
