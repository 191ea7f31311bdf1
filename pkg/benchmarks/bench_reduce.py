"""Benchmark the two column-reduction kernels against each other.

Generates filtered chain complexes of growing size by planting a canonical
differential and conjugating it with a random unit-upper-triangular change
of basis over the two-element field, then times ``z2.reduce`` under each
available kernel on identical inputs. Run from the repository root:

    python3 benchmarks/bench_reduce.py [--sizes 200,500,1000] [--repeats 3]
"""

from __future__ import annotations

import argparse
import random
import time

from lchkit import z2


def _planted_columns(rng: random.Random, n: int, fill: float) -> list[z2.Z2Column]:
    """Boundary columns of a random n-element filtered chain complex.

    Start from a canonical differential (each column either zero or hitting
    a single unused earlier row), then conjugate by V = I + N with N
    strictly upper triangular: D' = V^-1 D V. Conjugation preserves
    d o d = 0, so the result is a genuine boundary matrix with dense-ish
    columns once fill is nontrivial.
    """
    target: list[int | None] = [None] * n
    used: set[int] = set()
    for j in range(n - 1, 0, -1):
        if j in used or target[j] is not None:
            continue
        if rng.random() < 0.7:
            r = rng.randrange(0, j)
            if r not in used and target[r] is None:
                target[j] = r
                used.update((r, j))

    # dense GF(2) bit rows: row i of V as an int mask
    v_rows = [1 << i for i in range(n)]
    for i in range(n):
        for k in range(i + 1, n):
            if rng.random() < fill:
                v_rows[i] |= 1 << k

    # V^-1 = I + N + N^2 + ... via repeated squaring-free accumulation
    n_rows = [v_rows[i] ^ (1 << i) for i in range(n)]
    inv_rows = [1 << i for i in range(n)]
    power = n_rows[:]
    while any(power):
        inv_rows = [inv_rows[i] ^ power[i] for i in range(n)]
        nxt = [0] * n
        for i in range(n):
            mask = power[i]
            acc = 0
            while mask:
                k = (mask & -mask).bit_length() - 1
                acc ^= n_rows[k]
                mask &= mask - 1
            nxt[i] = acc
        power = nxt

    # columns of D' = V^-1 D V, computed column-wise on bit masks
    d_cols = [0 if target[j] is None else 1 << target[j] for j in range(n)]
    columns: list[z2.Z2Column] = []
    for j in range(n):
        # (D V) column j = sum over k with V[k, j] = 1 of D column k
        dv = 0
        for k in range(n):
            if (v_rows[k] >> j) & 1:
                dv ^= d_cols[k]
        # left-multiply by V^-1
        out = 0
        for i in range(n):
            if bin(inv_rows[i] & dv).count("1") & 1:
                out |= 1 << i
        entries = []
        mask = out
        while mask:
            entries.append((mask & -mask).bit_length() - 1)
            mask &= mask - 1
        columns.append(z2.Z2Column(tuple(entries)))
    return columns


def _time_kernel(columns: list[z2.Z2Column], backend: str, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        z2.reduce(columns, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best


def run(sizes: list[int], repeats: int, fill: float, seed: int) -> None:
    kernels = sorted(z2.available_kernels())
    print(f"kernels: {', '.join(kernels)} (default: {z2.BACKEND})")
    print(f"{'n':>6}  " + "".join(f"{name:>12}  " for name in kernels) + "ratio")
    for n in sizes:
        columns = _planted_columns(random.Random(seed), n, fill)
        times = {name: _time_kernel(columns, name, repeats) for name in kernels}
        sanity = {
            name: z2.reduce(columns, backend=name).pairings for name in kernels
        }
        first = next(iter(sanity.values()))
        if any(p != first for p in sanity.values()):
            raise SystemExit(f"kernels disagree at n={n}")
        row = f"{n:>6}  " + "".join(f"{times[name]:>11.4f}s " for name in kernels)
        if len(kernels) == 2:
            slow, fast = max(times.values()), min(times.values())
            row += f" {slow / fast:>5.1f}x"
        print(row)


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="200,500,1000,2000",
                        help="comma-separated complex sizes")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--fill", type=float, default=0.02,
                        help="density of the change-of-basis upper triangle")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    run([int(s) for s in args.sizes.split(",")], args.repeats, args.fill, args.seed)
