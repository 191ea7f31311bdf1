# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled column reduction kernel over GF(2).

Same contract as ``_reduce_py.reduce_columns``. The working column lives in
a dense uint64 bit buffer; finished columns are kept sparse (ascending row
arrays), so one reduction step XORs a sparse column into the dense buffer
and rescans for the new low bit downward from the previous top block.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t, int64_t

cdef extern from *:
    """
    static inline int lchkit_msb64(unsigned long long x)
    { return 63 - __builtin_clzll(x); }
    static inline int lchkit_ctz64(unsigned long long x)
    { return __builtin_ctzll(x); }
    """
    int lchkit_msb64(unsigned long long x) nogil
    int lchkit_ctz64(unsigned long long x) nogil

KERNEL_NAME = "compiled"


def reduce_columns(cols):
    """Left-to-right persistence reduction over GF(2).

    ``cols``: sequence of strictly increasing row-index sequences, row
    indices smaller than the column count. Returns (reduced supports as
    tuples, {column index: pivot row}).
    """
    cdef Py_ssize_t n = len(cols)
    pairings = {}
    if n == 0:
        return [], pairings

    cdef Py_ssize_t nblocks = (n + 63) >> 6
    cdef uint64_t* buf = <uint64_t*> malloc(nblocks * sizeof(uint64_t))
    cdef int64_t* lowmap = <int64_t*> malloc(n * sizeof(int64_t))
    cdef int64_t** stored = <int64_t**> malloc(n * sizeof(int64_t*))
    cdef int64_t* stored_len = <int64_t*> malloc(n * sizeof(int64_t))
    if buf == NULL or lowmap == NULL or stored == NULL or stored_len == NULL:
        free(buf); free(lowmap); free(stored); free(stored_len)
        raise MemoryError()

    cdef Py_ssize_t i, j, r, blk, top, low, owner, count, k
    cdef uint64_t w
    cdef int64_t* arr

    for i in range(nblocks):
        buf[i] = 0
    for i in range(n):
        lowmap[i] = -1
        stored[i] = NULL
        stored_len[i] = 0

    try:
        for j in range(n):
            top = -1
            for r_obj in cols[j]:
                r = r_obj
                blk = r >> 6
                buf[blk] |= (<uint64_t>1) << (r & 63)
                if blk > top:
                    top = blk

            low = -1
            while True:
                # locate the current low bit, scanning down from `top`
                low = -1
                while top >= 0:
                    if buf[top] != 0:
                        low = (top << 6) + lchkit_msb64(buf[top])
                        break
                    top -= 1
                if low < 0:
                    break  # column reduced to zero
                owner = lowmap[low]
                if owner < 0:
                    lowmap[low] = j
                    pairings[j] = low
                    break
                # XOR the owner column in; its entries never exceed `low`
                arr = stored[owner]
                for k in range(stored_len[owner]):
                    r = arr[k]
                    buf[r >> 6] ^= (<uint64_t>1) << (r & 63)

            if low >= 0:
                # extract and clear the surviving support, ascending
                count = 0
                for blk in range(top + 1):
                    w = buf[blk]
                    while w:
                        count += 1
                        w &= w - 1
                arr = <int64_t*> malloc(count * sizeof(int64_t))
                if arr == NULL:
                    raise MemoryError()
                count = 0
                for blk in range(top + 1):
                    w = buf[blk]
                    buf[blk] = 0
                    while w:
                        arr[count] = (blk << 6) + lchkit_ctz64(w)
                        count += 1
                        w &= w - 1
                stored[j] = arr
                stored_len[j] = count

        out_cols = []
        for j in range(n):
            arr = stored[j]
            if arr == NULL:
                out_cols.append(())
            else:
                out_cols.append(tuple([arr[k] for k in range(stored_len[j])]))
        return out_cols, pairings
    finally:
        for j in range(n):
            if stored[j] != NULL:
                free(stored[j])
        free(buf)
        free(lowmap)
        free(stored)
        free(stored_len)
