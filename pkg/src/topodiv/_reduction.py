"""Compiled inner loops for barcode computation.

Two kernels live here: a union-find pass that classifies sorted edges as
negative (component-merging) or positive (cycle-creating), and the Z/2 column
reduction that pairs creator rows with destroyer columns. Columns are kept as
descending-sorted index arrays; adding two columns is a merge that drops
common entries. Everything is deliberately allocation-light so the doubled
graphs coming out of cross-barcode assembly (hundreds of thousands of
triangles) reduce in well under a second: reduced columns live in one flat
pool, pivot ownership is an array lookup, and the working column ping-pongs
between two preallocated buffers.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def negative_edge_mask(edges_u, edges_v, n_vertices):
    """Mark edges (in filtration order) that merge two components.

    Plain union-find with path halving. An edge is negative exactly when its
    endpoints were in different components just before it is inserted.
    """
    parent = np.arange(n_vertices)
    out = np.zeros(edges_u.shape[0], dtype=np.bool_)
    for e in range(edges_u.shape[0]):
        ru = edges_u[e]
        while parent[ru] != ru:
            parent[ru] = parent[parent[ru]]
            ru = parent[ru]
        rv = edges_v[e]
        while parent[rv] != rv:
            parent[rv] = parent[parent[rv]]
            rv = parent[rv]
        if ru != rv:
            parent[ru] = rv
            out[e] = True
    return out


@njit(cache=True)
def reduce_columns(faces, skip):
    """Column reduction over Z/2 in filtration order.

    faces: (n_columns, width) int64, each row the face row-indices of one
        column sorted descending, padded with -1. Rows and columns are both
        indexed in filtration order of their respective dimensions.
    skip: columns to leave out entirely (the clearing optimization: creators
        identified one dimension up reduce to zero, so their work is skipped).

    Returns pivot row per column, -1 for zero or skipped columns.

    The working column sits in the middle of one oversized buffer, kept as a
    strictly descending run between start and end. Cancelling the top against
    an owner's pivot is then a start increment, and each remaining owner entry
    is folded in by shifting whichever side of the insertion point is shorter.
    Stored columns are short in practice, so this beats re-merging the whole
    working column per chain step.
    """
    n_cols = faces.shape[0]
    pivots = np.full(n_cols, -1, dtype=np.int64)
    n_rows = 0
    for c in range(n_cols):
        for t in range(faces.shape[1]):
            if faces[c, t] >= n_rows:
                n_rows = faces[c, t] + 1
    owner = np.full(n_rows, -1, dtype=np.int64)
    col_start = np.zeros(n_cols, dtype=np.int64)
    col_len = np.zeros(n_cols, dtype=np.int64)
    pool = np.empty(max(n_rows, 1024), dtype=np.int64)
    pool_used = 0
    cur = np.empty(2 * n_rows + 8, dtype=np.int64)
    anchor = n_rows + 4
    for c in range(n_cols):
        if skip[c]:
            continue
        start = anchor
        end = anchor
        for t in range(faces.shape[1]):
            if faces[c, t] >= 0:
                cur[end] = faces[c, t]
                end += 1
        while end > start:
            o = owner[cur[start]]
            if o < 0:
                break
            start += 1
            s = col_start[o]
            for j in range(1, col_len[o]):
                e = pool[s + j]
                lo = start
                hi = end
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if cur[mid] > e:
                        lo = mid + 1
                    else:
                        hi = mid
                if lo < end and cur[lo] == e:
                    if lo - start < end - lo - 1:
                        for i in range(lo, start, -1):
                            cur[i] = cur[i - 1]
                        start += 1
                    else:
                        for i in range(lo, end - 1):
                            cur[i] = cur[i + 1]
                        end -= 1
                else:
                    if lo - start <= end - lo:
                        for i in range(start - 1, lo - 1):
                            cur[i] = cur[i + 1]
                        cur[lo - 1] = e
                        start -= 1
                    else:
                        for i in range(end, lo, -1):
                            cur[i] = cur[i - 1]
                        cur[lo] = e
                        end += 1
        width = end - start
        if width > 0:
            while pool_used + width > pool.shape[0]:
                grown = np.empty(pool.shape[0] * 2, dtype=np.int64)
                grown[:pool_used] = pool[:pool_used]
                pool = grown
            pool[pool_used:pool_used + width] = cur[start:end]
            col_start[c] = pool_used
            col_len[c] = width
            pool_used += width
            owner[cur[start]] = c
            pivots[c] = cur[start]
    return pivots


def warm_up():
    """Trigger JIT compilation once so timing-sensitive callers stay honest."""
    u = np.array([0, 1], dtype=np.int64)
    v = np.array([1, 2], dtype=np.int64)
    negative_edge_mask(u, v, 3)
    faces = np.array([[1, 0, -1]], dtype=np.int64)
    reduce_columns(faces, np.zeros(1, dtype=np.bool_))
