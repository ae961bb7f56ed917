"""Pure-Python sparse integer elimination.

Rows are pairs ``(cols, vals)`` of equal-length lists with strictly increasing
column indices and nonzero integer values.  The compiled module
``_kernels_ext`` implements the same two functions with the same results.
"""
from __future__ import annotations

import heapq


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if a < 0:
        return -a, -s0, -t0
    return a, s0, t0


def _combine(x_cols, x_vals, fx, y_cols, y_vals, fy):
    """fx * x + fy * y as a sparse row."""
    cols, vals = [], []
    i = j = 0
    nx, ny = len(x_cols), len(y_cols)
    while i < nx or j < ny:
        if j >= ny or (i < nx and x_cols[i] < y_cols[j]):
            v = fx * x_vals[i]
            c = x_cols[i]
            i += 1
        elif i >= nx or y_cols[j] < x_cols[i]:
            v = fy * y_vals[j]
            c = y_cols[j]
            j += 1
        else:
            v = fx * x_vals[i] + fy * y_vals[j]
            c = x_cols[i]
            i += 1
            j += 1
        if v:
            cols.append(c)
            vals.append(v)
    return cols, vals


def echelon(rows):
    """Row-echelon basis of the integer row lattice spanned by ``rows``.

    Rows are inserted one at a time; a collision with an existing pivot whose
    entry does not divide the new one is resolved by a unimodular gcd step,
    so every pivot ends positive and the basis spans exactly the input lattice.
    Returns the basis rows ordered by pivot column.
    """
    pivots: dict[int, tuple[list, list]] = {}
    for cols, vals in rows:
        cols, vals = list(cols), list(vals)
        while cols:
            c = cols[0]
            b = vals[0]
            p = pivots.get(c)
            if p is None:
                if b < 0:
                    vals = [-v for v in vals]
                pivots[c] = (cols, vals)
                break
            pc, pv = p
            a = pv[0]
            if b % a == 0:
                cols, vals = _combine(cols, vals, 1, pc, pv, -(b // a))
            else:
                g, s, t = xgcd(a, b)
                new_p = _combine(pc, pv, s, cols, vals, t)
                cols, vals = _combine(cols, vals, a // g, pc, pv, -(b // g))
                pivots[c] = new_p
    return [pivots[c] for c in sorted(pivots)]


def reduce_vector(vec: dict, basis, pivot_index: dict) -> dict:
    """Canonical representative of ``vec`` modulo the lattice of an echelon basis.

    At each pivot column (ascending) the entry is brought into ``[0, pivot)``.
    """
    vec = {c: v for c, v in vec.items() if v}
    heap = [c for c in vec if c in pivot_index]
    heapq.heapify(heap)
    seen = set()
    while heap:
        c = heapq.heappop(heap)
        if c in seen:
            continue
        seen.add(c)
        b = vec.get(c, 0)
        if not b:
            continue
        pc, pv = basis[pivot_index[c]]
        q = b // pv[0]
        if not q:
            continue
        for col, val in zip(pc, pv):
            nv = vec.get(col, 0) - q * val
            if nv:
                if col not in vec and col in pivot_index:
                    heapq.heappush(heap, col)
                vec[col] = nv
            else:
                vec.pop(col, None)
    return vec
