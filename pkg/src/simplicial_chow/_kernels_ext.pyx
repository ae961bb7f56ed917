# cython: language_level=3, boundscheck=False, wraparound=False
# distutils: language = c++
"""Compiled sparse integer elimination (int64 with overflow detection).

Same contract and same results as ``_kernels_py``; any intermediate that
leaves the int64 range raises OverflowError so the caller can fall back to
arbitrary-precision Python.
"""
from libcpp.vector cimport vector
from libcpp.queue cimport priority_queue

ctypedef long long i64

cdef extern from *:
    """
    static inline int ck_mul(long long a, long long b, long long *out) {
        return __builtin_mul_overflow(a, b, out);
    }
    static inline int ck_add(long long a, long long b, long long *out) {
        return __builtin_add_overflow(a, b, out);
    }
    """
    int ck_mul(i64 a, i64 b, i64 *out) nogil
    int ck_add(i64 a, i64 b, i64 *out) nogil


cdef inline i64 muladd(i64 acc, i64 f, i64 v) except? -1:
    # acc + f * v, checked
    cdef i64 prod, res
    if ck_mul(f, v, &prod) or ck_add(acc, prod, &res):
        raise OverflowError("int64 overflow in elimination")
    return res


cdef i64 floordiv(i64 a, i64 b):
    cdef i64 q = a // b
    return q


cdef void xgcd(i64 a, i64 b, i64 *g, i64 *s, i64 *t):
    cdef i64 s0 = 1, s1 = 0, t0 = 0, t1 = 1, q, r, tmp
    while b != 0:
        q = a // b
        r = a - q * b
        a = b
        b = r
        tmp = s0 - q * s1
        s0 = s1
        s1 = tmp
        tmp = t0 - q * t1
        t0 = t1
        t1 = tmp
    if a < 0:
        g[0] = -a
        s[0] = -s0
        t[0] = -t0
    else:
        g[0] = a
        s[0] = s0
        t[0] = t0


cdef void combine(vector[i64] &xc, vector[i64] &xv, i64 fx,
                  vector[i64] &yc, vector[i64] &yv, i64 fy,
                  vector[i64] &oc, vector[i64] &ov) except *:
    cdef size_t i = 0, j = 0, nx = xc.size(), ny = yc.size()
    cdef i64 c, v
    oc.clear()
    ov.clear()
    while i < nx or j < ny:
        if j >= ny or (i < nx and xc[i] < yc[j]):
            c = xc[i]
            v = muladd(0, fx, xv[i])
            i += 1
        elif i >= nx or yc[j] < xc[i]:
            c = yc[j]
            v = muladd(0, fy, yv[j])
            j += 1
        else:
            c = xc[i]
            v = muladd(muladd(0, fx, xv[i]), fy, yv[j])
            i += 1
            j += 1
        if v != 0:
            oc.push_back(c)
            ov.push_back(v)


def echelon(rows):
    """Row-echelon basis of the lattice spanned by sparse integer rows."""
    cdef i64 ncols = 0
    for cols, vals in rows:
        if len(cols):
            ncols = max(ncols, max(cols) + 1)
    cdef vector[vector[i64]] pcols
    cdef vector[vector[i64]] pvals
    cdef vector[int] pivot_of
    pivot_of.assign(ncols, -1)
    cdef vector[i64] acc
    acc.assign(ncols, 0)
    cdef vector[char] inheap
    inheap.assign(ncols, 0)
    cdef priority_queue[i64] heap  # max-heap of negated columns
    cdef vector[i64] rc, rv, tc, tv, nc, nv
    cdef i64 c, b, a, q, g, s, t, col
    cdef int p
    cdef size_t k
    for cols, vals in rows:
        for col, b in zip(cols, vals):
            acc[col] = b
            if not inheap[col]:
                inheap[col] = 1
                heap.push(-col)
        while not heap.empty():
            c = -heap.top()
            heap.pop()
            inheap[c] = 0
            b = acc[c]
            if b == 0:
                continue
            p = pivot_of[c]
            if p < 0:
                # install the remaining accumulator as a new pivot row
                rc.clear()
                rv.clear()
                rc.push_back(c)
                rv.push_back(b)
                acc[c] = 0
                while not heap.empty():
                    col = -heap.top()
                    heap.pop()
                    inheap[col] = 0
                    if acc[col] != 0:
                        rc.push_back(col)
                        rv.push_back(acc[col])
                        acc[col] = 0
                if b < 0:
                    for k in range(rv.size()):
                        rv[k] = -rv[k]
                pivot_of[c] = pcols.size()
                pcols.push_back(rc)
                pvals.push_back(rv)
                break
            a = pvals[p][0]
            if b % a == 0:
                q = b // a
                for k in range(pcols[p].size()):
                    col = pcols[p][k]
                    acc[col] = muladd(acc[col], -q, pvals[p][k])
                    if not inheap[col]:
                        inheap[col] = 1
                        heap.push(-col)
            else:
                # materialize the current row, do a unimodular gcd step
                rc.clear()
                rv.clear()
                rc.push_back(c)
                rv.push_back(b)
                acc[c] = 0
                while not heap.empty():
                    col = -heap.top()
                    heap.pop()
                    inheap[col] = 0
                    if acc[col] != 0:
                        rc.push_back(col)
                        rv.push_back(acc[col])
                        acc[col] = 0
                xgcd(a, b, &g, &s, &t)
                combine(pcols[p], pvals[p], s, rc, rv, t, nc, nv)
                combine(rc, rv, a // g, pcols[p], pvals[p], -(b // g), tc, tv)
                pcols[p] = nc
                pvals[p] = nv
                for k in range(tc.size()):
                    col = tc[k]
                    acc[col] = tv[k]
                    inheap[col] = 1
                    heap.push(-col)
    out = []
    for c in range(ncols):
        p = pivot_of[c]
        if p >= 0:
            out.append(([x for x in pcols[p]], [x for x in pvals[p]]))
    return out


def reduce_vector(vec, basis, pivot_index):
    """Canonical representative modulo an echelon basis (see _kernels_py)."""
    cdef dict out = {c: v for c, v in vec.items() if v}
    cdef list heap_cols = sorted(c for c in out if c in pivot_index)
    cdef priority_queue[i64] heap  # max-heap of negated columns
    cdef i64 c, b, q, a, val, nv, prev = -1
    for c in heap_cols:
        heap.push(-c)
    while not heap.empty():
        c = -heap.top()
        heap.pop()
        if c == prev:
            continue
        prev = c
        b = out.get(c, 0)
        if b == 0:
            continue
        pc, pv = basis[pivot_index[c]]
        a = pv[0]
        q = floordiv(b, a)
        if q == 0:
            continue
        for col, val in zip(pc, pv):
            nv = muladd(out.get(col, 0), -q, val)
            if nv != 0:
                if col not in out and col in pivot_index:
                    heap.push(-col)
                out[col] = nv
            else:
                out.pop(col, None)
    return out
