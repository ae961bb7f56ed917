"""Exact integer linear algebra on sparse row lattices.

The elimination kernels come from the compiled ``_kernels_ext`` module when it
is importable and from ``_kernels_py`` otherwise.  Setting the environment
variable ``SIMPLICIAL_CHOW_PURE_PYTHON=1`` forces the Python kernels.  Results
are identical for both backends; the compiled one falls back to Python
integers on int64 overflow.
"""
from __future__ import annotations

import logging
import os

from . import _kernels_py

log = logging.getLogger(__name__)

_ext = None
if os.environ.get("SIMPLICIAL_CHOW_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels_ext as _ext  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        _ext = None

BACKEND = "compiled" if _ext is not None else "python"


def echelon(rows, backend: str | None = None):
    rows = list(rows)
    use = backend or BACKEND
    if use == "compiled" and _ext is not None:
        try:
            return _ext.echelon(rows)
        except OverflowError:
            log.info("int64 overflow in compiled echelon; redoing in Python")
    return _kernels_py.echelon(rows)


def reduce_vector(vec: dict, basis, pivot_index: dict, backend: str | None = None) -> dict:
    use = backend or BACKEND
    if use == "compiled" and _ext is not None:
        try:
            return _ext.reduce_vector(vec, basis, pivot_index)
        except OverflowError:
            log.info("int64 overflow in compiled reduction; redoing in Python")
    return _kernels_py.reduce_vector(vec, basis, pivot_index)


def smith_diagonal(matrix: list[list[int]]) -> list[int]:
    """Nonzero Smith invariants d1 | d2 | ... of a dense integer matrix."""
    A = [list(r) for r in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # pick the smallest nonzero entry in the remaining block as pivot
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        for r in A:
            r[t], r[j] = r[j], r[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                q = A[i][t] // p
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                if A[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = A[t][j] // p
                if q:
                    for r in A:
                        r[j] -= q * r[t]
                if A[t][j]:
                    done = False
            if done:
                # the pivot must divide the whole remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                A[t] = [x + y for x, y in zip(A[t], A[bad[0]])]
                continue
            # move the smallest remaining entry of row/column t to the pivot
            cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, i, j = min(cand)
            A[t], A[i] = A[i], A[t]
            for r in A:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(A[t][t]))
        t += 1
    return diag


def cokernel(basis, ncols: int) -> tuple[int, list[int]]:
    """Rank and torsion (elementary divisors > 1) of Z^ncols / span(basis).

    Unit-pivot rows are eliminated together with their pivot columns; the
    leftover rows with non-unit pivots go through a dense Smith form.
    """
    rank = ncols - len(basis)
    heavy = [r for r in basis if r[1][0] != 1]
    if not heavy:
        return rank, []
    units = [r for r in basis if r[1][0] == 1]
    unit_index = {r[0][0]: k for k, r in enumerate(units)}
    reduced = []
    for cols, vals in heavy:
        vec = dict(zip(cols, vals))
        # clear every unit-pivot column, left to right
        vec = _kernels_py.reduce_vector(vec, units, unit_index)
        assert not any(c in unit_index for c in vec)
        reduced.append(vec)
    free_cols = sorted({c for vec in reduced for c in vec})
    pos = {c: k for k, c in enumerate(free_cols)}
    dense = [[0] * len(free_cols) for _ in reduced]
    for row, vec in zip(dense, reduced):
        for c, v in vec.items():
            row[pos[c]] = v
    torsion = [d for d in smith_diagonal(dense) if d > 1]
    return rank, torsion
