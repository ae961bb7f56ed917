"""Finite-field point counts of the K-space, summed over its strata.

Every stratum is a product of open moduli spaces of distinct points on a
line, one per vertex, so the count over F_q is a polynomial in q.  Its
coefficients, recovered by exact interpolation, are the graded ranks that
the presentation must reproduce.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .complexes import ComplexError, SimplicialComplex
from .graphs import enumerate_graphs, vertices


class InterpolationError(RuntimeError):
    pass


def is_prime_power(q: int) -> bool:
    if q < 2:
        return False
    p = 2
    while p * p <= q:
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
        p += 1
    return True


def open_moduli_count(n: int, q: int) -> int:
    """Points of M_{0,n} over F_q: prod_{i=2}^{n-2} (q - i)."""
    if n < 3:
        raise ValueError(f"need at least 3 points, got {n}")
    if q < n - 1:
        raise ValueError(f"q = {q} is too small for {n} distinct points")
    return prod(q - i for i in range(2, n - 1))


def _valences(K: SimplicialComplex) -> list[list[int]]:
    full = K.ground.full
    return [[v.valence for v in vertices(G, full)] for G in enumerate_graphs(K, "all")]


def count_points(K: SimplicialComplex, q: int) -> int:
    if not is_prime_power(q):
        raise ValueError(f"q = {q} is not a prime power")
    if q < K.n - 1:
        raise ValueError(f"q = {q} is too small; need q >= {K.n - 1}")
    return sum(prod(open_moduli_count(n, q) for n in vals) for vals in _valences(K))


def stratum_counts(K: SimplicialComplex, q: int) -> list[int]:
    """Per-graph counts in enumeration order (they sum to count_points)."""
    return [prod(open_moduli_count(n, q) for n in vals) for vals in _valences(K)]


def evaluation_points(n_labels: int, how_many: int) -> list[int]:
    """The smallest primes >= n_labels - 1."""
    out = []
    p = max(2, n_labels - 1)
    while len(out) < how_many:
        if all(p % d for d in range(2, int(p**0.5) + 1)):
            out.append(p)
        p += 1
    return out


@dataclass(frozen=True)
class PointCountPolynomial:
    coeffs: tuple[int, ...]  # coefficient of q^d at position d

    def __call__(self, q: int) -> int:
        return sum(c * q**d for d, c in enumerate(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


def _solve_vandermonde(xs: list[int], ys: list[int]) -> list[Fraction]:
    m = len(xs)
    A = [[Fraction(x) ** k for k in range(m)] + [Fraction(y)] for x, y in zip(xs, ys)]
    for col in range(m):
        piv = next(r for r in range(col, m) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [v / pv for v in A[col]]
        for r in range(m):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[r][m] for r in range(m)]


def interpolate_profile(K: SimplicialComplex, threads: int = 1) -> PointCountPolynomial:
    if not K.is_at_least_triparted():
        raise ComplexError("complex is not at least triparted")
    D = K.n - 3
    xs = evaluation_points(K.n, D + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            ys = list(pool.map(lambda q: count_points(K, q), xs))
    else:
        ys = [count_points(K, q) for q in xs]
    sol = _solve_vandermonde(xs, ys)
    if any(c.denominator != 1 for c in sol):
        raise InterpolationError(f"non-integral point-count coefficients {sol}")
    coeffs = tuple(int(c) for c in sol)
    if coeffs[0] != 1 or coeffs[-1] != 1:
        raise InterpolationError(f"point count {coeffs} does not start and end with 1")
    if any(c < 0 for c in coeffs):
        raise InterpolationError(f"negative point-count coefficient in {coeffs}")
    if coeffs != coeffs[::-1]:
        raise InterpolationError(f"point count {coeffs} is not palindromic")
    return PointCountPolynomial(coeffs)


def report(K: SimplicialComplex, threads: int = 1) -> dict:
    """Oracle-versus-presentation comparison as a JSON-ready dict."""
    from .presentation import chow_ring

    poly = interpolate_profile(K, threads)
    profile = chow_ring(K).poincare_profile(threads)
    match = list(poly.coeffs) == list(profile.ranks)
    return {
        "point_count_coeffs": list(poly.coeffs),
        "presentation_ranks": list(profile.ranks),
        "torsion": [list(t) for t in profile.torsion],
        "match": match,
    }
