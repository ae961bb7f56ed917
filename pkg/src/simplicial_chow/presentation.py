"""The presented ring R_K: boundary divisors modulo disjointness and WDVV.

Each graded piece is computed over the integers.  Products of two disjoint
divisors are monomials, so degree ``d`` is first cut down to the free group
on surviving monomials (multisets of pairwise intersecting divisors).  The
image of the WDVV lattice times degree ``d-1`` monomials is then put in
echelon form, which gives the rank, torsion and canonical normal forms.
Columns are ordered from the largest monomial down, so normal forms are
written in the smallest monomials.
"""
from __future__ import annotations

import itertools
import logging
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from . import linalg
from .complexes import ComplexError, SimplicialComplex, bits, popcount
from .graphs import (
    BoundaryDivisor,
    KStableGraph,
    divisors,
    generic_meet,
    pushforward_target,
    separates_idx,
    validate,
)

log = logging.getLogger(__name__)

Monomial = tuple[int, ...]


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (a bug or a false modelling assumption)."""


# -- ring elements -----------------------------------------------------------


def _mono_key(m: Monomial):
    return (len(m), m)


@dataclass(frozen=True)
class RingElement:
    """Integer combination of monomials in generator indices.

    A monomial is the sorted tuple of its generator indices, with repeats.
    """

    terms: tuple[tuple[Monomial, int], ...] = ()

    @classmethod
    def from_dict(cls, d: Mapping[Monomial, int]) -> "RingElement":
        items = [(tuple(sorted(m)), int(c)) for m, c in d.items()]
        acc: dict[Monomial, int] = {}
        for m, c in items:
            acc[m] = acc.get(m, 0) + c
        return cls(tuple(sorted(((m, c) for m, c in acc.items() if c), key=lambda t: _mono_key(t[0]))))

    @classmethod
    def zero(cls) -> "RingElement":
        return cls()

    @classmethod
    def one(cls) -> "RingElement":
        return cls((((), 1),))

    @classmethod
    def generator(cls, i: int) -> "RingElement":
        return cls((((i,), 1),))

    def as_dict(self) -> dict[Monomial, int]:
        return dict(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "RingElement") -> "RingElement":
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return RingElement.from_dict(d)

    def __neg__(self) -> "RingElement":
        return RingElement(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def __mul__(self, other) -> "RingElement":
        if isinstance(other, int):
            return RingElement.from_dict({m: c * other for m, c in self.terms})
        d: dict[Monomial, int] = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = tuple(sorted(m1 + m2))
                d[m] = d.get(m, 0) + c1 * c2
        return RingElement.from_dict(d)

    __rmul__ = __mul__

    def degrees(self) -> list[int]:
        return sorted({len(m) for m, _ in self.terms})

    def homogeneous(self, d: int) -> "RingElement":
        return RingElement(tuple(t for t in self.terms if len(t[0]) == d))

    def to_json(self) -> list[dict]:
        return [
            {"monomial": [[g, len(list(grp))] for g, grp in itertools.groupby(m)], "coeff": str(c)}
            for m, c in self.terms
        ]

    @classmethod
    def from_json(cls, data: Iterable[Mapping]) -> "RingElement":
        d: dict[Monomial, int] = {}
        for term in data:
            mono: list[int] = []
            for g, e in term["monomial"]:
                if int(e) < 0:
                    raise ValueError("negative exponent")
                mono.extend([int(g)] * int(e))
            coeff = term["coeff"]
            if not isinstance(coeff, (str, int)) or isinstance(coeff, bool):
                raise ValueError(f"coefficient must be an integer string, got {coeff!r}")
            m = tuple(sorted(mono))
            d[m] = d.get(m, 0) + int(coeff)
        return cls.from_dict(d)

    def format(self, names: list[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.terms:
            factors = []
            for g, grp in itertools.groupby(m):
                e = len(list(grp))
                factors.append(names[g] + (f"^{e}" if e > 1 else ""))
            sign = "+" if c > 0 else "-"
            if not factors:
                parts.append(f"{sign}{abs(c)}")
            elif abs(c) == 1:
                parts.append(sign + "*".join(factors))
            else:
                parts.append(f"{sign}{abs(c)}*" + "*".join(factors))
        return " ".join(parts)


# -- generator table ---------------------------------------------------------


@dataclass(frozen=True)
class GeneratorTable:
    divisors: tuple[BoundaryDivisor, ...]
    names: tuple[str, ...]
    keys: Mapping[tuple[str, int], int] = field(repr=False, compare=False)

    @classmethod
    def build(cls, K: SimplicialComplex) -> "GeneratorTable":
        divs = tuple(divisors(K))
        keys = {(d.kind, d.subset): i for i, d in enumerate(divs)}
        return cls(divs, tuple(d.name(K.ground) for d in divs), keys)

    def __len__(self) -> int:
        return len(self.divisors)

    def index_of(self, D: BoundaryDivisor) -> int:
        return self.keys[(D.kind, D.subset)]

    def lookup(self, kind: str, subset: int) -> int | None:
        return self.keys.get((kind, subset))

    def index_of_name(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"unknown generator {name!r}") from None


@dataclass(frozen=True)
class RelationSet:
    quadratic: tuple[tuple[int, int], ...]
    linear: tuple[RingElement, ...]


@dataclass(frozen=True)
class PoincareProfile:
    ranks: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"ranks": list(self.ranks), "torsion": [list(t) for t in self.torsion]}


@dataclass
class _Degree:
    columns: list[Monomial]
    col_index: dict[Monomial, int]
    basis: list
    pivot_index: dict[int, int]
    rank: int
    torsion: list[int]
    nrows: int


class ChowRing:
    """R_K for one at-least-triparted complex, with cached graded pieces."""

    warn_rows = 500_000

    def __init__(self, K: SimplicialComplex, backend: str | None = None):
        if not K.is_at_least_triparted():
            raise ComplexError("complex is not at least triparted")
        self.K = K
        self.n = K.n
        self.dim = K.n - 3
        self.backend = backend
        self.gens = GeneratorTable.build(K)
        N = len(self.gens)
        self._compat = [0] * N
        disjoint_pairs = []
        for a in range(N):
            self._compat[a] |= 1 << a
            for b in range(a + 1, N):
                if generic_meet(K, self.gens.divisors[a].graph, self.gens.divisors[b].graph):
                    self._compat[a] |= 1 << b
                    self._compat[b] |= 1 << a
                else:
                    disjoint_pairs.append((a, b))
        self._disjoint_pairs = tuple(disjoint_pairs)
        self._lock = threading.Lock()
        self._degrees: dict[int, _Degree] = {}
        self._monomials: dict[int, list[Monomial]] = {0: [()]}
        self._linear_basis: list[dict[int, int]] | None = None

    # -- relations --------------------------------------------------------

    def _sep_sum(self, i: int, j: int, k: int, l: int) -> dict[Monomial, int]:
        full = self.K.ground.full
        return {
            (g,): 1
            for g, D in enumerate(self.gens.divisors)
            if separates_idx(D.graph, i, j, k, l, full)
        }

    def _indices(self, labels) -> tuple[int, ...]:
        idx = tuple(self.K.ground.index(x) for x in labels)
        if len(set(idx)) != len(idx):
            raise ComplexError(f"labels must be distinct, got {tuple(labels)}")
        return idx

    def wdvv(self, i, j, k, l) -> RingElement:
        """Sum of divisors separating ij|kl minus those separating ik|jl."""
        a, b, c, d = self._indices((i, j, k, l))
        return self._wdvv_idx(a, b, c, d)

    def _wdvv_idx(self, a: int, b: int, c: int, d: int) -> RingElement:
        return RingElement.from_dict(self._sep_sum(a, b, c, d)) - RingElement.from_dict(
            self._sep_sum(a, c, b, d)
        )

    def wdvv_keel_form(self, i, j, k, l) -> RingElement:
        """The same relation assembled from collision and two-component classes.

        E_st is the collision divisor of {s, t} (zero if the pair is not a face),
        and D_I runs over two-component divisors with the given pairs on
        opposite sides.
        """
        a, b, c, d = self._indices((i, j, k, l))
        return self._keel_side(a, b, c, d) - self._keel_side(a, c, b, d)

    def _keel_side(self, i: int, j: int, k: int, l: int) -> RingElement:
        K = self.K
        full = K.ground.full
        out: dict[Monomial, int] = {}
        for s, t in ((i, j), (k, l)):
            g = self.gens.lookup("Sigma", (1 << s) | (1 << t))
            if g is not None:
                out[(g,)] = out.get((g,), 0) + 1
        ij = (1 << i) | (1 << j)
        others = full & ~(ij | (1 << k) | (1 << l))
        sub = others
        while True:
            I = ij | sub
            if not K.has_face(I) and not K.has_face(full & ~I):
                g = self.gens.lookup("Pi", I if I & 1 else full & ~I)
                if g is None:
                    raise ConsistencyError(f"missing Pi generator for {K.ground.format(I)}")
                out[(g,)] = out.get((g,), 0) + 1
            if sub == 0:
                break
            sub = (sub - 1) & others
        return RingElement.from_dict(out)

    def _all_wdvv(self) -> list[RingElement]:
        out = []
        for a, b, c, d in itertools.combinations(range(self.n), 4):
            out.append(self._wdvv_idx(a, b, c, d))
            out.append(self._wdvv_idx(a, c, d, b))
            out.append(self._wdvv_idx(a, d, b, c))
        return out

    def relation_set(self) -> RelationSet:
        return RelationSet(self._disjoint_pairs, tuple(self._all_wdvv()))

    def is_disjoint_pair(self, a: int, b: int) -> bool:
        return a != b and not self._compat[a] >> b & 1

    def pushforward_divisor(self, I) -> RingElement:
        D = pushforward_target(self.K, I)
        if D is None:
            return RingElement.zero()
        return RingElement.generator(self.gens.index_of(D))

    # -- graded pieces ----------------------------------------------------

    def monomials(self, d: int) -> list[Monomial]:
        """Surviving degree-d monomials in column order (largest first)."""
        with self._lock:
            if d in self._monomials:
                return self._monomials[d]
        N = len(self.gens)
        out: list[Monomial] = []

        def rec(mono: list[int], start: int, allowed: int) -> None:
            if len(mono) == d:
                out.append(tuple(mono))
                return
            for g in range(start, N):
                if allowed >> g & 1:
                    mono.append(g)
                    rec(mono, g, allowed & self._compat[g])
                    mono.pop()

        rec([], 0, (1 << N) - 1)
        out.reverse()
        with self._lock:
            self._monomials[d] = out
        return out

    def linear_basis(self) -> list[dict[int, int]]:
        """Echelon basis of the integer span of all WDVV relations."""
        if self._linear_basis is None:
            deg1 = self._degree(1)
            self._linear_basis = [
                {deg1.columns[c][0]: v for c, v in zip(cols, vals)} for cols, vals in deg1.basis
            ]
        return self._linear_basis

    def _degree(self, d: int) -> _Degree:
        with self._lock:
            if d in self._degrees:
                return self._degrees[d]
        columns = self.monomials(d)
        col_index = {m: k for k, m in enumerate(columns)}
        rows = self.relation_rows(d, col_index)
        if len(rows) > self.warn_rows:
            log.warning("degree %d relation matrix has %d rows x %d columns", d, len(rows), len(columns))
        basis = linalg.echelon(rows, self.backend)
        pivot_index = {r[0][0]: k for k, r in enumerate(basis)}
        rank, torsion = linalg.cokernel(basis, len(columns))
        data = _Degree(columns, col_index, basis, pivot_index, rank, torsion, len(rows))
        with self._lock:
            self._degrees.setdefault(d, data)
            return self._degrees[d]

    def relation_rows(self, d: int, col_index: Mapping[Monomial, int] | None = None) -> list[tuple[list[int], list[int]]]:
        """Sparse rows spanning the degree-d relations, over the monomials of ``monomials(d)``."""
        if col_index is None:
            col_index = {m: k for k, m in enumerate(self.monomials(d))}
        rows = []
        if d == 1:
            for rel in self._all_wdvv():
                items = sorted((col_index[m], c) for m, c in rel.terms)
                if items:
                    rows.append(([c for c, _ in items], [v for _, v in items]))
        elif d >= 2:
            lin = self.linear_basis()
            prev = self.monomials(d - 1)
            for rel in lin:
                for m in prev:
                    acc: dict[int, int] = {}
                    for g, c in rel.items():
                        col = col_index.get(tuple(sorted(m + (g,))))
                        if col is not None:
                            acc[col] = acc.get(col, 0) + c
                    items = sorted((col, v) for col, v in acc.items() if v)
                    if items:
                        rows.append(([c for c, _ in items], [v for _, v in items]))
        return rows

    def graded_rank(self, d: int) -> tuple[int, list[int]]:
        if d < 0:
            raise ValueError("degree must be nonnegative")
        if d == 0:
            return 1, []
        deg = self._degree(d)
        if d > self.dim and (deg.rank or deg.torsion):
            raise ConsistencyError(
                f"degree {d} exceeds the dimension {self.dim} but has rank {deg.rank}, "
                f"torsion {deg.torsion}"
            )
        return deg.rank, list(deg.torsion)

    def poincare_profile(self, threads: int = 1) -> PoincareProfile:
        degrees = list(range(self.dim + 1))
        self.linear_basis()
        for d in degrees:
            self.monomials(d)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(self.graded_rank, degrees))
        else:
            results = [self.graded_rank(d) for d in degrees]
        return PoincareProfile(
            tuple(r for r, _ in results), tuple(tuple(t) for _, t in results)
        )

    # -- normal forms and products ----------------------------------------

    def normal_form(self, x: RingElement) -> RingElement:
        out: dict[Monomial, int] = {}
        for d in x.degrees():
            part = x.homogeneous(d)
            if d == 0:
                out.update(part.terms)
                continue
            deg = self._degree(d)
            vec: dict[int, int] = {}
            for m, c in part.terms:
                col = deg.col_index.get(m)
                if col is not None:
                    vec[col] = vec.get(col, 0) + c
            red = linalg.reduce_vector(vec, deg.basis, deg.pivot_index, self.backend)
            for col, c in red.items():
                out[deg.columns[col]] = c
        return RingElement.from_dict(out)

    def multiply(self, x: RingElement, y: RingElement) -> RingElement:
        prod = x * y
        prod = RingElement(tuple(t for t in prod.terms if len(t[0]) <= self.dim))
        return self.normal_form(prod)

    def stratum_factors(self, G: KStableGraph) -> list[int]:
        """Generators whose product is the class of G (one per split, m-1 per block)."""
        K = self.K
        report = validate(K, G)
        if not report.ok:
            raise ComplexError(f"not a K-stable graph: {report.failures}")
        factors = []
        for s in G.splits:
            g = self.gens.lookup("Pi", s)
            if g is None:
                raise ConsistencyError(f"split {K.ground.format(s)} has no divisor")
            factors.append(g)
        for b in G.blocks:
            members = bits(b)
            for other in members[1:]:
                g = self.gens.lookup("Sigma", (1 << members[0]) | (1 << other))
                if g is None:
                    raise ConsistencyError("collision pair has no divisor")
                factors.append(g)
        return factors

    def stratum_class(self, G: KStableGraph, anchor: Mapping[int, int] | None = None) -> RingElement:
        """Class of the closed stratum of G as an iterated product of divisors.

        ``anchor`` optionally picks, per block mask, the marking index paired
        with every other marking of that block (default: the first one).
        """
        factors = self.stratum_factors(G)
        if anchor:
            factors = [f for f in factors if self.gens.divisors[f].kind == "Pi"]
            for b in G.blocks:
                members = bits(b)
                if len(members) < 2:
                    continue
                a = anchor.get(b, members[0])
                for other in members:
                    if other != a:
                        factors.append(self.gens.lookup("Sigma", (1 << a) | (1 << other)))
        result = RingElement.one()
        for f in factors:
            result = self.multiply(result, RingElement.generator(f))
        return result

    # -- parsing ----------------------------------------------------------

    def parse_element(self, text: str) -> RingElement:
        """Parse ``+2*Pi{1,2}*Sigma{3,4}^2 -Pi{1,3}`` style text."""
        text = text.strip()
        if text in ("", "0"):
            return RingElement.zero()
        # split on top-level signs (not inside braces)
        terms, depth, cur = [], 0, ""
        for ch in text:
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
            if ch in "+-" and depth == 0 and cur.strip():
                terms.append(cur)
                cur = ""
            cur += ch
        if cur.strip():
            terms.append(cur)
        d: dict[Monomial, int] = {}
        for term in terms:
            term = term.strip()
            sign = -1 if term.startswith("-") else 1
            term = term.lstrip("+-").strip()
            coeff = sign
            mono: list[int] = []
            for factor in _split_factors(term):
                factor = factor.strip()
                if re.fullmatch(r"\d+", factor):
                    coeff *= int(factor)
                    continue
                m = re.fullmatch(r"((?:Pi|Sigma)\{[^}]*\})(?:\^(\d+))?", factor)
                if not m:
                    raise ValueError(f"cannot parse factor {factor!r}")
                g = self._generator_of(_normalize_name(m.group(1)))
                mono.extend([g] * int(m.group(2) or 1))
            key = tuple(sorted(mono))
            d[key] = d.get(key, 0) + coeff
        return RingElement.from_dict(d)

    def _generator_of(self, name: str) -> int:
        """Index of ``Pi{I}`` (either side of the split) or ``Sigma{s,t}``."""
        kind, _, rest = name.partition("{")
        labels = [s for s in rest.rstrip("}").split(",") if s]
        try:
            mask = self.K.ground.mask(labels)
        except (ComplexError, KeyError, ValueError):
            raise KeyError(f"unknown generator {name!r}") from None
        if kind == "Pi" and not mask & 1:
            mask = self.K.ground.full & ~mask
        g = self.gens.lookup(kind, mask)
        if g is None or len(set(labels)) != len(labels):
            raise KeyError(f"unknown generator {name!r}")
        return g

    def format(self, x: RingElement) -> str:
        return x.format(list(self.gens.names))


def _split_factors(term: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in term:
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
        if ch == "*" and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return out


def _normalize_name(name: str) -> str:
    return re.sub(r"\s+", "", name)


@lru_cache(maxsize=32)
def chow_ring(K: SimplicialComplex) -> ChowRing:
    return ChowRing(K)


def wdvv(K: SimplicialComplex, i, j, k, l) -> RingElement:
    return chow_ring(K).wdvv(i, j, k, l)


def relation_set(K: SimplicialComplex) -> RelationSet:
    return chow_ring(K).relation_set()


def graded_rank(K: SimplicialComplex, d: int) -> tuple[int, list[int]]:
    return chow_ring(K).graded_rank(d)


def poincare_profile(K: SimplicialComplex, threads: int = 1) -> PoincareProfile:
    return chow_ring(K).poincare_profile(threads)


def normal_form(K: SimplicialComplex, x: RingElement) -> RingElement:
    return chow_ring(K).normal_form(x)


def multiply(K: SimplicialComplex, x: RingElement, y: RingElement) -> RingElement:
    return chow_ring(K).multiply(x, y)


def stratum_class(K: SimplicialComplex, G: KStableGraph) -> RingElement:
    return chow_ring(K).stratum_class(G)


def pushforward_divisor(K: SimplicialComplex, I) -> RingElement:
    return chow_ring(K).pushforward_divisor(I)
