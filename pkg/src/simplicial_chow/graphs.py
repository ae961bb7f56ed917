"""Genus-0 K-stable graphs as (marking partition, split system) pairs.

A graph is stored as the blocks of the label map (one block per leg) and the
bipartitions of the marking set cut out by its edges.  Each split is stored
by its side containing the first label of the ground set.  Genus-0 trees with
labelled legs have no automorphisms, so this encoding is canonical: two graphs
are isomorphic iff their encodings are equal.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .complexes import (
    ComplexError,
    GroundSet,
    SimplicialComplex,
    bits,
    permute_mask,
    popcount,
)


class MalformedGraphError(ValueError):
    """The blocks/splits data do not describe a labelled forest at all."""


@dataclass(frozen=True)
class KStableGraph:
    blocks: tuple[int, ...]
    splits: tuple[int, ...] = ()

    @classmethod
    def make(cls, ground: GroundSet, blocks: Iterable, splits: Iterable = ()) -> "KStableGraph":
        """Build from label sets; split sides may be given as either side."""
        bl = [ground.mask(b) for b in blocks]
        sp = [canonical_split(ground.mask(s), ground.full) for s in splits]
        return cls(_sort_masks(bl), _sort_masks(sp))

    def codimension(self, n: int) -> int:
        return len(self.splits) + n - len(self.blocks)

    def sort_key(self, n: int):
        return (
            self.codimension(n),
            [bits(b) for b in self.blocks],
            [bits(s) for s in self.splits],
        )

    def block_of(self, i: int) -> int:
        for b in self.blocks:
            if b >> i & 1:
                return b
        raise KeyError(i)

    def permuted(self, perm, full: int) -> "KStableGraph":
        return KStableGraph(
            _sort_masks(permute_mask(b, perm) for b in self.blocks),
            _sort_masks(canonical_split(permute_mask(s, perm), full) for s in self.splits),
        )

    def to_json(self, ground: GroundSet) -> dict:
        full = ground.full
        return {
            "blocks": [ground.subset_labels(b) for b in self.blocks],
            "splits": [
                [ground.subset_labels(s), ground.subset_labels(full & ~s)] for s in self.splits
            ],
        }

    def describe(self, ground: GroundSet) -> str:
        bl = " ".join(ground.format(b) for b in self.blocks if popcount(b) > 1)
        sp = " ".join(
            ground.format(s) + "|" + ground.format(ground.full & ~s) for s in self.splits
        )
        parts = []
        if bl:
            parts.append("blocks " + bl)
        if sp:
            parts.append("splits " + sp)
        return "; ".join(parts) or "open"


def _sort_masks(masks: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(masks, key=lambda m: (bits(m), m)))


def canonical_split(side: int, full: int) -> int:
    """Representative side of a bipartition: the one holding bit 0."""
    return side if side & 1 else full & ~side


def graph_from_json(ground: GroundSet, data) -> KStableGraph:
    if not isinstance(data, dict) or "blocks" not in data:
        raise MalformedGraphError("graph JSON needs a 'blocks' list")
    splits = []
    for sp in data.get("splits", []):
        if not sp:
            raise MalformedGraphError("empty split entry")
        # either [[side], [other side]] or a single side
        if isinstance(sp[0], (list, tuple)):
            side = ground.mask([str(s) for s in sp[0]])
            if len(sp) > 1 and ground.mask([str(s) for s in sp[1]]) != ground.full & ~side:
                raise MalformedGraphError(f"split sides {sp!r} are not complementary")
        else:
            side = ground.mask([str(s) for s in sp])
        splits.append(side)
    blocks = [[str(s) for s in b] for b in data["blocks"]]
    if sum(len(b) for b in blocks) != len({s for b in blocks for s in b}):
        raise MalformedGraphError("blocks overlap")
    return KStableGraph.make(ground, blocks, splits)


def compatible(a: int, b: int, full: int) -> bool:
    """Two splits come from one tree iff some side intersection is empty."""
    return (a & ~b) == 0 or (b & ~a) == 0 or (~a & ~b & full) == 0 or (a & b) == 0


@dataclass(frozen=True)
class VertexView:
    index: int
    legs: tuple[int, ...]
    edges: tuple[int, ...]  # marking set on the far side of each incident edge
    edge_splits: tuple[int, ...]  # split id of each incident edge

    @property
    def valence(self) -> int:
        return len(self.legs) + len(self.edges)

    @property
    def markings(self) -> int:
        m = 0
        for b in self.legs:
            m |= b
        return m


def vertices(G: KStableGraph, full: int) -> list[VertexView]:
    """Reconstruct the tree from its split system.

    Vertex 0 carries the leg of the first label; every other vertex is the
    root of the cluster ``full & ~split`` for one split.
    """
    clusters = [full & ~s for s in G.splits]
    order = sorted(range(len(clusters)), key=lambda i: (-popcount(clusters[i]), bits(clusters[i])))
    parent: dict[int, int] = {}
    for i in order:
        best = None
        for j in order:
            c = clusters[j]
            if j != i and clusters[i] & c == clusters[i] and c != clusters[i]:
                if best is None or popcount(c) < popcount(clusters[best]):
                    best = j
        parent[i] = best if best is not None else -1
    vid = {-1: 0}
    for k, i in enumerate(order):
        vid[i] = k + 1
    legs: dict[int, list[int]] = {v: [] for v in vid.values()}
    for b in G.blocks:
        home = -1
        for i in order:
            c = clusters[i]
            if b & c == b and (home == -1 or popcount(c) < popcount(clusters[home])):
                home = i
        legs[vid[home]].append(b)
    edges: dict[int, list[tuple[int, int]]] = {v: [] for v in vid.values()}
    for i in order:
        child, par = vid[i], vid[parent[i]]
        edges[child].append((full & ~clusters[i], i))
        edges[par].append((clusters[i], i))
    out = []
    for v in range(len(order) + 1):
        es = sorted(edges[v], key=lambda e: (bits(e[0]), e[1]))
        out.append(
            VertexView(v, tuple(legs[v]), tuple(e[0] for e in es), tuple(e[1] for e in es))
        )
    return out


@dataclass
class ValidationReport:
    failures: list[tuple[int, str]]

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def conditions(self) -> list[int]:
        return sorted({c for c, _ in self.failures})


def check_structure(G: KStableGraph, full: int) -> None:
    covered = 0
    for b in G.blocks:
        if b == 0:
            raise MalformedGraphError("empty block")
        if covered & b:
            raise MalformedGraphError("blocks overlap")
        covered |= b
    if covered != full:
        raise MalformedGraphError("blocks do not cover the marking set")
    for s in G.splits:
        if s == 0 or s & full == full or s & ~full:
            raise MalformedGraphError("split side is empty or everything")
        for b in G.blocks:
            if b & s and b & ~s:
                raise MalformedGraphError("split side is not a union of blocks")


def validate(K: SimplicialComplex, G: KStableGraph) -> ValidationReport:
    """Check the four defining conditions; structural defects raise instead."""
    full = K.ground.full
    fmt = K.ground.format
    check_structure(G, full)
    failures: list[tuple[int, str]] = []
    tree = True
    if len(set(G.splits)) != len(G.splits):
        failures.append((1, "repeated edge split"))
        tree = False
    for a, b in itertools.combinations(G.splits, 2):
        if not compatible(a, b, full):
            failures.append((1, f"splits {fmt(a)} and {fmt(b)} do not come from one tree"))
            tree = False
    for b in G.blocks:
        if not K.has_face(b):
            failures.append((2, f"leg {fmt(b)} is not a face"))
    if tree:
        for v in vertices(G, full):
            if len(v.edges) <= 1 and K.has_face(v.markings):
                failures.append((3, f"leaf vertex markings {fmt(v.markings)} form a face"))
            if v.valence < 3:
                failures.append((4, f"vertex {v.index} has only {v.valence} half edges"))
    return ValidationReport(failures)


def is_valid(K: SimplicialComplex, G: KStableGraph) -> bool:
    try:
        return validate(K, G).ok
    except MalformedGraphError:
        return False


def codimension(K: SimplicialComplex, G: KStableGraph) -> int:
    return G.codimension(K.n)


def open_graph(K: SimplicialComplex) -> KStableGraph:
    return KStableGraph(tuple(1 << i for i in range(K.n)), ())


# -- enumeration -------------------------------------------------------------


def face_partitions(K: SimplicialComplex) -> list[tuple[int, ...]]:
    """All set partitions of the ground set into faces."""
    n = K.n
    out: list[tuple[int, ...]] = []

    def rec(i: int, blocks: list[int]) -> None:
        if i == n:
            out.append(_sort_masks(blocks))
            return
        bit = 1 << i
        for k in range(len(blocks)):
            merged = blocks[k] | bit
            if K.has_face(merged):
                blocks[k] = merged
                rec(i + 1, blocks)
                blocks[k] ^= bit
        blocks.append(bit)
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    return out


def _split_systems(K: SimplicialComplex, blocks: Sequence[int]) -> list[tuple[int, ...]]:
    full = K.ground.full
    nb = len(blocks)
    candidates = []
    # subsets of blocks containing block 0, each side holding >= 2 blocks
    for sel in range(1, 1 << nb, 2):
        k = popcount(sel)
        if k < 2 or nb - k < 2:
            continue
        side = 0
        for j in bits(sel):
            side |= blocks[j]
        if K.has_face(side) or K.has_face(full & ~side):
            continue
        candidates.append(side)
    candidates.sort(key=lambda m: (bits(m), m))
    max_edges = nb - 3
    out: list[tuple[int, ...]] = []

    def rec(start: int, chosen: list[int]) -> None:
        out.append(tuple(chosen))
        if len(chosen) == max_edges:
            return
        for idx in range(start, len(candidates)):
            c = candidates[idx]
            if all(compatible(c, o, full) for o in chosen):
                chosen.append(c)
                rec(idx + 1, chosen)
                chosen.pop()

    rec(0, [])
    return out


@lru_cache(maxsize=64)
def _all_graphs(K: SimplicialComplex) -> tuple[KStableGraph, ...]:
    graphs = []
    for blocks in face_partitions(K):
        if len(blocks) < 3:
            continue
        for splits in _split_systems(K, blocks):
            graphs.append(KStableGraph(blocks, _sort_masks(splits)))
    n = K.n
    graphs.sort(key=lambda g: g.sort_key(n))
    return tuple(graphs)


def enumerate_graphs(K: SimplicialComplex, codim="all") -> list[KStableGraph]:
    """All K-stable graphs of one codimension (or all), canonically ordered."""
    if not K.is_at_least_triparted():
        raise ComplexError("complex is not at least triparted")
    graphs = _all_graphs(K)
    if codim == "all":
        return list(graphs)
    codim = int(codim)
    n = K.n
    return [g for g in graphs if g.codimension(n) == codim]


# -- order, separation, meets ------------------------------------------------


def leq(K: SimplicialComplex, G1: KStableGraph, G2: KStableGraph) -> bool:
    """True iff the stratum of G1 lies in the closure of the stratum of G2."""
    for b in G2.blocks:
        if not any(b & c == b for c in G1.blocks):
            return False
    s1 = set(G1.splits)
    return all(s in s1 for s in G2.splits)


def separates(K: SimplicialComplex, G: KStableGraph, i, j, k, l) -> bool:
    labels = (i, j, k, l)
    idx = [K.ground.index(x) for x in labels]
    if len(set(idx)) != 4:
        raise ComplexError(f"separation needs four distinct labels, got {labels}")
    return separates_idx(G, *idx, full=K.ground.full)


def separates_idx(G: KStableGraph, i: int, j: int, k: int, l: int, full: int) -> bool:
    ij = (1 << i) | (1 << j)
    kl = (1 << k) | (1 << l)
    for b in G.blocks:
        if b & ij == ij or b & kl == kl:
            return True
    for s in G.splits:
        t = full & ~s
        if (s & ij == ij and t & kl == kl) or (t & ij == ij and s & kl == kl):
            return True
    return False


def generic_meet(K: SimplicialComplex, G1: KStableGraph, G2: KStableGraph) -> list[KStableGraph]:
    """Generic (G1, G2)-graphs: the single candidate if it is K-stable, else none."""
    merged: list[int] = []
    for b in list(G1.blocks) + list(G2.blocks):
        for m in [m for m in merged if m & b]:
            merged.remove(m)
            b |= m
        merged.append(b)
    splits = sorted(set(G1.splits) | set(G2.splits), key=lambda m: (bits(m), m))
    candidate = KStableGraph(_sort_masks(merged), tuple(splits))
    full = K.ground.full
    for s in splits:
        for b in candidate.blocks:
            if b & s and b & ~s & full:
                return []
    if not validate(K, candidate).ok:
        return []
    return [candidate]


# -- codimension-one graphs --------------------------------------------------


@dataclass(frozen=True)
class BoundaryDivisor:
    kind: str  # "Pi" or "Sigma"
    subset: int  # canonical I for Pi, {s, t} for Sigma
    graph: KStableGraph

    def name(self, ground: GroundSet) -> str:
        return self.kind + ground.format(self.subset)

    def sort_key(self):
        return (0 if self.kind == "Pi" else 1, bits(self.subset))


def pi_divisor(K: SimplicialComplex, I) -> BoundaryDivisor:
    full = K.ground.full
    side = canonical_split(K.ground.mask(I), full)
    k = popcount(side)
    if not 2 <= k <= K.n - 2:
        raise ComplexError(f"Pi needs 2 <= #I <= #S-2, got {K.ground.format(side)}")
    if K.has_face(side) or K.has_face(full & ~side):
        raise ComplexError(f"Pi{K.ground.format(side)} is not K-stable: a side is a face")
    G = KStableGraph(tuple(1 << i for i in range(K.n)), (side,))
    return BoundaryDivisor("Pi", side, G)


def sigma_divisor(K: SimplicialComplex, s, t) -> BoundaryDivisor:
    pair = K.ground.mask([s, t])
    if popcount(pair) != 2:
        raise ComplexError("Sigma needs two distinct labels")
    if not K.has_face(pair):
        raise ComplexError(f"Sigma{K.ground.format(pair)} needs the pair to be a face")
    if K.n - 1 < 3:
        raise ComplexError("Sigma needs at least 4 labels")
    blocks = [pair] + [1 << i for i in range(K.n) if not pair >> i & 1]
    return BoundaryDivisor("Sigma", pair, KStableGraph(_sort_masks(blocks), ()))


def divisor_of_graph(K: SimplicialComplex, G: KStableGraph) -> BoundaryDivisor:
    if G.codimension(K.n) != 1:
        raise ComplexError("not a codimension-1 graph")
    if G.splits:
        return BoundaryDivisor("Pi", G.splits[0], G)
    pair = next(b for b in G.blocks if popcount(b) == 2)
    return BoundaryDivisor("Sigma", pair, G)


def divisors(K: SimplicialComplex) -> list[BoundaryDivisor]:
    """Codimension-1 graphs in generator order: Pi by I, then Sigma by pair."""
    out = [divisor_of_graph(K, G) for G in enumerate_graphs(K, 1)]
    out.sort(key=BoundaryDivisor.sort_key)
    return out


def disjoint(K: SimplicialComplex, D1: BoundaryDivisor, D2: BoundaryDivisor) -> bool:
    if D1 == D2:
        raise ComplexError("a divisor is never disjoint from itself")
    return not generic_meet(K, D1.graph, D2.graph)


def listed_disjointness(K: SimplicialComplex, D1: BoundaryDivisor, D2: BoundaryDivisor) -> bool:
    """The three-case description of disjoint divisor pairs.

    Collision/collision with a non-face triple, collision/split separating the
    collided pair, or two splits admitting no common refinement into three sets.
    Used only as a diagnostic against :func:`disjoint`.
    """
    full = K.ground.full
    if D1.kind == "Sigma" and D2.kind == "Sigma":
        a, b = D1.subset, D2.subset
        return popcount(a & b) == 1 and not K.has_face(a | b)
    if D1.kind == "Pi" and D2.kind == "Pi":
        return not compatible(D1.subset, D2.subset, full)
    sig, pi = (D1, D2) if D1.kind == "Sigma" else (D2, D1)
    return bool(sig.subset & pi.subset) and bool(sig.subset & ~pi.subset)


def pushforward_target(K: SimplicialComplex, I) -> BoundaryDivisor | None:
    """Image of the Keel divisor D_I under the contraction to the K-space.

    Returns the divisor it maps onto, or None when it is contracted to
    higher codimension.
    """
    full = K.ground.full
    mask = K.ground.mask(I)
    if not 2 <= popcount(mask) <= K.n - 2:
        raise ComplexError(f"D_I needs 2 <= #I <= #S-2, got {K.ground.format(mask)}")
    for side in (mask, full & ~mask):
        if K.has_face(side):
            if popcount(side) == 2:
                return sigma_divisor(K, *K.ground.subset_labels(side))
            return None
    return pi_divisor(K, mask)


# -- vertex complexes and Gamma-structures -----------------------------------


@dataclass(frozen=True)
class InducedComplex:
    """K(v) together with the meaning of each of its labels as markings of S."""

    complex: SimplicialComplex
    markings: tuple[int, ...]  # per H(v) element: block (legs) or far side (edges)
    is_leg: tuple[bool, ...]


def induced_complex(K: SimplicialComplex, G: KStableGraph, v: VertexView) -> InducedComplex:
    fmt = K.ground.format
    labels = [fmt(b) for b in v.legs] + ["e" + fmt(e) for e in v.edges]
    markings = tuple(v.legs) + tuple(v.edges)
    is_leg = tuple([True] * len(v.legs) + [False] * len(v.edges))
    ground = GroundSet(tuple(labels))
    faces = []
    nl = len(v.legs)
    for sel in range(1, 1 << nl):
        union = 0
        for j in bits(sel):
            union |= v.legs[j]
        if K.has_face(union):
            faces.append(sel)
    return InducedComplex(SimplicialComplex.from_faces(ground, faces), markings, is_leg)


def refinements(K: SimplicialComplex, G: KStableGraph) -> set[KStableGraph]:
    """Every graph obtained by replacing each vertex v of G by a K(v)-stable graph."""
    full = K.ground.full
    per_vertex = []
    for v in vertices(G, full):
        ind = induced_complex(K, G, v)
        options = []
        for sub in enumerate_graphs(ind.complex, "all"):
            new_blocks = []
            for b in sub.blocks:
                members = bits(b)
                if len(members) == 1 and not ind.is_leg[members[0]]:
                    continue
                m = 0
                for h in members:
                    m |= ind.markings[h]
                new_blocks.append(m)
            new_splits = []
            for s in sub.splits:
                m = 0
                for h in bits(s):
                    m |= ind.markings[h]
                new_splits.append(canonical_split(m, full))
            options.append((new_blocks, new_splits))
        per_vertex.append(options)
    out = set()
    for choice in itertools.product(*per_vertex):
        blocks = [b for bl, _ in choice for b in bl]
        splits = set(G.splits)
        for _, sp in choice:
            splits.update(sp)
        out.add(KStableGraph(_sort_masks(blocks), _sort_masks(splits)))
    return out


def symmetries(K: SimplicialComplex) -> list[dict[int, int]]:
    """All permutations of the ground set mapping K onto itself."""
    n = K.n
    facets = set(K.facets)
    out = []
    for p in itertools.permutations(range(n)):
        perm = dict(enumerate(p))
        if {permute_mask(f, perm) for f in facets} == facets:
            out.append(perm)
    return out


def cover_relations(K: SimplicialComplex, graphs: Sequence[KStableGraph]) -> list[tuple[int, int]]:
    """Pairs (i, j) with graphs[i] < graphs[j] and codimensions differing by one.

    A cover either forgets one split or separates one block into two, so the
    candidates are generated directly and looked up.
    """
    index = {g: i for i, g in enumerate(graphs)}
    out = []
    for i, g in enumerate(graphs):
        found = set()
        for s in g.splits:
            rest = tuple(t for t in g.splits if t != s)
            j = index.get(KStableGraph(g.blocks, rest))
            if j is not None:
                found.add(j)
        for k, b in enumerate(g.blocks):
            low = b & -b
            others = g.blocks[:k] + g.blocks[k + 1 :]
            part = (b - 1) & b
            while part:
                # each unordered split of b once: the part holding the lowest bit
                if part & low:
                    blocks = _sort_masks(others + (part, b & ~part))
                    j = index.get(KStableGraph(blocks, g.splits))
                    if j is not None:
                        found.add(j)
                part = (part - 1) & b
        out.extend((i, j) for j in sorted(found))
    return out
