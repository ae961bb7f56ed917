"""Cross-checks shared by the ``selftest`` command and the test suite.

Each check returns a list of failure messages; an empty list means it passed.
Brute-force checks work from the definitions (set partitions, vertex
replacement) rather than the shortcuts used by the main code paths.
"""
from __future__ import annotations

import itertools
from typing import Callable

from .complexes import GroundSet, SimplicialComplex, bits, permute_mask, popcount
from .graphs import (
    canonical_split,
    disjoint,
    enumerate_graphs,
    generic_meet,
    leq,
    listed_disjointness,
    refinements,
    separates_idx,
    symmetries,
    validate,
    vertices,
)
from .oracle import interpolate_profile
from .presentation import ChowRing, RingElement


def set_partitions(items: list[int]):
    """All set partitions of ``items`` as lists of bitmasks."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [1 << first] + part
        for k in range(len(part)):
            yield part[:k] + [part[k] | 1 << first] + part[k + 1 :]


def triparted_bruteforce(K: SimplicialComplex) -> bool:
    for part in set_partitions(list(range(K.n))):
        if len(part) < 3 and all(K.has_face(b) for b in part):
            return False
    return True


def complexes_up_to_relabeling(n: int) -> list[SimplicialComplex]:
    """One complex on [n] per relabeling class (singletons always faces)."""
    ground = GroundSet.range(n)
    full = ground.full
    perms = [dict(enumerate(p)) for p in itertools.permutations(range(n))]
    found: list[tuple[int, ...]] = []

    def rec(m: int, chosen: list[int]) -> None:
        if m > full:
            covered = 0
            for c in chosen:
                covered |= c
            if covered == full:
                found.append(tuple(chosen))
            return
        rec(m + 1, chosen)
        if all(m & c != m and m & c != c for c in chosen):
            rec(m + 1, chosen + [m])

    rec(1, [])
    seen, out = set(), []
    for facets in found:
        key = min(tuple(sorted(permute_mask(f, p) for f in facets)) for p in perms)
        if key not in seen:
            seen.add(key)
            out.append(SimplicialComplex(ground, facets))
    return out


def check_triparted(K: SimplicialComplex) -> list[str]:
    fast, slow = K.is_at_least_triparted(), triparted_bruteforce(K)
    return [] if fast == slow else [f"triparted: facet test {fast}, partitions {slow}"]


def check_graph_encoding(K: SimplicialComplex) -> list[str]:
    full = K.ground.full
    out = []
    for G in enumerate_graphs(K, "all"):
        rep = validate(K, G)
        if not rep.ok:
            out.append(f"enumerated graph fails validation: {rep.failures}")
            continue
        vs = vertices(G, full)
        legs = sum(len(v.legs) for v in vs)
        degree = sum(len(v.edges) for v in vs)
        if legs != len(G.blocks) or degree != 2 * len(G.splits) or len(vs) != len(G.splits) + 1:
            out.append(f"vertex reconstruction inconsistent for {G.describe(K.ground)}")
        # codimension from the vertex data: dim = sum(n(v) - 3)
        dim = sum(v.valence - 3 for v in vs)
        if K.n - 3 - dim != G.codimension(K.n):
            out.append(f"codimension mismatch for {G.describe(K.ground)}")
    return out


def check_leq_bruteforce(K: SimplicialComplex) -> list[str]:
    graphs = enumerate_graphs(K, "all")
    out = []
    for G2 in graphs:
        below = refinements(K, G2)
        for G1 in graphs:
            if (G1 in below) != leq(K, G1, G2):
                out.append(f"leq mismatch: {G1.describe(K.ground)} vs {G2.describe(K.ground)}")
        if not below <= set(graphs):
            out.append("a vertex replacement produced a graph outside the enumeration")
    return out


def check_meets_bruteforce(K: SimplicialComplex) -> list[str]:
    graphs = enumerate_graphs(K, "all")
    below = {G: refinements(K, G) for G in graphs}
    out = []
    for G1, G2 in itertools.combinations_with_replacement(graphs, 2):
        common = below[G1] & below[G2]
        meet = generic_meet(K, G1, G2)
        if len(meet) > 1:
            out.append("generic meet not unique")
        if bool(common) != bool(meet):
            out.append(
                f"meet existence mismatch for {G1.describe(K.ground)} / {G2.describe(K.ground)}"
            )
        elif meet and (meet[0] not in common or not common <= below[meet[0]]):
            out.append(f"meet is not the greatest common lower bound of {G1} / {G2}")
    return out


def check_disjoint_bruteforce(K: SimplicialComplex, R: ChowRing) -> list[str]:
    divs = R.gens.divisors
    out = []
    for D1, D2 in itertools.combinations(divs, 2):
        common = refinements(K, D1.graph) & refinements(K, D2.graph)
        if disjoint(K, D1, D2) != (not common):
            out.append(f"disjointness mismatch {D1.name(K.ground)} / {D2.name(K.ground)}")
    return out


def listed_disjointness_mismatches(K: SimplicialComplex, R: ChowRing) -> list[str]:
    """Pairs where the three-case description disagrees with the meet test."""
    out = []
    for D1, D2 in itertools.combinations(R.gens.divisors, 2):
        if disjoint(K, D1, D2) != listed_disjointness(K, D1, D2):
            out.append(f"{D1.name(K.ground)} / {D2.name(K.ground)}")
    return out


def check_codim_one_meets(K: SimplicialComplex, R: ChowRing) -> list[str]:
    out = []
    for D1, D2 in itertools.combinations(R.gens.divisors, 2):
        meet = generic_meet(K, D1.graph, D2.graph)
        if len(meet) > 1 or (meet and meet[0].codimension(K.n) != 2):
            out.append(f"meet of {D1.name(K.ground)} and {D2.name(K.ground)} is not one codim-2 graph")
    return out


def check_profile(K: SimplicialComplex, R: ChowRing, threads: int = 1) -> list[str]:
    out = []
    prof = R.poincare_profile(threads)
    poly = interpolate_profile(K, threads)
    ranks = list(prof.ranks)
    if ranks != list(poly.coeffs):
        out.append(f"presentation ranks {ranks} != point-count coefficients {list(poly.coeffs)}")
    if any(prof.torsion):
        out.append(f"torsion reported: {[list(t) for t in prof.torsion]}")
    if ranks != ranks[::-1]:
        out.append(f"ranks {ranks} are not palindromic")
    if ranks[0] != 1 or ranks[-1] != 1:
        out.append(f"ranks {ranks} do not start and end with 1")
    rank1 = len(R.gens) - len(R.linear_basis())
    if ranks[1:2] and ranks[1] != rank1:
        out.append(f"degree-1 rank {ranks[1]} != generators minus WDVV rank {rank1}")
    return out


def check_wdvv_paths(K: SimplicialComplex, R: ChowRing) -> list[str]:
    out = []
    labels = K.ground.labels
    for a, b, c, d in itertools.combinations(labels, 4):
        for i, j, k, l in ((a, b, c, d), (a, c, b, d), (a, d, b, c), (b, c, a, d)):
            if R.wdvv(i, j, k, l) != R.wdvv_keel_form(i, j, k, l):
                out.append(f"wdvv paths differ at {i}{j}|{k}{l}")
    return out


def check_pushforward_identity(K: SimplicialComplex, R: ChowRing) -> list[str]:
    """Pushed-forward Keel WDVV sums equal the K-level WDVV elements."""
    out = []
    n = K.n
    full = K.ground.full
    # push forward every Keel divisor once
    push = {}
    for I in range(1, full):
        if 2 <= popcount(I) <= n - 2:
            push[I] = R.pushforward_divisor(I)

    def side(i, j, k, l):
        total = RingElement.zero()
        need, avoid = (1 << i) | (1 << j), (1 << k) | (1 << l)
        for I, img in push.items():
            if I & need == need and not I & avoid:
                total = total + img
        return total

    for i, j, k, l in itertools.permutations(range(n), 4):
        if i > j or k > l or i > k:
            continue
        lhs = side(i, j, k, l) - side(i, k, j, l)
        if lhs != R._wdvv_idx(i, j, k, l):
            out.append(f"pushforward identity fails at {i}{j}|{k}{l}")
    return out


def check_intersections(K: SimplicialComplex, R: ChowRing) -> list[str]:
    """Divisor products against classes of generic meets."""
    out = []
    for a, b in itertools.combinations(range(len(R.gens)), 2):
        prod = R.multiply(RingElement.generator(a), RingElement.generator(b))
        meet = generic_meet(K, R.gens.divisors[a].graph, R.gens.divisors[b].graph)
        expected = R.stratum_class(meet[0]) if meet else RingElement.zero()
        if prod != expected:
            out.append(f"product {R.gens.names[a]}*{R.gens.names[b]} != class of meet")
    return out


def _compose(p: tuple, q: tuple) -> tuple:
    return tuple(p[q[i]] for i in range(len(q)))


def _order(p: tuple) -> int:
    x, k = p, 1
    while x != tuple(range(len(p))):
        x, k = _compose(p, x), k + 1
    return k


def symmetry_generators(K: SimplicialComplex) -> tuple[list[dict[int, int]], int]:
    """A generating set of the K-preserving permutations and the group order."""
    perms = [tuple(p[i] for i in range(K.n)) for p in symmetries(K)]
    # high-order elements first keeps the generating set small
    perms.sort(key=lambda p: (-_order(p), p))
    identity = tuple(range(K.n))
    group = {identity}
    gens: list[tuple] = []
    for p in perms:
        if p in group:
            continue
        gens.append(p)
        frontier = list(group)
        while frontier:
            new = []
            for g in frontier:
                for h in gens:
                    x = _compose(h, g)
                    if x not in group:
                        group.add(x)
                        new.append(x)
            frontier = new
    if len(group) != len(perms):
        raise AssertionError("symmetry closure does not match the enumerated group")
    return [dict(enumerate(g)) for g in gens], len(perms)


def check_equivariance(
    K: SimplicialComplex, R: ChowRing, perms=None, pair_codim: int | None = None
) -> list[str]:
    """Invariance under K-preserving permutations of the marking set.

    By default only a generating set of the symmetry group is checked, which
    covers every element since all checked properties compose.  ``leq`` and
    ``generic_meet`` are compared on every (graph, divisor) pair, restricted to
    graphs of codimension <= ``pair_codim`` when given.
    """
    if perms is None:
        perms, _ = symmetry_generators(K)
    full = K.ground.full
    graphs = enumerate_graphs(K, "all")
    gset = set(graphs)
    divs = R.gens.divisors
    deg1 = R.normal_form
    out = []
    for perm in perms:
        image = {G.permuted(perm, full) for G in graphs}
        if image != gset:
            out.append(f"graph set not invariant under {perm}")
            continue
        gmap = [R.gens.lookup(D.kind, _moved_subset(D, perm, full)) for D in divs]
        if None in gmap or sorted(gmap) != list(range(len(divs))):
            out.append(f"generators not permuted by {perm}")
            continue
        for a, b in R.relation_set().quadratic:
            if not R.is_disjoint_pair(gmap[a], gmap[b]):
                out.append(f"disjoint pair not preserved by {perm}")
        for rel in R.relation_set().linear:
            moved = RingElement.from_dict({(gmap[m[0]],): c for m, c in rel.terms})
            if deg1(moved):
                out.append(f"WDVV span not preserved by {perm}")
                break
        for G1 in graphs:
            if pair_codim is not None and G1.codimension(K.n) > pair_codim:
                continue
            P1 = G1.permuted(perm, full)
            for D in divs:
                G2 = D.graph
                P2 = G2.permuted(perm, full)
                if leq(K, G1, G2) != leq(K, P1, P2) or leq(K, G2, G1) != leq(K, P2, P1):
                    out.append("leq not equivariant")
                m = generic_meet(K, G1, G2)
                if [g.permuted(perm, full) for g in m] != generic_meet(K, P1, P2):
                    out.append("generic meet not equivariant")
        for D in divs:
            for i, j, k, l in itertools.permutations(range(K.n), 4):
                if separates_idx(D.graph, i, j, k, l, full) != separates_idx(
                    D.graph.permuted(perm, full), perm[i], perm[j], perm[k], perm[l], full
                ):
                    out.append("separation not equivariant")
                    break
    return out


def _moved_subset(D, perm, full: int) -> int:
    out = 0
    for i in bits(D.subset):
        out |= 1 << perm[i]
    return canonical_split(out, full) if D.kind == "Pi" else out


def run_all(K: SimplicialComplex, threads: int = 1, brute_force_limit: int = 5):
    """Yield (name, failures) for every cross-check scaled to the input size."""
    R = ChowRing(K)
    checks: list[tuple[str, Callable[[], list[str]]]] = [
        ("triparted", lambda: check_triparted(K)),
        ("graph-encoding", lambda: check_graph_encoding(K)),
        ("oracle-vs-presentation", lambda: check_profile(K, R, threads)),
        ("codim-one-meets", lambda: check_codim_one_meets(K, R)),
        ("wdvv-dual-path", lambda: check_wdvv_paths(K, R)),
        ("wdvv-pushforward", lambda: check_pushforward_identity(K, R)),
        ("intersection-calculus", lambda: check_intersections(K, R)),
        ("equivariance", lambda: check_equivariance(K, R, pair_codim=None if K.n <= 6 else 2)),
    ]
    if K.n <= brute_force_limit:
        checks += [
            ("leq-vs-vertex-replacement", lambda: check_leq_bruteforce(K)),
            ("meet-vs-common-lower-bounds", lambda: check_meets_bruteforce(K)),
            ("disjoint-vs-common-lower-bounds", lambda: check_disjoint_bruteforce(K, R)),
        ]
    for name, fn in checks:
        yield name, fn()
