from __future__ import annotations

import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplicial_chow import checks
from simplicial_chow.complexes import ComplexError, GroundSet, SimplicialComplex
from simplicial_chow.graphs import (
    KStableGraph,
    MalformedGraphError,
    codimension,
    cover_relations,
    disjoint,
    divisors,
    enumerate_graphs,
    face_partitions,
    generic_meet,
    graph_from_json,
    induced_complex,
    leq,
    open_graph,
    pi_divisor,
    pushforward_target,
    refinements,
    separates,
    sigma_divisor,
    validate,
    vertices,
)
from simplicial_chow.presentation import ChowRing

from conftest import SMALL_CORPUS, discrete, make


def G(K, blocks=None, splits=()):
    if blocks is None:
        blocks = [[s] for s in K.ground.labels]
    return KStableGraph.make(K.ground, [list(b) for b in blocks], [list(s) for s in splits])


def singletons_except(n, *merged):
    used = set("".join(merged))
    return list(merged) + [str(i) for i in range(1, n + 1) if str(i) not in used]


def double_factorial(k):
    return math.prod(range(k, 0, -2))


def trees_with_leaves(n):
    """Leaf-labelled trees with internal valences >= 3, counted per number of edges.

    Brute force over all pairwise-compatible sets of nontrivial bipartitions.
    """
    full = (1 << n) - 1
    cands = [s for s in range(1, full) if s & 1 and 2 <= bin(s).count("1") <= n - 2]
    counts = {}

    def rec(start, chosen):
        counts[len(chosen)] = counts.get(len(chosen), 0) + 1
        for k in range(start, len(cands)):
            s = cands[k]
            if all(
                (s & ~t) == 0 or (t & ~s) == 0 or (s & t) == 0 or (~s & ~t & full) == 0
                for t in chosen
            ):
                rec(k + 1, chosen + [s])

    rec(0, [])
    return counts


class TestValidate:
    def test_keel_divisor(self):
        K = discrete(5)
        assert validate(K, G(K, splits=["12"])).ok

    def test_block_not_a_face(self):
        K = discrete(4)
        rep = validate(K, G(K, singletons_except(4, "12")))
        assert rep.conditions == [2]

    def test_leaf_condition(self):
        K = make(4, "12")
        rep = validate(K, G(K, splits=["12"]))
        assert 3 in rep.conditions

    def test_incompatible_splits(self):
        K = discrete(6)
        assert validate(K, G(K, splits=["123", "124"])).conditions == [1]

    def test_stability(self):
        K = discrete(5)
        # the split {1,2}|{3,4,5} with blocks {1,2} would leave a 2-valent vertex
        rep = validate(make(5, "12"), G(make(5, "12"), singletons_except(5, "12"), ["12"]))
        assert not rep.ok
        assert validate(K, open_graph(K)).ok

    def test_structural_errors_raise(self):
        K = discrete(4)
        with pytest.raises(MalformedGraphError):
            validate(K, KStableGraph((0b0011, 0b0110, 0b1000), ()))
        with pytest.raises(MalformedGraphError):
            validate(K, KStableGraph((0b0001, 0b0010), ()))
        with pytest.raises(MalformedGraphError):
            validate(K, KStableGraph((0b0011, 0b0100, 0b1000), (0b0101,)))

    def test_codimension_examples(self):
        K = make(5, "12")
        assert codimension(K, G(discrete(5), splits=["12"])) == 1
        assert codimension(K, G(K, singletons_except(5, "12"))) == 1
        assert codimension(K, G(K, singletons_except(5, "12"), ["123"])) == 2

    def test_json_round_trip(self):
        K = make(5, "12")
        g = G(K, singletons_except(5, "12"), ["123"])
        assert graph_from_json(K.ground, g.to_json(K.ground)) == g
        assert g.to_json(K.ground)["splits"] == [[["1", "2", "3"], ["4", "5"]]]

    def test_json_errors(self):
        g = GroundSet.range(4)
        with pytest.raises(MalformedGraphError):
            graph_from_json(g, {"splits": []})
        with pytest.raises(MalformedGraphError):
            graph_from_json(g, {"blocks": [["1", "2"], ["2"], ["3"], ["4"]]})
        with pytest.raises(MalformedGraphError):
            graph_from_json(g, {"blocks": [["1"], ["2"], ["3"], ["4"]], "splits": [[["1", "2"], ["3"]]]})


class TestEnumeration:
    def test_codim_one_on_four(self):
        K = discrete(4)
        got = enumerate_graphs(K, 1)
        assert got == [G(K, splits=[s]) for s in ("12", "13", "14")]

    def test_codim_one_on_five(self):
        assert len(enumerate_graphs(discrete(5), 1)) == 10

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_codim_zero(self, name):
        from simplicial_chow import corpus

        K = corpus.load(name)
        assert enumerate_graphs(K, 0) == [open_graph(K)]

    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_discrete_counts_match_tree_counts(self, n):
        expected = trees_with_leaves(n)
        got = {}
        for g in enumerate_graphs(discrete(n), "all"):
            got[g.codimension(n)] = got.get(g.codimension(n), 0) + 1
        assert got == expected
        # maximal strata are trivalent trees: (2n-5)!!
        assert got[n - 3] == double_factorial(2 * n - 5)

    def test_face_partitions_are_partitions_into_faces(self):
        K = make(5, "123", "45")
        parts = face_partitions(K)
        assert len(parts) == len(set(parts))
        brute = [p for p in checks.set_partitions(list(range(5))) if all(K.has_face(b) for b in p)]
        assert sorted(tuple(sorted(p)) for p in parts) == sorted(tuple(sorted(p)) for p in brute)

    def test_untriparted_raises(self):
        with pytest.raises(ComplexError):
            enumerate_graphs(make(4, "12", "34"), 1)

    def test_deterministic_order(self):
        K = make(6, "12", "34")
        a = enumerate_graphs(K, "all")
        assert a == sorted(a, key=lambda g: g.sort_key(K.n))

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_encoding(self, name):
        from simplicial_chow import corpus

        assert checks.check_graph_encoding(corpus.load(name)) == []


class TestOrder:
    def test_examples(self):
        K = make(5, "12")
        pi12 = G(K, splits=["12"])
        assert leq(K, pi12, open_graph(K))
        g = G(K, singletons_except(5, "12"), ["123"])
        sigma12 = G(K, singletons_except(5, "12"))
        assert leq(K, g, sigma12)
        assert not leq(K, g, G(K, splits=["13"]))
        assert g in refinements(K, sigma12)
        assert g not in refinements(K, G(K, splits=["13"]))

    @pytest.mark.parametrize("name", [n for n in SMALL_CORPUS if n.endswith(("_4", "_5", "2h3l"))])
    def test_partial_order_axioms(self, name):
        from simplicial_chow import corpus

        K = corpus.load(name)
        gs = enumerate_graphs(K, "all")
        for a in gs:
            assert leq(K, a, a)
        for a, b in itertools.permutations(gs, 2):
            if leq(K, a, b):
                assert not leq(K, b, a)
                assert a.codimension(K.n) > b.codimension(K.n)
        for a, b, c in itertools.product(gs[:40], repeat=3):
            if leq(K, a, b) and leq(K, b, c):
                assert leq(K, a, c)

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_cover_relations_match_pairwise_leq(self, name):
        from simplicial_chow import corpus

        K = corpus.load(name)
        gs = enumerate_graphs(K, "all")
        brute = [
            (i, j)
            for i, a in enumerate(gs)
            for j, b in enumerate(gs)
            if b.codimension(K.n) == a.codimension(K.n) - 1 and leq(K, a, b)
        ]
        assert cover_relations(K, gs) == brute

    def test_cover_relations(self):
        K = discrete(5)
        gs = enumerate_graphs(K, "all")
        edges = cover_relations(K, gs)
        # every codim-1 graph is covered by the open stratum, every codim-2 one lies under two
        assert sum(1 for a, b in edges if b == 0) == 10
        per_point = {}
        for a, b in edges:
            if gs[a].codimension(5) == 2:
                per_point[a] = per_point.get(a, 0) + 1
        assert set(per_point.values()) == {2}


class TestSeparation:
    def test_examples(self):
        K = make(5, "12")
        assert separates(K, G(K, splits=["12"]), "1", "2", "3", "4")
        assert separates(K, G(K, singletons_except(5, "12")), "1", "2", "4", "5")
        assert not separates(K, G(K, splits=["13"]), "1", "2", "3", "4")

    def test_distinct_labels_required(self):
        K = discrete(5)
        with pytest.raises(ComplexError):
            separates(K, open_graph(K), "1", "1", "3", "4")


class TestMeet:
    def test_nested_splits(self):
        K = discrete(6)
        m = generic_meet(K, G(K, splits=["12"]), G(K, splits=["123"]))
        assert m == [G(K, splits=["12", "123"])]
        assert m[0].codimension(6) == 2

    def test_crossing_splits(self):
        K = discrete(6)
        assert generic_meet(K, G(K, splits=["123"]), G(K, splits=["124"])) == []

    def test_coarsened_block_not_a_face(self):
        K = make(5, "12", "13")
        s12 = G(K, singletons_except(5, "12"))
        s13 = G(K, singletons_except(5, "13"))
        assert generic_meet(K, s12, s13) == []

    @pytest.mark.parametrize("name", [n for n in SMALL_CORPUS if n.endswith(("_4", "_5", "2h3l"))])
    def test_bruteforce(self, name):
        from simplicial_chow import corpus

        K = corpus.load(name)
        assert checks.check_meets_bruteforce(K) == []
        assert checks.check_leq_bruteforce(K) == []


class TestDivisors:
    @pytest.mark.parametrize("n", [4, 5, 6, 7])
    def test_discrete_count(self, n):
        assert len(divisors(discrete(n))) == 2 ** (n - 1) - n - 1

    def test_collision_example(self):
        K = make(4, "12")
        assert [d.name(K.ground) for d in divisors(K)] == ["Pi{1,3}", "Pi{1,4}", "Sigma{1,2}"]

    def test_point(self):
        assert divisors(discrete(3)) == []

    def test_pi_equals_complement(self):
        K = discrete(5)
        assert pi_divisor(K, ["1", "2"]) == pi_divisor(K, ["3", "4", "5"])
        with pytest.raises(ComplexError):
            pi_divisor(K, ["1"])
        with pytest.raises(ComplexError):
            sigma_divisor(K, "1", "2")

    def test_disjoint_examples(self):
        K = discrete(4)
        assert disjoint(K, pi_divisor(K, ["1", "2"]), pi_divisor(K, ["1", "3"]))
        K = make(4, "12")
        assert disjoint(K, sigma_divisor(K, "1", "2"), pi_divisor(K, ["1", "3"]))
        K = discrete(6)
        assert not disjoint(K, pi_divisor(K, ["1", "2"]), pi_divisor(K, ["3", "4"]))
        with pytest.raises(ComplexError):
            disjoint(K, pi_divisor(K, ["1", "2"]), pi_divisor(K, ["1", "2"]))

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_meets_of_divisors(self, name):
        from simplicial_chow import corpus

        K = corpus.load(name)
        assert checks.check_codim_one_meets(K, ChowRing(K)) == []

    def test_listed_disjointness_agrees_from_five(self):
        from simplicial_chow import corpus

        for name in SMALL_CORPUS:
            K = corpus.load(name)
            if K.n >= 5:
                assert checks.listed_disjointness_mismatches(K, ChowRing(K)) == [], name

    def test_pushforward_targets(self):
        K = discrete(5)
        assert pushforward_target(K, ["1", "2"]) == pi_divisor(K, ["1", "2"])
        K = make(5, "12")
        assert pushforward_target(K, ["1", "2"]) == sigma_divisor(K, "1", "2")
        assert pushforward_target(K, ["3", "4", "5"]) == sigma_divisor(K, "1", "2")
        K = make(6, "123")
        assert pushforward_target(K, ["1", "2", "3"]) is None
        with pytest.raises(ComplexError):
            pushforward_target(K, ["1"])


class TestInducedComplex:
    def test_keel_vertex(self):
        K = discrete(5)
        g = G(K, splits=["12"])
        v = next(v for v in vertices(g, K.ground.full) if v.markings == K.ground.mask(["3", "4", "5"]))
        ind = induced_complex(K, g, v)
        assert ind.complex.n == 4
        assert all(bin(f).count("1") == 1 for f in ind.complex.facets)

    def test_face_pulls_back(self):
        K = make(5, "34")
        g = G(K, splits=["12"])
        v = next(v for v in vertices(g, K.ground.full) if v.markings == K.ground.mask(["3", "4", "5"]))
        ind = induced_complex(K, g, v)
        assert ind.complex.contains(["{3}", "{4}"])
        assert not ind.complex.contains(["{3}", "{5}"])

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_always_triparted(self, name):
        from simplicial_chow import corpus

        K = corpus.load(name)
        for g in enumerate_graphs(K, "all"):
            for v in vertices(g, K.ground.full):
                assert induced_complex(K, g, v).complex.is_at_least_triparted()


@st.composite
def triparted_complexes(draw, n_range=(4, 5)):
    n = draw(st.integers(*n_range))
    g = GroundSet.range(n)
    faces = draw(st.lists(st.integers(1, g.full), max_size=4))
    K = SimplicialComplex.from_faces(g, faces)
    if not K.is_at_least_triparted():
        K = SimplicialComplex.from_faces(g, [f for f in faces if bin(f).count("1") <= 1])
    return K


class TestRandomComplexes:
    @settings(max_examples=25)
    @given(triparted_complexes())
    def test_bruteforce_equivalences(self, K):
        R = ChowRing(K)
        assert checks.check_triparted(K) == []
        assert checks.check_graph_encoding(K) == []
        assert checks.check_leq_bruteforce(K) == []
        assert checks.check_meets_bruteforce(K) == []
        assert checks.check_disjoint_bruteforce(K, R) == []

    @settings(max_examples=25)
    @given(triparted_complexes(), st.randoms(use_true_random=False))
    def test_relabeling(self, K, rnd):
        p = list(range(K.n))
        rnd.shuffle(p)
        perm = dict(enumerate(p))
        L = K.permuted(perm)
        full = K.ground.full
        moved = sorted((g.permuted(perm, full) for g in enumerate_graphs(K, "all")), key=lambda g: g.sort_key(K.n))
        assert moved == enumerate_graphs(L, "all")
