from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simplicial_chow import checks, corpus, linalg
from simplicial_chow.complexes import ComplexError
from simplicial_chow.graphs import KStableGraph, enumerate_graphs, generic_meet, pi_divisor
from simplicial_chow.presentation import (
    ChowRing,
    ConsistencyError,
    RingElement,
    graded_rank,
    multiply,
    normal_form,
    poincare_profile,
    relation_set,
    stratum_class,
    wdvv,
)

from conftest import SMALL_CORPUS, discrete, make


def gen(R, name):
    return RingElement.generator(R.gens.index_of_name(name))


class TestRingElement:
    def test_arithmetic(self):
        a, b = RingElement.generator(0), RingElement.generator(1)
        assert a + b - a == b
        assert (a * b) == (b * a)
        assert 3 * a == a + a + a
        assert a - a == RingElement.zero()
        assert not RingElement.zero()
        assert (a * RingElement.one()) == a

    def test_json_round_trip(self):
        x = RingElement.from_dict({(0, 0, 1): -3, (2,): 5, (): 1})
        assert RingElement.from_json(x.to_json()) == x
        assert x.to_json()[0] == {"monomial": [], "coeff": "1"}
        assert {"monomial": [[0, 2], [1, 1]], "coeff": "-3"} in x.to_json()

    def test_json_rejects_floats(self):
        with pytest.raises(ValueError):
            RingElement.from_json([{"monomial": [[0, 1]], "coeff": 1.5}])

    def test_format(self):
        x = RingElement.from_dict({(0,): 1, (1,): -1, (0, 0): 2})
        assert x.format(["A", "B"]) == "+A -B +2*A^2"
        assert RingElement.zero().format([]) == "0"


class TestRelations:
    def test_wdvv_on_four(self):
        K = discrete(4)
        R = ChowRing(K)
        assert R.format(wdvv(K, "1", "2", "3", "4")) == "+Pi{1,2} -Pi{1,3}"

    def test_wdvv_with_collision(self):
        K = make(4, "12")
        R = ChowRing(K)
        x = R.wdvv("1", "2", "3", "4")
        assert x == gen(R, "Sigma{1,2}") - gen(R, "Pi{1,3}")
        assert x == R.wdvv_keel_form("1", "2", "3", "4")

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_telescoping(self, name):
        K = corpus.load(name)
        R = ChowRing(K)
        for i, j, k, l in itertools.permutations(K.ground.labels[:5], 4):
            assert not (R.wdvv(i, j, k, l) + R.wdvv(i, k, l, j) + R.wdvv(i, l, j, k))

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_two_paths_and_pushforward(self, name):
        K = corpus.load(name)
        R = ChowRing(K)
        assert checks.check_wdvv_paths(K, R) == []
        assert checks.check_pushforward_identity(K, R) == []

    def test_distinct_labels(self):
        with pytest.raises(ComplexError):
            wdvv(discrete(4), "1", "1", "2", "3")

    def test_relation_set_four(self):
        rs = relation_set(discrete(4))
        assert len(rs.quadratic) == 3
        assert len(ChowRing(discrete(4)).linear_basis()) == 2

    def test_relation_set_five(self):
        R = ChowRing(discrete(5))
        assert len(R.gens) == 10
        assert len(R.linear_basis()) == 5

    def test_point(self):
        R = ChowRing(discrete(3))
        rs = R.relation_set()
        assert len(R.gens) == 0 and rs.quadratic == () and rs.linear == ()
        assert R.poincare_profile().ranks == (1,)

    def test_untriparted(self):
        with pytest.raises(ComplexError):
            ChowRing(make(4, "12", "34"))


class TestGradedRanks:
    def test_four(self):
        assert graded_rank(discrete(4), 1) == (1, [])

    def test_five(self):
        K = discrete(5)
        assert graded_rank(K, 0) == (1, [])
        assert graded_rank(K, 1) == (5, [])
        assert graded_rank(K, 2) == (1, [])
        assert graded_rank(K, 3) == (0, [])

    @pytest.mark.parametrize(
        "K, ranks",
        [
            (discrete(6), (1, 16, 16, 1)),
            (make(5, "345"), (1, 4, 1)),
            (make(4, "12"), (1, 1)),
        ],
    )
    def test_profiles(self, K, ranks):
        assert poincare_profile(K).ranks == ranks
        assert not any(poincare_profile(K).torsion)

    def test_beyond_dimension_is_zero_or_inconsistent(self):
        R = ChowRing(discrete(5))
        assert R.graded_rank(4) == (0, [])
        with pytest.raises(ValueError):
            R.graded_rank(-1)

    def test_consistency_error_on_nonzero_excess_degree(self):
        R = ChowRing(discrete(4))
        R.graded_rank(1)
        deg = R._degree(2)
        deg.rank = 1
        with pytest.raises(ConsistencyError):
            R.graded_rank(2)

    def test_threads_do_not_change_results(self):
        K = corpus.load("two_pairs_6")
        assert ChowRing(K).poincare_profile(4) == ChowRing(K).poincare_profile(1)

    @pytest.mark.skipif(linalg._ext is None, reason="compiled kernel not built")
    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_backends_identical(self, name):
        K = corpus.load(name)
        a, b = ChowRing(K, backend="python"), ChowRing(K, backend="compiled")
        assert a.poincare_profile() == b.poincare_profile()
        for d in range(1, K.n - 2):
            assert a._degree(d).basis == b._degree(d).basis


class TestNormalForm:
    def test_four(self):
        K = discrete(4)
        R = ChowRing(K)
        assert normal_form(K, gen(R, "Pi{1,3}")) == gen(R, "Pi{1,2}")
        assert normal_form(K, RingElement.zero()) == RingElement.zero()

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_disjoint_products_vanish(self, name):
        K = corpus.load(name)
        R = ChowRing(K)
        for a, b in R.relation_set().quadratic:
            assert not R.normal_form(RingElement.generator(a) * RingElement.generator(b))

    @settings(max_examples=40)
    @given(st.data())
    def test_idempotent_and_linear(self, data):
        K = corpus.load(data.draw(st.sampled_from(["keel_5", "pentagon_5", "losev_manin_2h4l"])))
        R = ChowRing(K)
        N = len(R.gens)
        terms = st.dictionaries(
            st.lists(st.integers(0, N - 1), min_size=1, max_size=K.n - 3).map(lambda m: tuple(sorted(m))),
            st.integers(-4, 4),
            max_size=5,
        )
        x = RingElement.from_dict(data.draw(terms))
        y = RingElement.from_dict(data.draw(terms))
        nx = R.normal_form(x)
        assert R.normal_form(nx) == nx
        assert R.normal_form(x + y) == R.normal_form(nx + R.normal_form(y))
        assert R.normal_form(x * 3) == R.normal_form(nx * 3)


class TestProducts:
    def test_meeting_divisors(self):
        K = discrete(6)
        R = ChowRing(K)
        p = multiply(K, gen(R, "Pi{1,2}"), gen(R, "Pi{1,2,3}"))
        meet = generic_meet(K, pi_divisor(K, ["1", "2"]).graph, pi_divisor(K, ["1", "2", "3"]).graph)
        assert p and p == stratum_class(K, meet[0])

    def test_disjoint_divisors(self):
        K = discrete(6)
        R = ChowRing(K)
        assert not multiply(K, gen(R, "Pi{1,2,3}"), gen(R, "Pi{1,2,4}"))

    def test_degree_above_dimension_is_dropped(self):
        K = discrete(4)
        R = ChowRing(K)
        x = gen(R, "Pi{1,2}")
        assert not R.multiply(x, x)

    @settings(max_examples=40)
    @given(st.data())
    def test_ring_axioms(self, data):
        K = corpus.load(data.draw(st.sampled_from(["keel_6", "two_pairs_6", "hassett_6_light_triple"])))
        R = ChowRing(K)
        idx = st.integers(0, len(R.gens) - 1)
        x, y, z = (RingElement.generator(data.draw(idx)) for _ in range(3))
        w = RingElement.generator(data.draw(idx)) * 2 - RingElement.generator(data.draw(idx))
        assert R.multiply(x, y) == R.multiply(y, x)
        assert R.multiply(R.multiply(x, y), z) == R.multiply(x, R.multiply(y, z))
        assert R.multiply(x, y + w) == R.normal_form(R.multiply(x, y) + R.multiply(x, w))

    def test_stratum_class_of_divisor(self):
        K = discrete(5)
        R = ChowRing(K)
        assert stratum_class(K, pi_divisor(K, ["1", "2"]).graph) == gen(R, "Pi{1,2}")

    def test_points_on_five(self):
        K = discrete(5)
        R = ChowRing(K)
        classes = {R.stratum_class(g) for g in enumerate_graphs(K, 2)}
        # every point stratum has the same class, which spans the rank-1 top degree
        assert len(classes) == 1
        (pt,) = classes
        assert pt and pt.degrees() == [2]
        assert R.graded_rank(2) == (1, [])

    def test_anchor_independence(self):
        K = corpus.load("losev_manin_2h4l")
        R = ChowRing(K)
        for g in enumerate_graphs(K, "all"):
            for b in g.blocks:
                for a in range(K.n):
                    if b >> a & 1:
                        assert R.stratum_class(g, {b: a}) == R.stratum_class(g)

    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_intersection_calculus(self, name):
        K = corpus.load(name)
        assert checks.check_intersections(K, ChowRing(K)) == []

    def test_stratum_class_rejects_invalid(self):
        K = discrete(4)
        g = KStableGraph.make(K.ground, [["1", "2"], ["3"], ["4"]])
        with pytest.raises(ComplexError):
            ChowRing(K).stratum_class(g)


class TestParsing:
    def test_round_trip(self):
        R = ChowRing(corpus.load("hassett_5_light_pair"))
        x = R.parse_element("+2*Pi{1,2}*Sigma{4,5} - Pi{1,3}^2 + 7")
        assert R.parse_element(R.format(x)) == x

    def test_either_side_and_order(self):
        R = ChowRing(discrete(5))
        assert R.parse_element("Pi{3,4,5}") == R.parse_element("Pi{2,1}")

    def test_unknown(self):
        R = ChowRing(discrete(5))
        for bad in ("Pi{1}", "Sigma{1,2}", "Foo{1,2}", "Pi{1,1,2}"):
            with pytest.raises((KeyError, ValueError)):
                R.parse_element(bad)


class TestEquivariance:
    @pytest.mark.parametrize("name", SMALL_CORPUS)
    def test_symmetries(self, name):
        K = corpus.load(name)
        assert checks.check_equivariance(K, ChowRing(K)) == []

    def test_generators_generate(self):
        gens, order = checks.symmetry_generators(discrete(5))
        assert order == 120 and len(gens) <= 3

    @settings(max_examples=10)
    @given(st.sampled_from(SMALL_CORPUS), st.randoms(use_true_random=False))
    def test_relabeling_preserves_profile(self, name, rnd):
        K = corpus.load(name)
        p = list(range(K.n))
        rnd.shuffle(p)
        L = K.permuted(dict(enumerate(p)))
        assert ChowRing(L).poincare_profile() == ChowRing(K).poincare_profile()
