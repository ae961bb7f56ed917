from __future__ import annotations

import itertools

import pytest
from scipy.optimize import linprog

from simplicial_chow import corpus
from simplicial_chow.complexes import popcount
from simplicial_chow.oracle import report

from conftest import SMALL_CORPUS

HAND_BUILT = ["pentagon_5", "two_pairs_6", "triangle_and_pair_7"]


def hassett_margin(K) -> float:
    """Largest t such that some weights realise K with every strict inequality off by t.

    K comes from Hassett weights (singletons adjoined) iff the margin is positive.
    """
    n = K.n
    full = K.ground.full
    A, b = [], []
    for f in K.facets:
        if popcount(f) >= 2:  # face sums below 1
            A.append([1 if f >> i & 1 else 0 for i in range(n)] + [1])
            b.append(1)
    for mask in range(1, full + 1):
        minimal = not K.has_face(mask) and all(K.has_face(mask & ~(1 << i)) for i in range(n) if mask >> i & 1)
        if minimal:  # non-face sums at least 1
            A.append([-1 if mask >> i & 1 else 0 for i in range(n)] + [0])
            b.append(-1)
    for i in range(n):  # weights positive
        A.append([-1 if j == i else 0 for j in range(n)] + [1])
        b.append(0)
    A.append([-1] * n + [1])  # total above 2
    b.append(-2)
    res = linprog([0] * n + [-1], A_ub=A, b_ub=b, bounds=[(0, 1)] * n + [(None, 1)], method="highs")
    assert res.status == 0
    return -res.fun


def test_corpus_size_and_kinds():
    names = corpus.names()
    keel = [n for n in names if n.startswith("keel_")]
    others = [n for n in names if n not in keel]
    assert sorted(corpus.load(n).n for n in keel) == [4, 5, 6, 7]
    assert len(others) >= 10
    assert all(4 <= corpus.load(n).n <= 7 for n in names)


@pytest.mark.parametrize("name", HAND_BUILT)
def test_hand_built_are_not_hassett(name):
    assert hassett_margin(corpus.load(name)) <= 1e-9


@pytest.mark.parametrize("name", [n for n in corpus.names() if "weights" in corpus.raw(n)])
def test_weighted_entries_are_hassett(name):
    assert hassett_margin(corpus.load(name)) > 1e-6


def test_four_cycle_certificate():
    # faces {a,b}, {c,d} with non-faces {a,c}, {b,d} force a+b+c+d < 2 and >= 2
    for name in ("two_pairs_6", "triangle_and_pair_7"):
        K = corpus.load(name)
        found = False
        for a, b, c, d in itertools.permutations(range(K.n), 4):
            m = lambda x, y: (1 << x) | (1 << y)
            if K.has_face(m(a, b)) and K.has_face(m(c, d)) and not K.has_face(m(a, c)) and not K.has_face(m(b, d)):
                found = True
        assert found, name


@pytest.mark.parametrize("name", SMALL_CORPUS)
def test_expected_reports(name):
    assert report(corpus.load(name)) == corpus.expected(name)


@pytest.mark.parametrize("name", corpus.names())
def test_expected_reports_are_consistent(name):
    exp = corpus.expected(name)
    assert exp["match"] is True
    assert exp["point_count_coeffs"] == exp["presentation_ranks"]
    assert len(exp["presentation_ranks"]) == corpus.load(name).n - 2
