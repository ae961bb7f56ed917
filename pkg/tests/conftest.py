from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from simplicial_chow import corpus
from simplicial_chow.complexes import GroundSet, SimplicialComplex, discrete_complex

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make(n: int, *facets: str) -> SimplicialComplex:
    """Complex on [n] from facet strings like "12", "345"; singletons are added."""
    g = GroundSet.range(n)
    masks = [g.mask(list(f)) for f in facets]
    covered = 0
    for m in masks:
        covered |= m
    masks += [1 << i for i in range(n) if not covered >> i & 1]
    return SimplicialComplex.from_faces(g, masks)


def discrete(n: int) -> SimplicialComplex:
    return discrete_complex(GroundSet.range(n))


SMALL_CORPUS = [n for n in corpus.names() if corpus.load(n).n <= 6]
LARGE_CORPUS = [n for n in corpus.names() if corpus.load(n).n > 6]


@pytest.fixture(params=SMALL_CORPUS)
def small_case(request):
    return request.param, corpus.load(request.param)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None) and not any(
        "test_acceptance" in r.nodeid
        for r in terminalreporter.stats.get("failed", []) + terminalreporter.stats.get("error", [])
    ):
        return
    terminalreporter.section("acceptance criteria")
    for k, title in sorted(mod.TITLES.items()):
        line = mod.RESULTS.get(k, f"criterion {k} [FAIL] {title}: did not complete")
        terminalreporter.write_line(line)
