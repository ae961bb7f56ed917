"""Bundled test complexes and their oracle reports."""
from __future__ import annotations

import json
from importlib import resources

from ..complexes import SimplicialComplex, complex_from_json


def _root():
    return resources.files(__name__)


def names() -> list[str]:
    return sorted(p.name[:-5] for p in _root().iterdir() if p.name.endswith(".json"))


def raw(name: str) -> dict:
    return json.loads((_root() / f"{name}.json").read_text(encoding="utf-8"))


def load(name: str) -> SimplicialComplex:
    return complex_from_json(raw(name))


def expected(name: str) -> dict:
    return json.loads((_root() / "expected" / f"{name}.json").read_text(encoding="utf-8"))
