"""Simplicial complexes on a finite marking set.

Subsets of the ground set are encoded as bitmasks: bit ``i`` stands for the
``i``-th label in ground-set order.  Faces are stored by facets only, and a
set is a face iff it is contained in some facet.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, Mapping, Union

Subset = Union[int, Iterable[str]]


class ComplexError(ValueError):
    """Raised when a complex or weight datum violates its invariants."""


def popcount(mask: int) -> int:
    return bin(mask).count("1")


@lru_cache(maxsize=1 << 16)
def bits(mask: int) -> tuple[int, ...]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class GroundSet:
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        labels = tuple(str(s) for s in self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 3:
            raise ComplexError(f"ground set needs at least 3 labels, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise ComplexError("duplicate labels in ground set")

    @classmethod
    def range(cls, n: int) -> "GroundSet":
        """The ground set ``[n]`` with labels ``"1"`` .. ``"n"``."""
        return cls(tuple(str(i) for i in range(1, n + 1)))

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.labels)}

    @property
    def full(self) -> int:
        return (1 << len(self.labels)) - 1

    def index(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise ComplexError(f"label {label!r} is not in the ground set") from None

    def mask(self, subset: Subset) -> int:
        if isinstance(subset, int):
            if subset < 0 or subset & ~self.full:
                raise ComplexError(f"mask {subset:#x} has bits outside the ground set")
            return subset
        if isinstance(subset, str):
            subset = [subset]
        m = 0
        for s in subset:
            m |= 1 << self.index(s)
        return m

    def subset_labels(self, mask: int) -> list[str]:
        return [self.labels[i] for i in bits(mask)]

    def format(self, mask: int) -> str:
        return "{" + ",".join(self.subset_labels(mask)) + "}"


@dataclass(frozen=True)
class SimplicialComplex:
    ground: GroundSet
    facets: tuple[int, ...]
    _faces: frozenset = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        facets = tuple(sorted(set(self.facets), key=lambda m: (bits(m), m)))
        object.__setattr__(self, "facets", facets)
        full = self.ground.full
        for f in facets:
            if f == 0 or f & ~full:
                raise ComplexError(f"invalid facet mask {f:#x}")
        for f, g in itertools.permutations(facets, 2):
            if f & g == f:
                raise ComplexError(
                    f"facet {self.ground.format(f)} is contained in facet {self.ground.format(g)}"
                )
        covered = 0
        for f in facets:
            covered |= f
        if covered != full:
            missing = self.ground.subset_labels(full & ~covered)
            raise ComplexError(f"singleton faces missing for labels {missing}")
        faces = set()
        for f in facets:
            # all submasks of f, including 0
            sub = f
            while True:
                faces.add(sub)
                if sub == 0:
                    break
                sub = (sub - 1) & f
        object.__setattr__(self, "_faces", frozenset(faces))

    @classmethod
    def from_faces(cls, ground: GroundSet, faces: Iterable[Subset]) -> "SimplicialComplex":
        """Complex generated by ``faces`` plus all singletons; facets are the maximal sets."""
        masks = {ground.mask(f) for f in faces}
        masks |= {1 << i for i in range(len(ground))}
        maximal = [m for m in masks if m and not any(m != o and m & o == m for o in masks)]
        return cls(ground, tuple(maximal))

    @property
    def n(self) -> int:
        return len(self.ground)

    def has_face(self, mask: int) -> bool:
        return mask in self._faces

    def contains(self, subset: Subset) -> bool:
        """True iff ``subset`` is a face, i.e. lies inside some facet."""
        return self.ground.mask(subset) in self._faces

    def faces(self) -> list[int]:
        return sorted(self._faces, key=lambda m: (popcount(m), bits(m)))

    def is_at_least_triparted(self) -> bool:
        full = self.ground.full
        if self.has_face(full):
            return False
        return not any(self.has_face(full & ~f) for f in self.facets)

    def permuted(self, perm: Mapping[int, int]) -> "SimplicialComplex":
        """Image of the complex under an index permutation ``perm``."""
        return SimplicialComplex(self.ground, tuple(permute_mask(f, perm) for f in self.facets))

    def to_json(self) -> dict:
        return {
            "labels": list(self.ground.labels),
            "facets": [self.ground.subset_labels(f) for f in self.facets],
        }

    def __str__(self) -> str:
        return "K(" + " ".join(self.ground.format(f) for f in self.facets) + ")"


def permute_mask(mask: int, perm: Mapping[int, int]) -> int:
    out = 0
    for i in bits(mask):
        out |= 1 << perm[i]
    return out


def contains(K: SimplicialComplex, subset: Subset) -> bool:
    return K.contains(subset)


def is_at_least_triparted(K: SimplicialComplex) -> bool:
    return K.is_at_least_triparted()


def discrete_complex(ground: GroundSet) -> SimplicialComplex:
    return SimplicialComplex(ground, tuple(1 << i for i in range(len(ground))))


def parse_rational(value) -> Fraction:
    """Exact rational from an int or a ``"p/q"`` string; floats are refused."""
    if isinstance(value, bool):
        raise ComplexError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ComplexError(f"rational must be an integer or 'p/q' string, got {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ComplexError(f"cannot parse rational {value!r}") from None
    raise ComplexError(f"floats and other types are not accepted as weights: {value!r}")


@dataclass(frozen=True)
class HassettWeights:
    ground: GroundSet
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        weights = tuple(parse_rational(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != len(self.ground):
            raise ComplexError("one weight per label is required")
        for label, w in zip(self.ground.labels, weights):
            if not 0 < w <= 1:
                raise ComplexError(f"weight of {label!r} must lie in (0, 1], got {w}")
        if sum(weights) <= 2:
            raise ComplexError(f"total weight must exceed 2, got {sum(weights)}")

    @classmethod
    def from_mapping(cls, ground: GroundSet, weights: Mapping[str, object]) -> "HassettWeights":
        return cls(ground, tuple(weights[s] for s in ground.labels))


def from_hassett_weights(A: HassettWeights) -> SimplicialComplex:
    """Complex of subsets with weight sum < 1.

    Singletons are always faces, including heavy markings of weight 1.
    """
    ground = A.ground
    n = len(ground)
    faces = []
    for mask in range(1, 1 << n):
        if sum(A.weights[i] for i in bits(mask)) < 1:
            faces.append(mask)
    return SimplicialComplex.from_faces(ground, faces)


def complex_from_json(data: Mapping) -> SimplicialComplex:
    """Parse ``{"labels", "facets"}`` or ``{"labels", "weights"}``."""
    if "labels" not in data:
        raise ComplexError("missing 'labels'")
    ground = GroundSet(tuple(data["labels"]))
    has_facets, has_weights = "facets" in data, "weights" in data
    if has_facets == has_weights:
        raise ComplexError("exactly one of 'facets' or 'weights' is required")
    if has_weights:
        weights = data["weights"]
        if isinstance(weights, Mapping):
            return from_hassett_weights(HassettWeights.from_mapping(ground, weights))
        return from_hassett_weights(HassettWeights(ground, tuple(weights)))
    facets = []
    for f in data["facets"]:
        if isinstance(f, str) or not isinstance(f, (list, tuple)):
            raise ComplexError(f"facet must be a list of labels, got {f!r}")
        if len(set(map(str, f))) != len(f):
            raise ComplexError(f"facet {f!r} repeats a label")
        facets.append(ground.mask([str(s) for s in f]))
    return SimplicialComplex(ground, tuple(facets))


def load_complex(path) -> SimplicialComplex:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ComplexError(f"{path}: invalid JSON ({exc})") from None
    return complex_from_json(data)
