"""Finite ordinals, monotone maps, arbitrary functions and permutation words."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, permutations, product
from typing import Iterator, Sequence

from .braid import BlockPartition, BraidWord, Permutation


class MapError(ValueError):
    pass


@dataclass(frozen=True)
class FsMap:
    """An arbitrary function {1..dom} -> {1..cod}."""

    dom: int
    cod: int
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if self.dom < 0 or self.cod < 0:
            raise MapError("negative ordinal")
        if len(self.values) != self.dom:
            raise MapError(f"{len(self.values)} values for domain {self.dom}")
        if any(not 1 <= v <= self.cod for v in self.values):
            raise MapError(f"value out of range 1..{self.cod}: {self.values}")

    flavor = "fs"

    def __call__(self, i: int) -> int:
        return self.values[i - 1]

    def to_json(self) -> dict:
        return {"dom": self.dom, "cod": self.cod, "values": list(self.values), "flavor": self.flavor}

    def as_function(self) -> FsMap:
        return FsMap(self.dom, self.cod, self.values)


@dataclass(frozen=True)
class MonotoneMap(FsMap):
    """A weakly increasing function {1..dom} -> {1..cod}."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise MapError(f"not weakly increasing: {self.values}")

    flavor = "monotone"


def map_from_json(data: dict) -> FsMap:
    try:
        cls = MonotoneMap if data.get("flavor", "monotone") == "monotone" else FsMap
        return cls(int(data["dom"]), int(data["cod"]), tuple(data["values"]))
    except (KeyError, TypeError) as exc:
        raise MapError(f"malformed map JSON: {exc}") from exc


def identity_map(n: int) -> MonotoneMap:
    return MonotoneMap(n, n, tuple(range(1, n + 1)))


def monotone_from_fibers(widths: Sequence[int]) -> MonotoneMap:
    values = [j for j, w in enumerate(widths, start=1) for _ in range(w)]
    return MonotoneMap(len(values), len(widths), tuple(values))


def map_compose(g: FsMap, f: FsMap) -> FsMap:
    if f.cod != g.dom:
        raise MapError(f"cannot compose: cod {f.cod} != dom {g.dom}")
    values = tuple(g(v) for v in f.values)
    if isinstance(f, MonotoneMap) and isinstance(g, MonotoneMap):
        return MonotoneMap(f.dom, g.cod, values)
    return FsMap(f.dom, g.cod, values)


def map_tensor(f: FsMap, g: FsMap) -> FsMap:
    values = f.values + tuple(v + f.cod for v in g.values)
    cls = MonotoneMap if isinstance(f, MonotoneMap) and isinstance(g, MonotoneMap) else FsMap
    return cls(f.dom + g.dom, f.cod + g.cod, values)


def fibers(f: FsMap) -> BlockPartition:
    widths = [0] * f.cod
    for v in f.values:
        widths[v - 1] += 1
    return BlockPartition(tuple(widths))


def function_decompose(f: FsMap) -> tuple[Permutation, MonotoneMap]:
    """Split f into a permutation followed by a monotone map.

    Input i moves to its rank when inputs are sorted by (f(i), i), so each
    fiber stays in ascending order.
    """
    order = sorted(range(1, f.dom + 1), key=lambda i: (f(i), i))
    images = [0] * f.dom
    for pos, i in enumerate(order, start=1):
        images[i - 1] = pos
    return Permutation(tuple(images)), monotone_from_fibers(fibers(f).widths)


def apply_then(sigma: Permutation, f: FsMap) -> FsMap:
    """The function i -> f(sigma(i))."""
    return FsMap(sigma.size, f.cod, tuple(f(sigma(i)) for i in range(1, sigma.size + 1)))


def perm_representative_word(s: Permutation) -> BraidWord:
    """Sweep word of the straight-line diagram of s, all crossings positive.

    Strand i runs straight from i to s(i); crossings are taken in order of
    height, leftmost first among simultaneous ones.
    """
    n = s.size
    at = list(range(1, n + 1))  # at[p] = strand (input index) at position p+1
    letters: list[int] = []

    while True:
        best: tuple[Fraction, int] | None = None
        for p in range(n - 1):
            a, b = at[p], at[p + 1]
            if a < b and s(a) > s(b):
                # a and b meet at height (b-a) / ((s(a)-a) - (s(b)-b))
                key = (Fraction(b - a, (s(a) - a) - (s(b) - b)), p)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        p = best[1]
        at[p], at[p + 1] = at[p + 1], at[p]
        letters.append(p + 1)
    return BraidWord(n, tuple(letters))


def all_monotone(m: int, n: int) -> Iterator[MonotoneMap]:
    for values in combinations_with_replacement(range(1, n + 1), m):
        yield MonotoneMap(m, n, values)


def all_functions(m: int, n: int) -> Iterator[FsMap]:
    for values in product(range(1, n + 1), repeat=m):
        yield FsMap(m, n, values)


def all_permutations(n: int) -> Iterator[Permutation]:
    for images in permutations(range(1, n + 1)):
        yield Permutation(images)
