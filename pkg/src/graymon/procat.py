"""The combinatorial categories of braided, symmetric and quotiented monotone maps.

A morphism is a pair (braid, monotone map): first braid the inputs, then merge
them along the map.  Composition slides a braid past a monotone map by cabling.
"""
from __future__ import annotations

from dataclasses import dataclass

from .braid import (
    BraidError,
    BraidWord,
    Permutation,
    braid_normal_form,
    cable,
    free_reduce,
    is_pure,
    parabolic_member,
    underlying_permutation,
)
from .combinat import (
    FsMap,
    MonotoneMap,
    apply_then,
    fibers,
    function_decompose,
    identity_map,
    map_compose,
    map_from_json,
    map_tensor,
    monotone_from_fibers,
    perm_representative_word,
)

FLAVORS = ("delta", "bdelta", "sdelta", "bdelta_sim", "fs")
_ALIASES = {"Δ": "delta", "BΔ": "bdelta", "SΔ": "sdelta", "BΔ∼": "bdelta_sim", "BΔ~": "bdelta_sim", "FS": "fs"}


class ProError(ValueError):
    pass


def canonical_flavor(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in FLAVORS:
        raise ProError(f"unknown flavor {name!r}")
    return name


def _reduce_braid(flavor: str, b: BraidWord) -> BraidWord:
    if flavor == "delta":
        if braid_normal_form(b) != braid_normal_form(BraidWord(b.strands)):
            raise ProError("the plain monotone category carries no braids")
        return BraidWord(b.strands)
    if flavor in ("sdelta", "fs"):
        return perm_representative_word(underlying_permutation(b))
    if flavor == "bdelta_sim":
        return braid_normal_form(b).word()
    return b


@dataclass(frozen=True)
class ProMorphism:
    flavor: str
    braid: BraidWord
    map: MonotoneMap

    def __post_init__(self) -> None:
        object.__setattr__(self, "flavor", canonical_flavor(self.flavor))
        if not isinstance(self.map, MonotoneMap):
            raise ProError("map part must be monotone")
        if self.braid.strands != self.map.dom:
            raise ProError(f"braid on {self.braid.strands} strands, map from {self.map.dom}")

    @property
    def dom(self) -> int:
        return self.map.dom

    @property
    def cod(self) -> int:
        return self.map.cod

    def to_json(self) -> dict:
        return {"flavor": self.flavor, "braid": self.braid.to_json(), "map": self.map.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> ProMorphism:
        try:
            m = map_from_json(data["map"])
            return make_pro(data["flavor"], BraidWord.from_json(data["braid"]), m)
        except (KeyError, TypeError, BraidError) as exc:
            raise ProError(f"malformed morphism JSON: {exc}") from exc

    def function(self) -> FsMap:
        """The underlying function, forgetting the braid beyond its permutation."""
        return apply_then(underlying_permutation(self.braid), self.map)


def make_pro(flavor: str, braid: BraidWord, fmap: MonotoneMap) -> ProMorphism:
    flavor = canonical_flavor(flavor)
    return ProMorphism(flavor, _reduce_braid(flavor, braid), fmap)


def from_function(f: FsMap) -> ProMorphism:
    sigma, f_delta = function_decompose(f)
    return ProMorphism("fs", perm_representative_word(sigma), f_delta)


def pro_identity(flavor: str, n: int) -> ProMorphism:
    return ProMorphism(flavor, BraidWord(n), identity_map(n))


def delta_law(b: BraidWord, f: MonotoneMap) -> tuple[MonotoneMap, BraidWord]:
    """Rewrite "f then b" as "b' then f'"."""
    if b.strands != f.cod:
        raise ProError(f"braid on {b.strands} strands after a map into {f.cod}")
    widths = fibers(f).widths
    pi = underlying_permutation(b)
    moved = [0] * len(widths)
    for i, w in enumerate(widths, start=1):
        moved[pi(i) - 1] = w
    return monotone_from_fibers(moved), cable(widths, b)


def pro_compose(g: ProMorphism, f: ProMorphism) -> ProMorphism:
    if g.flavor != f.flavor:
        raise ProError(f"flavor mismatch {f.flavor} vs {g.flavor}")
    if f.cod != g.dom:
        raise ProError(f"cannot compose: cod {f.cod} != dom {g.dom}")
    f_moved, b_moved = delta_law(g.braid, f.map)
    braid = f.braid * b_moved
    return make_pro(f.flavor, braid, map_compose(g.map, f_moved))


def pro_tensor(f: ProMorphism, g: ProMorphism) -> ProMorphism:
    if f.flavor != g.flavor:
        raise ProError(f"flavor mismatch {f.flavor} vs {g.flavor}")
    n = f.dom + g.dom
    braid = BraidWord(n, f.braid.shifted(0, n).letters + g.braid.shifted(f.dom, n).letters)
    return make_pro(f.flavor, braid, map_tensor(f.map, g.map))


def pro_equal(a: ProMorphism, b: ProMorphism) -> bool:
    if a.flavor != b.flavor:
        raise ProError(f"flavor mismatch {a.flavor} vs {b.flavor}")
    if a.dom != b.dom or a.cod != b.cod:
        raise ProError("boundaries differ")
    if a.map != b.map:
        return False
    if a.flavor == "delta":
        return True
    if a.flavor == "bdelta":
        return braid_normal_form(a.braid) == braid_normal_form(b.braid)
    if a.flavor in ("sdelta", "fs"):
        return underlying_permutation(a.braid) == underlying_permutation(b.braid)
    # the quotient identifies braids differing by postcomposition with the
    # block subgroup of the map's fibers
    return parabolic_member(b.braid * a.braid.inverse(), fibers(a.map))


# --- the 2-category of functions with pure braids on fibers ------------------


@dataclass(frozen=True)
class FsBr2Cell:
    base: FsMap
    tuple: tuple[BraidWord, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", self.base.as_function())
        widths = fibers(self.base).widths
        if len(self.tuple) != len(widths):
            raise ProError(f"{len(self.tuple)} braids for {len(widths)} fibers")
        for w, b in zip(widths, self.tuple):
            if b.strands != w:
                raise ProError(f"braid on {b.strands} strands for a fiber of size {w}")
            if not is_pure(b):
                raise ProError(f"braid {list(b.letters)} is not pure")

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "tuple": [b.to_json() for b in self.tuple]}

    @classmethod
    def from_json(cls, data: dict) -> FsBr2Cell:
        try:
            return cls(map_from_json(data["base"]), tuple(BraidWord.from_json(b) for b in data["tuple"]))
        except (KeyError, TypeError, BraidError) as exc:
            raise ProError(f"malformed 2-cell JSON: {exc}") from exc

    @classmethod
    def identity(cls, base: FsMap) -> FsBr2Cell:
        return cls(base, tuple(BraidWord(w) for w in fibers(base).widths))


def _block_diagonal(parts: list[BraidWord]) -> BraidWord:
    n = sum(b.strands for b in parts)
    letters: list[int] = []
    offset = 0
    for b in parts:
        letters.extend(b.shifted(offset, n).letters)
        offset += b.strands
    return BraidWord(n, tuple(letters))


def fsbr_compose(mode: str, x: FsBr2Cell, y: FsBr2Cell) -> FsBr2Cell:
    """Compose 2-cells.

    horizontal: x then y on the same base.  vertical: x on f, y on g with
    g.dom = f.cod, giving a 2-cell on g after f.  tensor: side by side.
    """
    if mode == "horizontal":
        if x.base != y.base:
            raise ProError("horizontal composition needs equal bases")
        return FsBr2Cell(x.base, tuple(a * b for a, b in zip(x.tuple, y.tuple)))
    if mode == "tensor":
        base = map_tensor(x.base, y.base)
        return FsBr2Cell(base, x.tuple + y.tuple)
    if mode != "vertical":
        raise ProError(f"unknown composition mode {mode!r}")
    f, g = x.base, y.base
    if g.dom != f.cod:
        raise ProError(f"cannot compose: cod {f.cod} != dom {g.dom}")
    gf = map_compose(g, f)
    f_widths = fibers(f).widths
    out: list[BraidWord] = []
    for l, y_l in enumerate(y.tuple, start=1):
        middle = [j for j in range(1, g.dom + 1) if g(j) == l]
        # leaves of the composite tree l as they arrive: f-fibers in the order of g's fiber
        arrival = [i for j in middle for i in range(1, f.dom + 1) if f(i) == j]
        inner = _block_diagonal([x.tuple[j - 1] for j in middle])
        cabled = cable([f_widths[j - 1] for j in middle], y_l)
        total = inner * cabled
        ranks = sorted(arrival)
        sort = perm_representative_word(_sorting_permutation(arrival, ranks))
        braid = sort.inverse() * total * sort
        if not is_pure(braid):
            raise ProError("vertical composite is not pure")
        out.append(free_reduce(braid))
    return FsBr2Cell(gf, tuple(out))


def _sorting_permutation(arrival: list[int], ranks: list[int]) -> Permutation:
    images = tuple(ranks.index(i) + 1 for i in arrival)
    return Permutation(images)
