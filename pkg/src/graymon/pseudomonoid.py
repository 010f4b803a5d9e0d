"""Pseudomonoid computads, their standard-form 1-cells and the MacLane checker.

The generating 1-cells are ``m`` (two wires to one) and ``u`` (no wires to
one).  The 2-cells are the associator ``alpha``, the unitors ``lambda`` and
``rho`` and, for the braided and symmetric computads, the commutator ``c``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Union

from .braid import BraidWord, Permutation, block_crossing, braid_normal_form, is_pure, underlying_permutation
from .combinat import FsMap, fibers, perm_representative_word
from .gray import Computad, Diagram, Gen1, Gen2, Level, braid_levels, crossing
from .movie import Builder, Movie, StepError, braid_transform, structural_library
from .procat import FsBr2Cell, ProError, ProMorphism, canonical_flavor, from_function

M = Level("m", 0, 2, 1)
U = Level("u", 0, 0, 1)


def mult(offset: int) -> Level:
    return M.moved(offset)


def unit(offset: int) -> Level:
    return U.moved(offset)


def _d(width: int, *levels: Level) -> Diagram:
    return Diagram.of(width, levels)


def _base(name: str, flavor: str) -> Computad:
    gen1 = {"m": Gen1("m", ("C", "C"), ("C",)), "u": Gen1("u", (), ("C",))}
    gen2 = {
        "alpha": Gen2("alpha", _d(3, mult(0), mult(0)), _d(3, mult(1), mult(0))),
        "lambda": Gen2("lambda", _d(1, unit(0), mult(0)), _d(1)),
        "rho": Gen2("rho", _d(1, unit(1), mult(0)), _d(1)),
    }
    if name != "P":
        gen2["c"] = Gen2("c", _d(2, crossing(1, 0), mult(0)), _d(2, mult(0)))
    return Computad(name, flavor, ("C",), gen1, gen2)


def _pentagon(c: Computad) -> tuple[Movie, Movie]:
    src = _d(4, mult(0), mult(0), mult(0))
    lhs = Builder(c, src).gen2("alpha", 1, 0).interchange(0).gen2("alpha", 1, 0)
    rhs = Builder(c, src).gen2("alpha", 0, 0).gen2("alpha", 1, 0).gen2("alpha", 0, 1)
    return lhs.movie(), rhs.movie()


def _triangle(c: Computad) -> tuple[Movie, Movie]:
    src = _d(2, unit(1), mult(0), mult(0))
    lhs = Builder(c, src).gen2("alpha", 1, 0).gen2("lambda", 0, 1)
    rhs = Builder(c, src).gen2("rho", 0, 0)
    return lhs.movie(), rhs.movie()


def _hexagon1(c: Computad) -> tuple[Movie, Movie]:
    # strands x, y, z; x passes over y and z, then the three are multiplied as y(zx)
    src = _d(3, crossing(1, 0), crossing(1, 1), mult(1), mult(0))
    lhs = Builder(c, src)
    lhs.gen2("c", 1, 1)  # absorb the crossing of x and z
    lhs.gen2("alpha", 1, 0, dir="rev")
    lhs.gen2("c", 0, 0)
    rhs = Builder(c, src)
    rhs.gen2("alpha", 2, 0, dir="rev")  # y(zx) -> (yz)x
    rhs.pull_down(2, "L")  # the product yz passes under x
    rhs.gen2("c", 1, 0)
    rhs.gen2("alpha", 0, 0, dir="rev")
    return lhs.movie(), rhs.movie()


def _hexagon2(c: Computad) -> tuple[Movie, Movie]:
    # strands x, y, z; z passes under y then x, and the three are multiplied as (zx)y
    src = _d(3, crossing(1, 1), crossing(1, 0), mult(0), mult(0))
    lhs = Builder(c, src)
    lhs.gen2("alpha", 2, 0)  # (zx)y -> z(xy)
    lhs.pull_down(2, "R")  # the product xy passes over z
    lhs.gen2("c", 1, 0)
    lhs.gen2("alpha", 0, 0)
    rhs = Builder(c, src)
    rhs.gen2("c", 1, 0)
    rhs.gen2("alpha", 1, 0)
    rhs.gen2("c", 0, 1)
    return lhs.movie(), rhs.movie()


def _symmetry(c: Computad) -> tuple[Movie, Movie]:
    src = _d(2, mult(0))
    rhs = Builder(c, src).unsyllepsis(0, 0).gen2("c", 1, 0).gen2("c", 0, 0)
    return Movie(src), rhs.movie()


@lru_cache(maxsize=None)
def builtin_computad(which: str) -> Computad:
    """The naked (P), braided (Pbr) or symmetric (Psym) pseudomonoid computad.

    Keys with a suffix place the structure in a richer ambient flavor:
    ``Pbr-sym`` is the braided pseudomonoid inside a symmetric Gray monoid,
    whose 1-cells realize arbitrary functions with braided fibers.
    """
    names = {"P": ("P", "naked"), "Pbr": ("Pbr", "braided"), "Psym": ("Psym", "symmetric"),
             "P-br": ("P", "braided"), "P-sym": ("P", "symmetric"), "Pbr-sym": ("Pbr", "symmetric")}
    if which not in names:
        raise ValueError(f"unknown computad {which!r}")
    name, flavor = names[which]
    c = _base(name, flavor)
    eqs = {"pentagon": _pentagon(c), "triangle": _triangle(c)}
    if name != "P":
        eqs["hexagon1"] = _hexagon1(c)
        eqs["hexagon2"] = _hexagon2(c)
    if name == "Psym":
        eqs["symmetry"] = _symmetry(c)
    c.equalities.update(eqs)
    c.equalities.update(structural_library(c))
    return c


# --- the row/column grid of ambient flavor and structure ------------------------------------------------------------

# (row, column) -> (computad key, combinatorial flavor of its 1-cells)
GRID = {
    ("naked", "P"): ("P", "delta"),
    ("braided", "P"): ("P-br", "bdelta"),
    ("braided", "Pbr"): ("Pbr", "bdelta_sim"),
    ("symmetric", "P"): ("P-sym", "sdelta"),
    ("symmetric", "Pbr"): ("Pbr-sym", "fs"),
    ("symmetric", "Psym"): ("Psym", "fs"),
}

_COLUMNS = {"p": "P", "pbr": "Pbr", "psym": "Psym"}

# the computad whose 1-cells realize each combinatorial flavor
FLAVOR_COMPUTAD = {"delta": "P", "bdelta": "P-br", "bdelta_sim": "Pbr", "sdelta": "P-sym", "fs": "Psym"}


def grid_entry(row: str, col: str) -> tuple[str, str]:
    key = (row.lower(), _COLUMNS.get(col.lower(), col))
    if key not in GRID:
        raise ValueError(f"no grid entry for row {row!r}, column {col!r}")
    return GRID[key]


def grid_computad(row: str, col: str) -> Computad:
    return builtin_computad(grid_entry(row, col)[0])


def flavor_computad(flavor: str) -> Computad:
    return builtin_computad(FLAVOR_COMPUTAD[canonical_flavor(flavor)])


# --- 1-cells ----------------------------------------------------------------------


def tree_levels(widths: list[int] | tuple[int, ...]) -> list[Level]:
    """Left-bracketed trees side by side, tree j consuming ``widths[j]`` wires.

    Trees to the left are fully collapsed first, so tree j sits at offset j.
    """
    out: list[Level] = []
    for j, p in enumerate(widths):
        out.extend([unit(j)] if p == 0 else [mult(j)] * (p - 1))
    return out


def _normal_braid(flavor: str, b: BraidWord) -> BraidWord:
    if flavor == "delta":
        return BraidWord(b.strands)
    if flavor in ("sdelta", "fs"):
        return perm_representative_word(underlying_permutation(b))
    return braid_normal_form(b).word()


def F_1cell(flavor: str, x: Union[ProMorphism, FsMap]) -> Diagram:
    """The standard-form diagram of a combinatorial morphism: a braid, then trees."""
    flavor = canonical_flavor(flavor)
    if isinstance(x, FsMap) and not isinstance(x, ProMorphism):
        if flavor != "fs" and x.flavor == "fs":
            raise ProError("arbitrary functions only live in the fs flavor")
        x = from_function(x) if flavor == "fs" else ProMorphism(flavor, BraidWord(x.dom), x)
    word = _normal_braid(flavor, x.braid)
    return Diagram.of(x.dom, braid_levels(word) + tree_levels(fibers(x.map).widths))


def tree_height(p: int) -> int:
    """Levels of the standard tree on p inputs: a unit for p = 0, else p - 1 multiplications."""
    return 1 if p == 0 else p - 1


def tree_bottoms(widths: list[int] | tuple[int, ...], braid_len: int) -> list[int]:
    """Level of the lowest cell of each tree in F_1cell's layout."""
    out, level = [], braid_len
    for p in widths:
        out.append(level)
        level += tree_height(p)
    return out


# --- absorbing crossings into a tree -------------------------------------------------


def _assoc_right(b: Builder, i: int, log: list[tuple[int, int]]) -> None:
    """Move the multiplication at level i one wire right, associating the one above first if needed."""
    lv = b.levels
    if i + 1 >= len(lv) or lv[i].cell != "m" or lv[i + 1].cell != "m":
        raise StepError(f"no multiplication above level {i} to associate with")
    while b.levels[i + 1].offset != b.levels[i].offset:
        _assoc_right(b, i + 1, log)
    off = b.levels[i].offset
    b.gen2("alpha", i, off)
    log.append((i, off))


def absorb_crossing(b: Builder, level: int) -> None:
    """Remove the crossing at ``level`` into the left-bracketed tree directly above it.

    The tree's bottom multiplication is associated rightwards until it sits on the crossing's
    wires, the commutator (or its inverse followed by a cancellation) absorbs
    the crossing, and the associators are undone.
    """
    x = b.levels[level]
    if not x.is_crossing:
        raise StepError(f"level {level} is not a crossing")
    tree = level + 1
    if b.levels[tree].cell != "m":
        raise StepError(f"no multiplication directly above the crossing at level {level}")
    log: list[tuple[int, int]] = []
    while b.levels[tree].offset < x.offset:
        _assoc_right(b, tree, log)
    if b.levels[tree].offset != x.offset:
        raise StepError("tree cannot be associated onto the crossing")
    if x.sign > 0:
        b.gen2("c", level, x.offset)
    else:
        b.gen2("c", tree, x.offset, dir="rev")
        b.cancel(level)
    for i, off in reversed(log):
        b.gen2("alpha", i - 1, off, dir="rev")


def absorb_region(b: Builder, lo: int, count: int) -> None:
    """Absorb the ``count`` crossings directly beneath a tree, top crossing first."""
    for k in range(count - 1, -1, -1):
        absorb_crossing(b, lo + k)


def absorb_block_diagonal(b: Builder, top: int, count: int, widths: list[int] | tuple[int, ...]) -> None:
    """Absorb the ``count`` crossings below level ``top`` into the F_1cell trees starting there.

    Every crossing must join two strands of one fiber; it is carried up past
    the trees to its left before being absorbed.
    """
    starts = [sum(widths[:j]) for j in range(len(widths))]
    heights = [tree_height(p) for p in widths]
    for _ in range(count):
        level = top - 1
        x = b.levels[level]
        j = max(t for t in range(len(widths)) if starts[t] <= x.offset)
        if x.offset + 1 >= starts[j] + widths[j]:
            raise StepError(f"crossing at wire {x.offset} joins two fibers")
        for _ in range(sum(heights[:j])):
            b.interchange(level)
            level += 1
        absorb_crossing(b, level)
        top -= 1


def F_2cell(x: FsBr2Cell, c: Computad | None = None) -> Movie:
    """The loop on F_1cell(base) creating each tuple braid beneath its tree and absorbing it."""
    c = c or builtin_computad("Pbr-sym")
    if "c" not in c.gen2:
        raise ProError(f"computad {c.name} has no commutator")
    for w in x.tuple:
        if not is_pure(w):
            raise ProError(f"braid {list(w.letters)} is not pure")
    return normal_loop(c, F_1cell("fs", x.base), fibers(x.base).widths, x.tuple)


def normal_loop(c: Computad, source: Diagram, widths, tuple_) -> Movie:
    """Per tree left to right: create its braid directly beneath it, then absorb it."""
    if len(tuple_) != len(widths):
        raise ProError(f"{len(tuple_)} braids for {len(widths)} trees")
    braid_len = len(source.levels) - len(tree_levels(widths))
    b = Builder(c, source)
    for j, (bottom, w) in enumerate(zip(tree_bottoms(widths, braid_len), tuple_)):
        if not w.letters:
            continue
        count = braid_transform(b, bottom, 0, j, list(w.letters), w.strands)
        absorb_region(b, bottom, count)
    return b.movie()


# --- MacLane coherence on internal data -------------------------------------------------

Tree = Any  # a leaf (input label or None for a unit) or a pair of trees


def _leaves(t: Tree) -> list:
    if isinstance(t, tuple):
        return _leaves(t[0]) + _leaves(t[1])
    return [t]


def _inputs(t: Tree) -> int:
    return sum(1 for x in _leaves(t) if x is not None)


def _shape(t: Tree) -> Any:
    return [_shape(t[0]), _shape(t[1])] if isinstance(t, tuple) else 0


def _parse_shape(data: Any) -> Any:
    if data == 0:
        return 0
    if isinstance(data, list) and len(data) == 2:
        return (_parse_shape(data[0]), _parse_shape(data[1]))
    raise ValueError(f"bracketing must be 0 or a pair, got {data!r}")


def _count_leaves(shape: Any) -> int:
    return _count_leaves(shape[0]) + _count_leaves(shape[1]) if isinstance(shape, tuple) else 1


@dataclass(frozen=True)
class InternalData:
    """A braid or permutation on the inputs, unit counts per gap, and a bracketing.

    ``units[g]`` counts units in gap g, gap 0 before the first input and gap m
    after the last.  ``bracketing`` is nested pairs with leaf ``0``.
    """

    sigma: BraidWord
    units: tuple[int, ...]
    bracketing: Any

    def __post_init__(self) -> None:
        object.__setattr__(self, "units", tuple(int(u) for u in self.units))
        object.__setattr__(self, "bracketing", _parse_shape(_shape_to_list(self.bracketing)))
        m = self.sigma.strands
        if len(self.units) != m + 1 or any(u < 0 for u in self.units):
            raise ValueError(f"need {m + 1} nonnegative unit counts, got {list(self.units)}")
        if _count_leaves(self.bracketing) != m + sum(self.units):
            raise ValueError("bracketing leaf count differs from inputs plus units")

    @property
    def inputs(self) -> int:
        return self.sigma.strands

    def tokens(self) -> Tree:
        """The bracketing with leaves labelled by input strand (None for units)."""
        pi = underlying_permutation(self.sigma)
        at_position = {pi(i): i for i in range(1, self.inputs + 1)}
        seq: list = [None] * self.units[0]
        for p in range(1, self.inputs + 1):
            seq.append(at_position[p])
            seq.extend([None] * self.units[p])
        it = iter(seq)

        def fill(shape: Any) -> Tree:
            if isinstance(shape, tuple):
                return (fill(shape[0]), fill(shape[1]))
            return next(it)

        return fill(self.bracketing)

    def to_json(self) -> dict:
        return {"sigma": self.sigma.to_json(), "units": list(self.units), "bracketing": _shape(self.bracketing)}

    @classmethod
    def from_json(cls, data: dict) -> InternalData:
        try:
            sigma = data["sigma"]
            if isinstance(sigma, dict) and "images" in sigma:
                perm = Permutation(tuple(sigma["images"]))
                word = perm_representative_word(perm)
            else:
                word = BraidWord.from_json(sigma)
            return cls(word, tuple(data["units"]), _parse_shape(data["bracketing"]))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed internal data JSON: {exc}") from exc


def _shape_to_list(shape: Any) -> Any:
    if isinstance(shape, (tuple, list)):
        return [_shape_to_list(shape[0]), _shape_to_list(shape[1])]
    return shape


_MOVE_KINDS = ("associate", "unit_create", "unit_destroy", "commute")


@dataclass(frozen=True)
class InternalMove:
    kind: str
    path: tuple[int, ...] = ()
    sign: int = 1
    side: str = "left"

    def __post_init__(self) -> None:
        object.__setattr__(self, "path", tuple(int(p) for p in self.path))
        if self.kind not in _MOVE_KINDS:
            raise ValueError(f"unknown internal move {self.kind!r}")
        if self.sign not in (1, -1) or self.side not in ("left", "right"):
            raise ValueError("internal move needs sign +-1 and side left/right")
        if any(p not in (0, 1) for p in self.path):
            raise ValueError("paths are lists of 0 (left) and 1 (right)")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "path": list(self.path)}
        if self.kind in ("associate", "commute"):
            out["sign"] = self.sign
        else:
            out["side"] = self.side
        return out

    @classmethod
    def from_json(cls, data: dict) -> InternalMove:
        try:
            return cls(data["kind"], tuple(data.get("path", ())), int(data.get("sign", 1)), data.get("side", "left"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed internal move JSON: {exc}") from exc


class MacLaneError(ValueError):
    pass


def _get(t: Tree, path: tuple[int, ...]) -> Tree:
    for p in path:
        if not isinstance(t, tuple):
            raise MacLaneError(f"path {list(path)} runs past a leaf")
        t = t[p]
    return t


def _put(t: Tree, path: tuple[int, ...], new: Tree) -> Tree:
    if not path:
        return new
    if not isinstance(t, tuple):
        raise MacLaneError(f"path {list(path)} runs past a leaf")
    if path[0] == 0:
        return (_put(t[0], path[1:], new), t[1])
    return (t[0], _put(t[1], path[1:], new))


def _inputs_before(t: Tree, path: tuple[int, ...]) -> int:
    n = 0
    for p in path:
        if p == 1:
            n += _inputs(t[0])
        t = t[p]
    return n


def apply_internal_move(t: Tree, mv: InternalMove, n: int) -> tuple[Tree, list[int]]:
    """Rewrite the token tree; returns it with the braid letters the move contributes."""
    node = _get(t, mv.path)
    if mv.kind == "associate":
        if mv.sign > 0:
            if not (isinstance(node, tuple) and isinstance(node[0], tuple)):
                raise MacLaneError("associate(+) needs a node of shape ((X Y) Z)")
            (x, y), z = node
            return _put(t, mv.path, (x, (y, z))), []
        if not (isinstance(node, tuple) and isinstance(node[1], tuple)):
            raise MacLaneError("associate(-) needs a node of shape (X (Y Z))")
        x, (y, z) = node
        return _put(t, mv.path, ((x, y), z)), []
    if mv.kind == "unit_create":
        new = (None, node) if mv.side == "left" else (node, None)
        return _put(t, mv.path, new), []
    if mv.kind == "unit_destroy":
        if not isinstance(node, tuple):
            raise MacLaneError("unit_destroy needs a product node")
        unit_leaf, rest = (node[0], node[1]) if mv.side == "left" else (node[1], node[0])
        if unit_leaf is not None or isinstance(unit_leaf, tuple):
            raise MacLaneError(f"no unit on the {mv.side} of the node")
        return _put(t, mv.path, rest), []
    if not isinstance(node, tuple):
        raise MacLaneError("commute needs a product node")
    x, y = node
    slot = _inputs_before(t, mv.path)
    w = block_crossing(_inputs(x), _inputs(y), mv.sign)
    return _put(t, mv.path, (y, x)), list(w.shifted(slot, n).letters)


def run_internal_moves(src: InternalData, moves: list[InternalMove]) -> tuple[Tree, BraidWord]:
    t = src.tokens()
    n = src.inputs
    letters = list(src.sigma.letters)
    for k, mv in enumerate(moves):
        try:
            t, add = apply_internal_move(t, mv, n)
        except MacLaneError as exc:
            raise MacLaneError(f"invalid move at index {k}: {exc}") from exc
        letters.extend(add)
    return t, BraidWord(n, tuple(letters))


def internal_target(src: InternalData, moves: list[InternalMove]) -> InternalData:
    t, braid = run_internal_moves(src, moves)
    seq = _leaves(t)
    units, gap = [], 0
    for x in seq:
        if x is None:
            gap += 1
        else:
            units.append(gap)
            gap = 0
    units.append(gap)
    return InternalData(braid, tuple(units), _parse_shape(_shape(t)))


def maclane_check(flavor: str, src: InternalData, l1: list[InternalMove], l2: list[InternalMove]) -> bool:
    """Whether the two pastings of associators, unitors and commutators agree.

    Symmetric: always, once both are valid and meet.  Braided: iff the braids
    traced by the commute moves agree.
    """
    if flavor not in ("braided", "symmetric"):
        raise ValueError(f"flavor must be braided or symmetric, got {flavor!r}")
    t1, b1 = run_internal_moves(src, l1)
    t2, b2 = run_internal_moves(src, l2)
    if t1 != t2:
        raise MacLaneError("mismatched targets: the move lists end at different internal data")
    if flavor == "symmetric":
        return True
    return braid_normal_form(b1) == braid_normal_form(b2)


def composition_iso(f: Diagram, g: Diagram, flavor: str) -> Movie:
    """A movie from g after f to the standard form of the composite morphism.

    Both inputs must already be in standard form for the flavor.
    """
    from .normalize import decompose_1cell
    from .procat import pro_compose, pro_equal

    flavor = canonical_flavor(flavor)
    c = flavor_computad(flavor)
    x, mx = decompose_1cell(f, flavor, c)
    y, my = decompose_1cell(g, flavor, c)
    if mx.steps or my.steps:
        raise ProError("inputs are not in standard form")
    if f.width_out != g.width_in:
        raise ProError(f"cannot compose: {f.width_out} wires meet {g.width_in}")
    composite = Diagram(f.source, f.levels + g.levels)
    z, movie = decompose_1cell(composite, flavor, c)
    if flavor == "fs":
        from .combinat import map_compose

        if z != map_compose(y, x):
            raise ProError("composite function disagrees with the standard form reached")
    elif not pro_equal(z, pro_compose(y, x)):
        raise ProError("composite morphism disagrees with the standard form reached")
    return movie
