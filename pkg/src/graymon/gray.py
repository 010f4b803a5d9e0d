"""Ordered string diagrams for Gray monoid computads.

A diagram is a source list of object labels plus a stack of levels, each
holding exactly one cell at an offset.  Braidings are stored as the adjacent
crossings ``R+`` / ``R-``; block braidings are always expanded.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .braid import BraidWord, block_crossing

CROSSINGS = {"R+": 1, "R-": -1}
FLAVORS = ("naked", "braided", "symmetric")


class DiagramError(ValueError):
    pass


@dataclass(frozen=True)
class Gen1:
    name: str
    source: tuple[str, ...]
    target: tuple[str, ...]


@dataclass(frozen=True)
class Level:
    cell: str
    offset: int
    k_in: int = 2
    k_out: int = 2

    @property
    def is_crossing(self) -> bool:
        return self.cell in CROSSINGS

    @property
    def sign(self) -> int:
        return CROSSINGS.get(self.cell, 0)

    @property
    def delta(self) -> int:
        return self.k_out - self.k_in

    def moved(self, offset: int) -> Level:
        return Level(self.cell, offset, self.k_in, self.k_out)

    def to_json(self) -> dict:
        return {"cell": self.cell, "offset": self.offset}


def crossing(sign: int, offset: int) -> Level:
    return Level("R+" if sign > 0 else "R-", offset, 2, 2)


def braid_levels(w: BraidWord | Sequence[int], offset: int = 0) -> list[Level]:
    letters = w.letters if isinstance(w, BraidWord) else tuple(w)
    return [crossing(x, abs(x) - 1 + offset) for x in letters]


def block_levels(a: int, b: int, sign: int, offset: int = 0) -> list[Level]:
    """Expanded block braiding of an a-bundle past a b-bundle."""
    return braid_levels(block_crossing(a, b, sign), offset)


@dataclass(frozen=True)
class Diagram:
    source: tuple[str, ...]
    levels: tuple[Level, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "source", tuple(self.source))
        object.__setattr__(self, "levels", tuple(self.levels))

    def __len__(self) -> int:
        return len(self.levels)

    @classmethod
    def of(cls, width: int, levels: Iterable[Level] = (), label: str = "C") -> Diagram:
        return cls((label,) * width, tuple(levels))

    def widths(self) -> list[int]:
        """Wire count at each boundary: index k is the boundary below level k."""
        cached = self.__dict__.get("_widths")
        if cached is None:
            out = [len(self.source)]
            for lv in self.levels:
                out.append(out[-1] + lv.delta)
            # frozen, so the cache can never go stale
            cached = tuple(out)
            object.__setattr__(self, "_widths", cached)
        return list(cached)

    @property
    def width_in(self) -> int:
        return len(self.source)

    @property
    def width_out(self) -> int:
        return self.widths()[-1]

    def to_json(self) -> dict:
        return {"source": list(self.source), "levels": [lv.to_json() for lv in self.levels]}


@dataclass(frozen=True)
class Subregion:
    lo: int
    hi: int
    win: tuple[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "win", (int(self.win[0]), int(self.win[1])))

    def to_json(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "win": list(self.win)}

    @classmethod
    def from_json(cls, data: dict) -> Subregion:
        return cls(int(data["lo"]), int(data["hi"]), tuple(data["win"]))

    def shifted(self, levels: int = 0, wires: int = 0) -> Subregion:
        return Subregion(self.lo + levels, self.hi + levels, (self.win[0] + wires, self.win[1] + wires))


@dataclass
class Gen2:
    name: str
    source: Diagram
    target: Diagram
    invertible: bool = True


@dataclass
class Computad:
    name: str
    flavor: str
    gen0: tuple[str, ...]
    gen1: dict[str, Gen1]
    gen2: dict[str, Gen2] = field(default_factory=dict)
    equalities: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.flavor not in FLAVORS:
            raise DiagramError(f"unknown flavor {self.flavor!r}")

    def level(self, cell: str, offset: int) -> Level:
        if cell in CROSSINGS:
            if self.flavor == "naked":
                raise DiagramError("naked computads have no braidings")
            return Level(cell, offset, 2, 2)
        try:
            g = self.gen1[cell]
        except KeyError:
            raise DiagramError(f"unknown generator {cell!r}") from None
        return Level(cell, offset, len(g.source), len(g.target))

    def diagram_from_json(self, data: dict) -> Diagram:
        try:
            levels = tuple(self.level(str(x["cell"]), int(x["offset"])) for x in data["levels"])
            return Diagram(tuple(data["source"]), levels)
        except (KeyError, TypeError) as exc:
            raise DiagramError(f"malformed diagram JSON: {exc}") from exc


def boundaries(c: Computad, d: Diagram) -> list[tuple[str, ...]]:
    """Label lists at every boundary, checking each level against the computad."""
    cur = tuple(d.source)
    out = [cur]
    for k, lv in enumerate(d.levels):
        if lv.offset < 0 or lv.offset + lv.k_in > len(cur):
            raise DiagramError(f"level {k}: {lv.cell}@{lv.offset} does not fit {len(cur)} wires")
        ins = cur[lv.offset : lv.offset + lv.k_in]
        if lv.cell in CROSSINGS:
            if c.flavor == "naked":
                raise DiagramError(f"level {k}: braiding in a naked computad")
            if lv.k_in != 2 or lv.k_out != 2:
                raise DiagramError(f"level {k}: crossing with arity {lv.k_in}->{lv.k_out}")
            if any(x not in c.gen0 for x in ins):
                raise DiagramError(f"level {k}: braiding on non-generating objects {ins}")
            outs = (ins[1], ins[0])
        else:
            g = c.gen1.get(lv.cell)
            if g is None:
                raise DiagramError(f"level {k}: unknown generator {lv.cell!r}")
            if (len(g.source), len(g.target)) != (lv.k_in, lv.k_out):
                raise DiagramError(f"level {k}: arity of {lv.cell} is {len(g.source)}->{len(g.target)}")
            if ins != g.source:
                raise DiagramError(f"level {k}: {lv.cell} expects {g.source}, got {ins}")
            outs = g.target
        cur = cur[: lv.offset] + outs + cur[lv.offset + lv.k_in :]
        out.append(cur)
    return out


def diagram_typecheck(c: Computad, d: Diagram) -> tuple[str, ...]:
    return boundaries(c, d)[-1]


def check_widths(d: Diagram) -> None:
    """Arity-only check, for diagrams built without a computad at hand."""
    w = len(d.source)
    for k, lv in enumerate(d.levels):
        if lv.offset < 0 or lv.offset + lv.k_in > w:
            raise DiagramError(f"level {k}: {lv.cell}@{lv.offset} does not fit {w} wires")
        w += lv.delta


def identity(labels: Sequence[str]) -> Diagram:
    return Diagram(tuple(labels), ())


def diagram_compose(g: Diagram, f: Diagram, c: Computad | None = None) -> Diagram:
    """f below g."""
    if c is not None:
        if diagram_typecheck(c, f) != g.source:
            raise DiagramError("target of the lower diagram differs from the upper source")
    elif f.width_out != g.width_in:
        raise DiagramError(f"cannot compose: {f.width_out} wires meet {g.width_in}")
    return Diagram(f.source, f.levels + g.levels)


def diagram_tensor(f: Diagram, g: Diagram) -> Diagram:
    shift = f.width_out
    return Diagram(f.source + g.source, f.levels + tuple(lv.moved(lv.offset + shift) for lv in g.levels))


def whisker(d: Diagram, left: int, right: int, label: str = "C") -> Diagram:
    """d with ``left`` identity wires on its left and ``right`` on its right."""
    return Diagram((label,) * left + d.source + (label,) * right, tuple(lv.moved(lv.offset + left) for lv in d.levels))


def region_walk(d: Diagram, r: Subregion) -> list[tuple[int, int]]:
    """Window (left, right) at every boundary lo..hi, validating containment."""
    if not 0 <= r.lo <= r.hi <= len(d.levels):
        raise DiagramError(f"level range [{r.lo},{r.hi}) outside 0..{len(d.levels)}")
    widths = d.widths()
    a, b = r.win
    if not 0 <= a <= b <= widths[r.lo]:
        raise DiagramError(f"window {r.win} outside the {widths[r.lo]} wires at level {r.lo}")
    out = [(a, b)]
    for k in range(r.lo, r.hi):
        lv = d.levels[k]
        if lv.offset < a or lv.offset + lv.k_in > b:
            raise DiagramError(f"level {k}: {lv.cell}@{lv.offset} is not inside window [{a},{b})")
        b += lv.delta
        out.append((a, b))
    return out


def subregion_extract(d: Diagram, r: Subregion, c: Computad | None = None) -> Diagram:
    region_walk(d, r)
    a, b = r.win
    if c is not None:
        labels = boundaries(c, d)[r.lo][a:b]
    elif r.lo == 0:
        labels = d.source[a:b]
    else:
        labels = ("C",) * (b - a)
    levels = tuple(lv.moved(lv.offset - a) for lv in d.levels[r.lo : r.hi])
    return Diagram(tuple(labels), levels)


def subregion_replace(d: Diagram, r: Subregion, inner: Diagram) -> Diagram:
    walk = region_walk(d, r)
    a, b = r.win
    out_width = walk[-1][1] - a
    if inner.width_in != b - a or inner.width_out != out_width:
        raise DiagramError(
            f"replacement {inner.width_in}->{inner.width_out} is not parallel to {b - a}->{out_width}"
        )
    moved = tuple(lv.moved(lv.offset + a) for lv in inner.levels)
    return Diagram(d.source, d.levels[: r.lo] + moved + d.levels[r.hi :])


def wire_labels_at(c: Computad, d: Diagram, k: int) -> tuple[str, ...]:
    return boundaries(c, d)[k]
