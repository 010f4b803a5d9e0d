"""Movies: 2-cells as replayable sequences of rewrites on ordered string diagrams.

Step kinds and their local patterns (window-relative offsets):

* ``gen2``: a named generating 2-cell, forward or reverse.
* ``interchange``: two unconnected vertically adjacent cells swap heights.
  ``fwd`` takes a lower cell that sits right of the upper one and lowers the
  left cell; ``rev`` undoes it.
* ``insert`` / ``cancel``: create or remove the pair ``R(s) R(-s)`` on two wires.
* ``pull``: a cell X with k inputs and l outputs passes through a strand.
  ``up`` on side R rewrites ``X@0, block(l,1,t)@0`` to ``block(k,1,t)@0, X@1``;
  ``up`` on side L rewrites ``X@1, block(1,l,t)@0`` to ``block(1,k,t)@0, X@0``.
  ``down`` is the inverse rewrite.
* ``syllepsis``: ``R+ R+`` on two wires cancels (``fwd``) or is created
  (``rev``); symmetric computads only.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from itertools import count
from typing import Iterable, Sequence

from .gray import (
    Computad,
    Diagram,
    DiagramError,
    Level,
    Subregion,
    block_levels,
    boundaries,
    crossing,
    diagram_tensor,
    subregion_extract,
    subregion_replace,
    whisker,
)

KINDS = ("gen2", "interchange", "insert", "cancel", "pull", "syllepsis")
BRAIDED_KINDS = ("insert", "cancel", "pull", "syllepsis")


class StepError(ValueError):
    def __init__(self, message: str, index: int | None = None):
        self.index = index
        super().__init__(message if index is None else f"step {index}: {message}")


@dataclass(frozen=True)
class Step:
    kind: str
    at: Subregion
    name: str = ""
    dir: str = "fwd"
    sign: int = 1
    side: str = "R"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise StepError(f"unknown step kind {self.kind!r}")
        if self.kind == "pull":
            if self.dir not in ("up", "down") or self.side not in ("L", "R"):
                raise StepError(f"pull needs dir up/down and side L/R, got {self.dir}/{self.side}")
        elif self.dir not in ("fwd", "rev"):
            raise StepError(f"{self.kind} needs dir fwd/rev, got {self.dir}")
        if self.sign not in (1, -1):
            raise StepError(f"sign must be +1 or -1, got {self.sign}")

    @property
    def over(self) -> bool:
        """For pulls: whether the moving cell passes over the strand."""
        return (self.side == "R") == (self.sign > 0)

    def shifted(self, levels: int = 0, wires: int = 0) -> Step:
        return replace(self, at=self.at.shifted(levels, wires))

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "at": self.at.to_json()}
        if self.kind == "gen2":
            out.update(name=self.name, dir=self.dir)
        elif self.kind in ("interchange", "syllepsis"):
            out["dir"] = self.dir
        elif self.kind in ("insert", "cancel"):
            out["sign"] = self.sign
        else:
            out.update(sign=self.sign, side=self.side, dir=self.dir)
        return out

    @classmethod
    def from_json(cls, data: dict) -> Step:
        try:
            kind = data["kind"]
            default_dir = "up" if kind == "pull" else "fwd"
            return cls(
                kind,
                Subregion.from_json(data["at"]),
                name=data.get("name", ""),
                dir=data.get("dir", default_dir),
                sign=int(data.get("sign", 1)),
                side=data.get("side", "R"),
            )
        except (KeyError, TypeError, IndexError) as exc:
            raise StepError(f"malformed step JSON: {exc}") from exc


@dataclass(frozen=True)
class Movie:
    source: Diagram
    steps: tuple[Step, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self) -> int:
        return len(self.steps)

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "steps": [s.to_json() for s in self.steps]}

    @classmethod
    def from_json(cls, c: Computad, data: dict) -> Movie:
        try:
            return cls(c.diagram_from_json(data["source"]), tuple(Step.from_json(s) for s in data["steps"]))
        except (KeyError, TypeError) as exc:
            raise StepError(f"malformed movie JSON: {exc}") from exc


# --- local rewriting ---------------------------------------------------------


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise StepError(message)


def _pattern(levels: Iterable[Level]) -> tuple[Level, ...]:
    return tuple(levels)


def local_rewrite(c: Computad, step: Step, inner: Diagram) -> Diagram:
    """Rewrite the extracted window according to ``step``."""
    kind = step.kind
    lv = inner.levels
    width = inner.width_in
    if kind in BRAIDED_KINDS:
        _expect(c.flavor != "naked", f"{kind} needs a braided or symmetric computad")
    if kind == "gen2":
        g = c.gen2.get(step.name)
        _expect(g is not None, f"unknown generating 2-cell {step.name!r}")
        src, tgt = (g.source, g.target) if step.dir == "fwd" else (g.target, g.source)
        _expect(step.dir == "fwd" or g.invertible, f"{step.name} is not invertible")
        _expect(width == src.width_in and lv == src.levels, f"{step.name} pattern does not match {_show(lv)}")
        return Diagram(inner.source, tgt.levels)
    if kind == "interchange":
        _expect(len(lv) == 2, "interchange acts on exactly two levels")
        a, b = lv
        if step.dir == "fwd":
            _expect(b.offset + b.k_in <= a.offset, "fwd interchange needs the lower cell right of the upper one")
            return Diagram(inner.source, (b, a.moved(a.offset + b.delta)))
        _expect(a.offset + a.k_out <= b.offset, "rev interchange needs the lower cell left of the upper one")
        return Diagram(inner.source, (b.moved(b.offset - a.delta), a))
    if kind == "insert":
        _expect(not lv and width == 2, "insert acts on an empty window of two wires")
        return Diagram(inner.source, (crossing(step.sign, 0), crossing(-step.sign, 0)))
    if kind == "cancel":
        _expect(width == 2 and lv == (crossing(step.sign, 0), crossing(-step.sign, 0)), f"cancel pattern does not match {_show(lv)}")
        return Diagram(inner.source, ())
    if kind == "syllepsis":
        _expect(c.flavor == "symmetric", "syllepsis needs a symmetric computad")
        pair = (crossing(1, 0), crossing(1, 0))
        if step.dir == "fwd":
            _expect(width == 2 and lv == pair, f"syllepsis pattern does not match {_show(lv)}")
            return Diagram(inner.source, ())
        _expect(not lv and width == 2, "reverse syllepsis acts on an empty window of two wires")
        return Diagram(inner.source, pair)
    # pull
    t, side = step.sign, step.side
    _expect(len(lv) >= 1, "pull needs a moving cell")
    if step.dir == "up":
        x = lv[0]
        k, l = x.k_in, x.k_out
        _expect(width == k + 1, f"pull window must have {k + 1} wires")
        if side == "R":
            want = _pattern([x.moved(0), *block_levels(l, 1, t)])
            _expect(lv == want, f"pull-up pattern does not match {_show(lv)}")
            return Diagram(inner.source, (*block_levels(k, 1, t), x.moved(1)))
        want = _pattern([x.moved(1), *block_levels(1, l, t)])
        _expect(lv == want, f"pull-up pattern does not match {_show(lv)}")
        return Diagram(inner.source, (*block_levels(1, k, t), x.moved(0)))
    x = lv[-1]
    k, l = x.k_in, x.k_out
    _expect(width == k + 1, f"pull window must have {k + 1} wires")
    if side == "R":
        want = _pattern([*block_levels(k, 1, t), x.moved(1)])
        _expect(lv == want, f"pull-down pattern does not match {_show(lv)}")
        return Diagram(inner.source, (x.moved(0), *block_levels(l, 1, t)))
    want = _pattern([*block_levels(1, k, t), x.moved(0)])
    _expect(lv == want, f"pull-down pattern does not match {_show(lv)}")
    return Diagram(inner.source, (x.moved(1), *block_levels(1, l, t)))


def _show(levels: Sequence[Level]) -> str:
    return "[" + ", ".join(f"{x.cell}@{x.offset}" for x in levels) + "]"


def apply_step(c: Computad, frame: Diagram, step: Step) -> Diagram:
    try:
        inner = subregion_extract(frame, step.at)
    except DiagramError as exc:
        raise StepError(f"invalid subregion {step.at.to_json()}: {exc}") from exc
    new = local_rewrite(c, step, inner)
    return subregion_replace(frame, step.at, new)


def inverse_step(step: Step, new_len: int) -> Step:
    """The step undoing ``step``, given the level count it produced."""
    at = Subregion(step.at.lo, step.at.lo + new_len, step.at.win)
    if step.kind == "insert":
        return Step("cancel", at, sign=step.sign)
    if step.kind == "cancel":
        return Step("insert", at, sign=step.sign)
    if step.kind == "pull":
        return replace(step, at=at, dir="down" if step.dir == "up" else "up")
    return replace(step, at=at, dir="rev" if step.dir == "fwd" else "fwd")


# --- replay --------------------------------------------------------------------


def movie_frames(c: Computad, m: Movie, check_types: bool = True) -> list[Diagram]:
    if check_types:
        boundaries(c, m.source)
    frames = [m.source]
    for i, step in enumerate(m.steps):
        try:
            frames.append(apply_step(c, frames[-1], step))
        except (StepError, DiagramError) as exc:
            raise StepError(f"{exc} (frame {_show(frames[-1].levels)})", i) from exc
    if check_types:
        boundaries(c, frames[-1])
    return frames


def movie_replay(c: Computad, m: Movie) -> Diagram:
    return movie_frames(c, m)[-1]


def is_loop(c: Computad, m: Movie) -> bool:
    return movie_replay(c, m) == m.source


@dataclass
class Tracked:
    """A frame with a persistent id per level."""

    frame: Diagram
    ids: list[int]


def tracked_replay(c: Computad, m: Movie, start_ids: Sequence[int] | None = None) -> list[Tracked]:
    """Replay carrying level ids; a pulled or interchanged cell keeps its id."""
    fresh = count(len(m.source.levels) if start_ids is None else max(start_ids, default=-1) + 1)
    ids = list(range(len(m.source.levels))) if start_ids is None else list(start_ids)
    out = [Tracked(m.source, ids)]
    for i, step in enumerate(m.steps):
        prev = out[-1]
        try:
            nxt = apply_step(c, prev.frame, step)
        except (StepError, DiagramError) as exc:
            raise StepError(str(exc), i) from exc
        lo, hi = step.at.lo, step.at.hi
        old = prev.ids[lo:hi]
        new_len = hi - lo + len(nxt.levels) - len(prev.frame.levels)
        if step.kind == "interchange":
            new = [old[1], old[0]]
        elif step.kind == "pull":
            mover = old[0] if step.dir == "up" else old[-1]
            rest = [next(fresh) for _ in range(new_len - 1)]
            new = rest + [mover] if step.dir == "up" else [mover] + rest
        else:
            new = [next(fresh) for _ in range(new_len)]
        out.append(Tracked(nxt, prev.ids[:lo] + new + prev.ids[hi:]))
    return out


def involved_ids(before: Tracked, after: Tracked, step: Step) -> set[int]:
    grow = len(after.frame.levels) - len(before.frame.levels)
    return set(before.ids[step.at.lo : step.at.hi]) | set(after.ids[step.at.lo : step.at.hi + grow])


# --- composition -----------------------------------------------------------------


def movie_invert(c: Computad, m: Movie) -> Movie:
    frames = movie_frames(c, m)
    inv = []
    for step, before, after in zip(m.steps, frames, frames[1:]):
        if step.kind == "gen2" and not c.gen2[step.name].invertible:
            raise StepError(f"{step.name} is not invertible")
        new_len = step.at.hi - step.at.lo + len(after.levels) - len(before.levels)
        inv.append(inverse_step(step, new_len))
    return Movie(frames[-1], tuple(reversed(inv)))


def movie_compose(c: Computad, mode: str, a: Movie, b: Movie) -> Movie:
    """vertical: a then b.  horizontal: a on the lower 1-cell, b on the upper.
    tensor: a on the left, b on the right."""
    if mode == "vertical":
        if movie_replay(c, a) != b.source:
            raise StepError("target of the first movie differs from the source of the second")
        return Movie(a.source, a.steps + b.steps)
    ta = movie_replay(c, a)
    movie_replay(c, b)
    if mode == "horizontal":
        if ta.width_out != b.source.width_in:
            raise StepError("horizontal composite needs matching middle boundary")
        src = Diagram(a.source.source, a.source.levels + b.source.levels)
        grow = len(ta.levels)
        return Movie(src, a.steps + tuple(s.shifted(levels=grow) for s in b.steps))
    if mode == "tensor":
        src = diagram_tensor(a.source, b.source)
        shift_w = ta.width_out
        grow = len(ta.levels)
        return Movie(src, a.steps + tuple(s.shifted(levels=grow, wires=shift_w) for s in b.steps))
    raise StepError(f"unknown composition mode {mode!r}")


def movie_whisker(m: Movie, left: int, right: int, below: Diagram | None = None) -> Movie:
    """Place a movie inside extra identity wires and below additional levels."""
    src = whisker(m.source, left, right)
    levels = 0
    if below is not None:
        src = Diagram(below.source, below.levels + src.levels)
        levels = len(below.levels)
    return Movie(src, tuple(s.shifted(levels=levels, wires=left) for s in m.steps))


# --- a builder that keeps the current frame --------------------------------------


@dataclass
class Builder:
    """Accumulates steps, applying each one to the current frame immediately."""

    c: Computad
    source: Diagram
    steps: list[Step] = field(default_factory=list)
    frame: Diagram | None = None

    def __post_init__(self) -> None:
        if self.frame is None:
            self.frame = self.source

    def movie(self) -> Movie:
        return Movie(self.source, tuple(self.steps))

    def apply(self, step: Step) -> Builder:
        self.frame = apply_step(self.c, self.frame, step)
        self.steps.append(step)
        return self

    def extend(self, steps: Iterable[Step]) -> Builder:
        for s in steps:
            self.apply(s)
        return self

    @property
    def levels(self) -> tuple[Level, ...]:
        return self.frame.levels

    # convenience constructors; positions are read off the current frame

    def gen2(self, name: str, lo: int, left: int, dir: str = "fwd") -> Builder:
        g = self.c.gen2[name]
        src = g.source if dir == "fwd" else g.target
        at = Subregion(lo, lo + len(src.levels), (left, left + src.width_in))
        return self.apply(Step("gen2", at, name=name, dir=dir))

    def interchange(self, lower: int) -> Builder:
        return self.apply(interchange_step(self.frame, lower))

    def insert(self, boundary: int, wire: int, sign: int) -> Builder:
        return self.apply(Step("insert", Subregion(boundary, boundary, (wire, wire + 2)), sign=sign))

    def cancel(self, level: int) -> Builder:
        lv = self.frame.levels[level]
        return self.apply(Step("cancel", Subregion(level, level + 2, (lv.offset, lv.offset + 2)), sign=lv.sign))

    def syllepsis(self, level: int) -> Builder:
        lv = self.frame.levels[level]
        return self.apply(Step("syllepsis", Subregion(level, level + 2, (lv.offset, lv.offset + 2)), dir="fwd"))

    def unsyllepsis(self, boundary: int, wire: int) -> Builder:
        return self.apply(Step("syllepsis", Subregion(boundary, boundary, (wire, wire + 2)), dir="rev"))

    def pull_up(self, level: int, side: str) -> Builder:
        return self.apply(pull_up_step(self.frame, level, side))

    def pull_down(self, level: int, side: str, sign: int | None = None) -> Builder:
        return self.apply(pull_down_step(self.frame, level, side, sign))


def interchange_step(frame: Diagram, lower: int) -> Step:
    """Interchange levels ``lower`` and ``lower+1``, direction and window read off the frame."""
    a, b = frame.levels[lower], frame.levels[lower + 1]
    if b.offset + b.k_in <= a.offset:
        return Step("interchange", Subregion(lower, lower + 2, (b.offset, a.offset + a.k_in)), dir="fwd")
    if a.offset + a.k_out <= b.offset:
        left = a.offset
        right = b.offset - a.delta + b.k_in
        return Step("interchange", Subregion(lower, lower + 2, (left, right)), dir="rev")
    raise StepError(f"levels {lower} and {lower + 1} are connected")


def pull_up_step(frame: Diagram, level: int, side: str) -> Step:
    """Pull the cell at ``level`` up through the strand crossing its outputs."""
    x = frame.levels[level]
    l = x.k_out
    if l == 0:
        raise StepError("a cell without outputs cannot be pulled up")
    first = frame.levels[level + 1] if level + 1 < len(frame.levels) else None
    if first is None or not first.is_crossing:
        raise StepError(f"no crossing above level {level}")
    t = first.sign
    left = x.offset if side == "R" else x.offset - 1
    return Step("pull", Subregion(level, level + 1 + l, (left, left + x.k_in + 1)), dir="up", sign=t, side=side)


def pull_down_step(frame: Diagram, level: int, side: str, sign: int | None = None) -> Step:
    """Pull the cell at ``level`` down through the strand crossing its inputs.

    A cell without inputs crosses nothing on the way down, so its ``sign``
    must be given.
    """
    x = frame.levels[level]
    k = x.k_in
    lo = level - k
    if k == 0:
        if sign is None:
            raise StepError("pulling a cell without inputs down needs an explicit sign")
        t = sign
    elif lo < 0 or not frame.levels[lo].is_crossing:
        raise StepError(f"no crossing below level {level}")
    else:
        t = frame.levels[lo].sign
    left = x.offset - 1 if side == "R" else x.offset
    return Step("pull", Subregion(lo, level + 1, (left, left + k + 1)), dir="down", sign=t, side=side)


# --- moves between movies ---------------------------------------------------------


@dataclass(frozen=True)
class Move:
    """A rewrite of a movie that keeps the 2-cell it denotes.

    kinds: ``type1`` swaps independent steps ``index`` and ``index+1``;
    ``insert_pair`` adds ``step`` and its inverse before ``index``;
    ``delete_pair`` removes an inverse pair at ``index``; ``type3`` slides step
    ``index`` past the ``length`` interchangers after it; ``equality`` replaces
    the clip starting at ``index`` that matches one side of ``name`` placed
    ``lift`` levels up and ``shift`` wires right; ``cancel_block`` removes the
    ``length`` steps at ``index`` together with their inverse right after
    them; ``coherence`` replaces the ``length`` steps at ``index`` by the
    parallel ``clip``, justified by the coherence result ``name`` whose
    hypotheses are checked on both clips.
    """

    kind: str
    index: int
    step: Step | None = None
    name: str = ""
    lift: int = 0
    shift: int = 0
    direction: str = "fwd"
    length: int = 0
    clip: tuple[Step, ...] = ()

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "index": self.index}
        if self.step is not None:
            out["step"] = self.step.to_json()
        if self.kind == "equality":
            out.update(name=self.name, lift=self.lift, shift=self.shift, direction=self.direction)
        if self.kind in ("type3", "cancel_block", "coherence"):
            out["length"] = self.length
        if self.kind == "coherence":
            out["name"] = self.name
            out["clip"] = [s.to_json() for s in self.clip]
        return out

    @classmethod
    def from_json(cls, data: dict) -> Move:
        try:
            step = Step.from_json(data["step"]) if "step" in data else None
            return cls(
                data["kind"],
                int(data["index"]),
                step=step,
                name=data.get("name", ""),
                lift=int(data.get("lift", 0)),
                shift=int(data.get("shift", 0)),
                direction=data.get("direction", "fwd"),
                length=int(data.get("length", 0)),
                clip=tuple(Step.from_json(s) for s in data.get("clip", ())),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MoveError(f"malformed move JSON: {exc}") from exc


class MoveError(ValueError):
    pass


def _frames(c: Computad, m: Movie) -> list[Diagram]:
    try:
        return movie_frames(c, m, check_types=False)
    except StepError as exc:
        raise MoveError(f"movie does not replay: {exc}") from exc


def _grow(before: Diagram, after: Diagram) -> int:
    return len(after.levels) - len(before.levels)


def apply_move(c: Computad, m: Movie, move: Move) -> Movie:
    return _apply_move(c, m, move, _frames(c, m))[0]


def _apply_move(c: Computad, m: Movie, move: Move, frames: list[Diagram]) -> tuple[Movie, list[Diagram]]:
    """The rewritten movie and its frames, given the frames of ``m``."""
    i = move.index
    steps = list(m.steps)
    if move.kind == "type1":
        new = _type1(c, m, frames, i)
    elif move.kind == "insert_pair":
        if move.step is None or not 0 <= i <= len(steps):
            raise MoveError("insert_pair needs a step and a position")
        try:
            after = apply_step(c, frames[i], move.step)
        except (StepError, DiagramError) as exc:
            raise MoveError(f"inserted step does not apply: {exc}") from exc
        back = inverse_step(move.step, move.step.at.hi - move.step.at.lo + _grow(frames[i], after))
        new = steps[:i] + [move.step, back] + steps[i:]
    elif move.kind == "delete_pair":
        if not 0 <= i < len(steps) - 1:
            raise MoveError(f"no step pair at {i}")
        a, b = steps[i], steps[i + 1]
        back = inverse_step(a, a.at.hi - a.at.lo + _grow(frames[i], frames[i + 1]))
        if b != back:
            raise MoveError(f"steps {i} and {i + 1} are not inverse to each other")
        new = steps[:i] + steps[i + 2 :]
    elif move.kind == "type3":
        new = _type3(c, m, frames, i, move.length)
    elif move.kind == "equality":
        new = _equality(c, m, frames, move)
    elif move.kind == "cancel_block":
        new = _cancel_block(m, frames, i, move.length)
    elif move.kind == "coherence":
        new = _coherence(c, m, frames, move)
    else:
        raise MoveError(f"unknown move kind {move.kind!r}")
    out = Movie(m.source, tuple(new))
    return out, _splice_frames(c, m.steps, out, frames)


def _splice_frames(c: Computad, old: Sequence[Step], out: Movie, frames: list[Diagram]) -> list[Diagram]:
    """Frames of ``out`` replaying only the steps that differ from ``old``.

    Identical trailing steps from an identical frame give identical frames, so
    the target is unchanged exactly when the changed middle ends where it did.
    """
    new = out.steps
    p = 0
    while p < min(len(old), len(new)) and old[p] == new[p]:
        p += 1
    s = 0
    while s < min(len(old), len(new)) - p and old[len(old) - 1 - s] == new[len(new) - 1 - s]:
        s += 1
    middle = _frames(c, Movie(frames[p], tuple(new[p : len(new) - s])))
    if middle[-1] != frames[len(old) - s]:
        raise MoveError("move changed the target frame")
    return frames[:p] + middle + frames[len(old) - s + 1 :]


def _type1(c: Computad, m: Movie, frames: list[Diagram], i: int) -> list[Step]:
    steps = list(m.steps)
    if not 0 <= i < len(steps) - 1:
        raise MoveError(f"no step pair at {i}")
    tracked = tracked_replay(c, m)
    a, b = steps[i], steps[i + 1]
    ids_a = involved_ids(tracked[i], tracked[i + 1], a)
    ids_b = involved_ids(tracked[i + 1], tracked[i + 2], b)
    if ids_a & ids_b:
        raise MoveError(f"steps {i} and {i + 1} share generating 1-cells")
    grow_a = _grow(frames[i], frames[i + 1])
    grow_b = _grow(frames[i + 1], frames[i + 2])
    top_a = a.at.hi + grow_a
    if b.at.lo >= top_a:
        first, second = b.shifted(levels=-grow_a), a
    elif b.at.hi <= a.at.lo:
        first, second = b, a.shifted(levels=grow_b)
    else:
        raise MoveError(f"steps {i} and {i + 1} act on overlapping level ranges")
    new = steps[:i] + [first, second] + steps[i + 2 :]
    check = _frames(c, Movie(m.source, tuple(new)))
    if check[i + 2] != frames[i + 2]:
        raise MoveError("type I swap changed the frame")
    return new


def _type3(c: Computad, m: Movie, frames: list[Diagram], i: int, length: int) -> list[Step]:
    steps = list(m.steps)
    if length < 1 or i + length > len(steps) - 1:
        raise MoveError("type III needs a step followed by interchangers")
    s = steps[i]
    chain = steps[i + 1 : i + 1 + length]
    if any(x.kind != "interchange" for x in chain):
        raise MoveError("type III chain must consist of interchangers")
    src_len = s.at.hi - s.at.lo
    res_len = src_len + _grow(frames[i], frames[i + 1])
    if length != res_len:
        raise MoveError(f"chain of {length} interchangers does not cross the {res_len} produced levels")
    top = s.at.lo + res_len
    first = chain[0].at.lo
    b = Builder(c, frames[i])
    if first == top - 1:
        # a cell above the produced levels travels down through them
        x = frames[i].levels[s.at.hi]
        for lower in range(s.at.hi - 1, s.at.lo - 1, -1):
            b.interchange(lower)
        shift = x.delta if x.offset + x.k_out <= s.at.win[0] else 0
        b.apply(s.shifted(levels=1, wires=shift))
    elif first == s.at.lo - 1:
        x = frames[i].levels[s.at.lo - 1]
        for lower in range(s.at.lo - 1, s.at.hi - 1):
            b.interchange(lower)
        shift = -x.delta if x.offset + x.k_out <= s.at.win[0] else 0
        b.apply(s.shifted(levels=-1, wires=shift))
    else:
        raise MoveError("interchangers do not start next to the step's produced levels")
    if b.frame != frames[i + 1 + length]:
        raise MoveError("type III rewrite does not reach the same frame")
    return steps[:i] + b.steps + steps[i + 1 + length :]


def equality_sides(c: Computad, name: str, direction: str) -> tuple[Movie, Movie]:
    try:
        lhs, rhs = c.equalities[name]
    except KeyError:
        raise MoveError(f"unknown equality {name!r}") from None
    if direction in ("flip", "flip_rev"):
        lhs, rhs = movie_invert(c, lhs), movie_invert(c, rhs)
    if direction in ("rev", "flip_rev"):
        lhs, rhs = rhs, lhs
    elif direction not in ("fwd", "flip"):
        raise MoveError(f"unknown equality direction {direction!r}")
    return lhs, rhs


def _equality(c: Computad, m: Movie, frames: list[Diagram], move: Move) -> list[Step]:
    lhs, rhs = equality_sides(c, move.name, move.direction)
    i = move.index
    if not 0 <= i <= len(m.steps):
        raise MoveError(f"no frame {i}")
    frame = frames[i]
    region = Subregion(move.lift, move.lift + len(lhs.source.levels), (move.shift, move.shift + lhs.source.width_in))
    try:
        inner = subregion_extract(frame, region)
    except DiagramError as exc:
        raise MoveError(f"{move.name}: window does not fit: {exc}") from exc
    if inner.levels != lhs.source.levels:
        raise MoveError(f"{move.name}: source {_show(lhs.source.levels)} not found, saw {_show(inner.levels)}")
    want = [s.shifted(move.lift, move.shift) for s in lhs.steps]
    have = list(m.steps[i : i + len(want)])
    if have != want:
        raise MoveError(f"{move.name}: clip at step {i} does not match the equality side")
    put = [s.shifted(move.lift, move.shift) for s in rhs.steps]
    return list(m.steps[:i]) + put + list(m.steps[i + len(want) :])


def _cancel_block(m: Movie, frames: list[Diagram], i: int, length: int) -> list[Step]:
    steps = list(m.steps)
    if length < 0 or not 0 <= i or i + 2 * length > len(steps):
        raise MoveError(f"no block of {length} steps and its inverse at {i}")
    for t in range(length):
        a, b = steps[i + length - 1 - t], steps[i + length + t]
        k = i + length - 1 - t
        if b != inverse_step(a, a.at.hi - a.at.lo + _grow(frames[k], frames[k + 1])):
            raise MoveError(f"step {i + length + t} does not undo step {k}")
    return steps[:i] + steps[i + 2 * length :]


def _only_structural(c: Computad, frame: Diagram, steps: Sequence[Step]) -> None:
    if any(s.kind == "gen2" for s in steps):
        raise MoveError("clip contains a generating 2-cell")


def _only_crossings(c: Computad, frame: Diagram, steps: Sequence[Step]) -> None:
    _only_structural(c, frame, steps)
    for s in steps:
        after = apply_step(c, frame, s)
        grow = _grow(frame, after)
        touched = frame.levels[s.at.lo : s.at.hi] + after.levels[s.at.lo : s.at.hi + grow]
        if any(not lv.is_crossing for lv in touched):
            raise MoveError(f"{s.kind} step touches a non-braiding cell")
        frame = after


def _commutator_free(c: Computad, frame: Diagram, steps: Sequence[Step]) -> None:
    if any(s.kind == "gen2" and s.name == "c" for s in steps):
        raise MoveError("clip contains a commutator")


# coherence results a ``coherence`` move may cite; each checker receives the
# start frame and one clip, and raises MoveError when a hypothesis fails.
# Results needing a global invariant are registered by the normalize module.
COHERENCE_CHECKS: dict[str, object] = {
    "structural": _only_structural,
    "braid": _only_crossings,
    "commutator-free": _commutator_free,
}

# results whose hypothesis concerns the pair of clips rather than each clip
PAIR_CHECKS: dict[str, object] = {}


def _coherence(c: Computad, m: Movie, frames: list[Diagram], move: Move) -> list[Step]:
    i, n = move.index, move.length
    if not 0 <= i or i + n > len(m.steps):
        raise MoveError(f"no clip of {n} steps at {i}")
    old = list(m.steps[i : i + n])
    new = list(move.clip)
    try:
        end = movie_replay(c, Movie(frames[i], tuple(new)))
    except (StepError, DiagramError) as exc:
        raise MoveError(f"replacement clip does not replay: {exc}") from exc
    if end != frames[i + n]:
        raise MoveError("replacement clip is not parallel to the replaced one")
    check = COHERENCE_CHECKS.get(move.name)
    pair = PAIR_CHECKS.get(move.name)
    if check is None and pair is None:
        raise MoveError(f"unknown coherence result {move.name!r}")
    if check is not None:
        check(c, frames[i], old)
        check(c, frames[i], new)
    if pair is not None:
        pair(c, frames[i], old, new)
    return list(m.steps[:i]) + new + list(m.steps[i + n :])


def replay_certificate(c: Computad, m: Movie, moves: Iterable[Move]) -> Movie:
    """Apply the moves one after another, each validated."""
    frames = _frames(c, m)
    for k, mv in enumerate(moves):
        try:
            m, frames = _apply_move(c, m, mv, frames)
        except MoveError as exc:
            raise MoveError(f"certificate move {k} ({mv.kind}): {exc}") from exc
    return m


# --- moving a single-output cell upwards -----------------------------------------


def rise_step(frame: Diagram, level: int) -> Step | None:
    """One step carrying the single-output cell at ``level`` upwards.

    Interchanges with an unconnected cell above, or pulls through a crossing
    on its output.  None when the cell above consumes the output or the cell
    is already at the top.
    """
    x = frame.levels[level]
    if x.k_out != 1:
        raise StepError(f"{x.cell} does not have a single output")
    if level + 1 >= len(frame.levels):
        return None
    y = frame.levels[level + 1]
    out = x.offset
    if y.offset + y.k_in <= out or y.offset > out:
        return interchange_step(frame, level)
    if y.is_crossing:
        return pull_up_step(frame, level, "L" if y.offset == out - 1 else "R")
    return None


def risen_level(frame: Diagram, level: int, step: Step) -> int:
    """Level of the moved cell after ``rise_step`` was applied."""
    if step.kind == "interchange":
        return level + 1
    return level + frame.levels[level].k_in


def fall_step(frame: Diagram, level: int) -> Step | None:
    """Interchange the cell at ``level`` with an unconnected cell below, if any."""
    if level == 0:
        return None
    x = frame.levels[level]
    y = frame.levels[level - 1]
    if y.offset + y.k_out <= x.offset or y.offset >= x.offset + x.k_in:
        return interchange_step(frame, level - 1)
    return None


# --- the structural equality library ---------------------------------------------


def _single_output_cells(c: Computad) -> list[tuple[str, int]]:
    return sorted((name, len(g.source)) for name, g in c.gen1.items() if len(g.target) == 1)


def raise_to_consumer(b: Builder, level: int) -> int:
    """Carry a single-output cell up until it sits below its consumer; returns its level."""
    while True:
        step = rise_step(b.frame, level)
        if step is None:
            return level
        nxt = risen_level(b.frame, level, step)
        b.apply(step)
        level = nxt


def pull_through_crossings(b: Builder, level: int) -> int:
    """Carry a single-output cell up through the crossings directly on its output."""
    while True:
        step = rise_step(b.frame, level)
        if step is None or step.kind != "pull":
            return level
        nxt = risen_level(b.frame, level, step)
        b.apply(step)
        level = nxt


def _raise_crossing(b: Builder, level: int) -> int:
    """Carry a crossing up one block of crossings (a braid move), or interchange it."""
    x = b.frame.levels[level]
    y = b.frame.levels[level + 1]
    if y.offset + y.k_in <= x.offset or y.offset >= x.offset + x.k_out:
        b.interchange(level)
        return level + 1
    for side in ("L", "R"):
        step = pull_up_step(b.frame, level, side)
        try:
            apply_step(b.c, b.frame, step)
        except (StepError, DiagramError):
            continue
        b.apply(step)
        return level + x.k_in
    raise StepError(f"crossing at level {level} cannot rise")


def _pull_region_up(b: Builder, lo: int, count: int) -> None:
    """Carry the ``count`` cells starting at ``lo`` up through the strand above them, top cell first."""
    for level in range(lo + count - 1, lo - 1, -1):
        x = b.frame.levels[level]
        if x.is_crossing:
            while level + 1 < len(b.frame.levels) and b.frame.levels[level + 1].is_crossing:
                level = _raise_crossing(b, level)
        else:
            raise_to_consumer(b, level)


def align_by_interchanges(b: Builder, target: Diagram) -> None:
    """Reorder the current frame's levels into ``target`` using interchangers only."""
    while b.frame.levels != target.levels:
        cur = b.frame.levels
        if len(cur) != len(target.levels):
            raise StepError("frames differ in more than level order")
        i = next(k for k in range(len(cur)) if cur[k] != target.levels[k])
        want = target.levels[i]
        for j in range(i + 1, len(cur)):
            probe = Builder(b.c, b.frame)
            try:
                for lower in range(j - 1, i - 1, -1):
                    probe.interchange(lower)
            except StepError:
                continue
            if probe.frame.levels[i] == want:
                b.extend(probe.steps)
                break
        else:
            raise StepError(f"level {i} of the target cannot be reached by interchangers")


def _exchange(c: Computad, f: tuple[str, int], g: tuple[str, int], s: int) -> tuple[Movie, Movie]:
    (fn, kf), (gn, kg) = f, g
    src = Diagram.of(kf + kg, [c.level(fn, 0), c.level(gn, 1), crossing(s, 0)])
    lhs = Builder(c, src)
    lhs.pull_up(1, "L")
    raise_to_consumer(lhs, 0)  # f passes the bundle, then interchanges above g
    rhs = Builder(c, src)
    rhs.interchange(0)
    rhs.pull_up(1, "R")
    pull_through_crossings(rhs, 0)
    # wide bundles leave far-apart crossings in a different height order
    align_by_interchanges(rhs, lhs.frame)
    return lhs.movie(), rhs.movie()


def _pt_b(c: Computad, g: tuple[str, int], s: int, strand_left: bool) -> tuple[Movie, Movie]:
    gn, k = g
    if strand_left:
        src = Diagram.of(k + 1, [c.level(gn, 1)])
        lhs = Builder(c, src).insert(1, 0, s).pull_up(0, "L")
        rhs = Builder(c, src)
        for j in range(k):
            rhs.insert(j, j, s)
        rhs.pull_down(2 * k, "R", sign=-s)
    else:
        src = Diagram.of(k + 1, [c.level(gn, 0)])
        lhs = Builder(c, src).insert(1, 0, s).pull_up(0, "R")
        rhs = Builder(c, src)
        for j in range(k):
            rhs.insert(j, k - 1 - j, s)
        rhs.pull_down(2 * k, "L", sign=-s)
    return lhs.movie(), rhs.movie()


def _pt_syl(c: Computad, g: tuple[str, int], strand_left: bool) -> tuple[Movie, Movie]:
    gn, k = g
    x = c.level(gn, 1 if strand_left else 0)
    src = Diagram.of(k + 1, [x, crossing(1, 0), crossing(1, 0)])
    lhs = Builder(c, src).syllepsis(1)
    rhs = Builder(c, src)
    first, second = ("L", "R") if strand_left else ("R", "L")
    rhs.pull_up(0, first)
    rhs.pull_up(k, second)
    for j in range(k):
        rhs.syllepsis(k - 1 - j)
    return lhs.movie(), rhs.movie()


def _symmetry_of_syllepsis(c: Computad) -> tuple[Movie, Movie]:
    src = Diagram.of(2, [crossing(1, 0)] * 3)
    return Builder(c, src).syllepsis(0).movie(), Builder(c, src).syllepsis(1).movie()


def _adjunction(c: Computad, s: int, which: int) -> tuple[Movie, Movie]:
    # unit: insert(s) creating R(s) R(-s); counit: cancel of R(-s) R(s)
    if which == 1:
        src = Diagram.of(2, [crossing(s, 0)])
        lhs = Builder(c, src).insert(0, 0, s).cancel(1)
    else:
        src = Diagram.of(2, [crossing(-s, 0)])
        lhs = Builder(c, src).insert(1, 0, s).cancel(0)
    return lhs.movie(), Movie(src)


def _braid_move(c: Computad, s: int) -> tuple[Movie, Movie]:
    src = Diagram.of(3, [crossing(s, 0), crossing(s, 1), crossing(s, 0)])
    lhs = Builder(c, src).pull_up(0, "R")
    rhs = Builder(c, src).pull_down(2, "L")
    return lhs.movie(), rhs.movie()


def _cell_past_strand(c: Computad, name: str, s: int, strand_left: bool) -> tuple[Movie, Movie]:
    g = c.gen2[name]
    w = g.source.width_in
    if strand_left:
        src = Diagram(("C",) * (w + 1), tuple(lv.moved(lv.offset + 1) for lv in g.source.levels) + (crossing(s, 0),))
        left = 1
    else:
        src = Diagram(("C",) * (w + 1), g.source.levels + (crossing(s, 0),))
        left = 0
    lhs = Builder(c, src).gen2(name, 0, left)
    _pull_region_up(lhs, 0, len(g.target.levels))
    rhs = Builder(c, src)
    _pull_region_up(rhs, 0, len(g.source.levels))
    top = len(rhs.frame.levels) - len(g.source.levels)
    rhs.gen2(name, top, 0 if strand_left else 1)
    return lhs.movie(), rhs.movie()


def structural_library(c: Computad) -> dict[str, tuple[Movie, Movie]]:
    """The structural equalities of braided and symmetric Gray monoids, instantiated on c's cells."""
    if c.flavor == "naked":
        return {}
    out: dict[str, tuple[Movie, Movie]] = {}
    cells = _single_output_cells(c)
    for s in (1, -1):
        tag = "+" if s > 0 else "-"
        for f in cells:
            for g in cells:
                out[f"exchange[{f[0]},{g[0]},{tag}]"] = _exchange(c, f, g, s)
        for g in cells:
            out[f"pt-b[{g[0]},{tag},strand-left]"] = _pt_b(c, g, s, True)
            out[f"pt-b[{g[0]},{tag},strand-right]"] = _pt_b(c, g, s, False)
        for name in sorted(c.gen2):
            if len(c.gen2[name].source.levels) and c.gen2[name].source.width_out == 1:
                out[f"past-strand[{name},{tag},strand-left]"] = _cell_past_strand(c, name, s, True)
                out[f"past-strand[{name},{tag},strand-right]"] = _cell_past_strand(c, name, s, False)
        out[f"adj[{tag},1]"] = _adjunction(c, s, 1)
        out[f"adj[{tag},2]"] = _adjunction(c, s, 2)
        out[f"braid-move[{tag}]"] = _braid_move(c, s)
    if c.flavor == "symmetric":
        for g in cells:
            out[f"pt-syl[{g[0]},strand-left]"] = _pt_syl(c, g, True)
            out[f"pt-syl[{g[0]},strand-right]"] = _pt_syl(c, g, False)
        out["sym"] = _symmetry_of_syllepsis(c)
    return out


# --- canonical braid clips ------------------------------------------------------


def region_word(frame: Diagram, lo: int, count: int, base: int) -> list[int]:
    """Letters of the crossing levels lo..lo+count, wire ``base`` being strand 1."""
    out = []
    for lv in frame.levels[lo : lo + count]:
        if not lv.is_crossing:
            raise StepError(f"{lv.cell}@{lv.offset} inside a braid region")
        out.append(lv.sign * (lv.offset - base + 1))
    return out


def _first_handle(word: Sequence[int]) -> tuple[int, int] | None:
    # the handle whose closing letter comes first; a letter with a smaller
    # index between the ends breaks it, an equal index closes it only if the sign flips
    for j, x in enumerate(word):
        k = abs(x)
        for i in range(j - 1, -1, -1):
            y = word[i]
            if abs(y) < k:
                break
            if abs(y) == k:
                if y == -x:
                    return i, j
                break
    return None


def handle_reduce(b: Builder, lo: int, count: int, base: int, budget: int = 100_000) -> None:
    """Turn the trivial braid occupying levels lo..lo+count into the identity."""
    while count:
        budget -= 1
        if budget < 0:
            raise StepError("handle reduction exceeded its step budget")
        word = region_word(b.frame, lo, count, base)
        h = _first_handle(word)
        if h is None:
            raise StepError(f"braid {word} is not trivial")
        i, j = h
        a, end = lo + i, lo + j
        k, e = abs(word[i]), 1 if word[i] > 0 else -1
        while a + 1 < end:
            y = b.frame.levels[a + 1]
            ky = y.offset - base + 1
            if abs(ky - k) >= 2:
                b.interchange(a)
                a += 1
            elif ky == k + 1:
                # sigma_k^e sigma_{k+1}^d -> sigma_{k+1}^-e sigma_{k+1}^e sigma_k^e sigma_{k+1}^d -> ... braid move
                b.insert(a, k + base, -e)
                b.pull_down(a + 3, "R")
                a += 3
                end += 2
                count += 2
            else:
                raise StepError(f"letter {ky} inside a handle of index {k}")
        b.cancel(a)
        count -= 2


def _flip_to_lower_over(b: Builder, lo: int, count: int, base: int, strands: int) -> None:
    labels = list(range(strands))
    for level in range(lo, lo + count):
        lv = b.frame.levels[level]
        p = lv.offset - base
        want = 1 if labels[p] < labels[p + 1] else -1
        if lv.sign != want:
            if lv.sign > 0:
                b.insert(level, lv.offset, -1)
                b.syllepsis(level + 1)
            else:
                b.unsyllepsis(level + 1, lv.offset)
                b.cancel(level)
        labels[p], labels[p + 1] = labels[p + 1], labels[p]


def braid_transform(b: Builder, lo: int, count: int, base: int, target: Sequence[int], strands: int) -> int:
    """Replace the braid at levels lo..lo+count by ``target`` with structural steps only.

    The inverse of the target is created above the braid, the product is
    reduced to the identity by handle reduction, and in a symmetric computad
    crossings are first flipped so that the lower labelled strand is on top.
    Returns the new level count of the region.
    """
    from .braid import BraidWord, braid_normal_form, underlying_permutation

    target = list(target)
    current = region_word(b.frame, lo, count, base)
    if current == target:
        return count
    u, v = BraidWord(strands, tuple(current)), BraidWord(strands, tuple(target))
    if b.c.flavor == "symmetric":
        if underlying_permutation(u) != underlying_permutation(v):
            raise StepError(f"braids {current} and {target} have different permutations")
    elif braid_normal_form(u) != braid_normal_form(v):
        raise StepError(f"braids {current} and {target} are not isotopic")
    top = lo + count
    for i, x in enumerate(reversed(target)):
        b.insert(top + i, abs(x) - 1 + base, -1 if x > 0 else 1)
    lower = count + len(target)
    if b.c.flavor == "symmetric":
        _flip_to_lower_over(b, lo, lower, base, strands)
    handle_reduce(b, lo, lower, base)
    return len(target)
