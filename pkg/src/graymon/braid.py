"""Braid group algebra on a fixed number of strands.

Letters are signed Artin generators: ``i`` is sigma_i with strand ``i`` passing
over strand ``i+1``; ``-i`` is its inverse.  Words are read bottom to top, so the
first letter happens first.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import accumulate
from typing import Iterable, Sequence


class BraidError(ValueError):
    pass


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.strands < 0:
            raise BraidError(f"negative strand count {self.strands}")
        object.__setattr__(self, "letters", tuple(int(x) for x in self.letters))
        for x in self.letters:
            if x == 0 or abs(x) > self.strands - 1:
                raise BraidError(f"letter {x} out of range for B_{self.strands}")

    def __len__(self) -> int:
        return len(self.letters)

    def __mul__(self, other: BraidWord) -> BraidWord:
        return braid_multiply(self, other)

    def inverse(self) -> BraidWord:
        return BraidWord(self.strands, tuple(-x for x in reversed(self.letters)))

    def shifted(self, offset: int, strands: int) -> BraidWord:
        """The same word acting on strands ``offset+1 ..`` of a wider braid."""
        return BraidWord(strands, tuple(x + offset if x > 0 else x - offset for x in self.letters))

    def to_json(self) -> dict:
        return {"n": self.strands, "word": list(self.letters)}

    @classmethod
    def from_json(cls, data: dict) -> BraidWord:
        try:
            return cls(int(data["n"]), tuple(data["word"]))
        except (KeyError, TypeError) as exc:
            raise BraidError(f"malformed braid JSON: {exc}") from exc


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise BraidError(f"not a bijection of 1..n: {self.images}")

    @property
    def size(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def then(self, other: Permutation) -> Permutation:
        """Apply ``self`` first, then ``other``."""
        return Permutation(tuple(other(x) for x in self.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.size
        for i, x in enumerate(self.images, start=1):
            inv[x - 1] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.size + 1))


@dataclass(frozen=True)
class BlockPartition:
    widths: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "widths", tuple(int(x) for x in self.widths))
        if any(x < 0 for x in self.widths):
            raise BraidError(f"negative block width in {self.widths}")

    @property
    def total(self) -> int:
        return sum(self.widths)

    def starts(self) -> list[int]:
        """0-based first position of each block."""
        return [0, *accumulate(self.widths)][:-1]


@dataclass(frozen=True)
class GarsideNF:
    strands: int
    infimum: int
    factors: tuple[tuple[int, ...], ...] = field(default=())

    def to_json(self) -> dict:
        return {"n": self.strands, "inf": self.infimum, "factors": [list(f) for f in self.factors]}

    @classmethod
    def from_json(cls, data: dict) -> GarsideNF:
        return cls(int(data["n"]), int(data["inf"]), tuple(tuple(f) for f in data["factors"]))

    def word(self) -> BraidWord:
        """A word representing this normal form: Delta powers, then the factors."""
        n = self.strands
        delta = half_twist_word(n)
        letters: list[int] = []
        if self.infimum >= 0:
            letters.extend(delta.letters * self.infimum)
        else:
            letters.extend(delta.inverse().letters * (-self.infimum))
        for f in self.factors:
            letters.extend(simple_word(f))
        return BraidWord(n, tuple(letters))


def _coerce(w: BraidWord | Sequence[int], n: int | None = None) -> BraidWord:
    if isinstance(w, BraidWord):
        return w
    if n is None:
        n = max((abs(x) for x in w), default=0) + 1
    return BraidWord(n, tuple(w))


def braid_multiply(a: BraidWord, b: BraidWord) -> BraidWord:
    if a.strands != b.strands:
        raise BraidError(f"strand mismatch {a.strands} vs {b.strands}")
    return BraidWord(a.strands, a.letters + b.letters)


def free_reduce(w: BraidWord) -> BraidWord:
    out: list[int] = []
    for x in w.letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return BraidWord(w.strands, tuple(out))


def transposition(n: int, i: int) -> Permutation:
    images = list(range(1, n + 1))
    images[i - 1], images[i] = images[i], images[i - 1]
    return Permutation(tuple(images))


def underlying_permutation(w: BraidWord) -> Permutation:
    where = list(range(1, w.strands + 1))
    at = list(range(1, w.strands + 1))  # at[p-1] = entering index of the strand now at p
    for x in w.letters:
        i = abs(x)
        at[i - 1], at[i] = at[i], at[i - 1]
    for p, s in enumerate(at, start=1):
        where[s - 1] = p
    return Permutation(tuple(where))


def strand_restriction(w: BraidWord, keep: Iterable[int]) -> BraidWord:
    """The braid formed by the strands starting at positions ``keep`` (1-based), others deleted."""
    kept = set(keep)
    at = [p in kept for p in range(1, w.strands + 1)]
    letters = []
    for x in w.letters:
        i = abs(x) - 1
        if at[i] and at[i + 1]:
            letters.append((1 if x > 0 else -1) * (sum(at[:i]) + 1))
        at[i], at[i + 1] = at[i + 1], at[i]
    return BraidWord(len(kept), tuple(letters))


def is_pure(w: BraidWord) -> bool:
    return underlying_permutation(w).is_identity()


def block_crossing(a: int, b: int, sign: int = 1) -> BraidWord:
    """First ``a`` strands pass over (sign +1) or under (sign -1) the last ``b``."""
    if a < 0 or b < 0:
        raise BraidError("block widths must be nonnegative")
    if sign not in (1, -1):
        raise BraidError(f"sign must be +1 or -1, got {sign}")
    letters = [sign * j for i in range(a, 0, -1) for j in range(i, i + b)]
    return BraidWord(a + b, tuple(letters))


def cable(widths: BlockPartition | Sequence[int], w: BraidWord) -> BraidWord:
    if not isinstance(widths, BlockPartition):
        widths = BlockPartition(tuple(widths))
    cur = list(widths.widths)
    if len(cur) != w.strands:
        raise BraidError(f"{len(cur)} widths for a braid on {w.strands} strands")
    total = sum(cur)
    letters: list[int] = []
    for x in w.letters:
        i = abs(x)
        left, right = cur[i - 1], cur[i]
        start = sum(cur[: i - 1])
        letters.extend(block_crossing(left, right, 1 if x > 0 else -1).shifted(start, total).letters)
        cur[i - 1], cur[i] = right, left
    return BraidWord(total, tuple(letters))


# --- permutation braids -----------------------------------------------------
# A simple (permutation) braid is stored by its permutation pi: the strand
# entering at i leaves at pi(i); strands i<j cross once iff pi(i) > pi(j).


def _apply_swap_after(pi: tuple[int, ...], k: int) -> tuple[int, ...]:
    """pi followed by the transposition of positions k, k+1."""
    return tuple(k + 1 if x == k else k if x == k + 1 else x for x in pi)


def _apply_swap_before(pi: tuple[int, ...], k: int) -> tuple[int, ...]:
    out = list(pi)
    out[k - 1], out[k] = out[k], out[k - 1]
    return tuple(out)


def _left_descents(pi: tuple[int, ...]) -> set[int]:
    return {k for k in range(1, len(pi)) if pi[k - 1] > pi[k]}


def _right_descents(pi: tuple[int, ...]) -> set[int]:
    inv = [0] * len(pi)
    for i, x in enumerate(pi, start=1):
        inv[x - 1] = i
    return {k for k in range(1, len(pi)) if inv[k - 1] > inv[k]}


def simple_word(pi: Sequence[int]) -> tuple[int, ...]:
    """A positive reduced word for the permutation braid of ``pi``."""
    pi = tuple(pi)
    letters: list[int] = []
    while True:
        desc = _left_descents(pi)
        if not desc:
            return tuple(letters)
        k = min(desc)
        letters.append(k)
        pi = _apply_swap_before(pi, k)


def _delta(n: int) -> tuple[int, ...]:
    return tuple(range(n, 0, -1))


def half_twist_word(n: int) -> BraidWord:
    letters = [j for i in range(1, n) for j in range(n - 1, i - 1, -1)]
    return BraidWord(n, tuple(letters))


def _tau(pi: tuple[int, ...]) -> tuple[int, ...]:
    """Conjugation by the half twist: sigma_i -> sigma_{n-i}."""
    n = len(pi)
    return tuple(n + 1 - pi[n - i] for i in range(1, n + 1))


def _left_weight(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...], bool]:
    changed = False
    while True:
        move = _left_descents(b) - _right_descents(a)
        if not move:
            return a, b, changed
        k = min(move)
        a = _apply_swap_after(a, k)
        b = _apply_swap_before(b, k)
        changed = True


def braid_normal_form(w: BraidWord | Sequence[int], n: int | None = None) -> GarsideNF:
    w = _coerce(w, n)
    n = w.strands
    ident = tuple(range(1, n + 1))
    if n <= 1:
        return GarsideNF(n, 0, ())
    delta = _delta(n)
    inf = 0
    factors: list[tuple[int, ...]] = []
    for x in w.letters:
        k = abs(x)
        s = _apply_swap_after(ident, k)
        if x > 0:
            factors.append(s)
        else:
            # sigma_k^-1 = Delta^-1 (Delta sigma_k^-1); push Delta^-1 to the front
            inf -= 1
            factors = [_tau(f) for f in factors]
            factors.append(_apply_swap_after(delta, k))
    changed = True
    while changed:
        changed = False
        for i in range(len(factors) - 1):
            a, b, c = _left_weight(factors[i], factors[i + 1])
            if c:
                factors[i], factors[i + 1] = a, b
                changed = True
    while factors and factors[0] == delta:
        factors.pop(0)
        inf += 1
    while factors and factors[-1] == ident:
        factors.pop()
    return GarsideNF(n, inf, tuple(factors))


def braids_equal(a: BraidWord, b: BraidWord) -> bool:
    return braid_normal_form(a) == braid_normal_form(b)


def positive_support(nf: GarsideNF) -> set[int]:
    if nf.infimum < 0:
        raise BraidError("support is defined for positive braids only")
    return set(abs(x) for x in nf.word().letters)


def _left_divides(k: int, x: BraidWord) -> BraidWord | None:
    """sigma_k^-1 x if that is positive, else None."""
    q = BraidWord(x.strands, (-k,) + x.letters)
    nf = braid_normal_form(q)
    return nf.word() if nf.infimum >= 0 else None


def left_fraction(w: BraidWord) -> tuple[BraidWord, BraidWord]:
    """Positive u, v with w = u^-1 v and no common left divisor."""
    nf = braid_normal_form(w)
    n = w.strands
    pos = GarsideNF(n, max(nf.infimum, 0), nf.factors).word()
    u = BraidWord(n, half_twist_word(n).letters * max(-nf.infimum, 0))
    v = pos
    progress = True
    while progress and len(u):
        progress = False
        for k in range(1, n):
            u2 = _left_divides(k, u)
            if u2 is None:
                continue
            v2 = _left_divides(k, v)
            if v2 is None:
                continue
            u, v = u2, v2
            progress = True
            break
    return u, v


def block_boundaries(blocks: BlockPartition) -> set[int]:
    """Generators sigma_i whose two strands lie in different blocks."""
    ends = set(accumulate(blocks.widths))
    return {i for i in range(1, blocks.total) if i in ends}


def parabolic_member(w: BraidWord, blocks: BlockPartition | Sequence[int]) -> bool:
    if not isinstance(blocks, BlockPartition):
        blocks = BlockPartition(tuple(blocks))
    if blocks.total != w.strands:
        raise BraidError(f"blocks cover {blocks.total} strands, braid has {w.strands}")
    pi = underlying_permutation(w)
    for start, width in zip(blocks.starts(), blocks.widths):
        block = set(range(start + 1, start + width + 1))
        if {pi(i) for i in block} != block:
            return False
    u, v = left_fraction(w)
    support = {abs(x) for x in u.letters} | {abs(x) for x in v.letters}
    return not (support & block_boundaries(blocks))


# --- Dynnikov coordinates -----------------------------------------------------
# Coordinates are pairs (x_i, y_i) for i = 1..n laid out flat; the standard
# starting lamination is (0, 1) repeated.  This encoding handles n <= 2 without
# special cases.


def standard_coordinates(n: int) -> tuple[int, ...]:
    return (0, 1) * n


def _p(v: int) -> int:
    return v if v > 0 else 0


def _m(v: int) -> int:
    return v if v < 0 else 0


def dynnikov_act(w: BraidWord, coords: Iterable[int] | None = None) -> tuple[int, ...]:
    c = list(standard_coordinates(w.strands) if coords is None else coords)
    if len(c) != 2 * w.strands:
        raise BraidError(f"expected {2 * w.strands} coordinates, got {len(c)}")
    for letter in w.letters:
        i = 2 * (abs(letter) - 1)
        xi, yi, xj, yj = c[i], c[i + 1], c[i + 2], c[i + 3]
        if letter > 0:
            z = xi - _m(yi) - xj + _p(yj)
            c[i] = xi + _p(yi) + _p(_p(yj) - z)
            c[i + 1] = yj - _p(z)
            c[i + 2] = xj + _m(yj) + _m(_m(yi) + z)
            c[i + 3] = yi + _p(z)
        else:
            z = xi + _m(yi) - xj - _p(yj)
            c[i] = xi - _p(yi) - _p(_p(yj) + z)
            c[i + 1] = yj + _m(z)
            c[i + 2] = xj - _m(yj) - _m(_m(yi) - z)
            c[i + 3] = yi - _m(z)
    return tuple(c)


def dynnikov_equal(a: BraidWord, b: BraidWord) -> bool:
    if a.strands != b.strands:
        raise BraidError("strand mismatch")
    return dynnikov_act(a) == dynnikov_act(b)
