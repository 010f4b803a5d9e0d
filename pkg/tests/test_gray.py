from __future__ import annotations

import random

import pytest

from graymon.gray import (
    Computad,
    Diagram,
    DiagramError,
    Gen1,
    Level,
    Subregion,
    block_levels,
    boundaries,
    braid_levels,
    crossing,
    diagram_compose,
    diagram_tensor,
    diagram_typecheck,
    identity,
    region_walk,
    subregion_extract,
    subregion_replace,
    whisker,
)
from graymon.movie import apply_step, interchange_step
from graymon.pseudomonoid import builtin_computad, mult, unit

P = builtin_computad("P")
PSYM = builtin_computad("P-sym")


def two_colour() -> Computad:
    gen1 = {"f": Gen1("f", ("A",), ("B",)), "g": Gen1("g", ("B", "A"), ("A",))}
    return Computad("two", "braided", ("A", "B"), gen1)


def test_typecheck_examples():
    assert diagram_typecheck(P, identity(["C", "C"])) == ("C", "C")
    assert diagram_typecheck(P, Diagram.of(2, [mult(0)])) == ("C",)


def test_ordered_isotopy_is_syntactic():
    # two multiplications side by side, at the two possible relative heights
    a = Diagram.of(4, [mult(0), mult(1)])
    b = Diagram.of(4, [mult(2), mult(0)])
    assert diagram_typecheck(P, a) == diagram_typecheck(P, b) == ("C", "C")
    assert a != b


def test_typecheck_errors():
    with pytest.raises(DiagramError):
        diagram_typecheck(P, Diagram.of(1, [mult(0)]))
    with pytest.raises(DiagramError):
        diagram_typecheck(P, Diagram.of(2, [crossing(1, 0)]))
    with pytest.raises(DiagramError):
        diagram_typecheck(P, Diagram.of(2, [Level("zz", 0, 2, 1)]))
    with pytest.raises(DiagramError):
        P.level("nope", 0)


def test_labels_checked():
    c = two_colour()
    d = Diagram(("A", "A"), (c.level("f", 0), c.level("g", 0)))
    assert diagram_typecheck(c, d) == ("A",)
    with pytest.raises(DiagramError):
        diagram_typecheck(c, Diagram(("A", "A"), (c.level("g", 0),)))
    # a braiding acts on generating objects only, and swaps labels
    assert boundaries(c, Diagram(("A", "B"), (crossing(1, 0),)))[-1] == ("B", "A")


def test_compose_examples():
    f = Diagram.of(3, [mult(0)])
    assert diagram_compose(identity(["C", "C"]), f) == f
    tree = diagram_compose(Diagram.of(2, [mult(0)]), diagram_tensor(Diagram.of(2, [mult(0)]), identity(["C"])))
    assert tree == Diagram.of(3, [mult(0), mult(0)])
    two = diagram_compose(Diagram.of(2, [crossing(1, 0)]), Diagram.of(2, [crossing(-1, 0)]))
    assert len(two.levels) == 2


def test_compose_mismatch():
    with pytest.raises(DiagramError):
        diagram_compose(Diagram.of(3), Diagram.of(3, [mult(0)]))
    with pytest.raises(DiagramError):
        diagram_compose(Diagram.of(3), Diagram.of(3, [mult(0)]), P)


def test_tensor_examples():
    m = Diagram.of(2, [mult(0)])
    assert diagram_tensor(m, Diagram.of(0)) == m
    mm = diagram_tensor(m, m)
    assert [lv.offset for lv in mm.levels] == [0, 1]
    uu = diagram_tensor(Diagram.of(0, [unit(0)]), Diagram.of(0, [unit(0)]))
    assert diagram_typecheck(P, uu) == ("C", "C")
    assert [lv.offset for lv in uu.levels] == [0, 1]


def _random_diagram(rng, width, height):
    levels = []
    w = width
    for _ in range(height):
        choices = [unit(o) for o in range(w + 1)] + [mult(o) for o in range(w - 1)]
        lv = rng.choice(choices)
        levels.append(lv)
        w += lv.delta
    return Diagram.of(width, levels)


def test_strict_associativity_and_units():
    rng = random.Random(1)
    for _ in range(100):
        f = _random_diagram(rng, rng.randint(0, 3), 2)
        g = _random_diagram(rng, f.width_out, 2)
        h = _random_diagram(rng, g.width_out, 2)
        assert diagram_compose(h, diagram_compose(g, f)) == diagram_compose(diagram_compose(h, g), f)
        assert diagram_compose(identity(("C",) * f.width_out), f) == f
        a, b, c = (_random_diagram(rng, rng.randint(0, 3), 2) for _ in range(3))
        assert diagram_tensor(a, diagram_tensor(b, c)) == diagram_tensor(diagram_tensor(a, b), c)
        assert diagram_typecheck(P, diagram_compose(g, f)) == diagram_typecheck(P, g)


def test_gray_exchange_is_an_interchanger():
    rng = random.Random(2)
    for _ in range(50):
        f = _random_diagram(rng, 2, 1)
        g = _random_diagram(rng, 2, 1)
        lower_first = diagram_compose(diagram_tensor(g, identity(("C",) * f.width_out)), diagram_tensor(identity(("C",) * g.width_in), f))
        upper_first = diagram_compose(diagram_tensor(identity(("C",) * g.width_out), f), diagram_tensor(g, identity(("C",) * f.width_in)))
        assert apply_step(P, lower_first, interchange_step(lower_first, 0)) == upper_first


def test_whisker():
    d = whisker(Diagram.of(2, [mult(0)]), 1, 2)
    assert d == Diagram.of(5, [mult(1)])


def test_subregion_examples():
    d = Diagram.of(5, [mult(0), mult(2), mult(0)])
    whole = Subregion(0, 3, (0, 5))
    assert subregion_extract(d, whole) == d
    inner = subregion_extract(d, Subregion(0, 2, (0, 5)))
    assert inner == Diagram.of(5, [mult(0), mult(2)])
    with pytest.raises(DiagramError):
        subregion_extract(d, Subregion(0, 2, (0, 2)))


def test_subregion_replace_identity():
    rng = random.Random(3)
    for _ in range(100):
        d = _random_diagram(rng, rng.randint(1, 4), rng.randint(1, 4))
        lo = rng.randint(0, len(d.levels))
        hi = rng.randint(lo, len(d.levels))
        w = d.widths()[lo]
        a = rng.randint(0, w)
        b = rng.randint(a, w)
        r = Subregion(lo, hi, (a, b))
        try:
            inner = subregion_extract(d, r)
        except DiagramError:
            continue
        assert subregion_replace(d, r, inner) == d


def test_subregion_replace_needs_parallel():
    d = Diagram.of(3, [mult(0)])
    with pytest.raises(DiagramError):
        subregion_replace(d, Subregion(0, 1, (0, 2)), Diagram.of(2))


def test_region_walk_bounds():
    d = Diagram.of(3, [mult(0)])
    assert region_walk(d, Subregion(0, 1, (0, 3))) == [(0, 3), (0, 2)]
    with pytest.raises(DiagramError):
        region_walk(d, Subregion(0, 2, (0, 3)))


def test_block_levels_expand():
    assert [lv.offset for lv in block_levels(2, 1, 1)] == [1, 0]
    assert braid_levels([1, -2]) == [crossing(1, 0), crossing(-1, 1)]
    d = Diagram.of(3, block_levels(2, 1, 1))
    assert diagram_typecheck(PSYM, d) == ("C", "C", "C")


def test_json():
    d = Diagram.of(3, [mult(1), mult(0)])
    data = d.to_json()
    assert data == {"source": ["C", "C", "C"], "levels": [{"cell": "m", "offset": 1}, {"cell": "m", "offset": 0}]}
    assert P.diagram_from_json(data) == d
    assert Subregion.from_json(Subregion(0, 1, (0, 2)).to_json()) == Subregion(0, 1, (0, 2))
    with pytest.raises(DiagramError):
        P.diagram_from_json({"levels": []})
