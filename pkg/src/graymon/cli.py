"""Command line front end: JSON in, JSON (or text/SVG renderings) out.

Exit codes: 0 equal / passed, 1 unequal / failed, 2 input or precondition error.
"""
from __future__ import annotations

import json
import random
import sys
from typing import Any

import click

from .braid import BraidError, BraidWord, braid_normal_form, dynnikov_equal, is_pure
from .combinat import MapError, fibers
from .gray import Diagram, DiagramError
from .movie import Move, MoveError, Movie, StepError, movie_frames, movie_invert
from .procat import ProError
from .pseudomonoid import (
    F_2cell,
    FsBr2Cell,
    InternalData,
    InternalMove,
    MacLaneError,
    builtin_computad,
    composition_iso,
    flavor_computad,
    maclane_check,
)
from .normalize import (
    PreconditionError,
    decide_2cell_detail,
    decompose_1cell,
    eliminate_units_with_certificate,
    iso_1cells,
    loop_invariant,
    to_normal_form_N,
    tsnf_with_certificate,
)

COMPUTADS = ("P", "P-br", "P-sym", "Pbr", "Pbr-sym", "Psym")
FLAVORS = ("delta", "bdelta", "bdelta_sim", "sdelta", "fs")
INPUT_ERRORS = (
    OSError,
    json.JSONDecodeError,
    KeyError,
    TypeError,
    ValueError,
    BraidError,
    DiagramError,
    StepError,
    MoveError,
    MapError,
    ProError,
    MacLaneError,
    PreconditionError,
)


class InputError(click.ClickException):
    exit_code = 2


def _load(path: str) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(data: Any) -> None:
    click.echo(json.dumps(data, sort_keys=True, indent=2))


def _verdict(ok: bool, detail: dict, certificate: list[Move] | None = None) -> None:
    out: dict = {"ok": ok, "detail": detail}
    if certificate is not None:
        out["certificate"] = [m.to_json() for m in certificate]
    _emit(out)
    sys.exit(0 if ok else 1)


def _guard(fn):
    """Turn malformed input and precondition failures into exit code 2."""

    def run(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except INPUT_ERRORS as exc:
            raise InputError(f"{type(exc).__name__}: {exc}") from exc

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@click.group()
@click.option("--budget", type=int, default=1_000_000, show_default=True, help="Step budget for rewriting drivers.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for randomized suites.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output where a text form exists.")
@click.pass_context
def main(ctx: click.Context, budget: int, seed: int, as_json: bool) -> None:
    """Decide equality of 1- and 2-cells in free pseudomonoids."""
    ctx.ensure_object(dict)
    ctx.obj.update(budget=budget, seed=seed, json=as_json)


# --- check ------------------------------------------------------------------


@main.group()
def check() -> None:
    """Equality checks."""


@check.command("1cell")
@click.option("--flavor", type=click.Choice(FLAVORS), required=True)
@click.argument("a", type=click.Path())
@click.argument("b", type=click.Path())
@_guard
def check_1cell(flavor: str, a: str, b: str) -> None:
    """Whether two 1-cell diagrams are isomorphic."""
    c = flavor_computad(flavor)
    da, db = c.diagram_from_json(_load(a)), c.diagram_from_json(_load(b))
    ok = iso_1cells(da, db, flavor, c)
    detail = {"flavor": flavor}
    if not ok:
        detail["reason"] = "boundaries differ" if (da.width_in, da.width_out) != (db.width_in, db.width_out) else (
            "different combinatorial morphisms"
        )
        for key, d in (("a", da), ("b", db)):
            if (da.width_in, da.width_out) == (db.width_in, db.width_out):
                x, _ = decompose_1cell(d, flavor, c)
                detail[key] = x.to_json()
    _verdict(ok, detail)


@check.command("2cell")
@click.option("--row", type=click.Choice(("naked", "braided", "symmetric")), required=True)
@click.option("--col", type=click.Choice(("P", "Pbr", "Psym", "p", "pbr", "psym")), required=True)
@click.argument("a", type=click.Path())
@click.argument("b", type=click.Path())
@_guard
def check_2cell(row: str, col: str, a: str, b: str) -> None:
    """Whether two parallel movies denote the same 2-cell (grid entries only)."""
    from .pseudomonoid import grid_computad

    c = grid_computad(row, col)
    ma, mb = Movie.from_json(c, _load(a)), Movie.from_json(c, _load(b))
    detail = decide_2cell_detail(ma, mb, row, col)
    ok = bool(detail.pop("verdict"))
    if not ok:
        detail["reason"] = "the loop a followed by b reversed absorbs a nontrivial braid"
    _verdict(ok, detail)


@check.command("maclane")
@click.option("--flavor", type=click.Choice(("braided", "symmetric")), required=True)
@click.argument("src", type=click.Path())
@click.argument("l1", type=click.Path())
@click.argument("l2", type=click.Path())
@_guard
def check_maclane(flavor: str, src: str, l1: str, l2: str) -> None:
    """Whether two pastings of internal moves agree."""
    data = InternalData.from_json(_load(src))
    m1 = [InternalMove.from_json(x) for x in _load(l1)]
    m2 = [InternalMove.from_json(x) for x in _load(l2)]
    ok = maclane_check(flavor, data, m1, m2)
    detail: dict = {"flavor": flavor}
    if not ok:
        detail["reason"] = "the commute moves trace different braids"
    _verdict(ok, detail)


# --- normalize ----------------------------------------------------------------


@main.group()
def normalize() -> None:
    """Rewriting procedures; each prints the rewritten movie and its certificate."""


def _computad_option(fn):
    return click.option("--computad", "computad", type=click.Choice(COMPUTADS), default="Pbr-sym", show_default=True)(fn)


@normalize.command("tsnf")
@_computad_option
@click.option("--occurrence", type=int, required=True, help="Level of the cell in the source frame.")
@click.argument("movie", type=click.Path())
@click.pass_context
@_guard
def normalize_tsnf(ctx: click.Context, computad: str, occurrence: int, movie: str) -> None:
    """Put the output string of one cell into top string normal form."""
    c = builtin_computad(computad)
    m = Movie.from_json(c, _load(movie))
    out, cert, cases = tsnf_with_certificate(c, m, occurrence, ctx.obj["budget"])
    _emit({"movie": out.to_json(), "certificate": [x.to_json() for x in cert], "cases": cases})


@normalize.command("units")
@_computad_option
@click.argument("movie", type=click.Path())
@_guard
def normalize_units(computad: str, movie: str) -> None:
    """Remove every unitor from a loop."""
    c = builtin_computad(computad)
    m = Movie.from_json(c, _load(movie))
    out, cert = eliminate_units_with_certificate(c, m)
    _emit({"movie": out.to_json(), "certificate": [x.to_json() for x in cert]})


@normalize.command("nf")
@_computad_option
@click.argument("movie", type=click.Path())
@_guard
def normalize_nf(computad: str, movie: str) -> None:
    """Rewrite a unit-free loop into normal form N."""
    c = builtin_computad(computad)
    m = Movie.from_json(c, _load(movie))
    out, cert = to_normal_form_N(c, m)
    _emit({"movie": out.to_json(), "certificate": [x.to_json() for x in cert]})


# --- invariant, compose, decompose ----------------------------------------------


@main.command()
@_computad_option
@click.argument("movie", type=click.Path())
@_guard
def invariant(computad: str, movie: str) -> None:
    """The braid each tree of a loop absorbs."""
    c = builtin_computad(computad)
    inv = loop_invariant(c, Movie.from_json(c, _load(movie)))
    _emit(inv.to_json())


@main.command()
@click.option("--flavor", type=click.Choice(FLAVORS), required=True)
@click.argument("f", type=click.Path())
@click.argument("g", type=click.Path())
@_guard
def compose(flavor: str, f: str, g: str) -> None:
    """Movie from g after f (both standard form) to the standard form of the composite."""
    c = flavor_computad(flavor)
    df, dg = c.diagram_from_json(_load(f)), c.diagram_from_json(_load(g))
    _emit(composition_iso(df, dg, flavor).to_json())


@main.command()
@click.option("--flavor", type=click.Choice(FLAVORS), required=True)
@click.argument("diagram", type=click.Path())
@_guard
def decompose(flavor: str, diagram: str) -> None:
    """The combinatorial morphism of a 1-cell diagram, and the movie to its standard form."""
    c = flavor_computad(flavor)
    x, mv = decompose_1cell(c.diagram_from_json(_load(diagram)), flavor, c)
    _emit({"morphism": x.to_json(), "movie": mv.to_json()})


# --- render ------------------------------------------------------------------------


def render_ascii(d: Diagram) -> list[str]:
    """One row per level, top level first; wires are ``|``, cells show name and offset."""
    rows = []
    widths = d.widths()
    for k in range(len(d.levels) - 1, -1, -1):
        lv = d.levels[k]
        w = widths[k]
        label = {"R+": "X+", "R-": "X-"}.get(lv.cell, lv.cell)
        cells = ["|"] * lv.offset + [f"[{label}:{lv.k_in}>{lv.k_out}]"] + ["|"] * (w - lv.offset - lv.k_in)
        rows.append(" ".join(cells))
    rows.append(" ".join(["|"] * d.width_in) if d.width_in else "(empty)")
    return rows


def render_movie_ascii(frames: list[Diagram]) -> list[str]:
    blocks = [render_ascii(f) for f in frames]
    height = max(len(b) for b in blocks)
    widths = [max(len(r) for r in b) for b in blocks]
    lines = []
    for i in range(height):
        parts = []
        for b, w in zip(blocks, widths):
            row = b[i - (height - len(b))] if i >= height - len(b) else ""
            parts.append(row.ljust(w))
        sep = " => " if i == height - 1 else "    "
        lines.append("[ " + sep.join(parts) + " ]")
    return [line.rstrip() for line in lines]


def render_svg(frames: list[Diagram]) -> str:
    step, cell_h = 20, 24
    boxes = []
    x0 = 10
    height = max(len(f.levels) for f in frames) * cell_h + 2 * cell_h
    for f in frames:
        widths = f.widths()
        frame_w = (max(widths) + 1) * step
        body = []
        for k, lv in enumerate(f.levels):
            y = height - (k + 1) * cell_h
            for wire in range(widths[k]):
                if wire < lv.offset or wire >= lv.offset + lv.k_in:
                    pos = wire if wire < lv.offset else wire - lv.k_in + lv.k_out
                    body.append(_line(x0 + (wire + 1) * step, y + cell_h, x0 + (pos + 1) * step, y))
            cx = x0 + (lv.offset + 1) * step + max(lv.k_in - 1, 0) * step / 2
            if lv.is_crossing:
                a, b = x0 + (lv.offset + 1) * step, x0 + (lv.offset + 2) * step
                over, under = ((a, b), (b, a)) if lv.sign > 0 else ((b, a), (a, b))
                body.append(_line(under[0], y + cell_h, under[1], y, dash=True))
                body.append(_line(over[0], y + cell_h, over[1], y))
            else:
                for i in range(lv.k_in):
                    body.append(_line(x0 + (lv.offset + 1 + i) * step, y + cell_h, cx, y + cell_h / 2))
                for i in range(lv.k_out):
                    body.append(_line(cx, y + cell_h / 2, x0 + (lv.offset + 1 + i) * step, y))
                body.append(f'<circle cx="{cx:g}" cy="{y + cell_h / 2:g}" r="5" fill="black"/>')
                body.append(f'<text x="{cx + 7:g}" y="{y + cell_h / 2 + 4:g}" font-size="10">{lv.cell}</text>')
        top = height - len(f.levels) * cell_h
        for wire in range(widths[-1]):
            body.append(_line(x0 + (wire + 1) * step, top, x0 + (wire + 1) * step, top - cell_h / 2))
        bottom = height
        for wire in range(f.width_in):
            body.append(_line(x0 + (wire + 1) * step, bottom, x0 + (wire + 1) * step, bottom + cell_h / 2))
        if boxes:
            boxes.append(f'<text x="{x0 - step:g}" y="{height / 2:g}" font-size="14">&#8658;</text>')
        boxes.append("<g>")
        boxes.extend(body)
        boxes.append("</g>")
        x0 += frame_w + 2 * step
    total_w = x0
    head = f'<svg xmlns="http://www.w3.org/2000/svg" width="{total_w}" height="{height + cell_h}">'
    return "\n".join([head, *boxes, "</svg>"]) + "\n"


def _line(x1: float, y1: float, x2: float, y2: float, dash: bool = False) -> str:
    style = ' stroke-dasharray="3,2"' if dash else ""
    return f'<line x1="{x1:g}" y1="{y1:g}" x2="{x2:g}" y2="{y2:g}" stroke="black"{style}/>'


@main.command()
@_computad_option
@click.option("--svg", is_flag=True, help="SVG instead of text.")
@click.argument("path", type=click.Path())
@_guard
def render(computad: str, svg: bool, path: str) -> None:
    """Draw a diagram, or a movie as a strip of frames."""
    c = builtin_computad(computad)
    data = _load(path)
    if "steps" in data:
        frames = movie_frames(c, Movie.from_json(c, data))
    else:
        frames = [c.diagram_from_json(data)]
    if svg:
        click.echo(render_svg(frames), nl=False)
    elif len(frames) == 1:
        click.echo("\n".join(render_ascii(frames[0])))
    else:
        click.echo("\n".join(render_movie_ascii(frames)))


# --- selftest ------------------------------------------------------------------------


def suite_equalities() -> list[str]:
    failures = []
    for key in COMPUTADS:
        c = builtin_computad(key)
        for name, (lhs, rhs) in sorted(c.equalities.items()):
            try:
                end = movie_frames(c, lhs)[-1]
                if lhs.source != rhs.source or movie_frames(c, rhs)[-1] != end:
                    failures.append(f"{key}/{name}: sides do not meet")
                    continue
                loop = Movie(lhs.source, lhs.steps + movie_invert(c, rhs).steps)
                if not loop_invariant(c, loop).trivial:
                    failures.append(f"{key}/{name}: nontrivial invariant")
            except (StepError, PreconditionError) as exc:
                failures.append(f"{key}/{name}: {exc}")
    return failures


def _random_pure(n: int, length: int, rng: random.Random) -> BraidWord:
    if n < 2:
        return BraidWord(n)
    while True:
        w = BraidWord(n, tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(rng.randint(0, length))))
        if is_pure(w):
            return w


def suite_roundtrip(rng: random.Random, cases: int, max_fiber: int) -> list[str]:
    from .combinat import FsMap

    failures = []
    c = builtin_computad("Pbr-sym")
    for k in range(cases):
        cod = rng.randint(1, 3)
        values = [v for v in range(1, cod + 1) for _ in range(rng.randint(0, max_fiber))]
        rng.shuffle(values)
        f = FsMap(len(values), cod, tuple(values))
        tup = tuple(_random_pure(p, 6, rng) for p in fibers(f).widths)
        inv = loop_invariant(c, F_2cell(FsBr2Cell(f, tup), c))
        if [t.nf for t in inv.trees] != [braid_normal_form(w) for w in tup]:
            failures.append(f"case {k}: {f.values} {[list(w.letters) for w in tup]}")
    return failures


def suite_braid_oracle(rng: random.Random, cases: int) -> list[str]:
    failures = []
    for k in range(cases):
        n = rng.randint(2, 5)
        a = BraidWord(n, tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(rng.randint(0, 12))))
        # half the pairs are equal by construction: b is a with a trivial word inserted
        if rng.random() < 0.5:
            i = rng.randint(1, n - 1)
            cut = rng.randint(0, len(a))
            b = BraidWord(n, a.letters[:cut] + (i, -i) + a.letters[cut:])
        else:
            b = BraidWord(n, tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(rng.randint(0, 12))))
        if (braid_normal_form(a) == braid_normal_form(b)) != dynnikov_equal(a, b):
            failures.append(f"case {k}: {list(a.letters)} vs {list(b.letters)}")
    return failures


@main.command()
@click.option("--suite", type=click.Choice(("equalities", "roundtrip", "braid-oracle")), required=True)
@click.option("--cases", type=int, default=200, show_default=True)
@click.option("--max-fiber", type=int, default=4, show_default=True)
@click.pass_context
def selftest(ctx: click.Context, suite: str, cases: int, max_fiber: int) -> None:
    """Run a built-in verification suite."""
    rng = random.Random(ctx.obj["seed"])
    if suite == "equalities":
        failures = suite_equalities()
        total = sum(len(builtin_computad(k).equalities) for k in COMPUTADS)
    elif suite == "roundtrip":
        failures = suite_roundtrip(rng, cases, max_fiber)
        total = cases
    else:
        failures = suite_braid_oracle(rng, cases)
        total = cases
    ok = not failures
    _verdict(ok, {"suite": suite, "passed": total - len(failures), "failed": len(failures), "failures": failures})


if __name__ == "__main__":
    main()
