from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graymon.braid import (
    BlockPartition,
    BraidError,
    BraidWord,
    GarsideNF,
    Permutation,
    block_crossing,
    braid_multiply,
    braid_normal_form,
    cable,
    dynnikov_act,
    dynnikov_equal,
    free_reduce,
    is_pure,
    left_fraction,
    parabolic_member,
    standard_coordinates,
    strand_restriction,
    underlying_permutation,
)

from oracles import all_words, block_subgroup_contains, nf_word_length, relation_neighbors, track_positions


def W(n, *letters):
    return BraidWord(n, tuple(letters))


@st.composite
def words(draw, min_n=1, max_n=5, max_len=8):
    n = draw(st.integers(min_n, max_n))
    if n < 2:
        return BraidWord(n)
    letters = draw(st.lists(st.integers(1, n - 1).flatmap(lambda i: st.sampled_from((i, -i))), max_size=max_len))
    return BraidWord(n, tuple(letters))


# --- construction and multiplication -------------------------------------------


def test_letters_out_of_range_rejected():
    with pytest.raises(BraidError):
        W(3, 3)
    with pytest.raises(BraidError):
        W(2, 0)


def test_multiply_examples():
    assert braid_multiply(W(2, 1), W(2)) == W(2, 1)
    assert braid_multiply(W(2, 1), W(2, -1)) == W(2, 1, -1)
    assert braid_multiply(W(3, 1), W(3, 2)) == W(3, 1, 2)


def test_multiply_strand_mismatch():
    with pytest.raises(BraidError):
        braid_multiply(W(2, 1), W(3, 1))


def test_json_round_trip():
    w = W(3, 1, -2, 1)
    assert w.to_json() == {"n": 3, "word": [1, -2, 1]}
    assert BraidWord.from_json(w.to_json()) == w
    nf = braid_normal_form(W(3, -1, 2))
    assert GarsideNF.from_json(nf.to_json()) == nf


# --- normal form ---------------------------------------------------------------


def test_normal_form_examples():
    assert braid_normal_form(W(3, 1, 1, -1)) == braid_normal_form(W(3, 1))
    assert braid_normal_form(W(3, 1, 2, 1)) == braid_normal_form(W(3, 2, 1, 2))
    assert braid_normal_form(W(2, 1, 1)) == GarsideNF(2, 2, ())


def test_full_twist_centre_in_b3():
    twist = W(3, 1, 2, 1, 2, 1, 2)
    for g in (1, 2, -1, -2):
        assert braid_normal_form(twist * W(3, g)) == braid_normal_form(W(3, g) * twist)


def test_nf_word_represents_same_braid():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 5)
        w = BraidWord(n, tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(rng.randint(0, 10))))
        nf = braid_normal_form(w)
        assert braid_normal_form(nf.word()) == nf
        assert dynnikov_equal(nf.word(), w)


@pytest.mark.parametrize("n,length", [(3, 5), (4, 4)])
def test_nf_constant_on_relation_classes(n, length):
    # every relation edge joins words with one normal form, so classes are constant
    for letters in all_words(n, length):
        nf = braid_normal_form(BraidWord(n, letters))
        for other in relation_neighbors(n, letters):
            assert braid_normal_form(BraidWord(n, other)) == nf, (letters, other)


@given(words())
def test_nf_idempotent(w):
    nf = braid_normal_form(w)
    assert braid_normal_form(nf.word()) == nf


@settings(max_examples=200)
@given(words(min_n=2, max_len=12), words(min_n=2, max_len=12))
def test_nf_equality_matches_dynnikov(a, b):
    if a.strands != b.strands:
        b = BraidWord(a.strands, tuple(x for x in b.letters if abs(x) < a.strands))
    assert (braid_normal_form(a) == braid_normal_form(b)) == dynnikov_equal(a, b)


def test_free_reduce():
    assert free_reduce(W(3, 1, 2, -2, -1, 2)) == W(3, 2)


# --- permutations ----------------------------------------------------------------


def test_permutation_examples():
    assert underlying_permutation(W(3)) == Permutation((1, 2, 3))
    assert underlying_permutation(W(3, 1)) == Permutation((2, 1, 3))
    # 1 -> 3, 2 -> 1, 3 -> 2 (hand-tracked)
    assert underlying_permutation(W(3, 1, 2)) == Permutation((3, 1, 2))


@given(words())
def test_permutation_matches_position_tracking(w):
    pi = underlying_permutation(w)
    assert {i: pi(i) for i in range(1, w.strands + 1)} == track_positions(w.strands, w.letters)


@given(words(min_n=3, max_n=3), words(min_n=3, max_n=3))
def test_permutation_is_homomorphism(a, b):
    assert underlying_permutation(a * b) == underlying_permutation(a).then(underlying_permutation(b))


def test_is_pure_examples():
    assert is_pure(W(2, 1, 1))
    assert not is_pure(W(2, 1))
    assert is_pure(W(3, 1, 2, 1, 2, 1, 2))


def test_bad_permutation():
    with pytest.raises(BraidError):
        Permutation((1, 1))


# --- block crossings and cabling --------------------------------------------------


def test_block_crossing_examples():
    assert block_crossing(1, 1, 1) == W(2, 1)
    assert block_crossing(0, 3, 1) == W(3)
    assert block_crossing(2, 1, 1) == W(3, 2, 1)


@pytest.mark.parametrize("a", range(4))
@pytest.mark.parametrize("b", range(4))
def test_block_crossing_shape_and_inverse(a, b):
    w = block_crossing(a, b, 1)
    assert len(w) == a * b
    pi = underlying_permutation(w)
    assert [pi(i) for i in range(1, a + b + 1)] == list(range(b + 1, a + b + 1)) + list(range(1, b + 1))
    back = block_crossing(b, a, -1)
    assert braid_normal_form(w * back) == braid_normal_form(BraidWord(a + b))


def test_cable_examples():
    assert cable((1, 1), W(2, 1, -1, 1)) == W(2, 1, -1, 1)
    assert cable((1, 2), W(2, 1)) == W(3, 1, 2)
    assert cable((2, 2), W(2, 1)) == W(4, 2, 3, 1, 2)


def test_cable_length_mismatch():
    with pytest.raises(BraidError):
        cable((1, 2, 3), W(2, 1))


def _permuted(widths, w):
    pi = underlying_permutation(w)
    out = [0] * len(widths)
    for i, p in enumerate(widths, start=1):
        out[pi(i) - 1] = p
    return tuple(out)


def test_cable_functorial():
    rng = random.Random(11)
    for _ in range(300):
        k = rng.randint(2, 4)
        widths = tuple(rng.randint(0, 6 // k) for _ in range(k))
        a = BraidWord(k, tuple(rng.choice((1, -1)) * rng.randint(1, k - 1) for _ in range(rng.randint(0, 3))))
        b = BraidWord(k, tuple(rng.choice((1, -1)) * rng.randint(1, k - 1) for _ in range(rng.randint(0, 3))))
        lhs = cable(widths, a * b)
        rhs = cable(widths, a) * cable(_permuted(widths, a), b)
        assert braid_normal_form(lhs) == braid_normal_form(rhs)


def test_strand_restriction():
    w = W(3, 1, 2, 2, 1)
    assert strand_restriction(w, [1, 2]) == W(2, 1, 1)
    assert strand_restriction(w, [2, 3]) == W(2)
    assert strand_restriction(W(3, 1, 1), [1, 2, 3]) == W(3, 1, 1)


# --- parabolic membership --------------------------------------------------------


def test_parabolic_examples():
    assert parabolic_member(W(3, 1), (2, 1))
    assert not parabolic_member(W(4, 2), (2, 2))
    fat = W(4, 2, 3, 1, 2, 2, 3, 1, 2)
    assert not parabolic_member(fat, (2, 2))
    assert not block_subgroup_contains(fat, (2, 2), 2 * nf_word_length(fat))


def test_parabolic_mismatch():
    with pytest.raises(BraidError):
        parabolic_member(W(3, 1), (2, 2))


def test_left_fraction():
    rng = random.Random(2)
    for _ in range(100):
        n = rng.randint(2, 4)
        w = BraidWord(n, tuple(rng.choice((1, -1)) * rng.randint(1, n - 1) for _ in range(rng.randint(0, 6))))
        u, v = left_fraction(w)
        assert all(x > 0 for x in u.letters + v.letters)
        assert braid_normal_form(u.inverse() * v) == braid_normal_form(w)


def _random_parabolic_case(rng):
    m = rng.randint(2, 5)
    widths = []
    left = m
    while left:
        p = rng.randint(1, min(3, left))
        widths.append(p)
        left -= p
    ends = {sum(widths[: i + 1]) for i in range(len(widths))}
    inner = [i for i in range(1, m) if i not in ends]
    if inner and rng.random() < 0.5:
        letters = tuple(rng.choice((1, -1)) * rng.choice(inner) for _ in range(rng.randint(0, 3)))
        # conjugate by a boundary generator's square sometimes, to stay block-preserving but leave the subgroup
        if ends - {m} and rng.random() < 0.4:
            b = rng.choice(sorted(ends - {m}))
            letters = letters + (b, b)
    else:
        letters = tuple(rng.choice((1, -1)) * rng.randint(1, m - 1) for _ in range(rng.randint(0, 3)))
    return BraidWord(m, letters), tuple(widths)


def test_parabolic_matches_bounded_search():
    rng = random.Random(17)
    for _ in range(120):
        w, widths = _random_parabolic_case(rng)
        expect = False
        pi = underlying_permutation(w)
        starts = [sum(widths[:i]) for i in range(len(widths))]
        preserves = all({pi(s + j) for j in range(1, p + 1)} == {s + j for j in range(1, p + 1)}
                        for s, p in zip(starts, widths))
        if preserves:
            expect = block_subgroup_contains(w, widths, 2 * len(free_reduce(w)))
        assert parabolic_member(w, widths) == expect, (w, widths)


def test_block_partition():
    bp = BlockPartition((2, 0, 3))
    assert bp.total == 5
    assert bp.starts() == [0, 2, 2]
    with pytest.raises(BraidError):
        BlockPartition((-1,))


# --- Dynnikov coordinates ----------------------------------------------------------


def test_dynnikov_examples():
    start = standard_coordinates(3)
    assert dynnikov_act(W(3), start) == start
    w = W(3, 1, 2, -2, 1)
    assert dynnikov_act(w) == dynnikov_act(free_reduce(w))
    assert dynnikov_act(W(3, 1, 2, 1)) == dynnikov_act(W(3, 2, 1, 2))
    assert dynnikov_act(W(3, 1)) != dynnikov_act(W(3, -1))


def test_dynnikov_bad_length():
    with pytest.raises(BraidError):
        dynnikov_act(W(3, 1), (0, 1))
