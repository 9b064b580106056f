import random

import pytest
from hypothesis import given, settings, strategies as st

from tropteich import free_group as fg
from tropteich.free_group import (
    BadLetter,
    WordSyntaxError,
    apply_map,
    conjugacy_normal_form,
    conjugation,
    format_word,
    group_map,
    identity_map,
    invert_automorphism,
    is_automorphism,
    nielsen_generators,
    parse_word,
    reduce,
    tuples_conjugate,
)
from tropteich.marking import random_automorphism

from oracles import brute_conjugate, stallings_is_basis


def words(rank, max_size=8):
    letters = st.sampled_from([k for k in range(-rank, rank + 1) if k])
    return st.lists(letters, max_size=max_size).map(lambda ls: reduce(ls, rank))


def automorphisms_of(rank):
    return st.integers(0, 2**32).map(lambda s: random_automorphism(rank, random.Random(s)))


def test_reduce_examples():
    assert reduce([1, -1, 2], 2).letters == (2,)
    assert reduce([], 2).is_identity()
    assert reduce([1, 2, -2, -1], 2).is_identity()
    with pytest.raises(BadLetter):
        reduce([3], 2)


@given(words(3), words(3))
def test_reduce_idempotent_and_subadditive(u, v):
    assert reduce(u.letters, 3) == u
    assert len(u * v) <= len(u) + len(v)


@given(words(3))
def test_word_literal_round_trip(w):
    assert parse_word(format_word(w), 3) == w


def test_word_literal_errors():
    with pytest.raises(WordSyntaxError):
        parse_word("x1**x2", 2)
    with pytest.raises(BadLetter):
        parse_word("x3", 2)
    assert parse_word("x1^3*x1^-2", 1).letters == (1,)


def test_apply_map_examples():
    m = group_map(["x1*x2", "x2"])
    assert apply_map(m, parse_word("x1*x2^-1", 2)) == parse_word("x1", 2)
    swap = group_map(["x2", "x1"])
    assert apply_map(swap, parse_word("x1*x2", 2)) == parse_word("x2*x1", 2)
    w = parse_word("x2^-1*x1*x1", 2)
    assert apply_map(identity_map(2), w) == w


@settings(max_examples=50)
@given(automorphisms_of(3), words(3), words(3))
def test_apply_map_is_a_homomorphism(m, u, v):
    assert m(u * v) == m(u) * m(v)


def test_is_automorphism_examples():
    assert is_automorphism(group_map(["x2", "x1"]))
    assert not is_automorphism(group_map(["x1", "x1"]))
    assert is_automorphism(group_map(["x1*x2", "x2"]))
    assert not is_automorphism(group_map(["x1*x1", "x2"]))
    assert not is_automorphism(group_map(["x1*x2*x1^-1", "x2"]))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 3), st.data())
def test_is_automorphism_agrees_with_folding(rank, data):
    images = data.draw(st.lists(words(rank, 5), min_size=rank, max_size=rank))
    m = fg.GroupMap(rank, rank, tuple(images))
    assert is_automorphism(m) == stallings_is_basis([w.letters for w in images], rank)


def test_inverse_examples():
    swap = group_map(["x2", "x1"])
    assert invert_automorphism(swap) == swap
    assert invert_automorphism(group_map(["x1*x2", "x2"])) == group_map(["x1*x2^-1", "x2"])


@pytest.mark.parametrize("rank", [2, 3])
def test_inverse_round_trip_on_random_products(rank):
    rng = random.Random(rank)
    for _ in range(100):
        m = random_automorphism(rank, rng)
        inv = invert_automorphism(m)
        assert inv.compose(m) == identity_map(rank)
        assert m.compose(inv) == identity_map(rank)
        assert is_automorphism(inv)


def test_nielsen_generators():
    gens = nielsen_generators(2)
    assert all(is_automorphism(g) for g in gens)
    assert group_map(["x2", "x1"]) in gens
    assert group_map(["x1^-1", "x2"]) in gens
    reachable = set(gens)
    for _ in range(2):
        reachable |= {a.compose(b) for a in reachable for b in gens}
    assert group_map(["x1*x2", "x2"]) in reachable
    # every generator has its inverse among products of at most two generators
    short = set(gens) | {a.compose(b) for a in gens for b in gens}
    for g in gens:
        assert invert_automorphism(g) in short


def test_conjugator_examples():
    x1, x2 = parse_word("x1", 2), parse_word("x2", 2)
    w = tuples_conjugate([x1, x2], [x1.conjugate(x2), x2])
    assert w == x2.inverse()
    assert tuples_conjugate([x1], [x2]) is None


@pytest.mark.parametrize("rank", [2, 3])
def test_conjugate_then_recover(rank):
    rng = random.Random(10 + rank)
    letters = [k for k in range(-rank, rank + 1) if k]
    for _ in range(100):
        t = [reduce([rng.choice(letters) for _ in range(rng.randint(0, 5))], rank) for _ in range(rank)]
        w = reduce([rng.choice(letters) for _ in range(rng.randint(0, 6))], rank)
        moved = [x.conjugate(w) for x in t]
        found = tuples_conjugate(moved, t)
        assert found is not None
        assert [x.conjugate(found) for x in t] == moved
        back = tuples_conjugate(t, moved)
        assert [x.conjugate(back) for x in moved] == t


def test_tuple_conjugacy_agrees_with_exhaustive_search():
    rng = random.Random(7)
    letters = [1, -1, 2, -2]
    for _ in range(150):
        t1 = [reduce([rng.choice(letters) for _ in range(rng.randint(0, 3))], 2) for _ in range(2)]
        t2 = [reduce([rng.choice(letters) for _ in range(rng.randint(0, 3))], 2) for _ in range(2)]
        if rng.random() < 0.5:
            w = reduce([rng.choice(letters) for _ in range(rng.randint(0, 3))], 2)
            t1 = [x.conjugate(w) for x in t2]
        fast = tuples_conjugate(t1, t2)
        slow = brute_conjugate([x.letters for x in t2], [x.letters for x in t1], 5, 2)
        assert (fast is not None) == (slow is not None)


@settings(max_examples=40, deadline=None)
@given(st.lists(words(2, 5), min_size=2, max_size=2), words(2, 4), words(2, 4))
def test_tuple_conjugacy_symmetric_and_transitive(t, u, v):
    a = [x.conjugate(u) for x in t]
    b = [x.conjugate(v) for x in a]
    assert tuples_conjugate(t, a) is not None and tuples_conjugate(a, t) is not None
    assert tuples_conjugate(t, b) is not None


@settings(max_examples=60, deadline=None)
@given(st.lists(words(2, 5), min_size=2, max_size=2), words(2, 5))
def test_normal_form_is_a_conjugacy_invariant(t, w):
    nf = conjugacy_normal_form(t)
    assert conjugacy_normal_form([x.conjugate(w) for x in t]) == nf
    assert tuples_conjugate(list(nf), t) is not None


@settings(max_examples=40, deadline=None)
@given(words(3), words(3))
def test_inner_automorphisms(w, x):
    assert is_automorphism(conjugation(w))
    assert conjugation(w)(x) == x.conjugate(w)


@given(words(3), words(3))
def test_word_group_laws(u, v):
    assert (u * v).inverse() == v.inverse() * u.inverse()
    assert (u * u.inverse()).is_identity()
    assert u ** 2 == u * u and u ** -1 == u.inverse()


def test_rank_mismatch():
    with pytest.raises(fg.RankMismatch):
        parse_word("x1", 1) * parse_word("x1", 2)
