"""Binary-word vertex addressing."""

import pytest
from hypothesis import given, strategies as st

from dsycascade import rng
from dsycascade.vertex import MAX_GENERATION, Vertex

words = st.lists(st.sampled_from([1, 2]), min_size=0, max_size=40)


def test_root_properties():
    root = Vertex.root()
    assert len(root) == 0
    assert root.word() == ()
    assert str(root) == "<root>"


@given(words)
def test_word_round_trip(word):
    v = Vertex.from_word(word)
    assert v.word() == tuple(word)
    assert len(v) == len(word)


@given(words, words)
def test_concat_length_adds(u, v):
    a, b = Vertex.from_word(u), Vertex.from_word(v)
    c = a.concat(b)
    assert len(c) == len(a) + len(b)
    assert c.word() == a.word() + b.word()
    assert a.is_prefix_of(c)


@given(words, st.integers(min_value=0, max_value=40))
def test_prefix_is_truncation(word, j):
    v = Vertex.from_word(word)
    j = min(j, len(word))
    assert v.prefix(j).word() == tuple(word[:j])


@given(words)
def test_parent_child_inverse(word):
    v = Vertex.from_word(word)
    for branch in (1, 2):
        assert v.child(branch).parent() == v


def test_prefix_closure_of_children():
    v = Vertex.from_word([1, 2, 2, 1])
    for j in range(len(v) + 1):
        assert v.prefix(j).is_prefix_of(v)


def test_key_matches_incremental_derivation():
    root_key = rng.root_key(11)
    v = Vertex.from_word([2, 1, 2])
    k = rng.child_key(rng.child_key(rng.child_key(root_key, 2), 1), 2)
    assert v.key(root_key) == k


def test_generation_cap_enforced():
    with pytest.raises(ValueError):
        Vertex(MAX_GENERATION + 1, 0)


def test_symbol_bounds():
    v = Vertex.from_word([1, 2])
    assert v.symbol(1) == 1 and v.symbol(2) == 2
    with pytest.raises(ValueError):
        v.symbol(3)
