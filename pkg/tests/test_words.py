from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from feldshift import words
from feldshift.params import ParamSeq
from feldshift.words import CapExceeded

from oracles import naive_words

P22 = ParamSeq.from_list([2, 2, 2])
A1, A2, C0 = 0, 1, 2


@pytest.fixture(scope="module")
def naive():
    return naive_words([2, 2, 2], 2)


@pytest.fixture(scope="module")
def tw():
    return words.tower(P22)


def test_lengths():
    assert words.length_L(P22, 0) == 1
    assert words.length_L(P22, 1) == 2049
    assert words.length_L(P22, 2) == 4198401
    assert words.length_L(ParamSeq.from_list([2, 3]), 1) == 32769
    assert words.build_extended(ParamSeq.from_list([2, 3]), 1, 3).length == 32769


def test_level_one_feldman_words(tw):
    a11, a12 = words.materialize(tw.a(1, 1)), words.materialize(tw.a(1, 2))
    assert a11.tolist() == ([A1] * 64 + [A2] * 64) * 16
    assert a12.tolist() == ([A1] * 256 + [A2] * 256) * 4
    assert words.build_feldman(P22, 0, 2).length == 1


def test_level_one_extended_and_c(tw):
    b11 = words.materialize(tw.b(1, 1)).tolist()
    assert b11 == ([A1] * 64 + [A2] * 64) * 16 + [C0]
    assert words.materialize(tw.c(1)).tolist() == [C0] * 2047 + [A1, A2]


@pytest.mark.parametrize("label", [("b", 1, 1), ("b", 1, 2), ("c", 1, 0), ("a", 1, 1),
                                   ("b", 2, 1), ("b", 2, 2), ("c", 2, 0)])
def test_materialize_matches_naive(naive, tw, label):
    kind, k, i = label
    w = tw.c(k) if kind == "c" else getattr(tw, kind)(k, i)
    ref = naive["c"][k] if kind == "c" else naive[kind][(k, i)]
    assert words.materialize(w).tolist() == ref


def test_symbol_at_examples(tw):
    assert words.symbol_at(tw.b(1, 1), 2048) == C0
    assert words.symbol_at(tw.b(1, 1), 0) == A1
    assert words.symbol_at(tw.c(1), 2047) == A1
    assert words.symbol_at(tw.c(2), 0) == C0
    with pytest.raises(IndexError):
        words.symbol_at(tw.c(1), 2049)


def test_extract_examples(tw):
    assert words.extract(tw.b(1, 1), 0, 3).tolist() == [A1] * 3
    assert words.extract(tw.c(1), 2046, 3).tolist() == [C0, A1, A2]
    assert len(words.extract(tw.c(1), 0, 0)) == 0


def test_extract_cap(tw):
    with pytest.raises(CapExceeded):
        words.extract(tw.b(2, 1), 0, 1000, cap=999)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["b1", "b2", "c"]), st.integers(0, 4198401 - 1), st.integers(0, 300))
def test_extract_agrees_with_symbol_at(which, start, length):
    tw = words.tower(P22)
    w = {"b1": tw.b(2, 1), "b2": tw.b(2, 2), "c": tw.c(2)}[which]
    length = min(length, w.length - start)
    got = words.extract(w, start, length).tolist()
    assert got == [words.symbol_at(w, start + j) for j in range(length)]


def test_nesting(tw):
    for k in (1, 2):
        L = tw.L(k - 1)
        assert np.array_equal(words.extract(tw.b(k, 1), 0, L), words.materialize(tw.b(k - 1, 1)))
        assert np.array_equal(words.extract(tw.c(k), 0, L), words.materialize(tw.c(k - 1)))
        o = words.orbit_prefix(P22, "B", k)
        assert o.prefix(k - 1).word is tw.b(k - 1, 1)


def test_every_lower_word_occurs(tw):
    for k in (1, 2):
        lower = [tw.b(k - 1, i) for i in (1, 2)] + [tw.c(k - 1)]
        for upper in [tw.b(k, 1), tw.b(k, 2), tw.c(k)]:
            text = words.materialize(upper).tobytes()
            for w in lower:
                assert words.materialize(w).tobytes() in text


def test_lengths_ratio():
    for k in range(4):
        assert words.lengths_ratio_ok(P22, k)
    assert Fraction(words.length_L(P22, 1), words.length_L(P22, 2)) < Fraction(1, 2)


def test_huge_parameters_stay_symbolic():
    ps = ParamSeq.from_rule("4^(k+4)", 4)
    w = words.build_extended(ps, 1, 1)
    assert w.length == 1 + 256 ** (4 * 1024 + 3)
    assert words.symbol_at(w, w.length - 1) == 256
    assert words.symbol_at(w, 0) == 0
    assert words.extract(w, w.length - 3, 3).tolist() == [255, 255, 256]
    with pytest.raises(CapExceeded):
        words.materialize(w)


def test_wide_alphabet_dtype():
    ps = ParamSeq.from_list([300, 300])
    a = words.extract(words.build_c(ps, 1), words.length_L(ps, 1) - 2, 2)
    assert a.dtype.itemsize == 2
    assert a.tolist() == [298, 299]


def test_block_counts(tw):
    counts = words.block_counts(tw.b(2, 1), 1)
    # (b11^64 b12^64)^16 c1
    assert counts == {("b", 1, 1): 1024, ("b", 1, 2): 1024, ("c", 1, 0): 1}
    counts = words.block_counts(tw.c(2), 1)
    assert counts == {("c", 1, 0): 2047, ("b", 1, 1): 1, ("b", 1, 2): 1}


def test_min_gap():
    r = words.min_gap(P22, [A1], 2)
    assert r.within_bound and r.bound == 4098
    b11 = words.materialize(words.build_extended(P22, 1, 1))
    r = words.min_gap(P22, b11, 2)
    assert r.bound == 2 * 4198401 and r.within_bound
    r = words.min_gap(P22, words.materialize(words.build_extended(P22, 2, 1)), 2)
    assert r.max_gap is None and r.occurrences == 1
