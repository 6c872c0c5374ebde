from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from feldshift import fbar as F, words
from feldshift.params import ParamSeq

from oracles import best_match_brute, fbar_ref, lcs_table

P22 = ParamSeq.from_list([2, 2, 2])
small_words = st.lists(st.integers(0, 3), min_size=1, max_size=12)


@pytest.mark.parametrize("x,y,pi,value", [
    ("ab", "ab", 4, Fraction(0)),
    ("aa", "bb", 0, Fraction(1)),
    ("aba", "ba", 4, Fraction(1, 5)),
])
def test_small_examples(x, y, pi, value):
    r = F.fbar(x, y)
    assert r.pi == pi and r.fbar == value
    assert r.fbar_c == 1 - value


def test_empty_rejected():
    with pytest.raises(ValueError):
        F.fbar([], [1])


@settings(max_examples=300, deadline=None)
@given(small_words, small_words)
def test_dp_equals_enumeration(x, y):
    best = best_match_brute(x, y)
    assert F.lcs_dp(x, y) == best
    assert F.lcs_exhaustive(x, y) == best
    assert F.lcs_bitparallel(x, y) == best


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=1, max_size=90),
       st.lists(st.integers(0, 5), min_size=1, max_size=90))
def test_routes_agree_with_textbook_table(x, y):
    ref = lcs_table(x, y)
    assert F.lcs_dp(x, y) == ref
    assert F.lcs_bitparallel(x, y) == ref
    pairs = F.alignment(x, y)
    assert len(pairs) == ref
    assert all(x[i] == y[j] for i, j in pairs)
    assert all(a[0] < b[0] and a[1] < b[1] for a, b in zip(pairs, pairs[1:]))


@settings(max_examples=150, deadline=None)
@given(small_words, small_words, small_words)
def test_metric_properties(x, y, z):
    fxy, fyx = F.fbar(x, y).fbar, F.fbar(y, x).fbar
    assert fxy == fyx
    assert F.fbar(x, x).fbar == 0
    assert (fxy == 0) == (x == y)
    assert (fxy == 1) == (not set(x) & set(y))
    # no triangle inequality across lengths: fbar([0],[1]) = 1 but via [0,1] it is 2/3
    if len(x) == len(y) == len(z):
        assert F.fbar(x, z).fbar <= fxy + F.fbar(y, z).fbar


@settings(max_examples=100, deadline=None)
@given(small_words, small_words)
def test_doubling_extends_matches(x, y):
    single = F.fbar(x, y).fbar_c
    double = F.fbar(x + x, y + y).fbar_c
    assert double >= single / 2
    assert double >= single


def test_large_alphabet_falls_back_to_dp():
    rng = np.random.default_rng(3)
    x, y = rng.integers(0, 500, 300), rng.integers(0, 500, 280)
    assert F.fbar(x, y).pi == 2 * lcs_table(x.tolist(), y.tolist())


# golden values, computed by the plain DP and the bit-parallel route independently
LEVEL_ONE_GOLDEN = {
    (2, 2): {(1, 1): 1280, (1, 2): 1536, (2, 1): 2048, (2, 2): 2560},
    (2, 3): {(1, 1): 20480, (1, 2): 24576, (2, 1): 32768, (2, 2): 40960},
}


@pytest.mark.parametrize("n", sorted(LEVEL_ONE_GOLDEN))
def test_level_one_powers_golden(n):
    ps = ParamSeq.from_list(list(n))
    for (r, s), lcs in LEVEL_ONE_GOLDEN[n].items():
        res = F.fbar_words(ps, 1, ("a", 1, r), ("a", 2, s))
        assert res.match.pi == 2 * lcs, (r, s)
        assert res.asserted is False


def test_separation_fixture_values():
    ra = F.fbar_words(P22, 1, ("a", 1, 1), ("a", 2, 1), method="dp")
    rb = F.fbar_words(P22, 1, ("b", 1, 1), ("b", 2, 1), method="dp")
    assert ra.match.fbar == Fraction(3, 8)
    assert rb.match.fbar == Fraction(256, 683)
    assert ra.threshold == Fraction(7, 8) and rb.threshold == Fraction(5, 8)
    assert F.fbar_words(P22, 1, ("a", 1, 1), ("a", 1, 1)).match.fbar == 0


def test_gerber_on_construction_words():
    tw = words.tower(P22)
    b1, b2 = words.materialize(tw.b(1, 1)), words.materialize(tw.b(1, 2))
    g = F.gerber_check(b1, b2, ({2048}, {2048}))
    assert g.rho == Fraction(2, 4098)
    assert g.fbar_a == Fraction(3, 8) and g.fbar_b == Fraction(256, 683)
    assert g.passed


def test_gerber_no_deletions():
    g = F.gerber_check([0, 1, 1], [1, 0], (set(), set()))
    assert g.rho == 0 and g.slack == 0


def test_gerber_with_rho_one_eighth():
    tw = words.tower(P22)
    b1, b2 = words.materialize(tw.b(1, 1)), words.materialize(tw.b(1, 2))
    g = F.gerber_check(b1, b2, ({2048}, {2048}), rho=Fraction(1, 8))
    assert g.passed and g.slack > 0


def test_gerber_rejects_too_many_deletions():
    with pytest.raises(ValueError):
        F.gerber_check([0] * 8, [1] * 8, ({0, 1, 2}, set()), rho=Fraction(1, 16))
    with pytest.raises(IndexError):
        F.gerber_check([0], [1], ({5}, set()))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=60),
       st.lists(st.integers(0, 3), min_size=1, max_size=60), st.data())
def test_gerber_property(x, y, data):
    d1 = data.draw(st.sets(st.integers(0, len(x) - 1)))
    d2 = data.draw(st.sets(st.integers(0, len(y) - 1)))
    g = F.gerber_check(x, y, (d1, d2))
    assert g.slack >= 0
    kept_x = [v for i, v in enumerate(x) if i not in d1]
    kept_y = [v for i, v in enumerate(y) if i not in d2]
    if kept_x and kept_y:
        assert g.fbar_a == fbar_ref(kept_x, kept_y)


def test_lb_singleton_and_far_pair():
    r = F.lb_test([[0, 1, 2]], Fraction(1, 100))
    assert r.max_fbar == 0 and r.passed and r.witness is None
    tw = words.tower(P22)
    W = [words.materialize(tw.b(1, 1)), words.materialize(tw.b(1, 2))]
    r = F.lb_test(W, Fraction(1, 10))
    assert not r.passed and r.witness == (0, 1)
    assert r.max_fbar == Fraction(256, 683)


def test_lb_parallel_matches_serial():
    rng = np.random.default_rng(11)
    W = [rng.integers(0, 3, 40) for _ in range(7)]
    a = F.lb_test(W, Fraction(1, 2), keep_matrix=True)
    b = F.lb_test(W, Fraction(1, 2), jobs=4, keep_matrix=True)
    assert a.max_fbar == b.max_fbar and a.witness == b.witness and a.matrix == b.matrix


def test_lb_rejects_mixed_lengths():
    with pytest.raises(ValueError):
        F.lb_test([[0, 1], [0]], Fraction(1, 2))
