from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from feldshift import analysis as A, fbar as F, words
from feldshift.automaton import SuffixAutomaton, distinct_factor_counts
from feldshift.params import ParamSeq
from feldshift.rolling import WindowSet, distinct_windows, window_keys
from feldshift.words import CapExceeded

import oracles

P22 = ParamSeq.from_list([2, 2, 2, 2, 2, 2])
seqs = st.lists(st.integers(0, 2), min_size=1, max_size=80)


# --- counting primitives ---------------------------------------------------


@settings(max_examples=150, deadline=None)
@given(seqs, st.integers(1, 9))
def test_distinct_windows_vs_set(s, n):
    arr = np.asarray(s, dtype=np.uint8)
    reps = distinct_windows(arr, n)
    assert len(reps) == oracles.distinct_windows(s, n)
    assert len({arr[r:r + n].tobytes() for r in reps}) == len(reps)


def test_hash_collisions_are_resolved(monkeypatch):
    from feldshift import rolling
    # a constant hash makes every window collide; the verifier must recover
    monkeypatch.setattr(rolling, "window_keys",
                        lambda arr, n: np.zeros(max(len(arr) - n + 1, 0), dtype=np.int64))
    arr = np.array([0, 1, 1, 0, 1, 0, 0], dtype=np.uint8)
    assert len(rolling.distinct_windows(arr, 2)) == 4
    ws = rolling.WindowSet([np.array([0, 1, 0, 1], dtype=np.uint8)], 2)
    assert ws.match(np.array([1, 1, 0, 1], dtype=np.uint8)).tolist() == [False, True, True]


def test_window_keys_equal_for_equal_windows():
    arr = np.array([3, 1, 4, 3, 1, 4, 3], dtype=np.uint8)
    k = window_keys(arr, 3)
    assert k[0] == k[3] and k[1] == k[4] and len(set(k.tolist())) == 3


@settings(max_examples=100, deadline=None)
@given(st.lists(seqs, min_size=1, max_size=4), st.integers(1, 10))
def test_suffix_automaton_counts(frags, max_len):
    arrs = [np.asarray(f) for f in frags]
    counts = distinct_factor_counts(arrs, max_len)
    for n in range(1, max_len + 1):
        assert counts[n] == len(oracles.factors(frags, n))


def test_suffix_automaton_total():
    sam = SuffixAutomaton("abcbc")
    assert int(sam.distinct_by_length(5)[1:].sum()) == 12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=1, max_size=12), st.data())
def test_double_bracket(omega, data):
    w = data.draw(st.lists(st.integers(0, 2), min_size=len(omega), max_size=len(omega)))
    expect = tuple(w) in oracles.cyclic_windows(omega)
    assert A.in_double_bracket(omega, w) == expect
    db = A.DoubleBracket(omega)
    assert (w in db) == expect
    assert omega in db
    assert len(db) == len(oracles.cyclic_windows(omega)) <= len(omega)


def test_double_bracket_examples():
    assert A.in_double_bracket("ab", "ba")
    assert not A.in_double_bracket("ab", "aa")
    with pytest.raises(ValueError):
        A.in_double_bracket("ab", "abc")


# --- complexity ------------------------------------------------------------


@pytest.mark.parametrize("K,ns", [(1, (1, 2, 3, 5, 8, 16, 64, 300)), (2, (2, 16, 300))])
def test_fragment_scan_matches_full_scan(K, ns):
    for n in ns:
        a = A.complexity_brute(P22, n, K)
        b = A.complexity_brute(P22, n, K, method="materialized")
        assert a.count == b.count, n


def test_fragment_scan_matches_naive_on_level_two():
    text = words.materialize(words.build_extended(P22, 2, 1)).tolist()
    for n in (3, 17):
        assert A.complexity_brute(P22, n, 2).count == oracles.distinct_windows(text, n)


def test_complexity_stable_values():
    rep = A.complexity_report(P22, [1, 2, 4, 8, 16, 64], 4)
    counts = {e.n: e.count for e in rep.entries}
    assert counts == {1: 3, 2: 7, 4: 21, 8: 45, 16: 93, 64: 381}
    assert all(e.stable for e in rep.entries)
    assert A.complexity_sam(P22, [1, 2, 4, 8, 16, 64], 4) == counts


def test_complexity_monotone_in_level():
    for n in (2, 4, 8, 16):
        counts = [A.complexity_brute(P22, n, K).count for K in (1, 2, 3, 4)]
        assert counts == sorted(counts)


def test_complexity_alphabet_growth():
    alpha = P22[0] + 1
    for n in range(1, 20):
        assert A.complexity_brute(P22, n + 1, 4).count <= alpha * A.complexity_brute(P22, n, 4).count


def test_right_special_identity():
    for n in (1, 2, 3, 4, 8, 16, 64):
        r = A.right_special(P22, n, 4)
        assert r.identity_holds and r.dead_ends == 0
    r1 = A.right_special(P22, 1, 4)
    # level 2 already holds every 2-window
    assert A.complexity_brute(P22, 2, 2).count == A.complexity_brute(P22, 2, 4).count
    text = words.materialize(words.build_extended(P22, 2, 1)).tolist()
    two = oracles.factors([text], 2)
    ext = {}
    for a, b in two:
        ext.setdefault(a, set()).add(b)
    assert r1.count == sum(len(v) >= 2 for v in ext.values())
    assert r1.excess == sum(len(v) - 1 for v in ext.values())


def test_structural_example():
    st0 = A.complexity_structural(P22, 0)
    assert st0["m"] == 64 and st0["bound"] == 768 and st0["holds"]
    assert A.complexity_brute(P22, 64, 4).count <= 768
    for k in range(6):
        assert A.complexity_structural(P22, k)["holds"]
        assert A.complexity_structural(ParamSeq.from_list([3, 4, 5]), k)["holds"]


def test_entropy_proxy_decreases():
    proxy = A.complexity_report(P22, [1, 8, 64, 256], 4, with_right_special=False).entropy_proxy()
    assert proxy[-1][1] <= proxy[0][1]


def test_scan_cap_respected():
    huge = ParamSeq.from_rule("4^(k+4)", 6)
    with pytest.raises(CapExceeded):
        A.complexity_brute(huge, 4, 3)


# --- frequencies -----------------------------------------------------------


def test_frequency_bf_golden_and_naive():
    target = A.target_bf(P22, 1)
    r = A.frequency(P22, "B", target, 2)
    assert r.count == 4134815 and r.N == 4198401
    assert r.frequency == Fraction(4134815, 4198401)
    assert r.tail_discarded == 2048
    text = A._scan_text(P22, "B", 2, A.DEFAULT_SCAN_CAP)
    sl = text[:300_000]
    assert int(np.count_nonzero(target.match(sl))) == A.frequency_naive(target, sl)


def test_frequency_c_tower_example():
    r = A.frequency(P22, "C", A.target_c(P22, 0), 1)
    assert r.count == 2047
    assert r.count >= words.length_L(P22, 1) - words.length_L(P22, 0) * (P22[0] + 1)


def test_disjoint_targets_sum_below_one():
    fs = [A.frequency(P22, "B", A.target_b(P22, 1, j), 2).frequency for j in (1, 2)]
    assert sum(fs) <= 1
    fs = [A.frequency(P22, "C", A.target_b(P22, 1, j), 2).frequency for j in (1, 2)]
    assert sum(fs) <= 1


@pytest.mark.parametrize("tower,m,k", [("B", 0, 1), ("C", 0, 1), ("B", 0, 2), ("B", 1, 2),
                                       ("C", 0, 2), ("C", 1, 2)])
def test_interior_multiplicity(tower, m, k):
    r = A.interior_multiplicity(P22, m, k, tower)
    assert r.passed
    assert r.I_formula <= r.I_true
    if k == m + 1:
        assert r.M_formula == 1
    if tower == "C" and (m, k) == (0, 1):
        assert (r.I_formula, r.I_true) == (2046, 2047)


def test_interior_needs_m_below_k():
    with pytest.raises(ValueError):
        A.interior_multiplicity(P22, 1, 1, "B")


def test_asequal():
    r = A.asequal_gap(P22, 1, 1, 2, 2)
    assert (r.count_m, r.count_j) == (2067407, 2067408)
    assert r.passed and r.bound == 1
    s = A.asequal_gap(P22, 1, 2, 1, 2)
    assert s.difference == r.difference
    assert A.asequal_gap(P22, 1, 2, 2, 2).difference == 0
    with pytest.raises(IndexError):
        A.asequal_gap(P22, 1, 1, 3, 2)


# --- loosely Bernoulli windows ---------------------------------------------


def test_square_windows_within_bound():
    c1 = words.build_c(P22, 1)
    offsets = list(range(0, 2049, 97))
    W = A.square_windows(c1, offsets)
    bound = A.lb_bound(P22, 1)
    assert bound == Fraction(4, 2049)
    r = F.lb_test(W, bound)
    assert r.max_fbar <= bound
