from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from feldshift import words
from feldshift.params import (ParamError, ParamSeq, PRule, gamma, gamma_by_recurrence,
                              validate)

from oracles import gamma_direct

WITNESS = ParamSeq.from_rule("4^(k+4)", 60)


def test_witness_passes_a_to_d():
    rep = validate(WITNESS, 10)
    for name in "abcd":
        assert rep[name].holds is True, name
        assert rep[name].scope == "certified"
    assert rep.passed


def test_constant_two_fails():
    ps = ParamSeq.from_list([2] * 12)
    rep = validate(ps, 10)
    assert rep["a"].holds is False
    assert rep["b"].holds is False
    assert not rep.passed


def test_constant_rule_fails_everywhere():
    rep = validate(ParamSeq.from_rule("5", 8), 8)
    assert [rep[c].holds for c in "abcd"] == [False, False, False, False]
    assert all(rep[c].scope == "certified" for c in "bcd")


def test_partial_sum_example():
    rep = validate(ParamSeq.from_list([2, 3, 4]), 3)
    assert rep.horizon == 2
    assert rep["b"].value == Fraction(13, 6)
    assert rep["b"].holds is False


def test_condition_values_are_exact():
    rep = validate(ParamSeq.from_list([10, 20, 40]), 2)
    expected = Fraction(10, 8) * Fraction(20, 18) * Fraction(40, 38)
    assert rep["a"].value == expected
    assert rep["b"].value == Fraction(2, 10) + Fraction(2, 20) + Fraction(2, 40)


def test_condition_e_uses_lengths():
    ps = ParamSeq.from_list([2, 2, 2], p=PRule("power", Fraction(2)))
    rep = validate(ps, 1, length_fn=words.length_L)
    e = rep["e"]
    # k = 0: m = 64, p = 4096 > 0; k = 1: m = 2049 * 64, p = m^2 > 12 m
    assert e.holds is True
    assert [d["k"] for d in e.details] == [0, 1]


@pytest.mark.parametrize("bad", [[], [1, 3], [3, 2], [2, 0]])
def test_bad_sequences(bad):
    with pytest.raises(ParamError):
        ParamSeq.from_list(bad)


def test_strict_mode():
    ParamSeq.from_list([3, 3, 4])
    with pytest.raises(ParamError):
        ParamSeq.from_list([3, 3, 4], strict=True)


def test_config_round_trip():
    ps = ParamSeq.from_config({"n": {"rule": "4^(k+4)", "K": 5}})
    assert ps.n[:3] == (256, 1024, 4096)
    assert ps[40] == 4 ** 44
    assert ParamSeq.from_config(ps.to_config()) == ps
    assert ParamSeq.from_list([2, 3])[7] == 3


def test_gamma_examples():
    assert gamma(WITNESS, 0).gamma == [0]
    g = gamma(WITNESS, 1).gamma
    assert g[1] == Fraction(512, 64516)
    assert gamma(WITNESS, 50).bounded


def test_gamma_needs_n_above_two():
    with pytest.raises(ParamError):
        gamma(ParamSeq.from_list([2, 2]), 1)


def test_gamma_matches_direct_sum():
    n = [5, 7, 9, 30, 31]
    assert gamma(ParamSeq.from_list(n), 4).gamma == gamma_direct(n, 4)


def test_stated_one_step_form_disagrees():
    # r^2 G + r (2/n) is not the closed form's recurrence; r^2 (G + 2/n) is
    ps = ParamSeq.from_list([5, 7, 9])
    g = gamma(ps, 2).gamma
    r = Fraction(5, 3)
    assert g[1] == r * r * (g[0] + Fraction(2, 5))
    assert g[1] != r * r * g[0] + r * Fraction(2, 5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(3, 400), min_size=1, max_size=12))
def test_recurrence_equals_closed_form(vals):
    ps = ParamSeq.from_list(sorted(vals))
    K = len(vals) - 1
    g = gamma(ps, K).gamma
    assert g == gamma_by_recurrence(ps, K).gamma
    assert all(a <= b for a, b in zip(g, g[1:]))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(3, 10**6), min_size=2, max_size=8), st.data())
def test_validate_monotone_under_domination(vals, data):
    low = sorted(vals)
    bumps = data.draw(st.lists(st.integers(0, 10**6), min_size=len(low), max_size=len(low)))
    high = sorted(a + b for a, b in zip(low, bumps))
    # pointwise domination survives sorting
    assert all(h >= l for h, l in zip(high, low))
    H = len(low) - 1
    r_low = validate(ParamSeq.from_list(low), H)
    r_high = validate(ParamSeq.from_list(high), H)
    for c in "abcd":
        if r_low[c].holds:
            assert r_high[c].holds, c
