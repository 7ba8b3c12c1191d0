from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from repgap import combinat as cb
from repgap.diagram import sandwich_factor
from repgap.errors import HypothesisViolated, PoleError, RepGapError
from repgap.monoids import enumerate_monoid

from oracles import BOTTOM_TABLE, alternating, context_block, count_bottom_configs


# ---------------------------------------------------------------- elementary values

def test_binomial():
    assert cb.binomial(5, 3) == 10
    assert cb.binomial(7, 0) == 1
    assert cb.binomial(3, 5) == 0
    assert cb.binomial(3, -1) == 0


def test_catalan_motzkin():
    assert [cb.catalan(i) for i in range(6)] == [1, 1, 2, 5, 14, 42]
    assert [cb.motzkin(i) for i in range(7)] == [1, 1, 2, 4, 9, 21, 51]
    assert cb.catalan(4) == 14


def test_pochhammer():
    assert cb.pochhammer(7, 0) == 1
    assert cb.pochhammer(-3, 2) == 6
    assert cb.pochhammer(-3, 5) == 0
    assert cb.pochhammer(2, 3) == 24


def test_hyp2f1_examples():
    assert cb.hyp2f1_terminating(0, 4, 7) == 1
    for b, c in [(3, 7), (-2, 5), (1, -4)]:
        assert cb.hyp2f1_terminating(1, b, c) == 1 - Fraction(b, c)
    assert cb.hyp2f1_terminating(2, 1, -5) == Fraction(3, 2)


def test_hyp2f1_pole():
    with pytest.raises(PoleError) as err:
        cb.hyp2f1_terminating(3, 1, -1)
    assert err.value.index == 2


def test_chu_vandermonde_examples():
    assert cb.chu_vandermonde(2, 1, -5) == Fraction(3, 2)
    assert cb.chu_vandermonde(1, 3, 7) == Fraction(4, 7)
    with pytest.raises(HypothesisViolated):
        cb.chu_vandermonde(3, 1, -2)


# ---------------------------------------------------------------- Chu-Vandermonde and WZ

@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 30), st.integers(-40, 40), st.integers(-40, 40))
def test_chu_vandermonde_property(m, b, c):
    try:
        rhs = cb.chu_vandermonde(m, b, c)
        lhs = cb.hyp2f1_terminating(m, b, c)
    except (PoleError, HypothesisViolated):
        assume(False)
    assert lhs == rhs


@settings(max_examples=100, deadline=None)
@given(
    st.integers(1, 15),
    st.integers(0, 15),
    st.fractions(min_value=-20, max_value=20, max_denominator=7),
    st.fractions(min_value=-20, max_value=20, max_denominator=7),
)
def test_wz_certificate(m, k, b, c):
    # generic parameters keep every Pochhammer factor nonzero
    assume(c.denominator > 1 and (c - b).denominator > 1)
    assert cb.wz_certificate_residual(m, k, b, c) == 0


def test_rtl_chu_vandermonde_sum():
    for n in range(1, 65):
        total = sum(cb.binomial(n - 1, n - k) * cb.binomial(n, k) for k in range(n + 1))
        assert total == cb.binomial(2 * n - 1, n)


# ---------------------------------------------------------------- Catalan convolution

def test_catalan_convolution_examples():
    for n in range(10):
        assert cb.catalan_convolution(1, n) == cb.catalan(n)
    assert cb.catalan_convolution(2, 2) == 5


def test_catalan_convolution_dp():
    for kfold in range(1, 7):
        row = [1] + [0] * 12
        for _ in range(kfold):
            row = [sum(row[i] * cb.catalan(n - i) for i in range(n + 1)) for n in range(13)]
        assert [cb.catalan_convolution(kfold, n) for n in range(13)] == row


# ---------------------------------------------------------------- block counts

def test_a_m0_brute():
    for m in range(9):
        assert count_bottom_configs(alternating(1, m)) == cb.catalan((m + 1) // 2)


def test_a_m0_matches_rmo_bottom_halves():
    for n in (1, 2, 3):
        halves = set()
        for d in enumerate_monoid("rMo", n).elements:
            if d.k == 0:
                halves.add(sandwich_factor(d)[2].key)
        assert len(halves) == cb.catalan((2 * n + 1) // 2)


def test_a_m0_reversed_word():
    for m in range(9):
        expected = cb.catalan((m + 3) // 2) if m % 2 == 0 else cb.catalan((m + 2) // 2)
        assert count_bottom_configs(alternating(2, m)) == expected


@pytest.mark.parametrize("case, start, parity, formula", BOTTOM_TABLE, ids=[r[0] for r in BOTTOM_TABLE])
def test_bottom_table_row(case, start, parity, formula):
    for j in range(9):
        block = context_block(case, j)
        if j % 2 != parity:
            assert block is None
            continue
        assert block == alternating(start, j)
        assert count_bottom_configs(block) == formula(j)


# ---------------------------------------------------------------- sequences

def test_sequence_count():
    assert cb.sequence_count(3, 0) == 4
    assert sorted(cb.sequences(3, 0)) == [(1, 1, 1), (2, 1, 1), (2, 2, 1), (2, 2, 2)]
    for k in range(8):
        assert cb.sequence_count(k, 0) == k + 1
        assert sum(cb.sequence_count(k, j) for j in range(k // 2 + 1)) == 2 ** k
        for j in range(k // 2 + 1):
            brute = sum(1 for s in itertools.product((1, 2), repeat=k) if cb.count_12(s) == j)
            assert cb.sequence_count(k, j) == brute


# ---------------------------------------------------------------- cell counts

def test_cell_count_examples():
    assert cb.cell_count("rTL", 3, 4, None, "right") == 2
    assert cb.cell_count("rTL", 3, 4, None, "left") == 3
    assert cb.cell_count("rMo", 3, 2, 0, "right") == 5
    assert cb.cell_count("rMo", 3, 2, 1, "right") == 14
    assert cb.cell_count("rMo", 1, 2, 0, "right") == 0


def test_rmo_forms_agree():
    for n in range(1, 9):
        for k in range(2 * n + 1):
            for j in range(k // 2 + 1):
                assert cb.rmo_right_alternating(n, k, j) == cb.rmo_right_gamma(n, k, j)
                assert cb.rmo_left_alternating(n, k, j) == cb.rmo_left_gamma(n, k, j)


@pytest.mark.parametrize("family", ["rMo", "rpRo", "rTL"])
def test_cell_counts_match_enumeration(family):
    for n in (1, 2, 3):
        bottoms: dict = {}
        tops: dict = {}
        for d in enumerate_monoid(family, n).elements:
            t, alpha, b = sandwich_factor(d)
            bottoms.setdefault(alpha, set()).add(b.key)
            tops.setdefault(alpha, set()).add(t.key)
        for alpha in bottoms:
            k = len(alpha)
            j = cb.count_12(alpha) if family != "rTL" else None
            # a right cell fixes the top half and runs over bottom halves
            assert len(bottoms[alpha]) == cb.cell_count(family, n, k, j, "right")
            assert len(tops[alpha]) == cb.cell_count(family, n, k, j, "left")


def test_cell_count_bad_parameters():
    with pytest.raises(RepGapError):
        cb.cell_count("rTL", 3, 3, None, "right")


def test_monoid_size_modes():
    assert cb.monoid_size("rTL", 3) == 10
    assert cb.monoid_size("rpRo", 1, mode="both") == 4
    assert cb.monoid_size("rMo", 1, mode="both") == 5
    assert cb.monoid_size("TL", 2, mode="both") == 14
    assert cb.monoid_size("Mo", 1, mode="both") == 9
    assert cb.monoid_size("pRo", 1, mode="both") == 6
    # rpRo uses the corrected exponent argument k
    assert cb.monoid_size("rpRo", 5) == 12092


def test_pivotal_half_counts_square_sum():
    for fam in ("TL", "Mo", "pRo"):
        for n in (1, 2, 3, 4):
            h = cb.pivotal_half_counts(fam, 2 * n)
            assert sum(x * x for x in h) == cb.monoid_size(fam, n)
