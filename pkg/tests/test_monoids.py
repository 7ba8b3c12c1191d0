from __future__ import annotations

import io
import random

import numpy as np
import pytest

from repgap import combinat
from repgap.diagram import Family, check, compose, identity
from repgap.errors import BudgetExceeded
from repgap.monoids import (
    batch_compose,
    closure_from,
    enumerate_monoid,
    export_elements,
    family_word,
    import_elements,
)

SIZES = {
    "rTL": [1, 3, 10, 35, 126],
    "rMo": [5, 62, 937],
    "rpRo": [4, 26, 192, 1500],
    "TL": [2, 14, 132, 1430],
    "Mo": [9, 323],
    "pRo": [6, 70, 924],
}


def test_family_word():
    assert family_word("rTL", 2) == (1, 2, 1, 2)
    assert family_word("TL", 2) == (0, 0, 0, 0)
    assert family_word("rMo", 1) == (1, 2)


@pytest.mark.parametrize("family", sorted(SIZES))
def test_sizes(family):
    for n, expected in enumerate(SIZES[family], start=1):
        table = enumerate_monoid(family, n)
        assert len(table) == expected
        assert combinat.monoid_size(family, n) == expected


def test_elements_sorted_and_valid():
    table = enumerate_monoid("rMo", 2)
    keys = [d.key for d in table.elements]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)
    for d in table.elements:
        check(d, "rMo")


def test_rtl_alpha_is_alternating():
    for n in range(1, 5):
        for d in enumerate_monoid("rTL", n).elements:
            assert d.k % 2 == 0 and 2 <= d.k <= 2 * n
            assert d.alpha == (1, 2) * (d.k // 2)


@pytest.mark.parametrize("family", [f.value for f in Family])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_closure(family, n):
    table = enumerate_monoid(family, n)
    if len(table) <= 2000:
        P = table.products()
        assert P.min() >= 0 and P.max() < len(table)
    else:
        rng = random.Random(n)
        for _ in range(3000):
            a, b = rng.choice(table.elements), rng.choice(table.elements)
            assert compose(a, b).key in table.index


def test_closure_matches_enumeration():
    table = enumerate_monoid("rpRo", 2)
    assert closure_from(table.elements) == set(table.index)


def test_batch_compose_matches_compose():
    table = enumerate_monoid("rMo", 2)
    els = table.elements
    pm = table.partner_matrix()
    rng = np.random.default_rng(0)
    a = rng.integers(0, len(els), 400)
    b = rng.integers(0, len(els), 400)
    out = batch_compose(pm[a], pm[b])
    for i in range(400):
        assert tuple(out[i]) == compose(els[a[i]], els[b[i]]).partner


def test_product_table_deterministic_across_threads():
    table = enumerate_monoid("rMo", 2)
    one = table.products(threads=1).copy()
    table._products = None
    assert np.array_equal(one, table.products(threads=4))


def test_product_convention():
    table = enumerate_monoid("rTL", 2)
    P = table.products()
    e = table.identity_id
    assert all(P[e, x] == x and P[x, e] == x for x in range(len(table)))
    x, y = 0, 1
    assert table.elements[P[x, y]] == compose(table.elements[y], table.elements[x])


def test_export_import_round_trip():
    table = enumerate_monoid("rTL", 3)
    buf = io.StringIO()
    assert export_elements(table, buf) == 10
    lines = buf.getvalue().splitlines()
    assert lines[0] == "# family=rTL n=3 count=10"
    assert len(set(lines[1:])) == 10
    again = import_elements(io.StringIO(buf.getvalue()))
    assert again.elements == table.elements


def test_rtl1_export_is_identity():
    buf = io.StringIO()
    export_elements(enumerate_monoid("rTL", 1), buf)
    assert buf.getvalue().splitlines()[1] == "1,2;1,2;T(1,1) T(2,2)"
    assert enumerate_monoid("rTL", 1).elements == [identity((1, 2))]


def test_budget():
    with pytest.raises(BudgetExceeded) as err:
        enumerate_monoid("rMo", 4, budget=1000)
    assert err.value.predicted == 15465
