import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naryd.algebra import AlgebraError, bracket
from naryd.catalog import (
    bilinear_form,
    build,
    build_m8,
    build_octonions,
    family_grid,
    parse_family_spec,
    ternary_product,
)

octo_vec = st.lists(st.integers(-3, 3), min_size=8, max_size=8).map(lambda v: tuple(map(F, v)))


@pytest.mark.parametrize("text", ["A1:n=4", "B1:n=3", "B2:n=5", "C1:n=4,alpha=2", "C2:n=3,beta=3/2",
                                  "Dr:n=5,r=3", "M8"])
def test_spec_round_trip(text):
    assert str(parse_family_spec(text)) == text


def test_spec_defaults_and_overrides():
    assert parse_family_spec("C2:n=3").beta == F(3, 2)
    assert parse_family_spec("C1:n=3").alpha == 2
    assert parse_family_spec("C1:n=3", alpha=F(-3)).alpha == -3
    assert parse_family_spec("C2:n=3,beta=−2").beta == -2


@pytest.mark.parametrize("text, match", [
    ("X9:n=3", "unknown family"),
    ("C2:n=3,beta=0", "beta != 0"),
    ("Dr:n=3,r=5", "r <= n\\+1"),
    ("Dr:n=3", "Dr requires"),
    ("A1:n=1", "at least 2"),
    ("A1:n=3,q=1", "unknown parameter"),
    ("A1:n", "key=value"),
    ("A1:n=x", "bad parameter"),
])
def test_spec_errors(text, match):
    with pytest.raises(AlgebraError, match=match):
        parse_family_spec(text)


def test_family_tables():
    c1 = build("C1:n=3,alpha=2")
    assert c1.table == {(0, 1, 3): {2: 1}, (0, 1, 2): {3: 2}}
    c2 = build("C2:n=2,beta=3/2")
    assert c2.table == {(0, 2): {1: 1, 2: F(3, 2)}, (0, 1): {2: 1}}
    d = build("Dr:n=3,r=3")
    assert d.table == {(1, 2, 3): {0: 1}, (0, 2, 3): {1: 1}, (0, 1, 3): {2: 1}}
    assert build("A1:n=3").structure == ()
    assert build("B1:n=2").table == {(1, 2): {0: 1}}
    assert build("B2:n=2").table == {(0, 1): {0: 1}}


def test_grid_covers_all_legal_r():
    grid = family_grid()
    assert sum(s.family == "Dr" for s in grid) == 1 + 2 + 3 + 4  # r = 3..n+1 for n = 2..5
    assert [s.is_simple for s in grid if s.family == "Dr" and s.n == 4] == [False, False, True]


def test_octonion_basis_order():
    o = build_octonions()
    a, b, c = o.e(1), o.e(2), o.e(4)
    assert o.mul(a, b) == o.e(3)
    assert o.mul(a, c) == o.e(5)
    assert o.mul(b, c) == o.e(6)
    assert o.mul(o.mul(a, b), c) == o.e(7)
    for i in range(1, 8):
        assert o.mul(o.e(i), o.e(i)) == tuple(-o.e(0)[k] for k in range(8))


@given(octo_vec, octo_vec)
@settings(max_examples=40, deadline=None)
def test_octonions_composition_and_alternative(x, y):
    o = build_octonions()
    assert o.norm(o.mul(x, y)) == o.norm(x) * o.norm(y)
    assert o.mul(o.mul(x, x), y) == o.mul(x, o.mul(x, y))
    assert o.mul(o.mul(y, x), x) == o.mul(y, o.mul(x, x))
    assert bilinear_form(x, y) == bilinear_form(y, x)


def test_octonions_not_associative():
    o = build_octonions()
    a, b, c = o.e(1), o.e(2), o.e(4)
    assert o.mul(o.mul(a, b), c) != o.mul(a, o.mul(b, c))


def test_table_json_layout():
    tj = build_octonions().table_json()
    assert tj["arity"] == 2 and tj["dim"] == 8 and len(tj["products"]) == 64
    assert tj["products"][1 * 8 + 2] == {"args": [1, 2], "value": {"3": "1"}}


def test_m8_bracket_matches_formula_and_is_alternating():
    rng = random.Random(3)
    m8 = build_m8()
    for _ in range(5):
        x, y, z = (tuple(F(rng.randint(-2, 2)) for _ in range(8)) for _ in range(3))
        assert bracket(m8, [x, y, z]) == ternary_product(x, y, z)
        assert not any(ternary_product(x, x, z))
        assert ternary_product(x, y, z) == tuple(-c for c in ternary_product(y, x, z))
        assert ternary_product(x, y, z) == tuple(-c for c in ternary_product(x, z, y))
