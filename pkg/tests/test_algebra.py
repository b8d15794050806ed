import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from naryd.algebra import (
    AlgebraError,
    LinearMap,
    NAryAlgebra,
    algebra_from_json,
    algebra_to_json,
    bracket,
    check_filippov,
    check_nary_malcev,
    commutator,
    jacobian,
    load_algebra,
    permutation_sign,
    random_algebra,
    right_mul,
)
from naryd.catalog import FamilySpec, build_family, build_m8


def corrupted_d3():
    alg = build_family(FamilySpec("Dr", 3, r=3))
    s = alg.products()
    key = (0, 1, 3)
    s[key] = tuple(c + (1 if j == 0 else 0) for j, c in enumerate(s[key]))
    return alg.with_structure(s, "D3 corrupted")


def vectors(d, k, rng):
    return [tuple(F(rng.randint(-3, 3)) for _ in range(d)) for _ in range(k)]


def malcev_defect(alg, z, xs, ys):
    # direct form: J(z R_x, x_2..; y) + J(z, x_2..; y) R_x
    rx = right_mul(alg, xs)
    left = jacobian(alg, [rx.apply(z), *xs], ys)
    right = rx.apply(jacobian(alg, [z, *xs], ys))
    return tuple(a + b for a, b in zip(left, right))


def test_permutation_sign():
    assert permutation_sign((0, 1, 2)) == 1
    assert permutation_sign((1, 0, 2)) == -1
    assert permutation_sign((2, 0, 1)) == 1
    assert permutation_sign((1, 1, 0)) == 0


def test_linear_map_conventions():
    a = LinearMap(((1, 2), (0, 1)))
    b = LinearMap(((0, 1), (1, 0)))
    x = (F(1), F(0))
    assert a.apply(x) == (1, 2)
    assert a.then(b).apply(x) == b.apply(a.apply(x))
    assert commutator(a, a).is_zero()
    assert LinearMap.from_flat(2, a.flat()) == a
    with pytest.raises(AlgebraError):
        LinearMap(((1, 2),))


def test_bracket_is_antisymmetric_and_multilinear():
    rng = random.Random(5)
    alg = random_algebra(rng, 3, 4)
    x, y, z, w = vectors(4, 4, rng)
    assert bracket(alg, [x, y, z]) == tuple(-c for c in bracket(alg, [y, x, z]))
    assert not any(bracket(alg, [x, x, z]))
    s = tuple(a + 2 * b for a, b in zip(x, w))
    lhs = bracket(alg, [s, y, z])
    rhs = tuple(a + 2 * b for a, b in zip(bracket(alg, [x, y, z]), bracket(alg, [w, y, z])))
    assert lhs == rhs


def test_structure_validation():
    with pytest.raises(AlgebraError, match="strictly increasing"):
        NAryAlgebra(2, 2, (), (((1, 0), (1, 0)),))
    with pytest.raises(AlgebraError, match="out of range"):
        NAryAlgebra(2, 2, (), (((0, 2), (1, 0)),))
    with pytest.raises(AlgebraError, match="duplicate"):
        NAryAlgebra(2, 2, (), (((0, 1), (1, 0)), ((0, 1), (0, 1))))
    with pytest.raises(AlgebraError, match="arity"):
        NAryAlgebra(2, 3, (), (((0, 1, 2), (1, 0, 0)),))


def test_json_round_trip(tmp_path):
    alg = build_family(FamilySpec("C2", 3, beta=F(3, 2)))
    data = algebra_to_json(alg)
    back = algebra_from_json(json.dumps(data))
    assert back.structure == alg.structure
    path = tmp_path / "c2.json"
    path.write_text(json.dumps(data))
    assert load_algebra(str(path)).structure == alg.structure


@pytest.mark.parametrize("text, match", [
    ("not json", "invalid JSON"),
    ("[1, 2]", "must be an object"),
    ('{"arity": 3}', "integer 'arity' and 'dim'"),
    ('{"arity": 2, "dim": 2, "products": [{"args": [1, 0], "value": {"0": "1"}}]}', "strictly increasing"),
    ('{"arity": 2, "dim": 2, "products": [{"args": [0, 1], "value": {"5": "1"}}]}', "out of range"),
    ('{"arity": 2, "dim": 2, "products": [{"args": [0, 1], "value": {"0": "x"}}]}', "not a rational"),
    ('{"arity": 2, "dim": 2, "products": [{"args": [0, 7], "value": {"0": "1"}}]}', "out of range"),
])
def test_loader_rejects(text, match):
    with pytest.raises(AlgebraError, match=match):
        algebra_from_json(text)


def test_load_missing_file(tmp_path):
    with pytest.raises(AlgebraError, match="cannot read"):
        load_algebra(str(tmp_path / "nope.json"))


def test_filippov_detects_corruption():
    assert check_filippov(build_family(FamilySpec("Dr", 3, r=3))) == []
    bad = check_filippov(corrupted_d3())
    assert bad
    v = bad[0]
    xs = [tuple(F(int(i == k)) for i in range(4)) for k in v.args["x"]]
    ys = [tuple(F(int(i == k)) for i in range(4)) for k in v.args["y"]]
    assert jacobian(corrupted_d3(), xs, ys) == v.value


def test_m8_is_malcev_not_filippov():
    m8 = build_m8()
    assert check_nary_malcev(m8) == []
    assert len(check_filippov(m8, limit=1)) == 1


def test_malcev_agrees_with_direct_evaluation():
    rng = random.Random(11)
    m8 = build_m8()
    for _ in range(5):
        z, x2, x3, y2, y3 = vectors(8, 5, rng)
        assert not any(malcev_defect(m8, z, [x2, x3], [y2, y3]))
    bad = corrupted_d3()
    assert check_nary_malcev(bad)
    hits = 0
    for _ in range(10):
        z, x2, x3, y2, y3 = vectors(4, 5, rng)
        hits += any(malcev_defect(bad, z, [x2, x3], [y2, y3]))
    assert hits


def test_malcev_witness_is_real():
    bad = corrupted_d3()
    v = check_nary_malcev(bad, limit=1)[0]
    d = bad.dim

    def vec(label):
        return tuple(F(label.count(i)) for i in range(d))

    z = vec([v.args["z"]])
    xs = [vec(lab) for lab in v.args["x"]]
    ys = [vec([i]) for i in v.args["y"]]
    assert any(malcev_defect(bad, z, xs, ys))


@given(st.integers(0, 10_000))
@settings(max_examples=15, deadline=None)
def test_random_lie_brackets_are_malcev(seed):
    # binary Lie algebras (Filippov with n = 2) satisfy the Malcev identity
    rng = random.Random(seed)
    so3 = NAryAlgebra(2, 3, (), {(0, 1): (0, 0, 1), (0, 2): (0, -1, 0), (1, 2): (1, 0, 0)})
    assert check_filippov(so3) == []
    assert check_nary_malcev(so3) == []
    alg = random_algebra(rng, 2, 3)
    if not check_filippov(alg):
        assert check_nary_malcev(alg) == []
