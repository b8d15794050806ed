"""Finite-dimensional anticommutative n-ary algebras given by structure constants."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations, combinations_with_replacement, permutations, product
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .linalg import ZERO, format_rational, parse_rational

Vector = tuple  # tuple[Fraction, ...]


class AlgebraError(ValueError):
    """Invalid algebra data or arguments of the wrong shape."""


def basis_vector(d: int, i: int) -> Vector:
    return tuple(Fraction(1) if k == i else ZERO for k in range(d))


def zero_vector(d: int) -> Vector:
    return (ZERO,) * d


def vadd(u: Sequence, v: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Sequence) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in u)


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if an entry repeats)."""
    inversions = 0
    n = len(seq)
    for i in range(n):
        for j in range(i + 1, n):
            if seq[i] == seq[j]:
                return 0
            if seq[i] > seq[j]:
                inversions += 1
    return -1 if inversions & 1 else 1


@dataclass(frozen=True)
class LinearMap:
    """Square matrix acting on row vectors: ``[phi(x)] = [x][phi]``."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(Fraction(x) for x in r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise AlgebraError("linear map must be square")
        object.__setattr__(self, "rows", rows)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @classmethod
    def zero(cls, d: int) -> "LinearMap":
        return cls(tuple((ZERO,) * d for _ in range(d)))

    @classmethod
    def identity(cls, d: int) -> "LinearMap":
        return cls(tuple(basis_vector(d, i) for i in range(d)))

    @classmethod
    def from_flat(cls, d: int, flat: Sequence) -> "LinearMap":
        if len(flat) != d * d:
            raise AlgebraError(f"expected {d * d} entries, got {len(flat)}")
        return cls(tuple(tuple(flat[i * d:(i + 1) * d]) for i in range(d)))

    def flat(self) -> tuple[Fraction, ...]:
        return tuple(x for r in self.rows for x in r)

    def apply(self, v: Sequence) -> Vector:
        d = self.dim
        out = [ZERO] * d
        for i, c in enumerate(v):
            if c:
                for j, m in enumerate(self.rows[i]):
                    if m:
                        out[j] += c * m
        return tuple(out)

    def then(self, other: "LinearMap") -> "LinearMap":
        """``x -> other(self(x))``, i.e. the matrix product self @ other."""
        return LinearMap(tuple(other.apply(r) for r in self.rows))

    def __add__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(tuple(vadd(a, b) for a, b in zip(self.rows, other.rows)))

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return LinearMap(tuple(vsub(a, b) for a, b in zip(self.rows, other.rows)))

    def scaled(self, c) -> "LinearMap":
        return LinearMap(tuple(vscale(c, r) for r in self.rows))

    def is_zero(self) -> bool:
        return not any(x for r in self.rows for x in r)

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.dim)), ZERO)

    def to_wire(self) -> list[list[str]]:
        return [[format_rational(x) for x in r] for r in self.rows]


def commutator(a: LinearMap, b: LinearMap) -> LinearMap:
    """Operator commutator ``z -> z a b - z b a``."""
    return a.then(b) - b.then(a)


@dataclass(frozen=True)
class NAryAlgebra:
    """Anticommutative n-ary algebra.

    ``structure`` maps strictly increasing index tuples to the coordinates of
    the bracket of those basis vectors.  Any other ordering is recovered from
    the sorted key and the permutation sign; tuples with a repeated index are
    zero.
    """

    arity: int
    dim: int
    basis: tuple[str, ...]
    structure: tuple[tuple[tuple[int, ...], Vector], ...] = field(default=())
    name: str = ""

    def __post_init__(self):
        n, d = self.arity, self.dim
        if n < 2:
            raise AlgebraError("arity must be at least 2")
        if d < 1:
            raise AlgebraError("dimension must be at least 1")
        basis = tuple(self.basis) if self.basis else tuple(f"e{i + 1}" for i in range(d))
        if len(basis) != d:
            raise AlgebraError(f"expected {d} basis names, got {len(basis)}")
        items = self.structure.items() if isinstance(self.structure, dict) else self.structure
        clean: dict[tuple[int, ...], Vector] = {}
        for key, value in items:
            key = tuple(int(k) for k in key)
            if len(key) != n:
                raise AlgebraError(f"product key {list(key)} does not have arity {n}")
            if any(k < 0 or k >= d for k in key):
                raise AlgebraError(f"product key {list(key)} has an index out of range")
            if any(a >= b for a, b in zip(key, key[1:])):
                raise AlgebraError(f"product key {list(key)} is not strictly increasing")
            if key in clean:
                raise AlgebraError(f"duplicate product key {list(key)}")
            value = tuple(Fraction(x) for x in value)
            if len(value) != d:
                raise AlgebraError(f"product value for {list(key)} has wrong length")
            if any(value):
                clean[key] = value
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "structure", tuple(sorted(clean.items())))

    @cached_property
    def table(self) -> dict[tuple[int, ...], dict[int, Fraction]]:
        return {k: {j: c for j, c in enumerate(v) if c} for k, v in self.structure}

    def basis_bracket(self, idx: Sequence[int]) -> dict[int, Fraction]:
        """Sparse coordinates of the bracket of basis vectors ``idx``."""
        sign = permutation_sign(idx)
        if not sign:
            return {}
        sparse = self.table.get(tuple(sorted(idx)))
        if not sparse:
            return {}
        if sign > 0:
            return sparse
        return {j: -c for j, c in sparse.items()}

    def e(self, i: int) -> Vector:
        return basis_vector(self.dim, i)

    @cached_property
    def denominator(self) -> int:
        """Least common denominator of the structure constants."""
        return lcm(1, *(c.denominator for _, v in self.structure for c in v))

    @cached_property
    def int_tensor(self) -> np.ndarray:
        """Dense fully antisymmetric structure tensor scaled by ``denominator``.

        Axes are the n arguments followed by the output coordinate; entries
        are Python ints (object dtype) so nothing can overflow.
        """
        n, d, m = self.arity, self.dim, self.denominator
        t = np.zeros((d,) * (n + 1), dtype=object)
        t[...] = 0
        for key, value in self.structure:
            for perm in _permutations_with_sign(key):
                idx, sign = perm
                for j, c in enumerate(value):
                    if c:
                        t[idx + (j,)] = sign * int(c * m)
        return t

    def with_structure(self, structure: dict, name: str = "") -> "NAryAlgebra":
        return NAryAlgebra(self.arity, self.dim, self.basis, tuple(structure.items()), name)

    def products(self) -> dict[tuple[int, ...], Vector]:
        return dict(self.structure)


def _permutations_with_sign(key: tuple[int, ...]):
    for perm in permutations(key):
        yield perm, permutation_sign(perm)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _check_vectors(alg: NAryAlgebra, vs: Sequence[Sequence], count: int, what: str):
    if len(vs) != count:
        raise AlgebraError(f"{what} expects {count} arguments, got {len(vs)}")
    for v in vs:
        if len(v) != alg.dim:
            raise AlgebraError(f"{what}: vector of length {len(v)} in a {alg.dim}-dimensional algebra")


def bracket(alg: NAryAlgebra, args: Sequence[Sequence]) -> Vector:
    """Multilinear antisymmetric product of ``n`` vectors."""
    _check_vectors(alg, args, alg.arity, "bracket")
    supports = [[(i, Fraction(c)) for i, c in enumerate(v) if c] for v in args]
    out = [ZERO] * alg.dim
    for choice in product(*supports):
        idx = [i for i, _ in choice]
        res = alg.basis_bracket(idx)
        if not res:
            continue
        coef = Fraction(1)
        for _, c in choice:
            coef *= c
        for j, c in res.items():
            out[j] += coef * c
    return tuple(out)


def right_mul(alg: NAryAlgebra, fixed: Sequence[Sequence]) -> LinearMap:
    """Matrix of ``z -> [z, fixed...]``."""
    _check_vectors(alg, fixed, alg.arity - 1, "right_mul")
    d = alg.dim
    return LinearMap(tuple(bracket(alg, [basis_vector(d, i), *fixed]) for i in range(d)))


def jacobian(alg: NAryAlgebra, xs: Sequence[Sequence], ys: Sequence[Sequence]) -> Vector:
    """``[[x_1..x_n], y_2..y_n] - sum_i [x_1.., [x_i, y_2..y_n], ..x_n]``."""
    n = alg.arity
    _check_vectors(alg, xs, n, "jacobian (x arguments)")
    _check_vectors(alg, ys, n - 1, "jacobian (y arguments)")
    out = bracket(alg, [bracket(alg, xs), *ys])
    for i in range(n):
        inner = bracket(alg, [xs[i], *ys])
        if any(inner):
            out = vsub(out, bracket(alg, [*xs[:i], inner, *xs[i + 1:]]))
    return out


@dataclass(frozen=True)
class Violation:
    """Witness of a failed identity: argument labels and the nonzero defect."""

    args: dict
    value: Vector

    def to_json(self) -> dict:
        return {"args": self.args, "value": [format_rational(x) for x in self.value]}


def check_filippov(alg: NAryAlgebra, limit: int | None = None) -> list[Violation]:
    """Basis tuples on which the n-ary Jacobian does not vanish.

    J is multilinear and antisymmetric in the x arguments, so strictly
    increasing x tuples and non-decreasing y tuples cover everything.
    """
    n, d = alg.arity, alg.dim
    found: list[Violation] = []
    es = [alg.e(i) for i in range(d)]
    for xi in combinations(range(d), n):
        xs = [es[i] for i in xi]
        for yi in combinations_with_replacement(range(d), n - 1):
            val = jacobian(alg, xs, [es[i] for i in yi])
            if any(val):
                found.append(Violation({"x": list(xi), "y": list(yi)}, val))
                if limit is not None and len(found) >= limit:
                    return found
    return found


# ---------------------------------------------------------------------------
# n-ary Malcev identity
# ---------------------------------------------------------------------------

def polarization_set(d: int) -> list[tuple[int, ...]]:
    """Index labels of the vectors e_p and e_p + e_q (p < q)."""
    return [(p,) for p in range(d)] + list(combinations(range(d), 2))


def _label_vector(d: int, label: tuple[int, ...]) -> np.ndarray:
    v = np.zeros(d, dtype=object)
    v[...] = 0
    for p in label:
        v[p] = 1
    return v


def check_nary_malcev(alg: NAryAlgebra, limit: int | None = None) -> list[Violation]:
    """Witnesses of ``-J(zR_x, x_2..; y) = J(z, x_2..; y) R_x`` failing.

    Writing ``J(z, x_2..x_n; y) = z K(x; y)`` the identity is
    ``R_x K + K R_x = 0``.  It is linear in z and the y's but quadratic in
    each x_i, so the x_i range over ``e_p`` and ``e_p + e_q``; a form that is
    quadratic in each variable and vanishes there vanishes everywhere
    (characteristic 0).  The identity is symmetric in the x's and alternating
    in the y's, hence multisets of x labels and increasing y tuples.
    """
    n, d = alg.arity, alg.dim
    m = alg.denominator
    t = alg.int_tensor
    biggest = max((abs(int(c)) for c in t.flat), default=0)
    # crude bound on |R_x K| entries: keeps int64 exact, otherwise Python ints
    bound = 4 * d**3 * (biggest * 2 ** n * d) ** 3
    t = t.astype(np.int64) if bound < 2**62 else t
    labels = polarization_set(d)
    xvec = {lab: _label_vector(d, lab).astype(t.dtype) for lab in labels}
    ytuples = list(combinations(range(d), n - 1))
    ymat = np.zeros((len(ytuples), n - 1, d), dtype=t.dtype)
    for a, yi in enumerate(ytuples):
        for b, i in enumerate(yi):
            ymat[a, b, i] = 1

    def rmul(vs):
        # z -> [z, v_2..v_n] as a (z, out) matrix
        out = t
        for v in reversed(vs):
            out = np.tensordot(out, v, axes=([out.ndim - 2], [0]))
        return out

    # R_y for every y tuple, stacked: (Y, z, out)
    ry = np.stack([rmul(list(ymat[a])) for a in range(len(ytuples))])
    # [w, y_2..y_n] for every y tuple as a (Y, w, out) stack
    ybr = ry

    scale = Fraction(1, m**3)
    found: list[Violation] = []
    for xl in combinations_with_replacement(labels, n - 1):
        xs = [xvec[lab] for lab in xl]
        rx = rmul(xs)
        if not rx.any():
            continue
        k = np.matmul(rx, ry) - np.matmul(ry, rx)
        for i in range(n - 1):
            # w -> R_{x_2.. w ..x_n}, as (z, w, out)
            partial = t
            for pos in range(n - 1, 0, -1):
                if pos - 1 == i:
                    continue
                partial = np.tensordot(partial, xs[pos - 1], axes=([pos], [0]))
            inner = np.einsum("w,ywo->yo", xs[i], ybr)
            k = k - np.einsum("zwo,yw->yzo", partial, inner)
        anti = np.matmul(rx, k) + np.matmul(k, rx)
        if not anti.any():
            continue
        for a, z in zip(*np.nonzero(anti.any(axis=2))):
            row = anti[a, z]
            value = tuple(Fraction(int(c)) * scale for c in row)
            found.append(Violation(
                {"z": int(z), "x": [list(lab) for lab in xl], "y": list(ytuples[a])}, value))
            if limit is not None and len(found) >= limit:
                return found
    found.sort(key=lambda v: (v.args["x"], v.args["y"], v.args["z"]))
    return found


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def algebra_to_json(alg: NAryAlgebra) -> dict:
    return {
        "arity": alg.arity,
        "dim": alg.dim,
        "basis": list(alg.basis),
        "products": [
            {
                "args": list(key),
                "value": {str(j): format_rational(c) for j, c in enumerate(value) if c},
            }
            for key, value in alg.structure
        ],
    }


def algebra_from_json(data: dict | str) -> NAryAlgebra:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise AlgebraError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(data, dict):
        raise AlgebraError("algebra JSON must be an object")
    try:
        n = int(data["arity"])
        d = int(data["dim"])
    except (KeyError, TypeError, ValueError) as exc:
        raise AlgebraError("algebra JSON needs integer 'arity' and 'dim'") from exc
    if d < 1:
        raise AlgebraError("dimension must be at least 1")
    basis = data.get("basis") or [f"e{i + 1}" for i in range(d)]
    if not isinstance(basis, list) or not all(isinstance(b, str) for b in basis):
        raise AlgebraError("'basis' must be a list of strings")
    products = data.get("products", [])
    if not isinstance(products, list):
        raise AlgebraError("'products' must be a list")
    structure = []
    for entry in products:
        if not isinstance(entry, dict) or "args" not in entry:
            raise AlgebraError("each product needs 'args' and 'value'")
        args = entry["args"]
        if not isinstance(args, list) or not all(isinstance(a, int) for a in args):
            raise AlgebraError(f"product args must be a list of integers: {args!r}")
        raw = entry.get("value", {})
        if not isinstance(raw, dict):
            raise AlgebraError("product value must be an object {index: rational}")
        value = [ZERO] * d
        for j, c in raw.items():
            try:
                jj = int(j)
            except ValueError as exc:
                raise AlgebraError(f"bad output index {j!r}") from exc
            if not 0 <= jj < d:
                raise AlgebraError(f"output index {jj} out of range")
            try:
                value[jj] = parse_rational(c)
            except ValueError as exc:
                raise AlgebraError(str(exc)) from exc
        structure.append((tuple(args), tuple(value)))
    return NAryAlgebra(n, d, tuple(basis), tuple(structure))


def load_algebra(path: str) -> NAryAlgebra:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise AlgebraError(f"cannot read {path}: {exc.strerror}") from exc
    alg = algebra_from_json(text)
    return replace(alg, name=os.path.basename(path))


def random_algebra(rng, arity: int, dim: int, density: float = 0.7, span: int = 3) -> NAryAlgebra:
    """Random antisymmetric structure constants with small rational entries."""
    structure = {}
    for key in combinations(range(dim), arity):
        structure[key] = tuple(
            Fraction(rng.randint(-span, span), rng.randint(1, 2)) if rng.random() < density else ZERO
            for _ in range(dim)
        )
    return NAryAlgebra(arity, dim, (), tuple(structure.items()), name="random")


def iter_basis_tuples(d: int, n: int) -> Iterable[tuple[int, ...]]:
    return combinations(range(d), n)
