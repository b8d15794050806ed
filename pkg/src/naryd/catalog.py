"""Constructors for the (n+1)-dimensional Filippov families, the octonions and M8."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .algebra import AlgebraError, LinearMap, NAryAlgebra, Vector, basis_vector
from .linalg import ZERO, format_rational, parse_rational

FAMILIES = ("A1", "B1", "B2", "C1", "C2", "Dr", "M8")
OCTONION_BASIS = ("1", "a", "b", "ab", "c", "ac", "bc", "abc")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int = 3
    alpha: Fraction | None = None
    beta: Fraction | None = None
    r: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise AlgebraError(f"unknown family {self.family!r}; expected one of {', '.join(FAMILIES)}")
        if self.family == "M8":
            if self.n != 3:
                raise AlgebraError("M8 is ternary: n must be 3")
            return
        if self.n < 2:
            raise AlgebraError("arity n must be at least 2")
        if self.family == "C1":
            if self.alpha is None or self.alpha == 0:
                raise AlgebraError("C1 requires alpha != 0")
        if self.family == "C2":
            if self.beta is None or self.beta == 0:
                raise AlgebraError("C2 requires beta != 0")
        if self.family == "Dr":
            if self.r is None or not 3 <= self.r <= self.n + 1:
                raise AlgebraError(f"Dr requires 3 <= r <= n+1 = {self.n + 1}")

    @property
    def dim(self) -> int:
        return 8 if self.family == "M8" else self.n + 1

    @property
    def is_simple(self) -> bool:
        return self.family == "M8" or (self.family == "Dr" and self.r == self.n + 1)

    def __str__(self) -> str:
        if self.family == "M8":
            return "M8"
        parts = [f"n={self.n}"]
        if self.family == "C1":
            parts.append(f"alpha={format_rational(self.alpha)}")
        if self.family == "C2":
            parts.append(f"beta={format_rational(self.beta)}")
        if self.family == "Dr":
            parts.append(f"r={self.r}")
        return f"{self.family}:{','.join(parts)}"


_SPEC_RE = re.compile(r"^\s*([A-Za-z0-9]+)\s*(?::(.*))?$")


def parse_family_spec(text: str, alpha=None, beta=None) -> FamilySpec:
    """Parse ``"C2:n=3,beta=3/2"``-style strings.

    ``alpha``/``beta`` fill in a parameter the string leaves out.
    """
    m = _SPEC_RE.match(text or "")
    if not m:
        raise AlgebraError(f"cannot parse family spec {text!r}")
    family = m.group(1)
    if family.lower() == "m8":
        return FamilySpec("M8")
    if family not in FAMILIES:
        raise AlgebraError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    fields: dict[str, str] = {}
    for part in filter(None, (p.strip() for p in (m.group(2) or "").split(","))):
        key, sep, value = part.partition("=")
        if not sep:
            raise AlgebraError(f"expected key=value in {part!r}")
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"n", "alpha", "beta", "r"}
    if unknown:
        raise AlgebraError(f"unknown parameter(s) {sorted(unknown)} in {text!r}")
    try:
        n = int(fields["n"]) if "n" in fields else 3
        r = int(fields["r"]) if "r" in fields else None
        a = parse_rational(fields["alpha"]) if "alpha" in fields else alpha
        b = parse_rational(fields["beta"]) if "beta" in fields else beta
    except ValueError as exc:
        raise AlgebraError(f"bad parameter in {text!r}: {exc}") from exc
    if family == "C1" and a is None:
        a = Fraction(2)
    if family == "C2" and b is None:
        b = Fraction(3, 2)
    return FamilySpec(
        family,
        n,
        alpha=Fraction(a) if family == "C1" else None,
        beta=Fraction(b) if family == "C2" else None,
        r=r if family == "Dr" else None,
    )


def _omit(d: int, i: int) -> tuple[int, ...]:
    return tuple(k for k in range(d) if k != i)


def _vec(d: int, coords: dict[int, Fraction]) -> Vector:
    return tuple(Fraction(coords.get(k, 0)) for k in range(d))


def build_family(spec: FamilySpec) -> NAryAlgebra:
    """Algebra of the given family with basis e1..e_{n+1} (0-based indices)."""
    if spec.family == "M8":
        return build_m8()
    n = spec.n
    d = n + 1
    s: dict[tuple[int, ...], Vector] = {}
    if spec.family == "B1":
        s[_omit(d, 0)] = _vec(d, {0: 1})
    elif spec.family == "B2":
        s[_omit(d, n)] = _vec(d, {0: 1})
    elif spec.family == "C1":
        s[_omit(d, n - 1)] = _vec(d, {n - 1: 1})
        s[_omit(d, n)] = _vec(d, {n: spec.alpha})
    elif spec.family == "C2":
        s[_omit(d, n - 1)] = _vec(d, {n - 1: 1, n: spec.beta})
        s[_omit(d, n)] = _vec(d, {n: 1})
    elif spec.family == "Dr":
        for i in range(spec.r):
            s[_omit(d, i)] = _vec(d, {i: 1})
    return NAryAlgebra(n, d, tuple(f"e{i + 1}" for i in range(d)), tuple(s.items()), name=str(spec))


# ---------------------------------------------------------------------------
# octonions
# ---------------------------------------------------------------------------

def _cd_conj(x: Sequence[Fraction]) -> list[Fraction]:
    if len(x) == 1:
        return [x[0]]
    h = len(x) // 2
    return _cd_conj(x[:h]) + [-c for c in x[h:]]


def _cd_mul(x: Sequence[Fraction], y: Sequence[Fraction]) -> list[Fraction]:
    # (p, q)(r, s) = (pr - s*q, sp + qr*), i.e. doubling parameter -1
    if len(x) == 1:
        return [x[0] * y[0]]
    h = len(x) // 2
    p, q, r, s = x[:h], x[h:], y[:h], y[h:]
    first = [u - v for u, v in zip(_cd_mul(p, r), _cd_mul(_cd_conj(s), q))]
    second = [u + v for u, v in zip(_cd_mul(s, p), _cd_mul(q, _cd_conj(r)))]
    return first + second


@dataclass(frozen=True)
class CompositionAlgebra:
    """Eight-dimensional composition algebra with basis 1, a, b, ab, c, ac, bc, abc.

    Coordinate k corresponds to the Cayley-Dickson position k, so the bits of
    k record which of a, b, c are present (abc meaning (ab)c).
    """

    table: tuple[tuple[Vector, ...], ...]
    conjugation: LinearMap
    basis: tuple[str, ...] = OCTONION_BASIS

    @property
    def dim(self) -> int:
        return len(self.basis)

    def e(self, i: int) -> Vector:
        return basis_vector(self.dim, i)

    def mul(self, x: Sequence, y: Sequence) -> Vector:
        d = self.dim
        out = [ZERO] * d
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                ab = a * b
                for k, c in enumerate(self.table[i][j]):
                    if c:
                        out[k] += ab * c
        return tuple(out)

    def conj(self, x: Sequence) -> Vector:
        return self.conjugation.apply(x)

    def norm(self, x: Sequence) -> Fraction:
        return self.mul(x, self.conj(x))[0]

    def table_json(self) -> dict:
        """The multiplication table in the algebra JSON layout (all ordered pairs)."""
        return {
            "arity": 2,
            "dim": self.dim,
            "basis": list(self.basis),
            "products": [
                {
                    "args": [i, j],
                    "value": {str(k): format_rational(c) for k, c in enumerate(self.table[i][j]) if c},
                }
                for i in range(self.dim)
                for j in range(self.dim)
            ],
        }


@lru_cache(maxsize=None)
def build_octonions() -> CompositionAlgebra:
    d = 8
    es = [[Fraction(int(k == i)) for k in range(d)] for i in range(d)]
    table = tuple(tuple(tuple(_cd_mul(es[i], es[j])) for j in range(d)) for i in range(d))
    conj = LinearMap(tuple(tuple(_cd_conj(es[i])) for i in range(d)))
    return CompositionAlgebra(table, conj)


def bilinear_form(x: Sequence, y: Sequence, octo: CompositionAlgebra | None = None) -> Fraction:
    """``(x, y) = (x y* + y x*) / 2``, returned as its coefficient of 1."""
    octo = octo or build_octonions()
    s = [u + v for u, v in zip(octo.mul(x, octo.conj(y)), octo.mul(y, octo.conj(x)))]
    if any(s[1:]):
        raise ArithmeticError("form value is not a scalar; the table is not a composition algebra")
    return s[0] / 2


def ternary_product(x: Sequence, y: Sequence, z: Sequence, octo: CompositionAlgebra | None = None) -> Vector:
    """``[x, y, z] = (x y*) z - (y, z) x + (x, z) y - (x, y) z``."""
    octo = octo or build_octonions()
    out = list(octo.mul(octo.mul(x, octo.conj(y)), z))
    for coef, v in ((-bilinear_form(y, z, octo), x), (bilinear_form(x, z, octo), y), (-bilinear_form(x, y, octo), z)):
        if coef:
            for k, c in enumerate(v):
                out[k] += coef * c
    return tuple(out)


@lru_cache(maxsize=None)
def build_m8() -> NAryAlgebra:
    octo = build_octonions()
    d = octo.dim
    s = {key: ternary_product(*(octo.e(i) for i in key), octo=octo) for key in combinations(range(d), 3)}
    return NAryAlgebra(3, d, octo.basis, tuple(s.items()), name="M8")


def build(spec: FamilySpec | str) -> NAryAlgebra:
    if isinstance(spec, str):
        spec = parse_family_spec(spec)
    return build_family(spec)


def family_grid(ns: Sequence[int] = (2, 3, 4, 5), alphas=(1, 2, -3), betas=(1, Fraction(3, 2), -2)) -> list[FamilySpec]:
    """Every family instance on a parameter grid (all legal r)."""
    out = []
    for n in ns:
        out.append(FamilySpec("A1", n))
        out.append(FamilySpec("B1", n))
        out.append(FamilySpec("B2", n))
        out.extend(FamilySpec("C1", n, alpha=Fraction(a)) for a in alphas)
        out.extend(FamilySpec("C2", n, beta=Fraction(b)) for b in betas)
        out.extend(FamilySpec("Dr", n, r=r) for r in range(3, n + 2))
    return out
