"""Exact linear algebra over Q and over Q[delta].

Scalars are :class:`fractions.Fraction`.  Matrices are plain lists of rows.
Polynomials in the parameter delta are :class:`DeltaPoly`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction
Matrix = list  # list[list[Fraction]] or list[list[DeltaPoly]]

ZERO = Fraction(0)
ONE = Fraction(1)

# ---------------------------------------------------------------------------
# rationals
# ---------------------------------------------------------------------------

def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` or ``"p"``; a Unicode minus sign is accepted."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    s = str(text).strip().replace("−", "-")
    if not s:
        raise ValueError("empty rational")
    try:
        num, sep, den = s.partition("/")
        if sep:
            d = int(den)
            if d == 0:
                raise ValueError(f"zero denominator in {text!r}")
            return Fraction(int(num), d)
        return Fraction(int(num))
    except ValueError as exc:
        raise ValueError(f"not a rational: {text!r}") from exc

def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"

# ---------------------------------------------------------------------------
# polynomials in delta
# ---------------------------------------------------------------------------

def _trim(coeffs: Iterable) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)

@dataclass(frozen=True)
class DeltaPoly:
    """Univariate polynomial in delta, coefficients lowest degree first."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @classmethod
    def const(cls, c) -> "DeltaPoly":
        return cls((Fraction(c),))

    @classmethod
    def linear(cls, c0, c1) -> "DeltaPoly":
        """``c0 + c1*delta``."""
        return cls((Fraction(c0), Fraction(c1)))

    @classmethod
    def delta(cls) -> "DeltaPoly":
        return cls((ZERO, ONE))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else ZERO

    def __call__(self, x) -> Fraction:
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @staticmethod
    def _lift(other) -> "DeltaPoly":
        if isinstance(other, DeltaPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return DeltaPoly((Fraction(other),))
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return DeltaPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return DeltaPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return DeltaPoly()
        if len(b) == 1:
            c = b[0]
            return DeltaPoly(tuple(x * c for x in a))
        if len(a) == 1:
            c = a[0]
            return DeltaPoly(tuple(x * c for x in b))
        out = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return DeltaPoly(out)

    __rmul__ = __mul__

    def __divmod__(self, other):
        other = self._lift(other)
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        dq = other.degree
        lead = other.lead
        if len(rem) - 1 < dq:
            return DeltaPoly(), self
        quot = [ZERO] * (len(rem) - dq)
        for k in range(len(rem) - 1 - dq, -1, -1):
            c = rem[k + dq] / lead
            quot[k] = c
            if c:
                for i, oc in enumerate(other.coeffs):
                    rem[k + i] -= c * oc
        return DeltaPoly(quot), DeltaPoly(rem[:dq])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other) -> "DeltaPoly":
        q, r = divmod(self, other)
        if r:
            raise ArithmeticError(f"{other} does not divide {self}")
        return q

    def derivative(self) -> "DeltaPoly":
        return DeltaPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def monic(self) -> "DeltaPoly":
        if not self:
            return self
        lead = self.lead
        return DeltaPoly(tuple(c / lead for c in self.coeffs))

    def primitive(self) -> "DeltaPoly":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        if not self:
            return self
        m = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * m) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return DeltaPoly(tuple(Fraction(v // g) for v in ints))

    def to_wire(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    @classmethod
    def from_wire(cls, items: Sequence[str]) -> "DeltaPoly":
        return cls(tuple(parse_rational(s) for s in items))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "DeltaPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            s = format_rational(c)
            terms.append(s if i == 0 else f"{s}*d" if i == 1 else f"{s}*d^{i}")
        return "DeltaPoly(" + " + ".join(terms) + ")"

def poly_gcd(a: DeltaPoly, b: DeltaPoly) -> DeltaPoly:
    """Monic gcd (zero if both are zero)."""
    while b:
        a, b = b, a % b
    return a.monic()

def squarefree_part(p: DeltaPoly) -> DeltaPoly:
    if p.degree <= 0:
        return p.monic()
    return p.exact_div(poly_gcd(p, p.derivative())).monic()

def _divisors(n: int) -> list[int]:
    n = abs(n)
    primes: dict[int, int] = {}
    m = n
    f = 2
    while f * f <= m:
        while m % f == 0:
            primes[f] = primes.get(f, 0) + 1
            m //= f
        f += 1 if f == 2 else 2
    if m > 1:
        primes[m] = primes.get(m, 0) + 1
    divs = [1]
    for p, e in primes.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)

def rational_roots(p: DeltaPoly) -> list[Fraction]:
    """All rational roots of ``p``, ascending and without repetition."""
    if not p:
        raise ValueError("zero polynomial has all roots")
    q = squarefree_part(p).primitive()
    roots: list[Fraction] = []
    coeffs = [int(c) for c in q.coeffs]
    if len(coeffs) > 1 and coeffs[0] == 0:
        roots.append(ZERO)
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
    if len(coeffs) <= 1:
        return sorted(roots)
    work = DeltaPoly(tuple(Fraction(c) for c in coeffs))
    for a in _divisors(coeffs[0]):
        for b in _divisors(coeffs[-1]):
            for cand in (Fraction(a, b), Fraction(-a, b)):
                if work.degree < 1:
                    break
                if cand not in roots and work(cand) == 0:
                    roots.append(cand)
                    work = work.exact_div(DeltaPoly((-cand, ONE)))
    return sorted(roots)

def strip_roots(p: DeltaPoly, roots: Iterable[Fraction]) -> DeltaPoly:
    """Squarefree part of ``p`` with the given linear factors divided out."""
    q = squarefree_part(p)
    for r in roots:
        if q.degree >= 1 and q(r) == 0:
            q = q.exact_div(DeltaPoly((-Fraction(r), ONE)))
    return q.primitive()

# ---------------------------------------------------------------------------
# dense matrices over Q
# ---------------------------------------------------------------------------

def as_matrix(rows: Iterable[Iterable]) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]

def identity(n: int) -> list[list[Fraction]]:
    return [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]

def zeros(r: int, c: int) -> list[list[Fraction]]:
    return [[ZERO] * c for _ in range(r)]

def mat_mul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        acc = [ZERO] * cols
        for k in range(inner):
            x = row[k]
            if x:
                bk = b[k]
                for j in range(cols):
                    y = bk[j]
                    if y:
                        acc[j] += x * y
        out.append(acc)
    return out

def mat_vec(m, v):
    return [sum((x * y for x, y in zip(row, v) if x and y), ZERO) for row in m]

def rref(m, ncols: int | None = None) -> tuple[list[list[Fraction]], list[int], int]:
    """Reduced row echelon form, pivot columns and rank.

    ``ncols`` is only needed when ``m`` has no rows.
    """
    a = [list(map(Fraction, row)) for row in m]
    nrows = len(a)
    cols = len(a[0]) if a else (ncols or 0)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        if piv != 1:
            a[r] = [x / piv for x in a[r]]
        prow = a[r]
        nz = [j for j in range(c, cols) if prow[j]]
        for i in range(nrows):
            if i != r:
                f = a[i][c]
                if f:
                    row = a[i]
                    for j in nz:
                        row[j] -= f * prow[j]
        pivots.append(c)
        r += 1
    return a, pivots, r

def rank(m, ncols: int | None = None) -> int:
    return rref(m, ncols)[2]

@dataclass(frozen=True)
class Subspace:
    """Subspace of Q^n stored as the nonzero rows of its RREF."""

    ambient_dim: int
    vectors: tuple[tuple[Fraction, ...], ...] = ()

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        rows = [list(map(Fraction, v)) for v in vectors]
        for v in rows:
            if len(v) != ambient_dim:
                raise ValueError("ambient dimension mismatch")
        red, _, r = rref(rows, ambient_dim)
        return cls(ambient_dim, tuple(tuple(row) for row in red[:r]))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(tuple(row) for row in identity(n)))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return rank([*self.vectors, list(v)], self.ambient_dim) == self.dim

    def to_wire(self) -> list[list[str]]:
        return [[format_rational(x) for x in v] for v in self.vectors]

def nullspace(m, ncols: int | None = None) -> Subspace:
    """Right kernel ``{v : m v = 0}`` in canonical RREF form."""
    red, pivots, r = rref(m, ncols)
    cols = len(red[0]) if red else (ncols or 0)
    pivset = set(pivots)
    basis = []
    for f in range(cols):
        if f in pivset:
            continue
        v = [ZERO] * cols
        v[f] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -red[i][f]
        basis.append(v)
    return Subspace.span(cols, basis)

def is_subspace_of(inner: Subspace, outer: Subspace) -> bool:
    if inner.ambient_dim != outer.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if not inner.vectors:
        return True
    stacked = [*outer.vectors, *inner.vectors]
    return rank(stacked, outer.ambient_dim) == outer.dim

def same_subspace(a: Subspace, b: Subspace) -> bool:
    return is_subspace_of(a, b) and is_subspace_of(b, a)

# ---------------------------------------------------------------------------
# parametric elimination over Q[delta]
# ---------------------------------------------------------------------------

def evaluate_matrix(m, delta) -> list[list[Fraction]]:
    delta = Fraction(delta)
    return [[e(delta) for e in row] for row in m]

def _compress_rows(m: list[list[DeltaPoly]], cols: int) -> list[list[DeltaPoly]]:
    # Constant row operations preserve the row space at every delta, so the
    # coefficient blocks can be row-reduced jointly before elimination.
    deg = max((e.degree for row in m for e in row), default=-1)
    if deg < 0:
        return []
    stacked = []
    for row in m:
        flat = []
        for k in range(deg + 1):
            flat.extend(e.coeffs[k] if k < len(e.coeffs) else ZERO for e in row)
        stacked.append(flat)
    red, _, r = rref(stacked)
    out = []
    for flat in red[:r]:
        row = [
            DeltaPoly(tuple(flat[k * cols + j] for k in range(deg + 1)))
            for j in range(cols)
        ]
        out.append(_primitive_row(row))
    return out

def _primitive_row(row: list[DeltaPoly]) -> list[DeltaPoly]:
    m = 1
    for e in row:
        for c in e.coeffs:
            m = lcm(m, c.denominator)
    ints = [int(c * m) for e in row for c in e.coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return row
    scale = Fraction(m, g)
    return [e * scale for e in row]

def parametric_eliminate(m, ncols: int | None = None) -> tuple[int, list[DeltaPoly]]:
    """Generic rank over Q(delta) and the Bareiss pivots.

    Pivot choice: among the remaining entries take the one of least degree,
    ties broken by lowest column then lowest row.  For any delta0 that is not
    a root of a returned pivot, the rank at delta0 equals the generic rank.
    """
    m = [[e if isinstance(e, DeltaPoly) else DeltaPoly.const(e) for e in row] for row in m]
    cols = len(m[0]) if m else (ncols or 0)
    a = _compress_rows(m, cols)
    rows = list(range(len(a)))
    live_cols = list(range(cols))
    prev = DeltaPoly.const(1)
    pivots: list[DeltaPoly] = []
    while rows and live_cols:
        best = min(
            ((a[r][c].degree, c, r) for c in live_cols for r in rows if a[r][c]),
            default=None,
        )
        if best is None:
            break
        _, pc, pr = best
        piv = a[pr][pc]
        pivots.append(piv)
        rest_cols = [c for c in live_cols if c != pc]
        prow = a[pr]
        new_rows = []
        for r in rows:
            if r == pr:
                continue
            row = a[r]
            f = row[pc]
            for c in rest_cols:
                x = row[c]
                y = prow[c]
                val = piv * x if x else DeltaPoly()
                if f and y:
                    val = val - f * y
                row[c] = val.exact_div(prev) if val else val
            row[pc] = DeltaPoly()
            if any(row[c] for c in rest_cols):
                new_rows.append(r)
        rows = new_rows
        live_cols = rest_cols
        prev = piv
    return len(pivots), pivots
