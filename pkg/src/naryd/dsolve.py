"""delta-derivations, centroids and derivation algebras as exact nullspaces.

A linear map phi is stored as the d x d matrix with ``phi(e_i) = sum_j b_ij e_j``;
the unknown ``b_ij`` sits in column ``i*d + j`` of every system below.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import lcm
from typing import Sequence

from .algebra import (
    AlgebraError,
    LinearMap,
    NAryAlgebra,
    basis_vector,
    bracket,
    commutator,
    polarization_set,
    right_mul,
    vsub,
)
from .catalog import FamilySpec
from .linalg import (
    ONE,
    ZERO,
    DeltaPoly,
    Subspace,
    format_rational,
    is_subspace_of,
    nullspace,
    parametric_eliminate,
    rational_roots,
    strip_roots,
)

DEFAULT_SEED = 20100  # generic-delta probe; recorded in every scan report


@dataclass(frozen=True)
class DerivationSystem:
    """``M(delta) = const + delta * linear``; one row per (sorted tuple, output)."""

    algebra: NAryAlgebra
    const: list
    linear: list

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.const), self.algebra.dim ** 2

    def at(self, delta) -> list[list[Fraction]]:
        delta = Fraction(delta)
        return [[a + delta * b for a, b in zip(ra, rb)] for ra, rb in zip(self.const, self.linear)]

    def poly_matrix(self) -> list[list[DeltaPoly]]:
        return [[DeltaPoly((a, b)) for a, b in zip(ra, rb)] for ra, rb in zip(self.const, self.linear)]


def build_system(alg: NAryAlgebra) -> DerivationSystem:
    """Linear conditions on phi for ``phi[x..] = delta * sum_i [.., phi(x_i), ..]``."""
    n, d = alg.arity, alg.dim
    cols = d * d
    const, linear = [], []
    for key in combinations(range(d), n):
        value = alg.table.get(key, {})
        blocks = [[ZERO] * cols for _ in range(d)]
        lin = [[ZERO] * cols for _ in range(d)]
        # phi(bracket)_k = sum_j c_j b_jk
        for j, c in value.items():
            for k in range(d):
                blocks[k][j * d + k] += c
        # -delta * [.., e_m at slot s, ..]_k * b_{t_s m}
        for s, ts in enumerate(key):
            for mm in range(d):
                idx = list(key)
                idx[s] = mm
                for k, c in alg.basis_bracket(idx).items():
                    lin[k][ts * d + mm] -= c
        const.extend(blocks)
        linear.extend(lin)
    return DerivationSystem(alg, const, linear)


def brute_force_system(alg: NAryAlgebra, delta) -> list[list[Fraction]]:
    """Constraint matrix from bracket evaluations on all ordered basis tuples.

    Column ``i*d + j`` is the defect of the elementary map ``e_i -> e_j``;
    independent of :func:`build_system`.
    """
    n, d = alg.arity, alg.dim
    delta = Fraction(delta)
    es = [basis_vector(d, i) for i in range(d)]
    columns = []
    for i in range(d):
        for j in range(d):
            phi = LinearMap.zero(d).rows
            phi = LinearMap(tuple(es[j] if r == i else phi[r] for r in range(d)))
            col = []
            for idx in product(range(d), repeat=n):
                args = [es[a] for a in idx]
                lhs = phi.apply(bracket(alg, args))
                rhs = [ZERO] * d
                for s in range(n):
                    term = bracket(alg, [*args[:s], phi.apply(args[s]), *args[s + 1:]])
                    rhs = [u + v for u, v in zip(rhs, term)]
                col.extend(a - delta * b for a, b in zip(lhs, rhs))
            columns.append(col)
    return [list(row) for row in zip(*columns)]


def delta_defect(alg: NAryAlgebra, phi: LinearMap, delta, key: Sequence[int]) -> tuple:
    """``phi[e_key] - delta * sum_i [.., phi(e_i), ..]`` by direct evaluation."""
    d = alg.dim
    args = [basis_vector(d, i) for i in key]
    lhs = phi.apply(bracket(alg, args))
    rhs = [ZERO] * d
    for s in range(alg.arity):
        term = bracket(alg, [*args[:s], phi.apply(args[s]), *args[s + 1:]])
        rhs = [u + v for u, v in zip(rhs, term)]
    return vsub(lhs, [Fraction(delta) * x for x in rhs])


def is_delta_derivation(alg: NAryAlgebra, phi: LinearMap, delta) -> bool:
    return all(not any(delta_defect(alg, phi, delta, key)) for key in combinations(range(alg.dim), alg.arity))


@dataclass(frozen=True)
class DerivationSpace:
    delta: Fraction
    basis: tuple[LinearMap, ...]
    subspace: Subspace

    @property
    def dimension(self) -> int:
        return len(self.basis)


def derivation_space(alg: NAryAlgebra, delta, system: DerivationSystem | None = None,
                     verify: bool = True) -> DerivationSpace:
    delta = Fraction(delta)
    system = system or build_system(alg)
    d = alg.dim
    sub = nullspace(system.at(delta), d * d)
    basis = tuple(LinearMap.from_flat(d, v) for v in sub.vectors)
    if verify:
        for phi in basis:
            if not is_delta_derivation(alg, phi, delta):
                raise ArithmeticError("solver produced a map that fails the delta-derivation check")
    return DerivationSpace(delta, basis, sub)


def centroid(alg: NAryAlgebra) -> Subspace:
    """All psi with ``psi[x_1..x_n] = [x_1.., psi(x_i), ..x_n]`` for every slot i.

    By antisymmetry it is enough to put psi in the first slot and let the
    remaining n-1 arguments run over increasing tuples; the first argument is
    unrestricted, which matters because ``[psi(e_a), e_a, ...]`` need not
    vanish.
    """
    n, d = alg.arity, alg.dim
    rows = []
    for a in range(d):
        for rest in combinations(range(d), n - 1):
            lhs = alg.basis_bracket((a, *rest))
            block = [[ZERO] * (d * d) for _ in range(d)]
            for j, c in lhs.items():
                for k in range(d):
                    block[k][j * d + k] += c
            for mm in range(d):
                for k, c in alg.basis_bracket((mm, *rest)).items():
                    block[k][a * d + mm] -= c
            rows.extend(block)
    sub = nullspace(rows, d * d)
    one_over_n = Fraction(1, n)
    for v in sub.vectors:
        if not is_delta_derivation(alg, LinearMap.from_flat(d, v), one_over_n):
            raise ArithmeticError("centroid element is not a 1/n-derivation")
    return sub


@dataclass(frozen=True)
class ClassifyReport:
    delta: Fraction
    dimension: int
    centroid_dimension: int
    has_nontrivial: bool
    witness: LinearMap | None = None

    def to_json(self) -> dict:
        return {
            "delta": format_rational(self.delta),
            "dimension": self.dimension,
            "centroid_dimension": self.centroid_dimension,
            "nontrivial": self.has_nontrivial,
            "witness": self.witness.to_wire() if self.witness is not None else None,
        }


def classify(alg: NAryAlgebra, delta, *, system: DerivationSystem | None = None,
             centroid_space: Subspace | None = None,
             space: DerivationSpace | None = None) -> ClassifyReport:
    """Nontrivial means delta not in {0, 1} and the space is not inside the centroid."""
    delta = Fraction(delta)
    space = space or derivation_space(alg, delta, system)
    cent = centroid_space if centroid_space is not None else centroid(alg)
    nontrivial = delta not in (0, 1) and not is_subspace_of(space.subspace, cent)
    witness = None
    if nontrivial:
        witness = next(phi for phi, v in zip(space.basis, space.subspace.vectors) if not cent.contains(v))
    return ClassifyReport(delta, space.dimension, cent.dim, nontrivial, witness)


def structural_candidates(n: int, r: int | None = None) -> list[Fraction]:
    out = [Fraction(-1), Fraction(1, 2), ZERO, ONE, Fraction(1, n)]
    if r is not None and r > 1:
        out.append(Fraction(1, r - 1))
    return out


def generic_delta(seed: int, avoid: Sequence[DeltaPoly] = ()) -> Fraction:
    """Reproducible random rational with denominator above 10**6, not a root of ``avoid``."""
    rng = random.Random(seed)
    while True:
        q = Fraction(rng.randrange(-10**7, 10**7), rng.randrange(10**6 + 1, 10**7))
        if q.denominator > 10**6 and all(p(q) != 0 for p in avoid):
            return q


@dataclass(frozen=True)
class ScanReport:
    seed: int
    generic_delta: Fraction
    generic_rank: int
    generic_dimension: int
    pivot_polys: tuple[DeltaPoly, ...]
    candidates: tuple[Fraction, ...]
    exceptional: tuple[Fraction, ...]
    irrational_factors: tuple[DeltaPoly, ...]
    reports: tuple[ClassifyReport, ...] = field(default=())

    def report_at(self, delta) -> ClassifyReport:
        delta = Fraction(delta)
        return next(r for r in self.reports if r.delta == delta)

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "generic_delta": format_rational(self.generic_delta),
            "generic_rank": self.generic_rank,
            "generic_dimension": self.generic_dimension,
            "exceptional_candidates": [format_rational(q) for q in self.candidates],
            "exceptional": [format_rational(q) for q in self.exceptional],
            "irrational_factors": [p.to_wire() for p in self.irrational_factors],
            "reports": [r.to_json() for r in self.reports],
        }


def scan(alg: NAryAlgebra, extra_candidates: Sequence = (), *, r: int | None = None,
         seed: int = DEFAULT_SEED, system: DerivationSystem | None = None,
         centroid_space: Subspace | None = None) -> ScanReport:
    """Parametric analysis in delta followed by exact evaluation at every candidate."""
    system = system or build_system(alg)
    d = alg.dim
    grank, pivots = parametric_eliminate(system.poly_matrix(), d * d)
    roots: set[Fraction] = set()
    residuals: dict[tuple, DeltaPoly] = {}
    for p in pivots:
        if p.degree < 1:
            continue
        pr = rational_roots(p)
        roots.update(pr)
        rest = strip_roots(p, pr)
        if rest.degree >= 2:
            residuals[rest.coeffs] = rest
    cands = set(roots) | set(structural_candidates(alg.arity, r)) | {Fraction(c) for c in extra_candidates}
    gd = generic_delta(seed, pivots)
    cent = centroid_space if centroid_space is not None else centroid(alg)
    probes = sorted(cands | {gd})
    reports = tuple(classify(alg, q, system=system, centroid_space=cent) for q in probes)
    gdim = d * d - grank
    exceptional = tuple(rep.delta for rep in reports if rep.dimension != gdim)
    return ScanReport(
        seed=seed,
        generic_delta=gd,
        generic_rank=grank,
        generic_dimension=gdim,
        pivot_polys=tuple(pivots),
        candidates=tuple(sorted(cands)),
        exceptional=exceptional,
        irrational_factors=tuple(residuals[k] for k in sorted(residuals)),
        reports=reports,
    )


# ---------------------------------------------------------------------------
# block profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LemmaProfile:
    """Blocks of ``[phi]`` (row convention) and the relations predicted for them.

    ``checks`` are the relations as the lemma states them; ``proof_checks``
    are the equations its proof derives before any division by an expression
    in delta.  Both are written with denominators cleared.
    """

    family: str
    split: int
    A: tuple
    B: tuple
    C: tuple
    G: tuple
    trace_A: Fraction
    trace_B: Fraction
    diagonal: tuple[Fraction, ...]
    checks: dict
    proof_checks: dict
    w: Fraction | None = None
    theta: Fraction | None = None

    @property
    def diagonal_cardinality(self) -> int:
        return len(set(self.diagonal))

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def proof_ok(self) -> bool:
        return all(self.proof_checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def failed_proof(self) -> list[str]:
        return [k for k, v in self.proof_checks.items() if not v]


def _blocks(rows, k):
    A = tuple(tuple(r[:k]) for r in rows[:k])
    C = tuple(tuple(r[k:]) for r in rows[:k])
    G = tuple(tuple(r[:k]) for r in rows[k:])
    B = tuple(tuple(r[k:]) for r in rows[k:])
    return A, B, C, G


def _is_zero_block(block) -> bool:
    return not any(x for r in block for x in r)


def lemma_profile(phi: LinearMap, family: FamilySpec, delta) -> LemmaProfile:
    """Block data of ``[phi]`` and the relations its family's lemma predicts."""
    delta = Fraction(delta)
    fam, n = family.family, family.n
    if fam not in ("B1", "B2", "C1", "C2", "Dr"):
        raise AlgebraError(f"no block profile for family {fam}")
    b = phi.rows
    d = len(b)
    if d != n + 1:
        raise AlgebraError("map does not match the family dimension")
    diag = tuple(b[i][i] for i in range(d))
    st: dict[str, bool] = {}
    pf: dict[str, bool] = {}
    w = theta = None
    split = {"B1": 1, "B2": n, "C1": n - 1, "C2": n - 1}.get(fam, family.r)
    A, B, C, G = _blocks(b, split)
    trA = sum((A[i][i] for i in range(len(A))), ZERO)
    trB = sum((B[i][i] for i in range(len(B))), ZERO)

    if fam == "B1":
        st["row1_off_diagonal_zero"] = not any(b[0][1:])
        st["b11_equals_delta_sum"] = b[0][0] == delta * sum(diag[1:], ZERO)
        pf.update(st)
    elif fam == "B2":
        tail = sum(diag[1:n], ZERO)
        st["row1_off_diagonal_zero"] = not any(b[0][1:])
        st["b11_relation"] = (1 - delta) * b[0][0] == delta * tail
        st["last_row_diagonal"] = not any(b[n][j] for j in range(n))
        pf["row1_off_diagonal_zero"] = st["row1_off_diagonal_zero"]
        pf["b11_equals_delta_sum"] = b[0][0] == delta * sum(diag[:n], ZERO)
        pf["last_row_off_diagonal_zero"] = st["last_row_diagonal"]
        if delta != 1:
            w = delta / (1 - delta) * tail
    elif fam in ("C1", "C2"):
        theta = sum(diag[:n - 1], ZERO)
        bnn, blast = b[n - 1][n - 1], b[n][n]
        gamma, low = b[n - 1][n], b[n][n - 1]
        if delta != 1:
            w = delta * theta / (1 - delta)
        st["G_zero"] = _is_zero_block(G)
        pf["G_zero"] = st["G_zero"]
        if fam == "C1":
            alpha = family.alpha
            st["bnn_equals_w"] = (1 - delta) * bnn == delta * theta
            st["b_last_equals_w"] = (1 - delta) * blast == delta * theta
            st["b_last_n_relation"] = alpha * low == delta * gamma
            st["gamma_zero_unless_minus_one"] = delta == -1 or gamma == 0
            pf["b_last_relation"] = blast == delta * (theta + bnn)
            pf["bnn_relation"] = bnn == delta * theta + delta * blast
            pf["b_last_n_relation"] = alpha * low == delta * gamma
            pf["gamma_fixed_by_delta_squared"] = gamma == delta * delta * gamma
        else:
            beta = family.beta
            st["b_last_n_relation"] = low == delta * gamma
            if delta != -1:
                scale = (1 - delta) * (1 + delta)
                shift = beta * delta * (1 - delta) * gamma
                st["bnn_closed_form"] = scale * bnn == delta * (1 + delta) * theta - shift
                st["b_last_closed_form"] = scale * blast == delta * (1 + delta) * theta + shift
            else:
                st["minus_one_gamma_zero"] = gamma == 0 and low == 0
                st["minus_one_diagonal"] = 2 * bnn == -theta and 2 * blast == -theta
            quad = delta * delta + (beta * beta + 2) * delta + 1
            st["gamma_zero_off_quadratic_roots"] = quad == 0 or gamma == 0
            pf["c2_1"] = bnn == delta * theta + delta * blast - beta * low
            pf["c2_2"] = gamma == delta * theta * beta + delta * low + delta * beta * blast - beta * blast
            pf["c2_3"] = low == delta * gamma
            pf["c2_4"] = blast == delta * theta + delta * bnn + delta * beta * gamma
    else:
        r = family.r
        st["G_zero"] = _is_zero_block(G)
        off_diag_zero = all(A[i][j] == 0 for i in range(r) for j in range(r) if i != j)
        if delta == -1:
            st["A_sign_symmetric"] = all(
                A[i][j] == (-1) ** (i - j) * A[j][i] for i in range(r) for j in range(r) if i != j
            )
            st["trace_A_equals_minus_trace_B"] = trA == -trB
        elif delta * (r - 1) == 1:
            st["trace_B_zero"] = trB == 0
            st["A_scalar"] = off_diag_zero and len({A[i][i] for i in range(r)}) == 1
        else:
            st["A_scalar_value"] = off_diag_zero and all(
                (1 + delta - r * delta) * A[i][i] == delta * trB for i in range(r)
            )
        # proof: b_ji = 0 for j <= r < i, and the relations among the first r rows
        pf["coupling_zero"] = _is_zero_block(C)
        total = sum(diag, ZERO)
        pf["diagonal_relation"] = all((1 + delta) * A[i][i] == delta * total for i in range(r))
        pf["off_diagonal_relation"] = all(
            A[i][j] == (-1) ** (i - j + 1) * delta * A[j][i] for i in range(r) for j in range(r) if i != j
        )
    return LemmaProfile(fam, split, A, B, C, G, trA, trB, diag, st, pf, w=w, theta=theta)


# ---------------------------------------------------------------------------
# inner derivations of ternary algebras
# ---------------------------------------------------------------------------

def _label_vec(d: int, label: Sequence[int]) -> tuple:
    v = [ZERO] * d
    for p in label:
        v[p] += 1
    return tuple(v)


def inner_derivation_generators(alg: NAryAlgebra) -> list[LinearMap]:
    """``[R_{x,y}, R_{x,z}] + R_{x,[y,x,z]}`` for y, z basis and x over e_p, e_p + e_q.

    The generator is quadratic in x, so basis x alone does not give the span
    over all x; adding the sums e_p + e_q does.
    """
    if alg.arity != 3:
        raise AlgebraError("inner derivations are defined here for ternary algebras")
    d = alg.dim
    es = [basis_vector(d, i) for i in range(d)]
    rcache: dict = {}

    def R(u, v):
        key = (u, v)
        if key not in rcache:
            rcache[key] = right_mul(alg, [u, v])
        return rcache[key]

    gens = []
    for lab in polarization_set(d):
        x = _label_vec(d, lab)
        for y in es:
            rxy = R(x, y)
            for z in es:
                g = commutator(rxy, R(x, z)) + right_mul(alg, [x, bracket(alg, [y, x, z])])
                gens.append(g)
    return gens


def inner_derivations_m8(alg: NAryAlgebra) -> Subspace:
    d = alg.dim
    gens = inner_derivation_generators(alg)
    seen = set()
    flat = []
    for g in gens:
        f = g.flat()
        if any(f) and f not in seen:
            seen.add(f)
            flat.append(f)
    return _span_integer(d * d, flat)


def _span_integer(ambient: int, vectors: list) -> Subspace:
    # greedy selection mod a large prime; independence mod p implies
    # independence over Q, and the final span is computed exactly
    p = (1 << 61) - 1
    basis: dict[int, list[int]] = {}
    chosen = []
    for v in vectors:
        den = 1
        for c in v:
            den = lcm(den, c.denominator)
        w = [int(c * den) % p for c in v]
        for col, row in basis.items():
            f = w[col]
            if f:
                w = [(a - f * b) % p for a, b in zip(w, row)]
        piv = next((i for i, c in enumerate(w) if c), None)
        if piv is None:
            continue
        inv = pow(w[piv], p - 2, p)
        w = [(c * inv) % p for c in w]
        for col in list(basis):
            f = basis[col][piv]
            if f:
                basis[col] = [(a - f * b) % p for a, b in zip(basis[col], w)]
        basis[piv] = w
        chosen.append(v)
    sub = Subspace.span(ambient, chosen)
    # exactness: every vector must lie in the exact span of the chosen ones
    for v in vectors:
        if not sub.contains(v):
            sub = Subspace.span(ambient, [*sub.vectors, v])
    return sub
