"""Acceptance criteria 1-9, one test each.

Every test records a single PASS/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and when the file is run as a script.
All comparisons are exact.
"""

import random
from fractions import Fraction as F

import sympy

from naryd.algebra import check_filippov, check_nary_malcev, random_algebra
from naryd.catalog import FamilySpec, build_family, build_m8, family_grid
from naryd.cli import main
from naryd.dsolve import (
    DEFAULT_SEED,
    brute_force_system,
    build_system,
    centroid,
    classify,
    derivation_space,
    generic_delta,
    inner_derivations_m8,
    lemma_profile,
    scan,
)
from naryd.linalg import Subspace, nullspace, same_subspace

RESULTS: dict[int, str] = {}
GENERIC = generic_delta(DEFAULT_SEED)
NS = (2, 3, 4, 5)


def record(number: int, ok: bool, detail: str) -> None:
    RESULTS[number] = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(RESULTS[number])
    assert ok, RESULTS[number]


def test_criterion_1_identities():
    grid = family_grid(NS, alphas=(1, 2, -3), betas=(1, F(3, 2), -2))
    bad = [str(s) for s in grid if check_filippov(build_family(s), limit=1)]
    m8 = build_m8()
    malcev = len(check_nary_malcev(m8))
    filippov = len(check_filippov(m8))
    record(1, not bad and malcev == 0 and filippov >= 1,
           f"{len(grid)} instances, Filippov failures {bad}; M8 Malcev violations {malcev}, "
           f"M8 Filippov violations {filippov}")


def test_criterion_2_theorem6():
    failures = []
    for spec in family_grid(NS, alphas=(F(2),), betas=(F(3, 2),)):
        if spec.is_simple:
            continue
        alg = build_family(spec)
        system, cent = build_system(alg), centroid(alg)
        for q in sorted({F(-1), F(1, 2), F(2), F(1, spec.n), GENERIC}):
            if not classify(alg, q, system=system, centroid_space=cent).has_nontrivial:
                failures.append(f"{spec}@{q}")
    record(2, not failures, f"instances/deltas without a nontrivial delta-derivation: {failures}")


def test_criterion_3_theorem7():
    problems = []
    for n in (2, 3, 4):
        spec = FamilySpec("Dr", n, r=n + 1)
        alg = build_family(spec)
        system, cent = build_system(alg), centroid(alg)
        for q in sorted({F(-1), F(1, 2), F(2), F(-2), F(1, n), GENERIC}):
            rep = classify(alg, q, system=system, centroid_space=cent)
            if rep.has_nontrivial != (q == -1):
                problems.append(f"n={n} delta={q} nontrivial={rep.has_nontrivial}")
        anti = derivation_space(alg, -1, system)
        brute = nullspace(brute_force_system(alg, -1), alg.dim ** 2)
        if anti.dimension != n * (n + 3) // 2 or not same_subspace(anti.subspace, brute):
            problems.append(f"n={n} antiderivation dimension {anti.dimension}")
        for phi in anti.basis:
            prof = lemma_profile(phi, spec, -1)
            if not prof.ok:
                problems.append(f"n={n} Lemma 5(1) shape {prof.failed()}")
                break
    record(3, not problems, f"D_(n+1) n=2,3,4 dims 5,9,14 at -1 only; problems {problems}")


def _probes(spec):
    qs = {F(-1), F(1, 2), F(2), F(1, spec.n), F(-1, 4), F(-4), GENERIC}
    if spec.r is not None:
        qs.add(F(1, spec.r - 1))
    return sorted(qs)


def test_criterion_4_lemma_profiles():
    failures = {}
    checked = 0
    for spec in family_grid(NS, alphas=(F(2),), betas=(F(3, 2),)):
        if spec.family == "A1":
            continue
        alg = build_family(spec)
        system = build_system(alg)
        for q in _probes(spec):
            for phi in derivation_space(alg, q, system).basis:
                checked += 1
                for name in lemma_profile(phi, spec, q).failed():
                    failures.setdefault(f"{spec.family}:{name}", set()).add(str(q))
    detail = "; ".join(f"{k} at delta in {sorted(v)}" for k, v in sorted(failures.items()))
    record(4, not failures, f"{checked} basis elements checked; violations: {detail or 'none'}")


def test_criterion_5_lemma4_exceptional():
    spec = FamilySpec("C2", 3, beta=F(3, 2))
    alg = build_family(spec)
    rep = scan(alg)
    gdim = derivation_space(alg, rep.generic_delta).dimension
    parts, ok = [], True
    for q in (F(-1, 4), F(-4)):
        space = derivation_space(alg, q)
        gamma = any(phi.rows[spec.n - 1][spec.n] for phi in space.basis)
        ok = ok and q in rep.candidates and space.dimension > gdim and gamma
        parts.append(f"delta={q}: candidate={q in rep.candidates} dim={space.dimension} gamma_nonzero={gamma}")
    record(5, ok, f"generic dim {gdim}; " + "; ".join(parts))


def test_criterion_6_lemma3_exceptional():
    spec = FamilySpec("C1", 3, alpha=F(2))
    alg = build_family(spec)
    generic = derivation_space(alg, GENERIC)
    at = derivation_space(alg, -1)
    gamma_zero = all(phi.rows[spec.n - 1][spec.n] == 0 for phi in generic.basis)
    record(6, at.dimension > generic.dimension and gamma_zero,
           f"dim at -1 {at.dimension}, generic {generic.dimension}, generic gamma = 0: {gamma_zero}")


def test_criterion_7_theorem8():
    m8 = build_m8()
    system = build_system(m8)
    zeros = {str(q): derivation_space(m8, q, system).dimension
             for q in (F(-1), F(1, 2), F(2), F(1, 4), F(-1, 4))}
    third = derivation_space(m8, F(1, 3), system)
    scalars = Subspace.span(64, [[F(int(i == j)) for i in range(8) for j in range(8)]])
    third_ok = third.dimension == 1 and same_subspace(third.subspace, centroid(m8)) \
        and same_subspace(third.subspace, scalars)
    inner_ok = same_subspace(derivation_space(m8, 1, system).subspace, inner_derivations_m8(m8))
    record(7, not any(zeros.values()) and third_ok and inner_ok,
           f"dims {zeros}; 1/3 space = centroid = scalars: {third_ok}; Der = inner span: {inner_ok}")


def test_criterion_8_oracle():
    rng = random.Random(8)
    mismatches = []
    for k in range(20):
        d = rng.choice((3, 4))
        alg = random_algebra(rng, 3, d, density=rng.choice((0.3, 0.6, 0.9)))
        q = F(rng.randint(-12, 12), rng.randint(1, 9))
        ours = derivation_space(alg, q).subspace
        raw = brute_force_system(alg, q)
        brute = nullspace(raw, d * d)
        sym = Subspace.span(d * d, [[F(int(x.p), int(x.q)) for x in v]
                                    for v in sympy.Matrix(raw).nullspace()])
        if not (same_subspace(ours, brute) and same_subspace(ours, sym)):
            mismatches.append(k)
    record(8, not mismatches, f"20 random ternary algebras (d <= 4); mismatches {mismatches}")


def test_criterion_9_determinism(capsys):
    outputs = []
    for _ in range(2):
        main(["verify-paper"])
        outputs.append(capsys.readouterr().out.encode())
    same = outputs[0] == outputs[1]
    record(9, same and len(outputs[0]) > 0,
           f"two verify-paper runs byte-identical: {same} ({len(outputs[0])} bytes)")


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
