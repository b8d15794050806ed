"""The claim suite behind ``naryd verify-paper``.

Each claim is a named, exact check over the family catalog or M8.  Claims are
grouped by the first component of their id (``theorem8.dimension_zero`` belongs
to ``theorem8``) so a filter can skip whole groups without computing them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from . import __version__
from .algebra import NAryAlgebra, check_filippov, check_nary_malcev, random_algebra
from .catalog import FamilySpec, build_family, build_m8, family_grid
from .dsolve import (
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
from .linalg import format_rational, nullspace, same_subspace

ORACLE_SEED = 20101
GRID_NS = (2, 3, 4, 5)
IDENTITY_ALPHAS = (1, 2, -3)
IDENTITY_BETAS = (1, Fraction(3, 2), -2)
ALPHA = Fraction(2)
BETA = Fraction(3, 2)

# Optional hook ``corrupt(spec, algebra) -> algebra`` applied to every catalog
# instance before it is checked; used to confirm that claims can fail.
Corruptor = Callable[[FamilySpec, NAryAlgebra], NAryAlgebra]


@dataclass
class Claim:
    id: str
    passed: bool
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"id": self.id, "status": "PASS" if self.passed else "FAIL", "data": self.data}


class _Cache:
    """Per-instance systems, centroids and derivation spaces, shared across claims."""

    def __init__(self, corrupt: Corruptor | None):
        self.corrupt = corrupt
        self._alg: dict[str, NAryAlgebra] = {}
        self._sys: dict[str, object] = {}
        self._cent: dict[str, object] = {}
        self._space: dict[tuple[str, Fraction], object] = {}

    def algebra(self, spec: FamilySpec) -> NAryAlgebra:
        key = str(spec)
        if key not in self._alg:
            alg = build_family(spec)
            if self.corrupt is not None:
                alg = self.corrupt(spec, alg)
            self._alg[key] = alg
        return self._alg[key]

    def system(self, spec):
        key = str(spec)
        if key not in self._sys:
            self._sys[key] = build_system(self.algebra(spec))
        return self._sys[key]

    def centroid(self, spec):
        key = str(spec)
        if key not in self._cent:
            self._cent[key] = centroid(self.algebra(spec))
        return self._cent[key]

    def space(self, spec, delta):
        key = (str(spec), Fraction(delta))
        if key not in self._space:
            self._space[key] = derivation_space(self.algebra(spec), delta, self.system(spec))
        return self._space[key]

    def classify(self, spec, delta):
        return classify(self.algebra(spec), delta, centroid_space=self.centroid(spec),
                        space=self.space(spec, delta))


def _grid() -> list[FamilySpec]:
    return family_grid(GRID_NS, alphas=(ALPHA,), betas=(BETA,))


def _fmt(q) -> str:
    return format_rational(Fraction(q))


def _generic() -> Fraction:
    return generic_delta(DEFAULT_SEED)


# ---------------------------------------------------------------------------
# claim groups
# ---------------------------------------------------------------------------

def _identities(cache: _Cache) -> Iterator[Claim]:
    for spec in family_grid(GRID_NS, alphas=IDENTITY_ALPHAS, betas=IDENTITY_BETAS):
        bad = check_filippov(cache.algebra(spec), limit=1)
        data = {"violations": len(bad)}
        if bad:
            data["witness"] = bad[0].to_json()
        yield Claim(f"identities.filippov.{spec}", not bad, data)
    m8 = cache.corrupt(FamilySpec("M8"), build_m8()) if cache.corrupt else build_m8()
    bad = check_nary_malcev(m8, limit=1)
    data = {"violations": len(bad)}
    if bad:
        data["witness"] = bad[0].to_json()
    yield Claim("identities.malcev.M8", not bad, data)
    bad = check_filippov(m8, limit=1)
    yield Claim("identities.not_filippov.M8", bool(bad),
                {"witness": bad[0].to_json() if bad else None})


def _theorem6(cache: _Cache) -> Iterator[Claim]:
    gd = _generic()
    for spec in _grid():
        if spec.is_simple:
            continue
        deltas = sorted({Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(1, spec.n), gd})
        reports = [cache.classify(spec, q) for q in deltas]
        yield Claim(
            f"theorem6.{spec}",
            all(r.has_nontrivial for r in reports),
            {"probes": [{"delta": _fmt(r.delta), "dimension": r.dimension,
                         "centroid_dimension": r.centroid_dimension,
                         "nontrivial": r.has_nontrivial} for r in reports]},
        )


def _theorem7(cache: _Cache) -> Iterator[Claim]:
    gd = _generic()
    for n in (2, 3, 4):
        spec = FamilySpec("Dr", n, r=n + 1)
        deltas = sorted({Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(-2), Fraction(1, n), gd})
        reports = [cache.classify(spec, q) for q in deltas]
        exact = all(r.has_nontrivial == (r.delta == -1) for r in reports)
        anti = cache.space(spec, -1)
        shapes = [lemma_profile(phi, spec, -1) for phi in anti.basis]
        yield Claim(
            f"theorem7.{spec}",
            exact and anti.dimension == n * (n + 3) // 2 and all(p.ok for p in shapes),
            {"antiderivation_dimension": anti.dimension, "expected": n * (n + 3) // 2,
             "probes": [{"delta": _fmt(r.delta), "dimension": r.dimension,
                         "nontrivial": r.has_nontrivial} for r in reports]},
        )


def _profile_probes(spec: FamilySpec) -> list[Fraction]:
    qs = {Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(1, spec.n),
          Fraction(-1, 4), Fraction(-4), _generic()}
    if spec.r is not None:
        qs.add(Fraction(1, spec.r - 1))
    return sorted(qs)


def _profile_claims(cache: _Cache, prefix: str, use_proof: bool) -> Iterator[Claim]:
    for spec in _grid():
        if spec.family in ("A1", "M8"):
            continue
        probes, ok, witness = [], True, None
        for q in _profile_probes(spec):
            space = cache.space(spec, q)
            failed: set[str] = set()
            for phi in space.basis:
                prof = lemma_profile(phi, spec, q)
                bad = prof.failed_proof() if use_proof else prof.failed()
                if bad and witness is None:
                    witness = {"delta": _fmt(q), "failed": bad, "map": phi.to_wire()}
                failed.update(bad)
            ok = ok and not failed
            probes.append({"delta": _fmt(q), "dimension": space.dimension, "failed": sorted(failed)})
        yield Claim(f"{prefix}.{spec}", ok, {"probes": probes, "witness": witness})


def _lemmas(cache: _Cache) -> Iterator[Claim]:
    return _profile_claims(cache, "lemmas", use_proof=False)


def _proofs(cache: _Cache) -> Iterator[Claim]:
    return _profile_claims(cache, "proofs", use_proof=True)


def _gamma_entries(space, n: int) -> list:
    return [phi.rows[n - 1][n] for phi in space.basis]


def _lemma4(cache: _Cache) -> Iterator[Claim]:
    spec = FamilySpec("C2", 3, beta=BETA)
    rep = scan(cache.algebra(spec), system=cache.system(spec), centroid_space=cache.centroid(spec))
    gdim = cache.space(spec, rep.generic_delta).dimension
    for q in (Fraction(-1, 4), Fraction(-4)):
        space = cache.space(spec, q)
        yield Claim(
            f"lemma4.{spec}.delta={_fmt(q)}",
            q in rep.candidates and space.dimension > gdim and any(_gamma_entries(space, spec.n)),
            {"candidate": q in rep.candidates, "dimension": space.dimension, "generic_dimension": gdim,
             "generic_delta": _fmt(rep.generic_delta),
             "gamma_nonzero": any(_gamma_entries(space, spec.n))},
        )


def _lemma3(cache: _Cache) -> Iterator[Claim]:
    spec = FamilySpec("C1", 3, alpha=ALPHA)
    gd = _generic()
    generic = cache.space(spec, gd)
    at = cache.space(spec, -1)
    yield Claim(
        f"lemma3.{spec}",
        at.dimension > generic.dimension and not any(_gamma_entries(generic, spec.n)),
        {"dimension_minus_one": at.dimension, "generic_dimension": generic.dimension,
         "generic_delta": _fmt(gd), "generic_gamma_zero": not any(_gamma_entries(generic, spec.n))},
    )


def _theorem8(cache: _Cache) -> Iterator[Claim]:
    spec = FamilySpec("M8")
    dims = {_fmt(q): cache.space(spec, q).dimension
            for q in (Fraction(-1), Fraction(1, 2), Fraction(2), Fraction(1, 4), Fraction(-1, 4))}
    yield Claim("theorem8.dimension_zero", not any(dims.values()), {"dimensions": dims})
    third = cache.space(spec, Fraction(1, 3))
    cent = cache.centroid(spec)
    yield Claim("theorem8.one_third_is_centroid",
                third.dimension == 1 and same_subspace(third.subspace, cent),
                {"dimension": third.dimension, "centroid_dimension": cent.dim})
    der = cache.space(spec, 1)
    inner = inner_derivations_m8(cache.algebra(spec))
    yield Claim("theorem8.inner_derivations", same_subspace(der.subspace, inner),
                {"derivation_dimension": der.dimension, "inner_dimension": inner.dim})


def _oracle(cache: _Cache) -> Iterator[Claim]:
    rng = random.Random(ORACLE_SEED)
    for k in range(20):
        d = rng.choice((3, 4))
        alg = random_algebra(rng, 3, d)
        delta = Fraction(rng.randrange(-9, 10), rng.randrange(1, 8))
        solver = derivation_space(alg, delta).subspace
        brute = nullspace(brute_force_system(alg, delta), d * d)
        yield Claim(f"oracle.random{k:02d}", same_subspace(solver, brute),
                    {"dim": d, "delta": _fmt(delta), "solver": solver.dim, "brute_force": brute.dim})


GROUPS: dict[str, Callable[[_Cache], Iterator[Claim]]] = {
    "identities": _identities,
    "theorem6": _theorem6,
    "theorem7": _theorem7,
    "lemmas": _lemmas,
    "proofs": _proofs,
    "lemma3": _lemma3,
    "lemma4": _lemma4,
    "theorem8": _theorem8,
    "oracle": _oracle,
}


def _selected(claim_id: str, only: str | None) -> bool:
    return only is None or claim_id == only or claim_id.startswith(only + ".")


def run_claims(only: str | None = None, corrupt: Corruptor | None = None) -> list[Claim]:
    """Evaluate the suite (or the part matching ``only``) in a fixed order."""
    cache = _Cache(corrupt)
    out = []
    for group, fn in GROUPS.items():
        if only is not None and not (group == only.split(".")[0]):
            continue
        out.extend(c for c in fn(cache) if _selected(c.id, only))
    return out


def verify_report(argv: list[str], only: str | None = None, corrupt: Corruptor | None = None) -> dict:
    claims = run_claims(only, corrupt)
    failed = [c.id for c in claims if not c.passed]
    return {
        "tool": "naryd",
        "version": __version__,
        "command": list(argv),
        "seed": DEFAULT_SEED,
        "claims": [c.to_json() for c in claims],
        "summary": {"total": len(claims), "passed": len(claims) - len(failed), "failed": failed},
        "ok": bool(claims) and not failed,
    }
