"""``naryd``: build algebras, check identities, compute delta-derivation spaces.

JSON (the default) is the contract; ``--format text`` renders the same data.
Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .algebra import AlgebraError, NAryAlgebra, algebra_to_json, check_filippov, check_nary_malcev, load_algebra
from .catalog import FAMILIES, build_family, family_grid, parse_family_spec
from .dsolve import DEFAULT_SEED, centroid, classify, derivation_space, scan
from .linalg import parse_rational
from .verify import GROUPS, verify_report

VERBS = ("list", "show", "check", "derive", "centroid", "scan", "verify-paper")
NEEDS_ALGEBRA = {"show", "check", "derive", "centroid", "scan"}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="naryd", description="delta-derivations of n-ary algebras")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--algebra", help='family spec such as "C2:n=3,beta=3/2", "M8", or a JSON file')
    p.add_argument("--delta", help="rational delta, e.g. -1 or 3/2")
    p.add_argument("--alpha", help="alpha for C1 when the spec omits it")
    p.add_argument("--beta", help="beta for C2 when the spec omits it")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--only", help="verify-paper: run only claims with this id or id prefix")
    p.add_argument("--version", action="version", version=f"naryd {__version__}")
    return p


def _rational(text: str | None, what: str) -> Fraction | None:
    if text is None:
        return None
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad {what} {text!r}: {exc}") from exc


def resolve_algebra(source: str, alpha=None, beta=None) -> NAryAlgebra:
    if source.lower().endswith(".json") or os.path.isfile(source):
        return load_algebra(source)
    return build_family(parse_family_spec(source, alpha=alpha, beta=beta))


def _space_json(space) -> list:
    return [phi.to_wire() for phi in space.basis]


def _check(alg: NAryAlgebra) -> tuple[dict, int]:
    checks = []
    for name, fn in (("filippov", check_filippov), ("malcev", check_nary_malcev)):
        bad = fn(alg)
        checks.append({
            "name": name,
            "status": "FAIL" if bad else "PASS",
            "violations": len(bad),
            "witness": bad[0].to_json() if bad else None,
        })
    failed = any(c["status"] == "FAIL" for c in checks)
    return {"algebra": alg.name, "checks": checks}, int(failed)


def execute(args, argv: list[str]) -> tuple[dict, int]:
    alpha = _rational(args.alpha, "alpha")
    beta = _rational(args.beta, "beta")
    delta = _rational(args.delta, "delta")
    if args.verb in NEEDS_ALGEBRA and not args.algebra:
        raise UsageError(f"{args.verb} needs --algebra")
    if args.verb == "derive" and delta is None:
        raise UsageError("derive needs --delta")
    if args.only is not None and args.verb != "verify-paper":
        raise UsageError("--only applies to verify-paper")
    alg = resolve_algebra(args.algebra, alpha, beta) if args.verb in NEEDS_ALGEBRA else None

    if args.verb == "list":
        return {"families": list(FAMILIES), "grid": [str(s) for s in family_grid()] + ["M8"]}, 0
    if args.verb == "show":
        return {"algebra": alg.name, "table": algebra_to_json(alg)}, 0
    if args.verb == "check":
        return _check(alg)
    if args.verb == "derive":
        space = derivation_space(alg, delta)
        rep = classify(alg, delta, space=space)
        return {"algebra": alg.name, **rep.to_json(), "basis": _space_json(space)}, 0
    if args.verb == "centroid":
        cent = centroid(alg)
        return {"algebra": alg.name, "dimension": cent.dim, "basis": cent.to_wire()}, 0
    if args.verb == "scan":
        extra = [delta] if delta is not None else []
        r = None
        spec_text = args.algebra.split(":")[0]
        if spec_text == "Dr":
            r = parse_family_spec(args.algebra).r
        return {"algebra": alg.name, **scan(alg, extra, r=r, seed=DEFAULT_SEED).to_json()}, 0
    # verify-paper
    if args.only is not None and args.only.split(".")[0] not in GROUPS:
        raise UsageError(f"unknown claim group {args.only!r}; expected one of {', '.join(GROUPS)}")
    report = verify_report(argv, only=args.only)
    return report, 0 if report["ok"] else 1


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _paint(word: str, color: bool) -> str:
    if not color:
        return word
    code = "32" if word == "PASS" else "31"
    return f"\x1b[{code}m{word}\x1b[0m"


def _compact(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def render_text(report: dict, color: bool) -> str:
    lines = []
    if "claims" in report:
        for c in report["claims"]:
            lines.append(f"{_paint(c['status'], color)} {c['id']} {_compact(c['data'])}")
        s = report["summary"]
        lines.append(f"{s['passed']}/{s['total']} claims passed")
        return "\n".join(lines) + "\n"
    for key in sorted(report):
        value = report[key]
        if key == "checks":
            for c in value:
                rest = {k: v for k, v in c.items() if k not in ("name", "status")}
                lines.append(f"{_paint(c['status'], color)} {c['name']} {_compact(rest)}")
        elif isinstance(value, (dict, list)):
            lines.append(f"{key}: {_compact(value)}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result, status = execute(args, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"naryd: error: {exc}", file=sys.stderr)
        return 2
    except (AlgebraError, ValueError) as exc:
        print(f"naryd: error: {exc}", file=sys.stderr)
        return 2
    if args.verb != "verify-paper":
        result = {"tool": "naryd", "version": __version__, "command": argv, **result}
    result["exit_status"] = status
    if args.format == "json":
        text = json.dumps(result, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    else:
        color = args.out is None and "NO_COLOR" not in os.environ and sys.stdout.isatty()
        text = render_text(result, color)
    try:
        _emit(text, args.out)
    except OSError as exc:
        print(f"naryd: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return 2
    return status


if __name__ == "__main__":
    sys.exit(main())
