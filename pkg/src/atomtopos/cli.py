"""Command-line front end.

Exit codes: 0 pass, 1 a check failed (or the site is invalid), 2 bad input,
3 an enumeration ran over its budget.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import atomic as at
from . import cohesion as co
from . import diagram as dg
from . import verify as vf
from ._util import LIMITS, BudgetExceeded
from .fincat import InvalidCategory, structure_report
from .formats import (
    InputError, emit, load_site, make_report, parse_site, read_json, resolve_presheaf,
    verdict_to_raw,
)

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--bound", type=int, default=None,
                        help="max elements per object for enumerated presheaves (default 3)")
    common.add_argument("--budget", type=int, default=10**7,
                        help="max visited states per enumeration (default 10^7)")
    common.add_argument("--format", choices=["human", "machine"], default="human")
    common.add_argument("--family", action="append", default=[], metavar="FILE",
                        help="extra presheaf file appended to the test family")
    common.add_argument("--timing", action="store_true",
                        help="include wall time (reports are then not reproducible)")

    p = argparse.ArgumentParser(prog="atomtopos", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", parents=[common], help="check a site file")
    s.add_argument("site")

    s = sub.add_parser("atoms", parents=[common], help="atomicity verdicts")
    s.add_argument("site")
    s.add_argument("--presheaf", action="append", default=[], metavar="SPEC")

    s = sub.add_parser("radj", parents=[common], help="tables of X_T")
    s.add_argument("site")
    s.add_argument("--atom", required=True, metavar="SPEC")
    s.add_argument("--target", required=True, metavar="SPEC")

    s = sub.add_parser("cohesion", parents=[common], help="McLarty diagnostics")
    s.add_argument("site")

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("--suite", required=True, choices=sorted(vf.SUITES) + ["all"])
    return p


def _family(args, C):
    extra = [resolve_presheaf(f, C) for f in args.family]
    return dg.test_family(C, extra)


def _table(X: dg.Presheaf) -> dict:
    return {"sets": {a: [dg.label(x) for x in X.sets[a]] for a in X.index.objects},
            "action": {f.name: [int(v) for v in X.action[f.name]]
                       for f in X.index.non_identity_arrows()}}


def cmd_validate(args) -> tuple[int, dict, object]:
    raw = read_json(args.site) if not args.site.startswith("builtin:") else None
    try:
        C = parse_site(raw, args.site) if raw is not None else load_site(args.site)[0]
    except InvalidCategory as exc:
        return EXIT_FAIL, {"valid": False, "errors": exc.errors}, None
    return EXIT_PASS, {"valid": True, "objects": len(C.objects), "arrows": len(C.arrows),
                       "structure": structure_report(C).as_dict()}, C


def _verdict_entry(name: str, X: dg.Presheaf) -> dict:
    v = at.is_atomic(X)
    entry = {"name": name, "profile": list(X.profile()), **verdict_to_raw(v)}
    if v.atomic:
        entry["connected"] = co.is_connected(X)
        entry["points"] = len(co.gamma(X))
    return entry


def cmd_atoms(args, C) -> tuple[int, dict]:
    bound = 3 if args.bound is None else args.bound
    named = _family(args, C) + [resolve_presheaf(p, C) for p in args.presheaf]
    entries = [_verdict_entry(n, X) for n, X in named]
    enumerated = []
    for k, X in enumerate(dg.enumerate_presheaves(C, bound)):
        enumerated.append(_verdict_entry(f"enum:{k}", X))
    atomic = [e["name"] for e in entries + enumerated if e["atomic"]]
    return EXIT_PASS, {"bound": bound, "named": entries, "enumerated": enumerated,
                       "atomic": atomic,
                       "disconnected_atomic": [e["name"] for e in entries + enumerated
                                               if e["atomic"] and not e["connected"]]}


def _failure_raw(fail: dict | None, names: dict) -> dict | None:
    if fail is None:
        return None
    Y = fail["test_object"]
    return {"test_object": names.get(Y, dg.label(Y.profile())),
            "test_object_table": Y.to_raw(), "maps_left": fail["left"],
            "maps_right": fail["right"], "direction": fail["failure"]["direction"],
            "detail": fail["failure"]["detail"]}


def cmd_radj(args, C) -> tuple[int, dict]:
    tname, T = resolve_presheaf(args.atom, C)
    xname, X = resolve_presheaf(args.target, C)
    bound = 3 if args.bound is None else args.bound
    R = at.right_adjoint(T, X)
    named = _family(args, C)
    fam = [Y for _, Y in named]
    out = {"atom": tname, "target": xname, "candidate_only": R.candidate_only,
           "table": _table(R.obj), "target_table": _table(X)}
    if R.candidate_only:
        # test objects: the family, then enumerated presheaves by size
        names = {Y: n for n, Y in named}
        tests = fam + sorted(dg.enumerate_presheaves(C, bound), key=lambda Y: Y.total_size())
        for k, Y in enumerate(tests[len(fam):]):
            names.setdefault(Y, f"enum:{k}")
        out["adjunction_failure"] = _failure_raw(R.adjunction_failure(tests), names)
        refutation = None
        for xn, X2 in [(xname, X)] + named:
            fail = at.right_adjoint(T, X2).adjunction_failure(tests)
            if fail is not None:
                refutation = {"target": xn, **_failure_raw(fail, names)}
                break
        out["refutation"] = refutation
        return EXIT_PASS, out
    out["adjunction"] = all(R.check_adjunction(Y)["bijective"] for Y in fam)
    out["triangle_identities"] = all(at.triangle_identities(T, X).values())
    out["isomorphic_to_target"] = dg.iso_search(R.obj, X) is not None
    out["points"] = {"target": len(co.gamma(X)), "right_adjoint": len(co.gamma(R.obj))}
    out["pieces"] = {"target": co.pi(X), "right_adjoint": co.pi(R.obj)}
    if co.mclarty_report(C, bound).mclarty:
        out["rigidity"] = co.right_adjoint_rigidity(T, X)
    return (EXIT_PASS if out["adjunction"] and out["triangle_identities"] else EXIT_FAIL), out


def cmd_cohesion(args, C) -> tuple[int, dict]:
    bound = 3 if args.bound is None else args.bound
    rep = co.mclarty_report(C, bound, site_id=args.site, 
                           extra=[resolve_presheaf(f, C) for f in args.family])
    out = rep.as_dict()
    out["one_atomic"] = at.is_atomic(dg.terminal(C)).atomic
    out["pieces_of_one"] = co.pi(dg.terminal(C))
    return (EXIT_PASS if rep.mclarty else EXIT_FAIL), out


def cmd_verify(args) -> tuple[int, dict]:
    ids = sorted(vf.SUITES) if args.suite == "all" else [args.suite]
    results = [vf.run_suite(s, args.bound) for s in ids]
    out = [r.as_dict(timing=args.timing) for r in results]
    return (EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL), {"suites": out}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    LIMITS.states = args.budget
    start = time.perf_counter()
    C = None
    extra = {}
    try:
        if args.command == "validate":
            code, results, C = cmd_validate(args)
        elif args.command == "verify":
            code, results = cmd_verify(args)
        else:
            try:
                C, _ = load_site(args.site)
            except InvalidCategory as exc:
                raise InputError(f"invalid site: {exc}") from None
            handler = {"atoms": cmd_atoms, "radj": cmd_radj, "cohesion": cmd_cohesion}
            code, results = handler[args.command](args, C)
    except InputError as exc:
        print(f"atomtopos: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"atomtopos: {exc}", file=sys.stderr)
        code, results = EXIT_BUDGET, {"error": "budget_exceeded", "what": exc.what,
                                      "states": exc.count, "budget": exc.budget}
    if args.timing:
        extra["timing"] = round(time.perf_counter() - start, 3)
    report = make_report(["atomtopos"] + argv, C, results,
                         {"states": LIMITS.states, "subobjects": LIMITS.subobjects}, **extra)
    sys.stdout.write(emit(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
