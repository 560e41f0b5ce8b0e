"""Acceptance criteria, one test each.

Suites run cold in a subprocess through the CLI so the reported wall times
include no warm caches; direct checks then run in-process.  Every test prints
one PASS/FAIL line before asserting.
"""

import json
import subprocess
import sys
import time

import pytest

from atomtopos import atomic as at
from atomtopos import cohesion as co
from atomtopos import diagram as dg
from atomtopos.sites import BUILTIN_IDS, builtin
from atomtopos.verify import SUITES, atom_site_search, family

CRITERIA = {
    1: ("setE_atoms", 30), 2: ("setE_exponentials", 10), 3: ("two_sub_t", 10),
    4: ("thmB", 60), 5: ("adjunction", 60), 6: ("thmA", None), 7: ("mclarty", 30),
    8: ("thmD", None), 9: ("thmC", None), 10: ("contractibility", None),
}
SUITE_TOTAL_LIMIT = 300


@pytest.fixture(scope="module")
def cold():
    """Per-suite reports and wall times, each from a fresh interpreter."""
    out = {}
    for suite in sorted(SUITES):
        t0 = time.perf_counter()
        p = subprocess.run([sys.executable, "-m", "atomtopos.cli", "verify", "--suite", suite,
                            "--format", "machine"], capture_output=True, text=True)
        elapsed = time.perf_counter() - t0
        rep = json.loads(p.stdout)["results"]["suites"][0]
        out[suite] = (p.returncode, rep, elapsed)
    return out


def record(capsys, n, text, ok):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {text}")
    assert ok, f"criterion {n}: {text}"


def suite_ok(cold, n):
    suite, limit = CRITERIA[n]
    code, rep, elapsed = cold[suite]
    ok = code == 0 and rep["passed"] and (limit is None or elapsed < limit)
    bad = [c["check"] for c in rep["checks"] if not c["passed"]]
    lim = f" (limit {limit} s)" if limit else ""
    return ok, f"suite {suite}: {len(rep['checks'])} checks, {len(bad)} failed, {elapsed:.1f} s{lim}"


def test_criterion_1_setE_no_atoms(cold, capsys):
    ok, text = suite_ok(cold, 1)
    C = builtin("E-op").category
    pres = dg.enumerate_presheaves(C, 4)
    verdicts = [at.is_atomic(X) for X in pres]
    atomic = [X for X, v in zip(pres, verdicts) if v.atomic]
    ok &= len(atomic) == 1 and dg.iso_search(atomic[0], dg.terminal(C)) is not None
    ok &= all(v.verify() and (v.atomic or v.certificate is not None) for v in verdicts)
    record(capsys, 1, f"{text}; {len(pres)} classes, atomic = 1 only", ok)


def test_criterion_2_setE_exponentials(cold, capsys):
    ok, text = suite_ok(cold, 2)
    rep = cold["setE_exponentials"][1]
    pairs = {c["check"].rsplit("for ", 1)[1] for c in rep["checks"]}
    ok &= len(pairs) == 9
    record(capsys, 2, f"{text}; {len(pairs)} size pairs", ok)


def test_criterion_3_two_sub_representable(cold, capsys):
    ok, text = suite_ok(cold, 3)
    C = builtin("chain3").category
    for t in C.objects:
        R = at.right_adjoint(dg.representable(C, t), dg.two(C)).obj
        ok &= dg.iso_search(R, dg.two(C)) is not None and len(co.gamma(R)) == 2
    record(capsys, 3, f"{text}; checked at every object of the chain", ok)


def test_criterion_4_atomicity_calculus(cold, capsys):
    ok, text = suite_ok(cold, 4)
    names = [c["check"] for c in cold["thmB"][1]["checks"]]
    ok &= any("product of atomics" in n for n in names)
    ok &= any("retract atomic" in n for n in names) and any("~ X_Q natural" in n for n in names)
    record(capsys, 4, text, ok)


def test_criterion_5_adjunction_laws(cold, capsys):
    ok, text = suite_ok(cold, 5)
    names = [c["check"] for c in cold["adjunction"][1]["checks"]]
    sites = {n.split(":")[0] for n in names}
    ok &= sites == set(BUILTIN_IDS)
    record(capsys, 5, f"{text}; sites {sorted(sites)}", ok)


def test_criterion_6_generalized_singletons(cold, capsys):
    ok, text = suite_ok(cold, 6)
    runs = nontrivial = 0
    for entry in atom_site_search():
        for T, terminal_like in zip(entry["atomics"], entry["terminal"]):
            for p in co.gamma(T):
                nontrivial += not terminal_like
                for X in family(entry["category"]):
                    ok &= all(at.thmA_suite(p, X).values())
                    runs += 1
    record(capsys, 6, f"{text}; {runs} pointed-atomic runs from site search, "
                      f"{nontrivial} with a non-terminal atomic (degenerate only)", ok)


def test_criterion_7_mclarty_diagnostics(cold, capsys):
    ok, text = suite_ok(cold, 7)
    ok &= co.mclarty_report(builtin("E-op").category, 3).mclarty
    d2 = {c.name: c for c in co.mclarty_report(builtin("discrete2").category, 3).checks}
    ok &= not d2["two_valued"].passed and d2["two_valued"].detail == {"gamma_omega": 4}
    pair = d2["pi_preserves_products"].detail["counterexample"]
    ok &= not d2["pi_preserves_products"].passed and len(pair["pair"]) == 2
    ch = {c.name: c for c in co.mclarty_report(builtin("chain3").category, 3).checks}
    ok &= ch["nullstellensatz"].detail["counterexample"] == "y:0"
    record(capsys, 7, f"{text}; |Gamma(Omega)| = 4 and pair {pair['pair']} on discrete2, "
                      "Nullstellensatz witness y:0 on chain3", ok)


def test_criterion_8_rigidity(cold, capsys):
    ok, text = suite_ok(cold, 8)
    runs = 0
    for site_id in BUILTIN_IDS:
        C = builtin(site_id).category
        if not co.mclarty_report(C, 3).mclarty:
            continue
        for T in family(C):
            if at.is_atomic(T).atomic:
                for Y in family(C):
                    ok &= all(co.right_adjoint_rigidity(T, Y).values())
                    runs += 1
    record(capsys, 8, f"{text}; {runs} (T, Y) pairs", ok)


def test_criterion_9_atomic_connected_decidable(cold, capsys):
    ok, text = suite_ok(cold, 9)
    C = builtin("discrete2").category
    one = dg.terminal(C)
    ok &= at.is_atomic(one).atomic and co.pi(one) == 2
    ok &= not co.mclarty_report(C, 3).mclarty
    record(capsys, 9, f"{text}; discrete2 terminal atomic with 2 pieces", ok)


def test_criterion_10_contractibility(cold, capsys):
    ok, text = suite_ok(cold, 10)
    record(capsys, 10, text, ok)


def test_criterion_11_engine(cold, capsys):
    total = sum(e for _, _, e in cold.values())
    ok = all(cold[s][0] == 0 and cold[s][1]["passed"] for s in ("engine", "density"))
    ok &= all(code == 0 for code, _, _ in cold.values())
    ok &= total < SUITE_TOTAL_LIMIT
    n = len(cold["engine"][1]["checks"]) + len(cold["density"][1]["checks"])
    record(capsys, 11, f"engine and density: {n} checks; all {len(cold)} suites cold "
                       f"in {total:.1f} s (limit {SUITE_TOTAL_LIMIT} s)", ok)
