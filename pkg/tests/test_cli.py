import json

import pytest

from atomtopos import formats
from atomtopos.cli import main
from atomtopos.diagram import representable, terminal
from atomtopos.fincat import opposite
from atomtopos.sites import BUILTIN_IDS, builtin


def run(capsys, *argv):
    code = main(list(argv) + ["--format", "machine"])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


@pytest.mark.parametrize("site_id", BUILTIN_IDS)
def test_validate_builtin_files(capsys, tmp_path, site_id):
    C = builtin(site_id).category
    path = write(tmp_path, "site.json", formats.site_to_raw(C))
    code, rep, _ = run(capsys, "validate", path)
    assert code == 0
    assert rep["site_digest"] == formats.site_digest(C)


def test_validate_missing_composite(capsys, tmp_path):
    raw = {"objects": ["*"], "arrows": [{"name": "e", "dom": "*", "cod": "*"}], "compose": []}
    code, rep, _ = run(capsys, "validate", write(tmp_path, "bad.json", raw))
    assert code == 1
    assert "missing composite (e,e)" in rep["results"]["errors"]


def test_validate_malformed_json(capsys, tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    code, rep, err = run(capsys, "validate", str(p))
    assert code == 2 and rep is None
    assert "malformed JSON" in err


def test_unknown_builtin_and_bad_flags(capsys):
    assert run(capsys, "atoms", "builtin:nope")[0] == 2
    assert main(["atoms"]) == 2
    capsys.readouterr()


def test_atoms_setE_only_terminal(capsys):
    code, rep, _ = run(capsys, "atoms", "builtin:E-op", "--bound", "4")
    assert code == 0
    res = rep["results"]
    profiles = {e["name"]: e["profile"] for e in res["named"] + res["enumerated"]}
    atomic = res["atomic"]
    assert atomic and all(profiles[n] == [1] for n in atomic)
    assert "y:*" not in atomic


def test_atoms_chain_witnesses_replay(capsys):
    code, rep, _ = run(capsys, "atoms", "builtin:chain3", "--bound", "1")
    assert code == 0
    C = builtin("chain3").category
    named = {e["name"]: e for e in rep["results"]["named"]}
    for c in C.objects:
        entry = named[f"y:{c}"]
        assert entry["atomic"]
        T = representable(C, c)
        for a, w in entry["witnesses"].items():
            assert formats.replay_witness(T, a, w)


def test_atoms_tampered_witness_fails_replay(capsys):
    code, rep, _ = run(capsys, "atoms", "builtin:reflexive_graph", "--bound", "1")
    T = terminal(builtin("reflexive_graph").category)
    w = {e["name"]: e for e in rep["results"]["named"]}["1"]["witnesses"]["E"]
    assert formats.replay_witness(T, "E", w)
    # send every element of y_E x 1 to the first element of y_E
    first = {a: next(iter(m.values())) for a, m in w["s"].items() if m}
    bad = dict(w, s={a: {k: first[a] for k in m} for a, m in w["s"].items()})
    assert not formats.replay_witness(T, "E", bad)


def test_atoms_disconnected_terminal(capsys):
    code, rep, _ = run(capsys, "atoms", "builtin:discrete2", "--bound", "1")
    assert code == 0
    assert "1" in rep["results"]["disconnected_atomic"]


def test_radj_terminal_is_identity(capsys):
    code, rep, _ = run(capsys, "radj", "builtin:chain3", "--atom", "1", "--target", "Omega")
    res = rep["results"]
    assert code == 0 and res["adjunction"] and res["isomorphic_to_target"]
    sizes = {a: len(v) for a, v in res["table"]["sets"].items()}
    assert sizes == {a: len(v) for a, v in res["target_table"]["sets"].items()}


def test_radj_two_sub_representable(capsys):
    code, rep, _ = run(capsys, "radj", "builtin:chain3", "--atom", "y:m", "--target", "2")
    res = rep["results"]
    assert code == 0 and not res["candidate_only"]
    assert all(len(v) == 2 for v in res["table"]["sets"].values())
    assert res["triangle_identities"] and res["points"]["right_adjoint"] == 2


def test_radj_candidate_refuted(capsys):
    code, rep, _ = run(capsys, "radj", "builtin:E-op", "--atom", "y:*", "--target", "y:*")
    res = rep["results"]
    assert code == 0 and res["candidate_only"]
    ref = res["refutation"]
    assert ref["direction"] == "count"
    assert (ref["maps_left"], ref["maps_right"]) == (2 ** 24, 4096)


def test_cohesion_exit_codes(capsys):
    code, rep, _ = run(capsys, "cohesion", "builtin:E-op")
    assert code == 0 and rep["results"]["mclarty"]
    code, rep, _ = run(capsys, "cohesion", "builtin:discrete2")
    assert code == 1
    checks = {c["check"]: c for c in rep["results"]["checks"]}
    assert checks["two_valued"]["gamma_omega"] == 4
    assert len(checks["pi_preserves_products"]["counterexample"]["pair"]) == 2


def test_verify_suite(capsys):
    code, rep, _ = run(capsys, "verify", "--suite", "two_sub_t")
    assert code == 0
    assert [r["suite"] for r in rep["results"]["suites"]] == ["two_sub_t"]
    assert all(r["passed"] for r in rep["results"]["suites"])


def test_budget_exit(capsys):
    code, rep, err = run(capsys, "atoms", "builtin:chain3", "--budget", "1")
    assert code == 3
    assert rep["results"]["error"] == "budget_exceeded"
    assert "budget" in err


def test_machine_format_round_trips(capsys):
    main(["cohesion", "builtin:chain3", "--format", "machine"])
    text = capsys.readouterr().out
    rep = formats.parse_report(text)
    assert formats.emit(rep, "machine") == text


def test_reports_byte_identical(capsys):
    outs = []
    for _ in range(2):
        main(["atoms", "builtin:E-op", "--format", "machine"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_human_format(capsys):
    assert main(["cohesion", "builtin:E-op"]) == 0
    out = capsys.readouterr().out
    assert "mclarty: yes" in out


def test_digest_tracks_serialization():
    C = builtin("chain3").category
    same = formats.parse_site(json.loads(json.dumps(formats.site_to_raw(C))))
    assert formats.site_digest(same) == formats.site_digest(C)
    assert formats.site_to_raw(opposite(C)) != formats.site_to_raw(C)
    assert formats.site_digest(opposite(C)) != formats.site_digest(C)


def test_family_file_is_used(capsys, tmp_path):
    C = builtin("E-op").category
    raw = {"site": "builtin:E-op", "sets": {"*": ["p", "q"]},
           "action": {"e": {"p": "p", "q": "p"}}}
    path = write(tmp_path, "fam.json", raw)
    code, rep, _ = run(capsys, "atoms", "builtin:E-op", "--bound", "1", "--family", path)
    assert code == 0
    assert path in {e["name"] for e in rep["results"]["named"]}
    assert formats.resolve_presheaf(path, C)[1].profile() == (2,)


def test_copresheaf_variance(tmp_path):
    # a copresheaf on the chain is a presheaf on the opposite chain
    C = builtin("chain3").category
    raw = {"variance": "copresheaf", "site": "builtin:chain3",
           "sets": {"0": ["x"], "m": ["y"], "1": ["z"]},
           "action": {"0<=m": {"x": "y"}, "m<=1": {"y": "z"}, "0<=1": {"x": "z"}}}
    X = formats.presheaf_from_raw(raw)
    assert X.index == opposite(C) and X.size("m") == 1
    with pytest.raises(formats.InputError):
        formats.presheaf_from_raw(raw, C)
    with pytest.raises(formats.InputError):
        formats.presheaf_from_raw(dict(raw, variance="presheaf"))
