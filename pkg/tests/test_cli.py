import json

import pytest

from clogic.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prove_provable_exit_0(capsys):
    code, out, _ = run_cli(capsys, "prove", "--dialect", "cl1",
                           "((p->q)&(p->r))->(p->(q&r))")
    assert code == 0
    assert "Rule (a)" in out and out.count("\n") == 5


def test_prove_unprovable_exit_1(capsys):
    code, out, _ = run_cli(capsys, "prove", "--dialect", "cl2", "P -> (P /\\ P)")
    assert code == 1
    assert "not_provable" in out


def test_prove_unknown_exit_2(capsys):
    code, out, _ = run_cli(capsys, "prove", "--dialect", "cl4", "--budget", "1",
                           "ex y. all x. (p(x) -> p(y))")
    assert code == 2


def test_eval_two_board_reduction(capsys):
    code, out, _ = run_cli(capsys, "eval",
                           "--formula", "(true|false)->((false|true)/\\true)",
                           "--run", "B:1.1 T:2.1.2")
    assert code == 0
    assert "legal, winner=T" in out


def test_check_accepts_prove_output(capsys, tmp_path):
    proof_file = str(tmp_path / "p.json")
    code, _, _ = run_cli(capsys, "prove", "--dialect", "cl2", "P /\\ P -> P",
                         "--out", proof_file)
    assert code == 0
    code, out, _ = run_cli(capsys, "check", "--proof", proof_file)
    assert code == 0 and "ok" in out


def test_json_output_deterministic(capsys):
    code, out1, _ = run_cli(capsys, "--json", "prove", "--dialect", "cl1",
                            "((p&q)/\\(p&q))->(p&q)")
    code, out2, _ = run_cli(capsys, "--json", "prove", "--dialect", "cl1",
                            "((p&q)/\\(p&q))->(p&q)")
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["status"] == "provable"


def test_parse_verb(capsys):
    code, out, _ = run_cli(capsys, "--json", "parse", "!x.?y.(P(x) -> P(y))")
    data = json.loads(out)
    assert data["dialects"]["cl4"] and not data["dialects"]["cl2"]


def test_trace_verb(capsys):
    code, out, _ = run_cli(capsys, "trace",
                           "--formula", "(a & (b | c)) /\\ (d \\/ (e | f))",
                           "--run", "T:2.2.1 B:1.2 T:1.2")
    assert code == 0
    assert out.strip().endswith("c /\\ (d \\/ e)")


def test_static_check_verb(capsys):
    code, out, _ = run_cli(capsys, "static-check", "--formula", "p & q")
    assert code == 0 and "static" in out


def test_decide_blindfree_verb(capsys):
    code, out, _ = run_cli(capsys, "decide-blindfree", "!x.?y.(P(x) -> P(y))")
    assert code == 0
    code, _, _ = run_cli(capsys, "decide-blindfree", "?y.!x.(P(x) -> P(y))")
    assert code == 1


def test_extract_verify_play_pipeline(capsys, tmp_path):
    proof_file = str(tmp_path / "p.json")
    agent_file = str(tmp_path / "a.json")
    family_file = tmp_path / "family.json"
    run_cli(capsys, "prove", "--dialect", "cl1",
            "((p->q)&(p->r))->(p->(q&r))", "--out", proof_file)
    code, out, _ = run_cli(capsys, "extract", "--proof", proof_file,
                           "--out", agent_file)
    assert code == 0
    members = []
    for bits in ((True, True, True), (True, False, True), (False, False, False)):
        members.append({"label": str(bits),
                        "elementary": {n: {"arity": 0, "table": v}
                                       for n, v in zip("pqr", bits)}})
    family_file.write_text(json.dumps({"members": members}))
    code, out, _ = run_cli(capsys, "verify", "--agent", agent_file,
                           "--interp-family", str(family_file))
    assert code == 0
    assert "0 losses" in out


def test_hpm_run_verb(capsys, tmp_path):
    proof_file = str(tmp_path / "p.json")
    agent_file = str(tmp_path / "a.json")
    sched_file = tmp_path / "s.txt"
    run_cli(capsys, "prove", "--dialect", "cl1",
            "((p->q)&(p->r))->(p->(q&r))", "--out", proof_file)
    run_cli(capsys, "extract", "--proof", proof_file, "--out", agent_file)
    sched_file.write_text("0: 2.2.1\n")
    code, out, _ = run_cli(capsys, "hpm-run", "--agent", agent_file,
                           "--schedule", str(sched_file))
    assert code == 0
    assert out.strip() == "B:2.2.1 T:1.1"


def test_play_verb_interactive(capsys, tmp_path, monkeypatch):
    proof_file = str(tmp_path / "p.json")
    run_cli(capsys, "prove", "--dialect", "cl1",
            "((p->q)&(p->r))->(p->(q&r))", "--out", proof_file)
    answers = iter(["2.2.1", ""])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(answers))
    code, out, _ = run_cli(capsys, "play", "--proof", proof_file)
    assert code == 0
    assert "machine: 1.1" in out
    assert "winner=T" in out


def test_usage_error_exit_64(capsys):
    assert main(["prove"]) == 64          # missing formula/dialect
    assert main(["no-such-verb"]) == 64


def test_engine_error_exit_65(capsys):
    assert main(["parse", "p ->"]) == 65
    assert main(["check", "--proof", "/nonexistent/x.json"]) == 65
