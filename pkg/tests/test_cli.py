import json

import pytest

from harmcalc import cli

CTX = "g1=no,g2=yes,g3=yes"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, (json.loads(out) if out else None), err


def test_harm_treatments_example(capsys):
    code, rep, _ = run_json(capsys, "harm", "--model", "treatments", "--policy", "t1", "--context", CTX)
    assert code == 0
    res = rep["result"]
    assert res["value"] == 1.0 and res["actual_outcome"] == "dead"
    assert [(w["alternative"], w["contrast_outcome"]) for w in res["witnesses"]] == [({"T": "t2"}, "alive")]


def test_wqh_driving_example(capsys):
    for flags in ((), ("--weighting", "table:experience")):
        code, rep, _ = run_json(capsys, "wqh", "--model", "driving", "--policy", "fast", *flags)
        assert code == 0 and rep["result"]["total"] == 0.0
    _, rep, _ = run_json(capsys, "wqh", "--model", "driving", "--policy", "fast", "--weighting", "identity")
    assert rep["result"]["total"] > 0.1


def test_compare_organ_example(capsys):
    code, rep, _ = run_json(capsys, "compare", "--model", "organ", "--policies", "harvest,refrain")
    assert code == 0 and rep["result"]["ranking"] == ["refrain", "harvest"]
    assert rep["model"] == "organ-donation"


def test_validate_solve_and_cause(capsys):
    code, rep, _ = run_json(capsys, "validate", "--model", "tipping")
    assert code == 0 and rep["result"]["valid"]
    code, rep, _ = run_json(capsys, "solve", "--model", "treatments", "--context", CTX, "--set", "T=t2")
    assert code == 0 and rep["result"]["assignment"]["O"] == "alive"
    code, rep, _ = run_json(capsys, "cause", "--model", "treatments", "--context", CTX, "--policy", "t1",
                            "--cause", "T=t1", "--alt", "T=t2", "--effect", "O=dead", "--alt-effect", "O=alive")
    assert code == 0 and rep["result"]["holds"]


def test_harm_flags(capsys):
    code, rep, _ = run_json(capsys, "harm", "--model", "treatments", "--policy", "t2",
                            "--context", "g1=yes,g2=no,g3=no", "--qualitative", "--rbt")
    assert code == 0
    assert rep["result"]["qualitative"]["harmed"] is True
    assert rep["result"]["rbt_harm"] == 1.0
    code, rep, _ = run_json(capsys, "harm", "--model", "tipping", "--set", "Tip=1",
                            "--context", "wallet=5,tip_choice=0", "--benefit")
    assert code == 0 and rep["result"]["value"] == pytest.approx(0.04, abs=1e-15)
    assert rep["result"]["benefit"]["value"] == 0.0


def test_aggregate_penalty_mode_and_overrides(capsys):
    code, rep, _ = run_json(capsys, "aggregate", "--model", "concentrated-diffuse", "--policy", "concentrate",
                            "--alpha", "100", "--penalty-mode", "per-group")
    assert code == 0 and rep["result"]["total"] == 101.0 and rep["result"]["penalty_mode"] == "per-group"


def test_text_output_is_readable(capsys):
    code, out, _ = run(capsys, "harm", "--model", "treatments", "--policy", "t1", "--context", CTX)
    assert code == 0
    assert out.startswith("harm treatments") and "value: 1.0" in out


def test_json_is_byte_deterministic(capsys):
    argv = ("compare", "--model", "norcross-c", "--weighting", "prelec:0.5", "--format", "json")
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


@pytest.mark.parametrize("argv", [
    ("harm", "--model", "nonexistent", "--policy", "x"),
    ("harm", "--model", "treatments", "--policy", "nope", "--context", CTX),
    ("harm", "--model", "treatments", "--policy", "t1"),
    ("solve", "--model", "treatments", "--context", "g1=maybe,g2=no,g3=no"),
    ("wqh", "--model", "driving", "--policy", "fast", "--weighting", "prelec:7"),
    ("bogus",),
    ("harm",),
])
def test_input_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == "" and err


def test_diagnostics_exit_1(capsys, tmp_path):
    bad = tmp_path / "bad.harm"
    bad.write_text("[variables]\nU : exogenous = a\nX : endogenous = 0, 1\n[equations]\nX := Y\n"
                   "[distribution]\nU=a : 9/10\n")
    code, _, err = run(capsys, "validate", "--model", str(bad))
    assert code == 1
    assert "line 5, column 6: undeclared variable 'Y'" in err and "distribution sums to 0.9" in err


def test_failed_ac1_exits_2(capsys):
    code, rep, _ = run_json(capsys, "cause", "--model", "treatments", "--context", CTX,
                            "--cause", "T=t1", "--alt", "T=t2", "--effect", "O=alive", "--alt-effect", "O=dead")
    assert code == 2 and rep["result"]["ac1"] is False


def test_internal_error_exits_3(capsys, monkeypatch):
    def boom(*_):
        raise RuntimeError("kaput")

    monkeypatch.setattr(cli, "solve", boom)
    code, _, err = run(capsys, "solve", "--model", "tipping", "--context", "wallet=5")
    assert code == 3 and "kaput" in err
