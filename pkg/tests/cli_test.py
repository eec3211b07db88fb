import json

import pytest

from sdpkit.cli import (
    main,
)

NO_VIABLE_START = (
    "[problem]\nkind = deterministic\nhorizon = 2\n"
    "[layers]\n0 = s\n1 = u\n"
    "[controls]\n0 s = go\n"
    "[step]\n0 s go = u\n"
)

UNNORMALIZED = (
    "[problem]\nkind = stochastic\n"
    "[layers]\n0 = s\n1 = u v\n"
    "[controls]\n0 s = go\n"
    "[step]\n0 s go = u:0.5 v:0.4\n"
)


@pytest.fixture
def write(tmp_path):
    def write(text):
        path = tmp_path / "problem.ini"
        path.write_text(text)
        return str(path)
    return write


def test_solve_single_state(capsys):
    assert main(["solve", "cyl-det", "--steps", "2", "--start", "b"]) == 0
    assert capsys.readouterr().out == "b -> R : 8.000000000\n"


def test_solve_uses_declared_horizon(capsys):
    assert main(["solve", "knapsack", "--start", "5"]) == 0
    assert capsys.readouterr().out == "5 -> Take : 7.000000000\n"


def test_solve_full_table(capsys):
    assert main(["solve", "cyl-det", "--steps", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "t=0 n=1"
    assert out[2] == "b -> L : 3.000000000"


def test_solve_json(capsys):
    assert main(["solve", "cyl-time", "--steps", "4", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["start_t"] == 0
    assert [entry["x"] for entry in payload["policies"][0]["entries"]] == ["b", "c", "d", "e"]


def test_solve_requires_steps_without_horizon(capsys):
    assert main(["solve", "cyl-det"]) == 1
    assert "--steps" in capsys.readouterr().err


def test_measure_override(capsys):
    assert main(["solve", "cyl-nondet", "--steps", "1", "--start", "c", "--measure", "best"]) == 0
    assert capsys.readouterr().out == "c -> L : 5.000000000\n"


def test_measure_of_another_kind_is_ill_posed(capsys):
    assert main(["solve", "cyl-nondet", "--steps", "1", "--measure", "expected"]) == 2
    assert "accepting nondeterministic containers" in capsys.readouterr().err


def test_solve_validates_once(capsys, monkeypatch):
    import sdpkit.solver
    monkeypatch.setattr(sdpkit.solver, "validate", lambda p, max_t: pytest.fail("validated twice"))
    assert main(["solve", "cyl-det", "--steps", "2", "--start", "b"]) == 0
    assert main(["verify", "cyl-det", "--steps", "1", "--samples", "20"]) == 0
    capsys.readouterr()


def test_trajectories_stochastic(capsys):
    assert main(["trajectories", "cyl-stoch", "--start", "b", "--steps", "1", "--slip", "0.2"]) == 0
    assert capsys.readouterr().out.splitlines() == [
        "0.800000000|b -L-> a : 3.000000000",
        "0.200000000|b -L-> b : 3.000000000",
        "expected : 3.000000000",
    ]


def test_trajectories_json(capsys):
    assert main(["trajectories", "cyl-det", "--start", "b", "--steps", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["value"] == 8.0
    assert payload["trajectories"][0]["final"] == "b"
    assert payload["trajectories"][0]["prob"] is None


def test_unknown_start_state(capsys):
    assert main(["solve", "cyl-det", "--steps", "1", "--start", "z"]) == 3
    assert main(["trajectories", "cyl-time", "--start", "a", "--steps", "4"]) == 3


def test_slip_only_for_stochastic_cylinder(capsys):
    assert main(["solve", "cyl-det", "--steps", "1", "--slip", "0.1"]) == 2
    assert main(["solve", "cyl-stoch", "--steps", "1", "--slip", "1.5"]) == 2


def test_validate_ok(capsys):
    assert main(["validate", "cyl-time", "--steps", "7"]) == 0
    assert capsys.readouterr().out == "OK\n"


def test_validate_no_viable_start(capsys, write):
    path = write(NO_VIABLE_START)
    assert main(["validate", path]) == 2
    assert capsys.readouterr().out.startswith("NoViableStart t=0")
    assert main(["solve", path]) == 2
    assert "NoViableStart" in capsys.readouterr().out


def test_validate_unnormalized(capsys, write):
    assert main(["validate", write(UNNORMALIZED), "--steps", "1"]) == 2
    assert capsys.readouterr().out.startswith("NormalizationViolation t=0 x=s y=go")
    assert main(["solve", write(UNNORMALIZED), "--steps", "1"]) == 2
    assert "NormalizationViolation" in capsys.readouterr().out


def test_invalid_problem_file(capsys, write):
    assert main(["validate", write("[problem]\nkind = fuzzy\n"), "--steps", "1"]) == 2
    assert "Expected a valid problem file" in capsys.readouterr().err


def test_verify_passes(capsys):
    assert main(["verify", "cyl-det", "--steps", "2", "--samples", "50"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "PASS validate"
    assert "PASS deterministic:functor-identity" in out
    assert "PASS expected:monotone" in out
    assert out[-3:] == ["PASS opt-policy-seq t=0 n=2", "PASS bellman t=1 n=1", "PASS bellman t=0 n=2"]


def test_verify_json(capsys):
    assert main(["verify", "cyl-stoch", "--steps", "1", "--samples", "20", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["validation"] == []
    assert all(law["passed"] for law in payload["laws"])
    assert [check["name"] for check in payload["checks"]] == ["opt-policy-seq t=0 n=1", "bellman t=0 n=1"]


def test_verify_too_large(capsys):
    assert main(["verify", "cyl-det", "--steps", "12", "--cap", "1000", "--samples", "10"]) == 4
    assert "try a smaller --steps" in capsys.readouterr().err


def test_negative_steps_is_a_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["solve", "cyl-det", "--steps", "-1"])
    assert e.value.code == 2
