import json
import subprocess
import sys

import pytest

from hnnresp import cli

Z3_DOUBLE = {"schema": 1, "group": {"kind": "abelian", "p": 3, "exponents": [1]},
             "A": [[1]], "phi": [[2]]}
TRIVIAL = {"schema": 1, "group": {"kind": "abelian", "p": 2, "exponents": [1, 1]}, "A": [], "phi": []}
WREATH = {"schema": 1, "group": {"kind": "fixture", "name": "wreath_pair"}}
SHIFT = {"schema": 1, "group": {"kind": "fixture", "name": "cyclic_shift_pair"}}
ELEMENTARY = {"schema": 1, "group": {"kind": "abelian", "p": 3, "exponents": [1, 1, 1]},
              "A": [[1, 0, 0], [0, 1, 0]], "phi": [[1, 0, 0], [0, 0, 1]]}
NONABELIAN_TRIVIAL = {"schema": 1,
                      "group": {"kind": "matrix_semidirect", "p": 3, "m": 3, "matrix": [[1, 1], [0, 1]]},
                      "A": [], "phi": []}


def call(command, problem=None, *flags, tmp_path=None):
    argv = [command, "--json", *flags]
    if problem is not None:
        path = tmp_path / "problem.json"
        path.write_text(json.dumps(problem))
        argv += ["--file", str(path)]
    out, code, _ = cli.run(argv)
    return out, code


def test_core_of_wreath_fixture(tmp_path):
    out, code = call("core", WREATH, tmp_path=tmp_path)
    assert code == 0 and out["schema"] == 1
    assert out["core"] == [[0, 0] + [0] * 9]
    assert out["r"] == 1 and out["order"] == 1


def test_core_of_twisted_wreath_fixture(tmp_path):
    x = [1, 0] + [0] * 9
    out, code = call("core", {**WREATH, "twist": {"a": x, "b": [0] * 11}}, tmp_path=tmp_path)
    assert code == 0 and out["size"] == 3 and out["order"] == 2


def test_core_of_trivial_pair(tmp_path):
    out, code = call("core", TRIVIAL, tmp_path=tmp_path)
    assert code == 0 and out["size"] == 1 and out["order"] == 1


def test_decide_multiplication_by_two(tmp_path):
    out, code = call("decide", Z3_DOUBLE, tmp_path=tmp_path)
    assert code == 0
    assert out["decision"]["verdict"] == "not_residually_p"


def test_decide_cyclic_shift_fixture(tmp_path):
    out, code = call("decide", SHIFT, tmp_path=tmp_path)
    assert code == 0
    assert out["decision"]["verdict"] == "not_residually_p"
    assert out["decision"]["certificate"]["type"] == "exhausted"


def test_decide_trivial_pair_over_nonabelian_group(tmp_path):
    out, code = call("decide", NONABELIAN_TRIVIAL, tmp_path=tmp_path)
    assert code == 0
    d = out["decision"]
    assert d["verdict"] == "residually_p" and d["certificate"]["type"] == "chief_filtration"


def test_decide_large_group_falls_back_to_obstruction(tmp_path):
    out, code = call("decide", WREATH, tmp_path=tmp_path)
    assert code == 0
    assert out["decision"]["route"] == "obstruction_toplevel"
    assert out["decision"]["verdict"] == "not_residually_p"


@pytest.mark.parametrize("problem", [Z3_DOUBLE, TRIVIAL, SHIFT, NONABELIAN_TRIVIAL, ELEMENTARY, WREATH])
def test_certificates_round_trip(problem, tmp_path):
    out, code = call("decide", problem, tmp_path=tmp_path)
    assert code == 0
    (tmp_path / "cert.json").write_text(json.dumps(out))
    res, rcode, _ = cli.run(["verify-cert", "--json", "--file", str(tmp_path / "cert.json")])
    assert rcode == 0 and res["valid"], res


def test_obstruct_certificate_round_trips(tmp_path):
    out, code = call("obstruct", SHIFT, tmp_path=tmp_path)
    assert code == 0 and out["decision"]["certificate"]["type"] == "no_filtration_survives"
    (tmp_path / "cert.json").write_text(json.dumps(out))
    res, rcode, _ = cli.run(["verify-cert", "--json", "--file", str(tmp_path / "cert.json")])
    assert rcode == 0 and res["valid"]


def test_obstruct_inconclusive_exit_code(tmp_path):
    out, code = call("obstruct", TRIVIAL, tmp_path=tmp_path)
    assert code == 1 and out["decision"]["verdict"] == "inconclusive"


def test_tampered_certificate_is_rejected(tmp_path):
    out, _ = call("decide", Z3_DOUBLE, tmp_path=tmp_path)
    out["decision"]["certificate"]["order"] = 1
    (tmp_path / "cert.json").write_text(json.dumps(out))
    res, rcode, _ = cli.run(["verify-cert", "--json", "--file", str(tmp_path / "cert.json")])
    assert rcode == 2 and not res["valid"]


def test_witness_elementary_route(tmp_path):
    out, code = call("witness", ELEMENTARY, tmp_path=tmp_path)
    assert code == 0
    assert out["route"] == "elementary"
    assert out["witness"]["gamma_order"] == 3
    assert out["cover"]["checks_ok"] and all(out["checks"].values())


def test_witness_pipeline_route(tmp_path):
    problem = {"schema": 1, "group": {"kind": "abelian", "p": 3, "exponents": [2, 1]},
               "A": [[1, 0]], "phi": [[1, 1]]}
    out, code = call("witness", problem, "--s", "3", tmp_path=tmp_path)
    assert code == 0
    assert out["route"] == "power_filtration"
    assert out["certificate"]["orders"] == [27, 9, 3, 1]
    assert out["cover"]["s"] == 3 and out["cover"]["checks_ok"]


def test_witness_missing_hypothesis(tmp_path):
    out, code = call("witness", Z3_DOUBLE, tmp_path=tmp_path)
    assert code == 1 and "missing_condition" in out


def test_reduce_pinch(tmp_path):
    out, code = call("reduce", {**ELEMENTARY, "word": ["T", [0, 1, 0], "t"]}, tmp_path=tmp_path)
    assert code == 0 and out["element"] == [0, 0, 1]


@pytest.mark.parametrize("problem, where", [
    ({"schema": 1, "group": {"kind": "abelian", "p": 4, "exponents": [1]}}, "group"),
    ({"schema": 1, "group": {"kind": "abelian", "p": 3, "exponents": [1]}, "A": [[1]], "phi": [[1, 1]]}, "phi[0]"),
    ({"schema": 1, "group": {"kind": "abelian", "p": 3, "exponents": [1]}, "A": [[1]], "phi": [[0]]}, "phi"),
    ({"schema": 2, "group": {}}, "schema"),
    ({"schema": 1, "group": {"kind": "klein"}}, "group.kind"),
    ({"schema": 1, "group": {"kind": "abelian", "p": 3, "exponents": [1]}, "A": [[1]], "phi": [[1]], "B": [[0]]}, "B"),
])
def test_invalid_input_is_located(problem, where, tmp_path):
    out, code = call("core", problem, tmp_path=tmp_path)
    assert code == 2
    assert out["where"] == where


def test_prime_flag_must_match(tmp_path):
    out, code = call("core", Z3_DOUBLE, "--p", "2", tmp_path=tmp_path)
    assert code == 2 and out["where"] == "group.p"


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{")
    out, code, _ = cli.run(["core", "--file", str(path)])
    assert code == 2


def test_verify_paper():
    out, code, _ = cli.run(["verify-paper", "--json"])
    assert code == 0 and out["all_passed"]


def test_enumerate_small_survey():
    out, code, _ = cli.run(["enumerate", "--json", "--p", "2", "--cap", "4"])
    assert code == 0 and out["pairs"] > 0 and not out["disagreements"]


def test_enumerate_random_mode_is_seeded():
    a, _, _ = cli.run(["enumerate", "--json", "--p", "3", "--samples", "8", "--seed", "5"])
    b, _, _ = cli.run(["enumerate", "--json", "--p", "3", "--samples", "8", "--seed", "5"])
    assert a == b and a["mode"] == "random"


def test_output_bytes_are_deterministic(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(SHIFT))
    cmd = [sys.executable, "-m", "hnnresp.cli", "decide", "--json", "--file", str(path)]
    first = subprocess.run(cmd, capture_output=True, check=False)
    second = subprocess.run(cmd, capture_output=True, check=False)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert json.loads(first.stdout)["schema"] == 1


def test_human_summary(capsys, tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(Z3_DOUBLE))
    assert cli.main(["decide", "--file", str(path)]) == 0
    assert "not_residually_p" in capsys.readouterr().out
