import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from milnor_syntomic.cli import main

SCHEMA = json.loads((Path(__file__).parents[1] / "docs" / "cli_output.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    data = json.loads(out)
    jsonschema.validate(data, SCHEMA)
    return code, data


def test_grade_gr0_is_case_i(capsys):
    code, data = run_json(capsys, "grade", "--n", "0")
    assert code == 0 and data["verdict"] == "N/A"
    assert data["formula"]["text"] == "K_2(k) + K_1(k)"


def test_grade_matches_case_vi(capsys):
    code, data = run_json(capsys, "grade", "--n", "6")
    assert code == 0 and data["verdict"] == "MATCH" and data["ok"]
    assert data["formula"]["text"] == "Omega_k^1/B_2"
    assert data["computed"]["mismatches"] == 0


def test_grade_text_output(capsys):
    code, out, _ = run(capsys, "grade", "--n", "6")
    assert code == 0 and "verdict : MATCH" in out


def test_p_dividing_e_is_rejected(capsys):
    code, out, err = run(capsys, "grade", "--e", "5")
    assert code == 2 and "p ∤ e" in err
    code, data = run_json(capsys, "grade", "--e", "5")
    assert code == 2 and data["ok"] is False and "p ∤ e" in data["error"]


def test_table_case_vii(capsys):
    code, data = run_json(capsys, "table", "--case", "vii", "--n", "9", "--n-max", "11")
    assert code == 0
    assert [r["formula"]["text"] for r in data["rows"]] == ["0", "k/k^p", "0"]


def test_reference_all_cases(capsys):
    code, data = run_json(capsys, "reference", "--n", "6")
    assert code == 0
    assert "error" in data["descriptors"]["i"] and "error" in data["descriptors"]["v"]
    assert data["descriptors"]["vi"]["text"] == "Omega_k^1/B_2"


def test_complex_report(capsys):
    code, data = run_json(capsys, "complex", "--tdeg", "2")
    assert code == 0 and data["exactness"]["ok"]
    assert set(data["complexes"]) == {"S", "S_prime", "S_modified"}
    assert data["chain"][0] == [2]


def test_verify_is_deterministic(capsys):
    args = ("verify", "identities", "--samples", "5", "--seed", "7", "--format", "json")
    assert main(list(args)) == 0
    first = capsys.readouterr().out
    assert main(list(args)) == 0
    assert capsys.readouterr().out == first
    jsonschema.validate(json.loads(first), SCHEMA)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "milnor_syntomic", "reference", "--case", "ii", "--n", "3"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and "Omega_k^1" in res.stdout


def test_unknown_suite_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2
