import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest

from wheelperc import cli
from wheelperc.exact import parse_frac

GOLDEN = Path(__file__).parent / "golden"


def call(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def call_json(capsys, *argv):
    code, out, err = call(capsys, *argv)
    return code, json.loads(out)


def test_mu_json(capsys):
    code, blob = call_json(capsys, "mu", "--n", "3")
    assert code == 0
    assert blob["schema"] == 1 and blob["ok"]
    assert blob["result"]["alpha"] == [2, 1, 1, 2, 1]
    assert blob["result"]["asm"] == 7
    probs = [parse_frac(x) for x in blob["result"]["probabilities"]]
    assert sum(probs) == 1


def test_mu_csv_and_plain(capsys):
    code, out, _ = call(capsys, "mu", "--n", "2", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "matching,alpha,probability"
    assert len(lines) == 3
    code, out, _ = call(capsys, "mu", "--n", "2", "--format", "plain")
    assert "1/2" in out


def test_resource_cap_exit_code(capsys):
    code, out, err = call(capsys, "mu", "--n", "40")
    assert code == 2 and "resource cap" in err and out == ""


def test_usage_errors(capsys):
    assert call(capsys, "prob", "--n", "3")[0] == 2
    assert call(capsys, "prob", "--n", "3", "--matching", "[[1,3],[2,4]]")[0] == 2
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys, "simulate", "--n", "3", "--event", "ring:1")[0] == 2
    assert call(capsys, "mu", "--n", "2", "--threads", "0")[0] == 2


def test_prob_routes_agree(capsys):
    code, blob = call_json(capsys, "prob", "--n", "4", "--matching", "[[1,2],[3,4]]")
    assert code == 0
    r = blob["result"]
    assert r["agree"] and set(r["routes"]) == {"brute", "ct"}
    assert parse_frac(r["value"]) == Fraction(5, 21)


def test_prob_past_brute_range(capsys):
    code, blob = call_json(capsys, "prob", "--n", "9", "--matching", "[[1,2]]")
    assert code == 0 and set(blob["result"]["routes"]) == {"ct"}
    assert parse_frac(blob["result"]["value"]) == Fraction(3, 2) * Fraction(82, 323)


def test_matching_round_trip(capsys):
    code, blob = call_json(capsys, "fpoly", "--matching", "[[1, 4], [2, 3]]")
    assert code == 0 and blob["result"]["matching"] == [[1, 4], [2, 3]]


def test_anticluster(capsys):
    code, blob = call_json(capsys, "anticluster", "--k", "2", "--n", "4", "--route", "both")
    assert code == 0 and blob["result"]["agree"]
    assert parse_frac(blob["result"]["value"]) == Fraction(25, 42)
    code, blob = call_json(capsys, "anticluster", "--k", "4")
    assert parse_frac(blob["result"]["value"]) == Fraction(33, 512)


def test_halfplane_and_interpolate(capsys):
    code, blob = call_json(capsys, "halfplane", "--matching", "[[1,2],[3,4]]")
    assert code == 0 and blob["result"]["value"] == "97/512"
    code, blob = call_json(capsys, "interpolate", "--matching", "[[1,2]]")
    assert code == 0 and blob["result"]["witness_ok"] and blob["result"]["limit"] == "3/8"


def test_ct_asm_with_poly_dump(capsys):
    code, out, err = call(capsys, "ct", "asm", "--n", "3", "--emit-poly")
    assert code == 0
    assert json.loads(out)["result"]["coefficient"] == 7
    assert ":" in err


def test_ct_submatching(capsys):
    code, blob = call_json(capsys, "ct", "--n", "4", "--matching", "[[1,2]]")
    assert code == 0 and blob["result"]["probability"] == "17/42"


def test_simulate(capsys):
    code, blob = call_json(capsys, "simulate", "--n", "3", "--event", "submatching:[[1,2]]",
                           "--samples", "2e4", "--seed", "3")
    r = blob["result"]
    assert code == 0 and r["samples"] == 20000
    assert r["exact"] == "3/7" and r["exact_in_ci99"]
    assert blob["meta"]["seed"] == 3


def test_verify_all(capsys):
    code, blob = call_json(capsys, "verify", "--suite", "all", "--max-n", "5")
    assert code == 0 and blob["result"]["ok"]
    assert blob["result"]["checked"] > 1000


def test_cache_reuse(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("WHEELPERC_CACHE_DIR", str(tmp_path))
    call(capsys, "mu", "--n", "4")
    path = tmp_path / "mu_n4.v1.json"
    blob = json.loads(path.read_text())
    assert blob["version"] == 1 and blob["kind"] == "mu"
    # a doctored payload proves the second run reads the file
    blob["payload"] = [1] * 14
    path.write_text(json.dumps(blob))
    _, res = call_json(capsys, "mu", "--n", "4")
    assert res["result"]["alpha"] == [1] * 14


def test_corrupt_cache_is_recomputed(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("WHEELPERC_CACHE_DIR", str(tmp_path))
    (tmp_path / "mu_n3.v1.json").write_text("{not json")
    code, out, err = call(capsys, "mu", "--n", "3")
    assert code == 0 and json.loads(out)["result"]["alpha"] == [2, 1, 1, 2, 1]
    assert "ignoring" in err


@pytest.mark.parametrize("table", ["submatching", "anticluster", "cmatrix", "polynomials"])
def test_tables_match_golden(capsys, table):
    code, blob = call_json(capsys, "tables", "--table", table)
    assert code == 0
    want = json.loads((GOLDEN / f"table_{table}.json").read_text())
    assert blob["result"][table] == want


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "wheelperc.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "0.1.0"
