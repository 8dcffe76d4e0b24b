import json
import subprocess
import sys

import pytest

from cameron_liebler.cli import main, failures


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_build_then_verify(tmp_path, capsys):
    f = tmp_path / "derived5.txt"
    code, out, _ = run(capsys, "build", "--class", "derived", "--q", "5", "--out", str(f))
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1 and doc["size"] == 403 and doc["tight"]["pass"]
    code, out, _ = run(capsys, "verify", "--q", "5", "--file", str(f))
    rep = json.loads(out)["tight"]
    assert code == 0 and rep["pass"] and (rep["expected_in"], rep["expected_out"]) == (103, 78)
    assert set(rep) == {"pass", "i", "expected_in", "expected_out", "size",
                        "expected_size", "n_violations", "sample_violations"}


def test_verify_wrong_x_exits_nonzero(tmp_path, capsys):
    f = tmp_path / "d.txt"
    run(capsys, "build", "--class", "derived", "--q", "5", "--out", str(f))
    code, out, _ = run(capsys, "verify", "--q", "5", "--file", str(f), "--x", "12")
    doc = json.loads(out)
    assert code == 1 and doc["failures"] == ["tight.pass"]


def test_universe_mismatch(tmp_path, capsys):
    f = tmp_path / "d.txt"
    run(capsys, "build", "--class", "derived", "--q", "5", "--out", str(f))
    code, _, err = run(capsys, "verify", "--q", "9", "--file", str(f))
    assert code == 2 and "hash" in err


def test_derived_rejected_for_q7(capsys):
    code, out, err = run(capsys, "build", "--class", "derived", "--q", "7")
    assert code == 2 and out == "" and "1 (mod 4)" in err


@pytest.mark.parametrize("argv", [["--q", "15"], ["--q", "8"], ["--p", "3", "--k", "2",
                                                                "--modulus", "2,0,1"],
                                  ["--q", "5", "--lambda-bar", "1"]])
def test_bad_configuration(capsys, argv):
    code, _, err = run(capsys, "labels", *argv)
    assert code == 2 and err.startswith("error:")


def test_orbits_q5(capsys):
    code, out, _ = run(capsys, "orbits", "--q", "5")
    doc = json.loads(out)
    assert code == 0
    assert doc["point_orbits"]["count"] == 9 and doc["line_orbits"]["count"] == 20
    row = doc["line_orbits"]["orbits"][0]
    assert set(row) == {"id", "size", "label", "representative"}


def test_labels_and_characters(capsys):
    code, out, _ = run(capsys, "labels", "--q", "5")
    doc = json.loads(out)
    assert code == 0 and doc["point_census"]["pass"] and doc["tallies"]["point"]["pass"]
    code, out, _ = run(capsys, "characters", "--q", "9", "--kind", "star")
    doc = json.loads(out)
    assert code == 0 and doc["star"]["values"] == [5, 25, 35, 45, 55, 75]


def test_compare_known_and_spread(capsys):
    code, out, _ = run(capsys, "compare-known", "--q", "9")
    v = json.loads(out)["verdicts"]
    assert code == 0 and {r["verdict"] for r in v.values()} == {"DISTINCT"}
    code, out, _ = run(capsys, "spread-test", "--q", "5", "--samples", "5", "--seed", "3")
    doc = json.loads(out)
    assert code == 0 and doc["spread"]["seed"] == 3 and doc["spread"]["counts"] == [13]


def test_report_schema(capsys):
    code, out, _ = run(capsys, "report", "--q", "5")
    doc = json.loads(out)
    assert code == 0
    for key in ("q", "class", "x", "size", "tight_pass", "precondition_pass",
                "star_values", "plane_values", "verdicts", "runtime_ms",
                "schema", "line_table_hash"):
        assert key in doc
    assert doc["runtime_ms"] is None
    code, out, _ = run(capsys, "report", "--q", "5", "--timing")
    assert json.loads(out)["runtime_ms"] > 0


def test_report_csv(capsys):
    code, out, _ = run(capsys, "report", "--q", "5", "--format", "csv")
    rows = out.splitlines()
    assert code == 0 and rows[0] == "key,value" and "tight_pass,true" in rows


def test_lines_export(tmp_path, capsys):
    f = tmp_path / "lines.csv"
    assert run(capsys, "lines", "--q", "3", "--output", str(f))[0] == 0
    assert len(f.read_text().splitlines()) == 131


def test_deterministic_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert run(capsys, "spread-test", "--q", "5", "--samples", "8", "--seed", "11",
                   "--jobs", "2", "--output", str(f))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    c = tmp_path / "c.json"
    run(capsys, "spread-test", "--q", "5", "--samples", "8", "--seed", "11", "--output", str(c))
    assert c.read_bytes() == a.read_bytes()


def test_failures_walks_nested_blocks():
    doc = {"a": {"pass": True}, "b": [{"pass": False}], "tight_pass": False}
    assert failures(doc) == ["b[0].pass", "tight_pass"]


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "cameron_liebler.cli", "build", "--class",
                          "derived", "--q", "7"], capture_output=True, text=True)
    assert res.returncode == 2
