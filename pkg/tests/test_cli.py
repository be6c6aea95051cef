import csv
import io
import json
import subprocess
import sys

import pytest

from orbitcensus.cli import EXIT_CAPACITY, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, render


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_lo(capsys):
    code, out, _ = run(capsys, "--format", "json", "lo", "2", "4")
    assert code == EXIT_OK
    assert json.loads(out) == [{"p": 2, "n": 4, "lo": 6}]


def test_lo_derived_flags_p3(capsys):
    code, out, _ = run(capsys, "lo", "3", "4", "--derived", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert (doc["lo_closed"], doc["lo_derived"], doc["known_discrepancy"]) == (10, 5, "lo-p3-even")


def test_lt_table(capsys):
    code, out, _ = run(capsys, "lt", "7", "4")
    assert code == EXIT_OK
    header, rule, row = out.splitlines()
    assert header.split() == ["p", "n", "Unr", "PS", "St", "SCU", "SCR", "total"]
    assert row.split() == ["7", "4", "0", "4", "0", "4", "0", "8"]
    assert set(rule.replace(" ", "")) == {"-"}


def test_lt_brute(capsys):
    code, out, _ = run(capsys, "--format", "json", "lt", "2", "6", "--brute")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["match"] and doc["enumerated"]["total"] == 10


def test_bound_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "bound", "256")
    assert code == EXIT_OK
    assert out.endswith("\r\n")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["bound"] == "10" and rows[0]["factorization"] == "[[2, 8]]"


def test_csv_quoting():
    text = render([{"a": 'x, "y"', "b": [1, 2]}], "csv")
    assert text == 'a,b\r\n"x, ""y""","[1, 2]"\r\n'


def test_json_newline_terminated():
    assert render([{"a": 1}], "json").endswith("}\n]\n")


def test_types_json(capsys):
    code, out, _ = run(capsys, "types", "5", "2", "--json")
    doc = json.loads(out)
    assert code == EXIT_OK and len(doc) == 5


def test_unitgroup(capsys):
    code, out, _ = run(capsys, "--format", "json", "unitgroup", "3", "-3", "4")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["computed"] == doc["predicted"] == [3, 3, 6] and doc["match"]


def test_compare_offline(capsys):
    code, out, _ = run(capsys, "--format", "json", "compare", "256", "12", "--offline")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["ncm"] == 12 and doc["anomalies"][0]["gap"] == 2


def test_compare_offline_violation_is_not_an_error(capsys):
    code, out, _ = run(capsys, "--format", "json", "compare", "30", "12", "--offline")
    assert code == EXIT_OK
    assert json.loads(out)["anomalies"][0]["kind"] == "bound-exceeds-ncm"


def test_missing_fixture_exit(capsys):
    code, _, err = run(capsys, "compare", "17", "2", "--offline")
    assert code == EXIT_FAIL and "data source" in err


def test_live_failure_exit(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("LMFDB_BASE_URL", "http://127.0.0.1:9/api")
    code, _, err = run(capsys, "compare", "11", "16", "--cache-dir", str(tmp_path))
    assert code == EXIT_FAIL


@pytest.mark.parametrize("argv", [["lt", "4", "2"], ["lo", "5", "-1"], ["bound", "0"],
                                  ["unitgroup", "5", "4", "2"], ["nonsense"], []])
def test_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == EXIT_USAGE


def test_capacity_exit(capsys):
    code, _, err = run(capsys, "unitgroup", "13", "2", "7")
    assert code == EXIT_CAPACITY and "capacity" in err


def test_audit_small_grid(capsys):
    code, out, _ = run(capsys, "--format", "json", "audit", "--pmax", "7", "--nmax", "3")
    doc = json.loads(out)
    assert doc["sections"][0]["name"] == "unit-groups"
    # p = 3, n = 3 carries registered discrepancies only
    assert code == EXIT_OK and doc["unexpected_mismatches"] == 0


@pytest.mark.parametrize("argv", [["lt", "2", "8", "--brute"], ["types", "2", "6"],
                                  ["--format", "csv", "lo", "7", "6", "--derived"]])
def test_byte_identical_across_processes(argv):
    outs = [subprocess.run([sys.executable, "-m", "orbitcensus.cli", *argv], capture_output=True,
                           check=True).stdout for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]
