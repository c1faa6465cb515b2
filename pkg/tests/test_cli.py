import csv
import io
import json
import subprocess
import sys

import pytest

from biquadcap.cli import EXIT_FIXTURE, EXIT_INCONSISTENT, EXIT_INPUT, NO_WITNESS, main
from biquadcap.errors import InconsistencyError
from biquadcap.oracle import fixture_text


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_report_json(capsys):
    code, out, _ = run(capsys, "report", "-p", "17", "-q", "7", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["capitulation"]["K1"]["kernel_generators"] == ["H1", "H2"]
    assert doc["input"]["d"] == 238
    assert json.loads(json.dumps(doc)) == doc


def test_report_is_deterministic(capsys):
    a = run(capsys, "report", "-p", "17", "-q", "3")[1]
    b = run(capsys, "report", "-p", "17", "-q", "3")[1]
    assert a == b


def test_report_bad_input(capsys):
    code, _, err = run(capsys, "report", "-p", "4", "-q", "7")
    assert code == EXIT_INPUT and "p is not prime" in err


def test_report_markdown_has_application(capsys):
    code, out, _ = run(capsys, "report", "-p", "17", "-q", "3", "--md")
    assert code == 0 and "10^2" in out and "7^2" in out


def test_inconsistency_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise InconsistencyError("forced")
    monkeypatch.setattr("biquadcap.cli.build_report", boom)
    code, _, err = run(capsys, "report", "-p", "17", "-q", "7")
    assert code == EXIT_INCONSISTENT and "forced" in err


def test_scan(capsys):
    code, out, _ = run(capsys, "scan", "--p-max", "100", "--q-max", "100")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    r = next(r for r in rows if (r["p"], r["q"]) == ("17", "7"))
    assert r["eps_2pq_case"] == "x+1"
    assert [(int(r["p"]), int(r["q"])) for r in rows] == sorted((int(r["p"]), int(r["q"])) for r in rows)


def test_scan_p5mod8(capsys):
    code, out, _ = run(capsys, "scan", "--p-max", "120", "--q-max", "60", "--filter", "p5mod8")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows and all(r["am_order"] == "4" for r in rows)


def test_scan_parallel_matches_serial(capsys):
    a = run(capsys, "scan", "--p-max", "60", "--q-max", "40", "--json")[1]
    b = run(capsys, "scan", "--p-max", "60", "--q-max", "40", "--json", "--jobs", "3")[1]
    assert a == b


def test_scan_empty(capsys):
    code, out, _ = run(capsys, "scan", "--p-max", "2", "--q-max", "2")
    assert code == 0 and out == ""


def test_verify_fixtures(capsys):
    code, out, _ = run(capsys, "verify-fixtures")
    assert code == 0
    assert "d=238 [K2-x+1] PASS" in out and "28/28 rows pass" in out


def test_verify_tampered(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text(fixture_text().replace("238,17,7,x+1,108", "238,17,7,x+1,109", 1))
    code, out, _ = run(capsys, "verify-fixtures", "--fixtures", str(bad))
    assert code == EXIT_FIXTURE
    assert "d=238 [K2-x+1] FAIL" in out and "root: FAIL (fixture 109, computed 108)" in out


def test_verify_corrupt(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("garbage\n")
    code, _, err = run(capsys, "verify-fixtures", "--fixtures", str(bad))
    assert code == EXIT_INPUT and "corrupt" in err


def test_witness(capsys):
    code, out, _ = run(capsys, "witness", "-p", "5", "-q", "3", "--field", "K1")
    assert code == 0 and "α = 1/2 + i + (1/2)√5" in out and "[verified]" in out
    code, out, _ = run(capsys, "witness", "-p", "17", "-q", "7", "--field", "K3")
    assert "1 + (1/2)√2 + (1/2)i√2" in out and "(1+i)·ε_2" in out
    code, out, _ = run(capsys, "witness", "-p", "17", "-q", "7", "--field", "K2")
    assert code == 0 and NO_WITNESS in out


def test_oracle_class_group(capsys):
    code, out, _ = run(capsys, "oracle", "class-group", "-D", "-23")
    assert code == 0 and json.loads(out)["structure"] == [3]


def test_out_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    assert main(["report", "-p", "5", "-q", "3", "--out", str(target)]) == 0
    assert json.loads(target.read_text())["input"]["p"] == 5


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "biquadcap", "report", "-p", "4", "-q", "7"],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_INPUT


@pytest.mark.parametrize("argv", [["report", "-p", "17", "-q", "5"], ["witness", "-p", "13", "-q", "13", "--field", "K1"]])
def test_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_INPUT
