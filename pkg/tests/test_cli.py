import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from conftest import needs_solver
from ramseyqe.cli import EXIT_ERROR, EXIT_NEGATIVE, EXIT_OK, EXIT_UNKNOWN, main
from ramseyqe.formula import has_ramsey
from ramseyqe.smtlib import parse_script

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def sample(name: str) -> str:
    return str(SAMPLES / name)


def test_eliminate_prints_ramsey_free_script(capsys):
    assert main(["eliminate", sample("dickson.rsmt2")]) == EXIT_OK
    out = capsys.readouterr().out
    s = parse_script(out)
    assert not has_ramsey(s.goal)
    assert "(check-sat)" in out


def test_eliminate_to_file_with_stats(tmp_path, capsys):
    out = tmp_path / "w.smt2"
    rc = main(["eliminate", sample("worked.rsmt2"), "-o", str(out), "--stats"])
    assert rc == EXIT_OK
    s = parse_script(out.read_text())
    assert {v.name for v in s.declarations} >= {"z1", "z2"}
    err = capsys.readouterr().err
    assert "input:" in err and "output:" in err


def test_eliminate_reads_stdin(monkeypatch, capsys):
    monkeypatch.setattr(sys, "stdin", io.StringIO(
        "(assert (exists-ramsey ((x Int)) ((y Int)) (< x y)))"))
    assert main(["eliminate", "-"]) == EXIT_OK
    assert "exists-ramsey" not in capsys.readouterr().out


@needs_solver
def test_check_unsat_exits_1(capsys):
    assert main(["check", sample("dickson.rsmt2")]) == EXIT_NEGATIVE
    assert capsys.readouterr().out.strip() == "unsat"


def test_domain_sort_mismatch_is_error():
    assert main(["check", sample("dickson.rsmt2"), "--domain", "real"]) == EXIT_ERROR


@needs_solver
def test_check_sat_with_model(capsys):
    assert main(["check", sample("worked.rsmt2"), "--model"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("sat")
    assert "z1 =" in out and "z2 =" in out


@needs_solver
def test_check_real_dickson_sat(tmp_path):
    p = tmp_path / "d.rsmt2"
    p.write_text(Path(sample("dickson.rsmt2")).read_text().replace("Int", "Real"))
    assert main(["check", str(p)]) == EXIT_OK


@needs_solver
def test_solver_unknown_exits_2(tmp_path):
    fake = tmp_path / "fake-solver"
    fake.write_text("#!/bin/sh\necho unknown\n")
    fake.chmod(0o755)
    assert main(["check", sample("worked.rsmt2"), "--solver", str(fake)]) == EXIT_UNKNOWN


def test_missing_solver_is_error(capsys):
    rc = main(["check", sample("dickson.rsmt2"), "--solver", "/nonexistent/solver"])
    assert rc == EXIT_ERROR
    assert "error" in capsys.readouterr().err


@needs_solver
def test_mondec_exit_codes(tmp_path):
    assert main(["mondec", sample("lia_sum.smt2")]) == EXIT_OK
    p = tmp_path / "eq.smt2"
    p.write_text("(declare-const y Real)(declare-const z Real)(assert (= y z))")
    assert main(["mondec", str(p), "--mode", "group"]) == EXIT_NEGATIVE


@needs_solver
def test_wqo_exit_codes(tmp_path, capsys):
    assert main(["wqo", sample("le.smt2")]) == EXIT_NEGATIVE
    assert "badSequence" in capsys.readouterr().out
    p = tmp_path / "t.smt2"
    p.write_text("(declare-const x Int)(declare-const y Int)(assert true)")
    assert main(["wqo", str(p)]) == EXIT_OK


def test_wqo_needs_even_declarations(tmp_path):
    p = tmp_path / "odd.smt2"
    p.write_text("(declare-const x Int)(assert (> x 0))")
    assert main(["wqo", str(p)]) == EXIT_ERROR


@needs_solver
def test_bench_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    rc = main(["bench", "--family", "half", "eq_free", "--dim", "1", "2", "--domain", "Int",
               "--json", str(out)])
    assert rc == EXIT_OK
    data = json.loads(out.read_text())
    assert [(d["family"], d["dim"]) for d in data] == [
        ("half", 1), ("half", 2), ("eq_free", 1), ("eq_free", 2)]
    assert all(d["verdict"] == "unsat" for d in data)
    assert "family" in capsys.readouterr().out


@needs_solver
def test_bench_json_stdout(capsys):
    assert main(["bench", "--family", "cubes10", "--dim", "1", "--domain", "Real",
                 "--json", "-"]) == EXIT_OK
    out = capsys.readouterr().out
    assert json.loads(out[out.index("["):])[0]["verdict"] == "decomposable"


def test_bench_invalid_combination():
    assert main(["bench", "--family", "program", "--domain", "Int"]) == EXIT_ERROR


@pytest.mark.parametrize("argv", [[], ["nope"], ["eliminate"], ["bench", "--domain", "Int"],
                                  ["mondec", "x", "--mode", "bad"]])
def test_usage_errors_exit_3(argv):
    with pytest.raises(SystemExit) as ei:
        main(argv)
    assert ei.value.code == EXIT_ERROR


def test_parse_error_exits_3(tmp_path, capsys):
    p = tmp_path / "bad.smt2"
    p.write_text("(assert (and x")
    assert main(["eliminate", str(p)]) == EXIT_ERROR
    assert main(["eliminate", str(tmp_path / "missing.smt2")]) == EXIT_ERROR


@needs_solver
def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ramseyqe", "check", sample("dickson.rsmt2")],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_NEGATIVE and r.stdout.strip() == "unsat"
