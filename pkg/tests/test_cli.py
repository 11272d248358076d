import csv
import re

import pytest

from kdist.cli import EXIT_CAP, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_adeg_writes_certificate_and_csv(tmp_path, capsys):
    cert, table = tmp_path / "or4.cert", tmp_path / "or4.csv"
    code, out, _ = run(capsys, "adeg", "OR:4", "--out", str(cert), "--csv", str(table))
    assert code == EXIT_OK
    assert "adeg_1/3 = 2" in out
    rows = list(csv.reader(table.open()))
    assert rows[0] == ["d", "error", "error_float"] and len(rows) == 4
    code, out, _ = run(capsys, "verify", str(cert))
    assert code == EXIT_OK and "all verdicts reproduced" in out


def test_adeg_promise_spec_to_stdout(capsys):
    code, out, _ = run(capsys, "adeg", "OR:2 o THR:2:2 <=2", "--out", "-", "--emit-poly")
    assert code == EXIT_OK
    assert "kdist-certificate 1" in out and "info poly" in out


@pytest.mark.parametrize("argv", [
    ["build", "omega", "--k", "2", "--t", "4", "--n", "16"],
    ["build", "psi", "--k", "2", "--t", "4", "--n", "16"],
    ["build", "phi", "--arity", "3"],
    ["build", "theta", "--arity", "4", "--phd", "2"],
    ["build", "gamma", "--r", "16", "--k", "2", "--n", "4"],
    ["build", "final-w", "--r", "16", "--k", "2", "--outer-arity", "2", "--phi-arity", "2", "--n", "3", "--t", "3"],
    ["build", "upper", "--k", "2", "--n", "3", "--r", "2", "--emit-poly"],
])
def test_build_kinds_verify(tmp_path, capsys, argv):
    path = tmp_path / "out.cert"
    code, out, err = run(capsys, *argv, "--out", str(path))
    assert code == EXIT_OK, err
    assert "param" in out
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_OK


def test_build_reads_config_file(tmp_path, capsys):
    cfg = tmp_path / "toy.cfg"
    cfg.write_text("# toy omega\nk = 2\nt=4\nn = 16\n")
    code, _, _ = run(capsys, "build", "omega", "--config", str(cfg), "--out", str(tmp_path / "o.cert"))
    assert code == EXIT_OK
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "build", "omega", "--config", str(cfg))
    assert code == EXIT_USAGE and "expected key=value" in err


def test_gamma_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.cert", tmp_path / "b.cert"
    for p in (a, b):
        assert run(capsys, "build", "gamma", "--r", "16", "--k", "2", "--n", "4", "--out", str(p))[0] == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_tampered_certificate_fails_verify(tmp_path, capsys):
    path = tmp_path / "phi.cert"
    run(capsys, "build", "phi", "--arity", "3", "--out", str(path))
    path.write_text(path.read_text().replace("1/2 0 0 -1/2", "1/2 0 1/4 -1/4"))
    code, out, _ = run(capsys, "verify", str(path))
    assert code == EXIT_FAIL and "FAILED" in out


@pytest.mark.parametrize("argv", [
    [],
    ["adeg", "XOR:3"],
    ["adeg", "OR:3", "--eps", "one third"],
    ["build", "omega", "--k", "2"],
    ["build", "gamma", "--r", "17", "--k", "2"],
    ["verify", "/nonexistent/file.cert"],
    ["reproduce", "everything"],
])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == EXIT_USAGE


def test_resource_cap_exits_3(capsys):
    assert run(capsys, "adeg", "OR:17", "--method", "dense")[0] == EXIT_CAP


def test_dump_lp_forms(tmp_path, capsys):
    code, out, _ = run(capsys, "dump-lp", "OR:3", "--d", "1", "--solve")
    assert code == EXIT_OK and out.strip()
    path = tmp_path / "lp.txt"
    code, _, _ = run(capsys, "dump-lp", "OR:2 o THR:2:2 <=2", "--d", "1", "--form", "minimax",
                     "--outside-bound", "2", "--out", str(path))
    assert code == EXIT_OK and path.read_text().strip()


def test_reproduce_suite_quiet(capsys):
    code, out, _ = run(capsys, "--seed", "7", "reproduce", "appendix", "--quiet")
    assert code == EXIT_OK
    assert re.search(r"criterion\s+3 PASS", out) and "1/1 criteria passed" in out
