import io
import subprocess
import sys

import pytest

from lpinstanton import LpNumericalError, tanner_alist_path, write_alist
from lpinstanton.cli import main
from lpinstanton.codes import ParityCheckMatrix


@pytest.fixture
def triangle_alist(tmp_path):
    h = ParityCheckMatrix.from_check_lists(3, [[0, 1, 2]])
    path = tmp_path / "triangle.alist"
    path.write_text(write_alist(h))
    return str(path)


@pytest.fixture
def hamming_alist(tmp_path):
    h = ParityCheckMatrix.from_check_lists(
        7, [[0, 2, 4, 6], [1, 2, 5, 6], [3, 4, 5, 6]]
    )
    path = tmp_path / "hamming.alist"
    path.write_text(write_alist(h))
    return str(path)


def test_code_info_triangle(triangle_alist, capsys):
    assert main(["code-info", "--alist", triangle_alist]) == 0
    assert capsys.readouterr().out == "N=3 M=1 rank=1 dim=2 regular=(1,3)\n"


def test_code_info_hamming(hamming_alist, capsys):
    assert main(["code-info", "--alist", hamming_alist]) == 0
    assert capsys.readouterr().out == "N=7 M=3 rank=3 dim=4 regular=none girth=4\n"


def test_code_info_tanner(capsys):
    assert main(["code-info", "--alist", str(tanner_alist_path())]) == 0
    out = capsys.readouterr().out
    assert out == "N=155 M=93 rank=91 dim=64 regular=(3,5) girth=8\n"


def test_code_info_no_girth(hamming_alist, capsys):
    assert main(["code-info", "--alist", hamming_alist, "--no-girth"]) == 0
    assert "girth" not in capsys.readouterr().out


def test_decode_from_file(triangle_alist, tmp_path, capsys):
    xfile = tmp_path / "x.txt"
    xfile.write_text("0.6 0.6 0.1\n")
    assert main(["decode", "--alist", triangle_alist, "--x", str(xfile)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "lp_value,correct"
    value, correct = lines[1].split(",")
    assert float(value) == pytest.approx(-0.4, abs=1e-9)
    assert correct == "false"
    assert lines[2] == "bit,beta"
    betas = [float(row.split(",")[1]) for row in lines[3:6]]
    assert betas == pytest.approx([1.0, 1.0, 0.0], abs=1e-9)


def test_decode_from_stdin_with_dual(triangle_alist, capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("0.1 0.1 0.1"))
    assert main(["decode", "--alist", triangle_alist, "--dual"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].endswith(",true")
    assert lines[2] == "dual_value"
    assert float(lines[3]) == pytest.approx(0.0, abs=1e-8)


def test_decode_emit_lp(triangle_alist, tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("0 0 0"))
    dump = tmp_path / "ps.lp"
    assert main(["decode", "--alist", triangle_alist, "--emit-lp", str(dump)]) == 0
    text = dump.read_text()
    assert "Subject To" in text and text.rstrip().endswith("End")


def test_decode_vector_length_mismatch(triangle_alist, tmp_path, capsys):
    xfile = tmp_path / "x.txt"
    xfile.write_text("0.1 0.2")
    assert main(["decode", "--alist", triangle_alist, "--x", str(xfile)]) == 2
    assert "data error" in capsys.readouterr().err


def test_missing_alist_is_data_error(capsys):
    assert main(["code-info", "--alist", "/nonexistent.alist"]) == 2
    assert "data error" in capsys.readouterr().err


def test_malformed_alist_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.alist"
    bad.write_text("3 1\n1 3\nnot numbers\n")
    assert main(["code-info", "--alist", str(bad)]) == 2
    err = capsys.readouterr().err
    assert "data error" in err and "line 3" in err


def test_usage_errors(capsys):
    assert main([]) == 1
    assert main(["decode"]) == 1  # missing --alist
    assert main(["search", "--alist", "x", "--algo", "bogus", "--seed", "1"]) == 1


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "code-info" in capsys.readouterr().out


def test_search_output_and_rerun_identical(hamming_alist, capsys):
    argv = ["search", "--alist", hamming_alist, "--algo", "moa", "--seed", "7"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first

    lines = first.splitlines()
    assert lines[0] == "weight,iterations,converged"
    weight, iters, converged = lines[1].split(",")
    assert float(weight) >= 3.0 - 1e-9
    assert converged in ("true", "false")
    assert lines[2] == "bit,endpoint,endpoint_snapped,instanton"
    assert len(lines) == 3 + 7


def test_search_snapped_column_has_fractions(triangle_alist, capsys):
    assert main(
        ["search", "--alist", triangle_alist, "--algo", "moa", "--seed", "1"]
    ) == 0
    rows = capsys.readouterr().out.splitlines()[3:]
    snapped = [row.split(",")[2] for row in rows]
    assert sorted(snapped) == ["0/1", "1/2", "1/2"]


def test_search_numerical_failure_exit_code(triangle_alist, capsys, monkeypatch):
    import lpinstanton.cli as cli_mod

    def fail(*args, **kwargs):
        raise LpNumericalError("synthetic")

    monkeypatch.setattr(cli_mod, "single_trial", fail)
    rc = main(["search", "--alist", triangle_alist, "--algo", "moa", "--seed", "1"])
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_spectrum_writes_csvs(hamming_alist, tmp_path, capsys):
    rec = tmp_path / "records.csv"
    spec = tmp_path / "spectrum.csv"
    argv = [
        "spectrum", "--alist", hamming_alist, "--algo", "pcs",
        "--trials", "4", "--seed", "11",
        "--out", str(rec), "--spectrum-out", str(spec),
    ]
    assert main(argv) == 0
    summary = capsys.readouterr().out.splitlines()
    assert summary[0] == "trials,converged,min_weight"
    assert summary[1].startswith("4,")

    rec_lines = rec.read_text().splitlines()
    assert rec_lines[0] == "trial,seed,algo,weight,iterations,converged,endpoint_hash"
    assert len(rec_lines) == 5
    assert spec.read_text().splitlines()[0] == "w,rho"

    # rerun reproduces both files byte for byte
    first = rec.read_bytes()
    assert main(argv) == 0
    capsys.readouterr()
    assert rec.read_bytes() == first


def test_spectrum_rejects_bad_counts(hamming_alist, tmp_path, capsys):
    argv = [
        "spectrum", "--alist", hamming_alist, "--algo", "moa",
        "--trials", "0", "--seed", "1", "--out", str(tmp_path / "r.csv"),
    ]
    assert main(argv) == 1


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lpinstanton", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "lpinstanton" in proc.stdout
