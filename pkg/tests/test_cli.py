import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gaussfactor.cli import emit_figure_datasets, run

COMMANDS = ["factor", "autocorr", "curlicue", "carpet", "gauss-sum", "decompose", "figures"]


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_factor_json(capsys):
    code, out, err = invoke(capsys, "factor", "1309", "--method", "revival", "--delta-n", "250")
    assert code == 0
    report = json.loads(out)
    assert report["confirmed_factors"] == [7, 11, 17]
    assert report["complete"] is True
    assert "agrees" in err


def test_factor_curlicue_and_csv(capsys):
    code, out, _ = invoke(capsys, "factor", "21", "--method", "curlicue")
    assert code == 0
    assert json.loads(out)["confirmed_factors"] == [3, 7]
    code, out, _ = invoke(capsys, "factor", "105", "--format", "csv", "--samples", "3")
    assert code == 0
    rows = rows_of(out)
    assert list(rows[0]) == ["N", "ell", "delta_tau", "S2", "flagged"]
    assert {r["ell"] for r in rows if r["flagged"] == "1"} >= {"3", "5"}


def test_factor_incomplete_with_lmax(capsys):
    code, out, err = invoke(capsys, "factor", "1309", "--lmax", "3")
    assert code == 0
    report = json.loads(out)
    assert report["complete"] is False
    assert report["cofactor"] == 1309
    assert "incomplete" in err


def test_curlicue_csv(capsys):
    code, out, _ = invoke(capsys, "curlicue", "21", "--format", "csv")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 21
    assert list(rows[0]) == ["n", "re", "im", "magnitude"]
    imag = {int(r["n"]) for r in rows if abs(float(r["im"])) > 5}
    assert imag == {3, 6, 9, 12, 15, 18, 7, 14}
    # 17 significant digits round-trip
    assert float(rows[3]["im"]) == pytest.approx(-3 * math.sqrt(7), abs=1e-12)


def test_gauss_sum(capsys):
    code, out, _ = invoke(capsys, "gauss-sum", "--r", "2", "--q", "1")
    assert code == 0
    rows = rows_of(out)
    assert [float(r["magnitude"]) for r in rows] == pytest.approx([0.0, 1.0], abs=1e-15)
    code, out, _ = invoke(capsys, "gauss-sum", "--r", "3", "--q", "1", "--format", "json")
    assert code == 0
    assert len(json.loads(out)) == 3


def test_decompose(capsys):
    code, out, _ = invoke(capsys, "decompose", "--t", "7.25", "--N", "1309", "--rmax", "200")
    assert code == 0
    record = json.loads(out)
    assert (record["q"], record["r"], record["delta_t"]) == (1, 187, 0.25)


def test_autocorr(capsys):
    code, out, _ = invoke(capsys, "autocorr", "1309", "--center", "7", "--halfwidth", "0.01",
                          "--samples", "21", "--delta-n", "250")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 21
    s2 = [float(r["S2"]) for r in rows]
    assert max(s2) == s2[10]
    assert 1309 * s2[10] == pytest.approx(7.0, rel=1e-9)


def test_carpet_csv_and_pgm(tmp_path, capsys):
    target = tmp_path / "carpet.csv"
    code, _, _ = invoke(capsys, "carpet", "--geometry", "box", "--size", "1", "--tmax", "1",
                        "--nx", "32", "--nt", "17", "-o", str(target))
    assert code == 0
    rows = rows_of(target.read_text())
    assert len(rows) == 32 * 17
    first = np.array([float(r["density"]) for r in rows[:32]])
    last = np.array([float(r["density"]) for r in rows[-32:]])
    assert np.max(np.abs(first - last)) < 1e-8
    image = tmp_path / "carpet.pgm"
    code, _, _ = invoke(capsys, "carpet", "--geometry", "talbot", "--size", "1", "--tmax", "1",
                        "--nx", "64", "--nt", "16", "--format", "pgm", "-o", str(image))
    assert code == 0
    data = image.read_bytes()
    assert data.startswith(b"P5\n64 16\n255\n")
    assert len(data) == len(b"P5\n64 16\n255\n") + 64 * 16


def test_figures_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    assert invoke(capsys, "figures", "--outdir", str(a))[0] == 0
    paths = emit_figure_datasets(b)
    assert [p.name for p in paths] == ["fig1_N1309.csv", "fig2_N21.csv"]
    for p in paths:
        assert (a / p.name).read_bytes() == p.read_bytes()
    fig1 = rows_of((a / "fig1_N1309.csv").read_text())
    assert len(fig1) == 9 * 801
    fig2 = rows_of((a / "fig2_N21.csv").read_text())
    assert {int(r["n"]) for r in fig2 if float(r["abs_im"]) > 5} == {3, 6, 7, 9, 12, 14, 15, 18}


@pytest.mark.parametrize("argv", [
    ["factor", "1"],
    ["factor", "21", "--samples", "4"],
    ["factor", "21", "--delta-n", "-3"],
    ["factor", "21", "--method", "shor"],
    ["factor", "21", "--bogus"],
    ["gauss-sum", "--r", "0", "--q", "1"],
    ["gauss-sum", "--r", "3"],
    ["carpet", "--geometry", "box", "--size", "1", "--tmax", "1", "--nx", "8", "--nt", "16"],
    ["curlicue", "21", "--format", "pgm"],
    ["decompose", "--t", "nan", "--N", "5", "--rmax", "3"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(capsys, argv):
    code, out, err = invoke(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err


def test_resource_error_exit_1(capsys):
    code, _, err = invoke(capsys, "curlicue", "5000")
    assert code == 1
    assert "error" in err


def test_io_error_exit_1(tmp_path, capsys):
    missing = tmp_path / "no" / "such" / "dir" / "out.csv"
    code, _, _ = invoke(capsys, "curlicue", "21", "-o", str(missing))
    assert code == 1


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for a gauss-sum run\nr = 5\nq = 2\n")
    code, out, _ = invoke(capsys, "gauss-sum", "--config", str(cfg))
    assert code == 0
    assert len(rows_of(out)) == 5
    code, out, _ = invoke(capsys, "gauss-sum", "--config", str(cfg), "--r", "7")
    assert code == 0
    assert len(rows_of(out)) == 7


def test_config_rejects_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("radius = 5\n")
    code, _, err = invoke(capsys, "gauss-sum", "--config", str(cfg), "--r", "3", "--q", "1")
    assert code == 2
    assert "radius" in err


@pytest.mark.parametrize("command", COMMANDS)
def test_help_for_every_command(capsys, command):
    code, out, _ = invoke(capsys, command, "--help")
    assert code == 0
    assert "usage:" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gaussfactor", "gauss-sum", "--r", "1", "--q", "0"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "m,re,im,magnitude"
    proc = subprocess.run([sys.executable, "-m", "gaussfactor", "factor", "9", "--nope"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 2
