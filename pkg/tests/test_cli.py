from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from gcc_reserving import cli, datasets
from gcc_reserving.report import RECORD_COLUMNS, SCHEMA_VERSION
from gcc_reserving.simulator import SimConfig, format_config


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def usage(capsys, *argv):
    with pytest.raises(SystemExit) as exc:
        cli.main(list(argv))
    _, err = capsys.readouterr()
    return exc.value.code, err


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "sim.ini"
    path.write_text(format_config(SimConfig.wuthrich_merz_like(replications=60, seed=4)))
    return path


class TestFit:
    def test_csv(self, capsys):
        code, out, err = run(capsys, "fit")
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines[0] == "j,f_hat,sigma2_hat,beta_hat"
        assert lines[10] == "9,,,1"
        assert lines[-1].startswith("kappa_cc,0.67283939912599")

    def test_json(self, capsys):
        code, out, _ = run(capsys, "fit", "--format", "json")
        doc = json.loads(out)
        assert code == 0
        assert doc["schema_version"] == SCHEMA_VERSION
        assert type(doc["beta_hat"][-1]) is int and doc["beta_hat"][-1] == 1
        k = np.array(doc["kappa_individual"])
        assert np.polyfit(np.arange(10), k, 1)[0] < 0
        assert doc["f_hat"][0] == pytest.approx(1.4925, abs=5e-5)

    def test_missing_premiums(self, capsys, tmp_path):
        code, out, err = run(capsys, "fit", "--premiums", str(tmp_path / "none.csv"))
        assert code == cli.EXIT_IO
        assert out == ""
        assert len(err.strip().splitlines()) == 1

    def test_bad_triangle(self, capsys, tmp_path):
        bad = tmp_path / "tri.csv"
        bad.write_text("accident_year,dev_0,dev_1\n1,100,abc\n2,120,\n")
        code, out, err = run(capsys, "fit", "--triangle", str(bad), "--premiums", str(bad))
        assert code == cli.EXIT_DATA
        assert "row" in err and len(err.strip().splitlines()) == 1

    def test_misaligned_premiums(self, capsys, tmp_path):
        pi = tmp_path / "pi.csv"
        pi.write_text("accident_year,premium\n1,100\n2,200\n")
        code, _, err = run(capsys, "fit", "--premiums", str(pi))
        assert code == cli.EXIT_DATA and err


class TestReserve:
    @pytest.mark.parametrize("lam, total", [("0", "6,047"), ("1", "6,485"), ("0.75", "6,214")])
    def test_totals(self, capsys, lam, total):
        code, out, _ = run(capsys, "reserve", "--lambda", lam)
        assert code == 0
        row = [ln for ln in out.splitlines() if ln.strip().startswith("total")][0]
        assert row.split()[-1] == total

    def test_json(self, capsys):
        code, out, _ = run(capsys, "reserve", "--lambda", "0.55", "--format", "json")
        doc = json.loads(out)
        assert round(doc["reserves_total"] / 1000) == 6062
        assert sum(doc["reserves_by_year"]) == pytest.approx(doc["reserves_total"], rel=1e-12)

    @pytest.mark.parametrize("lam", ["1.5", "-0.1", "abc"])
    def test_out_of_range(self, capsys, lam):
        code, err = usage(capsys, "reserve", "--lambda", lam)
        assert code == cli.EXIT_USAGE
        assert "lambda" in err or "number" in err

    def test_missing_lambda(self, capsys):
        assert usage(capsys, "reserve")[0] == cli.EXIT_USAGE


class TestSweep:
    def test_quarter_grid(self, capsys):
        code, out, _ = run(capsys, "sweep", "--grid-step", "0.25")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 5
        header = out.splitlines()[0].split(",")
        assert tuple(header[: len(RECORD_COLUMNS)]) == RECORD_COLUMNS
        assert header[len(RECORD_COLUMNS):] == [f"reserve_{i}" for i in range(1, 11)]
        got = [round(float(r["reserves_total"]) / 1000) for r in rows]
        assert got == [6047, 6007, 6040, 6214, 6485]

    def test_record_consistency(self, capsys):
        _, out, _ = run(capsys, "sweep", "--format", "json")
        doc = json.loads(out)
        assert doc["schema_version"] == SCHEMA_VERSION
        assert len(doc["records"]) == 21
        for r in doc["records"]:
            assert r["rmsep"] ** 2 == pytest.approx(r["process_var"] + r["param_error"], rel=1e-9)
        lams = [r["lambda"] for r in doc["records"]]
        assert lams == sorted(set(lams))

    def test_minimum_location(self, capsys):
        _, out, _ = run(capsys, "sweep", "--grid-step", "0.05", "--format", "json")
        recs = json.loads(out)["records"]
        assert min(recs, key=lambda r: r["rmsep"])["lambda"] == 0.55

    def test_json_series(self, capsys):
        _, out, _ = run(capsys, "sweep", "--grid-step", "0.5", "--format", "json")
        doc = json.loads(out)
        assert len(doc["kappa_gcc"]) == 3 and len(doc["kappa_gcc"][0]) == 10
        assert len(doc["q"]) == 3 and len(doc["q"][0]) == 9
        assert doc["metadata"]["display_scale"] == 1000
        assert len(doc["metadata"]["sources"]["triangle"]["sha256"]) == 64

    def test_table(self, capsys):
        _, out, _ = run(capsys, "sweep", "--grid-step", "0.25", "--format", "table")
        first = out.splitlines()[1].split()
        assert first == ["0.00", "6,047", "424", "185", "463", "7.66%"]

    def test_byte_identical(self, capsys):
        a = run(capsys, "sweep", "--format", "json")[1]
        b = run(capsys, "sweep", "--format", "json")[1]
        assert a == b

    def test_out_files(self, capsys, tmp_path):
        out = tmp_path / "sweep.csv"
        code, stdout, _ = run(capsys, "sweep", "--grid-step", "0.5", "--out", str(out))
        assert code == 0 and stdout == ""
        assert len(out.read_text().splitlines()) == 4
        kappa = (tmp_path / "sweep_kappa.csv").read_text().splitlines()
        assert kappa[0] == "lambda,accident_year,kappa_individual,kappa_gcc"
        assert len(kappa) == 1 + 3 * 10
        q = (tmp_path / "sweep_q.csv").read_text().splitlines()
        assert q[0] == "lambda,t,q" and len(q) == 1 + 3 * 9

    @pytest.mark.parametrize("step", ["0.3", "2", "0", "-1", "0.7"])
    def test_bad_step(self, capsys, step):
        assert usage(capsys, "sweep", "--grid-step", step)[0] == cli.EXIT_USAGE

    def test_two_point_grid(self, capsys):
        _, out, _ = run(capsys, "sweep", "--grid-step", "1")
        assert [r.split(",")[0] for r in out.splitlines()[1:]] == ["0", "1"]

    def test_scale_flag(self, capsys):
        _, out, _ = run(capsys, "sweep", "--grid-step", "1", "--format", "table", "--scale", "100")
        assert out.splitlines()[1].split()[1] == "60,471"


class TestSimulate:
    def test_csv(self, capsys, small_config):
        code, out, _ = run(capsys, "simulate", "--config", str(small_config))
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and len(rows) == 3
        assert list(rows[0]) == [
            "lambda", "mean_reserves", "empirical_rmse", "mean_estimated_rmsep", "mean_prediction_error"
        ]

    def test_byte_identical_files(self, capsys, small_config, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        for path in (a, b):
            assert run(capsys, "simulate", "--config", str(small_config), "--seed", "9",
                       "--format", "json", "--out", str(path))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        doc = json.loads(a.read_text())
        assert doc["seed"] == 9 and doc["replications"] == 60

    def test_workers_identical(self, capsys, small_config):
        a = run(capsys, "simulate", "--config", str(small_config))[1]
        b = run(capsys, "simulate", "--config", str(small_config), "--workers", "2")[1]
        assert a == b

    def test_noiseless(self, capsys, tmp_path):
        path = tmp_path / "zero.ini"
        cfg = SimConfig.wuthrich_merz_like(sigma2=(0.0,) * 9, initial_cv=0.0, replications=5)
        path.write_text(format_config(cfg))
        _, out, _ = run(capsys, "simulate", "--config", str(path), "--format", "json")
        for row in json.loads(out)["summary"]:
            scale = row["mean_reserves"]
            assert abs(row["empirical_rmse"]) < 1e-9 * scale
            assert abs(row["mean_estimated_rmsep"]) < 1e-6 * scale
            assert abs(row["mean_prediction_error"]) < 1e-9 * scale

    def test_bad_config(self, capsys, tmp_path):
        path = tmp_path / "bad.ini"
        path.write_text("[simulation]\nfactors = 1.5\n")
        code, out, err = run(capsys, "simulate", "--config", str(path))
        assert code == cli.EXIT_CONFIG and out == "" and err.startswith("error:")

    @pytest.mark.parametrize("flag, value", [("--seed", "-1"), ("--workers", "0"), ("--seed", "x")])
    def test_bad_flags(self, capsys, flag, value):
        assert usage(capsys, "simulate", flag, value)[0] == cli.EXIT_USAGE

    def test_missing_config(self, capsys, tmp_path):
        assert run(capsys, "simulate", "--config", str(tmp_path / "x.ini"))[0] == cli.EXIT_IO


def test_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "gcc_reserving.cli", "reserve", "--lambda", "0"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "6,047" in proc.stdout


def test_explicit_paths_match_default(capsys):
    tri = str(datasets.data_path(datasets.TRIANGLE_FILE))
    pi = str(datasets.data_path(datasets.PREMIUM_FILE))
    a = run(capsys, "reserve", "--lambda", "0.5", "--triangle", tri, "--premiums", pi)[1]
    b = run(capsys, "reserve", "--lambda", "0.5")[1]
    assert a == b
