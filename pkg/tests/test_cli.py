"""Command-line pipeline: outputs, schemas, determinism, exit codes."""

import csv
import json
import os

import numpy as np
import pytest

from toplag.cli import main


def run(argv):
    return main(argv)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return rows


def make_inputs(tmp_path, name="data", **kw):
    """Generate a synthetic pair and split it into two input CSVs."""
    d = tmp_path / name
    args = ["synth", "--out", str(d)]
    for k, v in kw.items():
        args += [f"--{k.replace('_', '-')}", str(v)]
    assert run(args) == 0
    rows = read_csv(d / "pair.csv")
    for col, fname in (("x", "x.csv"), ("y", "y.csv")):
        with open(d / fname, "w", encoding="utf-8") as fh:
            fh.write("time,value\n")
            for r in rows:
                fh.write(f"{r['time']},{r[col]}\n")
    return str(d / "x.csv"), str(d / "y.csv"), d


class TestSynth:
    def test_writes_pair_and_true_lag(self, tmp_path):
        x_csv, y_csv, d = make_inputs(tmp_path, kind="constant", n=64, k=5, seed=3)
        pair = read_csv(d / "pair.csv")
        lag = read_csv(d / "true_lag.csv")
        assert len(pair) == 64 and len(lag) == 64
        assert all(r["lag"] == "5" for r in lag)
        x = np.array([float(r["x"]) for r in pair])
        y = np.array([float(r["y"]) for r in pair])
        assert np.array_equal(y[5:], x[:-5])

    def test_rejects_bad_scenario(self, tmp_path):
        with pytest.raises(SystemExit) as e:
            run(["synth", "--out", str(tmp_path / "o"), "--n", "4"])
        assert e.value.code == 4


class TestAnalyze:
    def test_full_pipeline_recovers_constant_lag(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(
            tmp_path, kind="constant", n=300, k=5, seed=1, noise_sigma=0.05
        )
        out = tmp_path / "run"
        assert run(["analyze", x_csv, y_csv, "--out", str(out)]) == 0

        for f in ("path.csv", "lag_by_time.csv", "consistency_w20.csv",
                  "summary.json"):
            assert (out / f).exists()

        lag = read_csv(out / "lag_by_time.csv")
        t = np.array([int(r["t"]) for r in lag])
        v = np.array([float(r["lag"]) for r in lag])
        bulk = (t > 60) & (t < 240)
        assert np.median(np.abs(v[bulk] - 5.0)) <= 1.0

        cons = read_csv(out / "consistency_w20.csv")
        sig = np.array([r["significant"] == "1" for r in cons])
        assert sig.mean() >= 0.8

        s = json.loads((out / "summary.json").read_text())
        assert set(s) == {"config", "data", "result", "consistency", "tool"}
        assert s["data"]["n"] == 300
        assert s["result"]["mode"] == "bridge"
        assert s["consistency"]["n_windows"] == len(cons)
        assert s["tool"]["name"] == "toplag"

    def test_identity_pair_gives_zero_lag_unit_slope(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=200, k=0, seed=2)
        out = tmp_path / "run"
        assert run(["analyze", x_csv, x_csv, "--out", str(out)]) == 0
        lag = read_csv(out / "lag_by_time.csv")
        assert all(abs(float(r["lag"])) <= 1e-9 for r in lag)
        cons = read_csv(out / "consistency_w20.csv")
        assert all(abs(float(r["a"]) - 1.0) <= 1e-9 for r in cons)

    def test_zero_temperature_emits_hard_path(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=80, k=3, seed=4)
        out = tmp_path / "hard"
        assert run(
            ["analyze", x_csv, y_csv, "--out", str(out), "--temperature", "0"]
        ) == 0
        rows = read_csv(out / "path.csv")
        assert list(rows[0]) == ["tau", "mean_lag", "t1", "layer_cost"]
        lags = [float(r["mean_lag"]) for r in rows]
        assert all(v == int(v) for v in lags)
        s = json.loads((out / "summary.json").read_text())
        assert s["result"]["mode"] == "hard"
        assert s["result"]["total_energy"] is not None
        assert s["result"]["log_partition"] is None

    def test_path_columns_are_consistent(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(
            tmp_path, kind="constant", n=120, k=2, seed=5, noise_sigma=0.1
        )
        out = tmp_path / "run"
        assert run(["analyze", x_csv, y_csv, "--out", str(out)]) == 0
        rows = read_csv(out / "path.csv")
        taus = np.array([int(r["tau"]) for r in rows])
        lags = np.array([float(r["mean_lag"]) for r in rows])
        t1 = np.array([float(r["t1"]) for r in rows])
        assert np.array_equal(taus, np.arange(taus[0], taus[-1] + 1))
        assert np.allclose(t1, (taus - lags) / 2.0, atol=1e-9)

    def test_dump_flags_write_matrices(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=60, k=2, seed=6)
        out = tmp_path / "run"
        assert run(
            [
                "analyze", x_csv, y_csv, "--out", str(out),
                "--dump-landscape", "--dump-energy-table",
                "--boundary-depth", "4",
            ]
        ) == 0
        land = read_csv(out / "landscape.csv")
        assert len(land) == 60 and len(land[0]) == 61
        table = read_csv(out / "energy_table.csv")
        assert len(table) == 7 and len(table[0]) == 8

    def test_date_range_filter(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=200, k=2, seed=7)
        out = tmp_path / "run"
        assert run(
            [
                "analyze", x_csv, y_csv, "--out", str(out),
                "--start", "50", "--end", "149",
            ]
        ) == 0
        s = json.loads((out / "summary.json").read_text())
        assert s["data"]["n"] == 100

    def test_no_standardize_keeps_raw(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=60, k=1, seed=8)
        out = tmp_path / "run"
        assert run(
            ["analyze", x_csv, y_csv, "--out", str(out), "--no-standardize"]
        ) == 0
        s = json.loads((out / "summary.json").read_text())
        assert s["data"]["normalization"] == "raw"

    def test_high_temperature_notes_on_stderr(self, tmp_path, capsys):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=60, k=1, seed=9)
        out = tmp_path / "run"
        assert run(
            ["analyze", x_csv, y_csv, "--out", str(out), "--temperature", "6"]
        ) == 0
        assert "temperature" in capsys.readouterr().err.lower()

    def test_summary_records_every_parameter(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=60, k=1, seed=10)
        out = tmp_path / "run"
        assert run(["analyze", x_csv, y_csv, "--out", str(out)]) == 0
        cfg = json.loads((out / "summary.json").read_text())["config"]
        for key in (
            "temperature", "distance", "mode", "boundary_depth", "window",
            "alpha", "standardize", "memory_budget",
        ):
            assert key in cfg


class TestDeterminism:
    def test_reruns_are_byte_identical(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(
            tmp_path, kind="step", n=150, k=2, k2=6,
            switch_index=75, seed=11, noise_sigma=0.2,
        )
        out = tmp_path / "run"
        argv = ["analyze", x_csv, y_csv, "--out", str(out)]
        assert run(argv) == 0
        first = {f: (out / f).read_bytes() for f in os.listdir(out)}
        assert run(argv) == 0
        assert sorted(os.listdir(out)) == sorted(first)
        for f, blob in first.items():
            assert (out / f).read_bytes() == blob


class TestScanTemperature:
    def test_writes_per_temperature_runs_and_sweep(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(
            tmp_path, kind="constant", n=150, k=3, seed=12, noise_sigma=0.1
        )
        out = tmp_path / "sweep"
        assert run(
            [
                "scan-temperature", x_csv, y_csv, "--out", str(out),
                "--temperatures", "1,2",
            ]
        ) == 0
        assert (out / "T_1" / "summary.json").exists()
        assert (out / "T_2" / "summary.json").exists()
        rows = read_csv(out / "sweep_summary.csv")
        assert [r["temperature"] for r in rows] == ["1", "2"]

    def test_single_temperature_is_usage_error(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=60, k=1, seed=13)
        with pytest.raises(SystemExit) as e:
            run(
                [
                    "scan-temperature", x_csv, y_csv,
                    "--out", str(tmp_path / "s"), "--temperatures", "2",
                ]
            )
        assert e.value.code == 2


class TestOracleCommand:
    def test_agreement_run(self, capsys):
        assert run(["oracle", "--size", "6", "--seed", "2"]) == 0
        out = capsys.readouterr().out
        assert "agreement" in out
        assert "FAIL" not in out

    def test_size_bounds(self):
        with pytest.raises(SystemExit) as e:
            run(["oracle", "--size", "11"])
        assert e.value.code == 4


class TestExitCodes:
    def test_unknown_argument(self):
        with pytest.raises(SystemExit) as e:
            run(["analyze", "--bogus"])
        assert e.value.code == 2

    def test_missing_input_file(self, tmp_path):
        with pytest.raises(SystemExit) as e:
            run(
                [
                    "analyze", str(tmp_path / "nope.csv"), str(tmp_path / "nah.csv"),
                    "--out", str(tmp_path / "o"),
                ]
            )
        assert e.value.code == 3

    def test_invalid_config(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=60, k=1, seed=14)
        with pytest.raises(SystemExit) as e:
            run(
                [
                    "analyze", x_csv, y_csv, "--out", str(tmp_path / "o"),
                    "--window", "2",
                ]
            )
        assert e.value.code == 4

    def test_negative_temperature_rejected(self, tmp_path):
        x_csv, y_csv, _ = make_inputs(tmp_path, kind="constant", n=60, k=1, seed=15)
        with pytest.raises(SystemExit) as e:
            run(
                [
                    "analyze", x_csv, y_csv, "--out", str(tmp_path / "o"),
                    "--temperature", "-1",
                ]
            )
        assert e.value.code == 4
