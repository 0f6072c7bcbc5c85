import csv
import json
import math

import numpy as np
import pytest

from stable_eff import cli
from stable_eff.stable_dist import StableParams, sample


@pytest.fixture(scope="module")
def prices_csv(tmp_path_factory):
    x = sample(StableParams(1.7, 0.1, 0.01), 260, seed=3)
    closes = 100 * np.exp(np.concatenate(([0.0], np.cumsum(x))))
    path = tmp_path_factory.mktemp("in") / "prices.csv"
    import datetime as dt

    d0 = dt.date(2019, 1, 1)
    rows = [f"{d0 + dt.timedelta(days=i)},{float(c)!r}" for i, c in enumerate(closes)]
    path.write_text("date,close\n" + "\n".join(rows) + "\n")
    return path


def run(*args):
    return cli.main([str(a) for a in args])


def read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestTrace:
    def test_ten_returns(self, write_prices, tmp_path):
        src = write_prices([100, 101, 99, 102, 103, 101, 104, 102, 105, 107, 106])
        with pytest.warns(UserWarning):
            assert run("trace", "--input", src, "--omega", 0.9, "--t0", 5, "--no-flags", "--out", tmp_path) == 0
        rows = read(tmp_path / "trace.csv")
        assert len(rows) == 6
        assert list(rows[0]) == ["date", *cli.TRACE_COLUMNS]

    def test_flags_and_manifest(self, prices_csv, tmp_path):
        code = run(
            "trace", "--input", prices_csv, "--omega", 0.95, "--t0", 200,
            "--eval-dates", 1000, "--levels", "0.95,0.99", "--out", tmp_path,
        )
        assert code == 0
        rows = read(tmp_path / "trace.csv")
        assert len(rows) == 61
        assert "reject_H_0.95" in rows[0] and "reject_alpha_0.99" in rows[0]
        for r in rows:
            assert float(r["m"]) == float(r["H"]) - 1 / float(r["alpha"])
            assert 0 < float(r["pit"]) < 1
        man = json.loads((tmp_path / "trace.manifest.json").read_text())
        assert man["seed"] == 0 and man["omega"] == 0.95
        assert man["config"]["levels"] == [0.95, 0.99]
        assert len(next(iter(man["inputs"].values()))) == 64

    def test_idempotent(self, prices_csv, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            run("trace", "--input", prices_csv, "--omega", 0.95, "--t0", 200, "--eval-dates", 1000, "--out", out)
            outs.append(out)
        for f in ("trace.csv", "trace.manifest.json"):
            assert (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes()

    def test_reuse_bands(self, prices_csv, tmp_path):
        run("bands", "--input", prices_csv, "--omega", 0.95, "--t0", 200, "--eval-dates", 1000, "--out", tmp_path)
        direct = tmp_path / "direct"
        run("trace", "--input", prices_csv, "--omega", 0.95, "--t0", 200, "--eval-dates", 1000, "--out", direct)
        reused = tmp_path / "reused"
        run("trace", "--input", prices_csv, "--omega", 0.95, "--t0", 200,
            "--bands", tmp_path / "bands.csv", "--out", reused)
        assert (direct / "trace.csv").read_text() == (reused / "trace.csv").read_text()


class TestBands:
    def test_table(self, prices_csv, tmp_path):
        assert run("bands", "--input", prices_csv, "--omega", 0.95, "--t0", 200, "--eval-dates", 1000, "--out", tmp_path) == 0
        rows = read(tmp_path / "bands.csv")
        assert len(rows) == 9
        for r in rows:
            assert float(r["lower"]) <= float(r["upper"])


class TestReport:
    def test_round_trip(self, prices_csv, tmp_path):
        run("trace", "--input", prices_csv, "--omega", 0.95, "--t0", 200, "--no-flags", "--out", tmp_path / "t")
        run("report", "--input", prices_csv, "--omega", 0.95, "--t0", 200, "--out", tmp_path / "direct")
        run("report", "--from-trace", tmp_path / "t" / "trace.csv", "--out", tmp_path / "again")
        a = (tmp_path / "direct" / "report.csv").read_text()
        b = (tmp_path / "again" / "report.csv").read_text()
        assert a == b
        rows = read(tmp_path / "direct" / "report.csv")
        assert [r["indicator"] for r in rows] == ["H", "m", "alpha"]
        trace = read(tmp_path / "t" / "trace.csv")
        h = [float(r["H"]) for r in trace]
        assert float(rows[0]["min"]) == min(h)
        assert rows[0]["date_of_min"] == trace[int(np.argmin(h))]["date"]
        assert float(rows[0]["value_at_T"]) == h[-1]

    def test_summarize_nan(self):
        rows = cli.summarize(["a", "b"], {"H": [math.nan, 0.4], "m": [0.1, 0.2], "alpha": [2, 2]})
        assert rows[0][1:5] == (0.4, "b", 0.4, "b")


class TestDensity:
    def test_curve(self, prices_csv, tmp_path):
        code = run(
            "density", "--input", prices_csv, "--omega", 0.95, "--t0", 200,
            "--dates", "2019-07-20", "--points", 801, "--width", 40, "--out", tmp_path,
        )
        assert code == 0
        rows = read(tmp_path / "density.csv")
        x = np.array([float(r["x"]) for r in rows])
        y = np.array([float(r["pdf"]) for r in rows])
        assert np.all(y >= 0)
        assert {r["date"] for r in rows} == {"2019-07-20"}
        mass = np.trapezoid(y, x) if hasattr(np, "trapezoid") else np.trapz(y, x)
        assert 0.97 < mass <= 1.0 + 1e-6

    def test_unknown_date(self, prices_csv, tmp_path):
        assert run("density", "--input", prices_csv, "--omega", 0.95, "--t0", 200,
                   "--dates", "2018-01-01", "--out", tmp_path) == 2

    def test_numerical_failure_exit(self, prices_csv, tmp_path):
        assert run("density", "--input", prices_csv, "--omega", 0.95, "--t0", 200,
                   "--quad-tol", 1e-30, "--out", tmp_path) == 3


class TestSelect:
    def test_prints_and_writes(self, prices_csv, tmp_path, capsys):
        code = run("select-omega", "--input", prices_csv, "--grid", "0.94:0.96:0.01",
                   "--t0", 200, "--out", tmp_path)
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("omega* = ")
        rows = read(tmp_path / "select_omega.csv")
        assert [float(r["omega"]) for r in rows] == [0.94, 0.95, 0.96]
        best = min(rows, key=lambda r: (float(r["d"]), -float(r["omega"])))
        assert out.split()[2] == f"{float(best['omega']):g}"


class TestInputs:
    def test_zero_close_exit(self, write_prices, tmp_path, capsys):
        src = write_prices([100, 101, 0, 102, 103, 101, 104, 102, 105, 107, 106])
        assert run("trace", "--input", src, "--omega", 0.9, "--t0", 5, "--out", tmp_path) == 2
        assert "row 4" in capsys.readouterr().err

    def test_missing_input(self, tmp_path):
        assert run("trace", "--t0", 5, "--omega", 0.9, "--out", tmp_path) == 2

    def test_bad_omega(self, prices_csv, tmp_path):
        assert run("trace", "--input", prices_csv, "--omega", 1.5, "--t0", 200, "--out", tmp_path) == 2

    def test_config_file_and_override(self, prices_csv, tmp_path):
        cfg = tmp_path / "run.yaml"
        cfg.write_text("omega: 0.93\nt0: 200\nlevels: [0.9, 0.95]\neval_dates: 1000\n")
        run("bands", "--config", cfg, "--input", prices_csv, "--omega", 0.95, "--out", tmp_path)
        man = json.loads((tmp_path / "bands.manifest.json").read_text())
        assert man["omega"] == 0.95
        assert man["config"]["levels"] == [0.9, 0.95]

    def test_unknown_config_key(self, prices_csv, tmp_path):
        cfg = tmp_path / "run.json"
        cfg.write_text('{"omegaa": 0.9}')
        assert run("trace", "--config", cfg, "--input", prices_csv, "--out", tmp_path) == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run("--version")
        assert exc.value.code == 0
        assert "stable-eff" in capsys.readouterr().out
