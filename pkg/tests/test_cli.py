import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from lodm.cli import main
from lodm.models import LodmParams, ModelSpec, simulate

GARCH = ["--family", "garch", "--omega", "0.1", "--a", "0.5", "--b", "0.3"]
WORKED = ["--family", "loglin_poisson", "--omega", "0.1", "--a", "0.7", "-0.1", "--b", "0.4", "-0.2"]


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "family": "garch", "p": 1, "q": 1, "omega": 0.1, "a": [0.5], "b": [0.3],
        "phi": None, "seed": 3, "n": 200, "burn_in": 100, "tol": 1e-9,
    }))
    return path


def test_simulate_writes_csv_and_sidecar(tmp_path, config):
    out = tmp_path / "traj.csv"
    assert main(["simulate", "--config", str(config), "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["k", "y", "x"]
    assert len(rows) == 201
    assert [r[0] for r in rows[1:4]] == ["0", "1", "2"]
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["seed"] == 3 and meta["n"] == 200
    assert len(meta["state0"]) == 1


def test_simulate_matches_library(tmp_path, config):
    out = tmp_path / "traj.csv"
    main(["simulate", "--config", str(config), "--out", str(out)])
    rows = read_csv(out)[1:]
    tr = simulate(ModelSpec("garch", 1, 1), LodmParams(0.1, [0.5], [0.3]), 200, 100, 3)
    np.testing.assert_array_equal([float(r[1]) for r in rows], tr.y)
    np.testing.assert_array_equal([float(r[2]) for r in rows], tr.x)


def test_simulate_byte_deterministic(tmp_path, config):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["simulate", "--config", str(config), "--out", str(a)])
    main(["simulate", "--config", str(config), "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert a.with_suffix(".json").read_bytes() == b.with_suffix(".json").read_bytes()
    main(["simulate", "--config", str(config), "--seed", "4", "--out", str(b)])
    assert a.read_bytes() != b.read_bytes()


def test_simulate_flag_overrides(tmp_path, config):
    out = tmp_path / "t.csv"
    assert main(["simulate", "--config", str(config), "--n", "17", "--out", str(out)]) == 0
    assert len(read_csv(out)) == 18


def test_simulate_unstable_guard(tmp_path, capsys):
    out = tmp_path / "t.csv"
    args = ["simulate", "--family", "garch", "--omega", "0.1", "--a", "1.5", "--b", "0.3",
            "--n", "20", "--burn-in", "0", "--out", str(out)]
    assert main(args) == 1
    assert "stability region" in capsys.readouterr().err
    assert not out.exists()
    assert main(args + ["--force"]) == 0
    assert "warning" in capsys.readouterr().err
    assert len(read_csv(out)) == 21


def test_check_exit_codes(capsys):
    assert main(["check", *GARCH]) == 0
    assert json.loads(capsys.readouterr().out)["verdict"] == "Identifiable"
    assert main(["check", "--family", "garch", "--omega", "0.1", "--a", "0.5", "--b", "0"]) == 3
    rep = json.loads(capsys.readouterr().out)
    assert rep["verdict"] == "NotIdentifiable"
    assert rep["common_roots"] == [[pytest.approx(0.5), 0.0]]
    assert main(["check", "--family", "garch", "--omega", "0.1", "--a", "1.2", "--b", "0.3"]) == 4


def test_config_errors(tmp_path, capsys):
    assert main(["check", "--family", "weibull", "--omega", "0.1", "--a", "0.5", "--b", "0.3"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", "--config", str(bad)]) == 2
    bad.write_text(json.dumps({"family": "garch", "p": 2, "q": 1, "omega": 0.1, "a": [0.5], "b": [0.3]}))
    assert main(["check", "--config", str(bad)]) == 2
    assert main(["check", "--config", str(tmp_path / "missing.json")]) == 2
    assert main(["nonsense"]) == 2
    assert main(["fit", *GARCH]) == 2
    capsys.readouterr()


def test_curve_rows(tmp_path):
    out = tmp_path / "curve.csv"
    assert main(["curve", *WORKED, "--d", "0", "0.1", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["d", "omega", "a1", "a2", "b1", "b2"]
    np.testing.assert_allclose([float(v) for v in rows[1]], [0, 0.1, 0.7, -0.1, 0.4, -0.2], atol=0)
    np.testing.assert_allclose([float(v) for v in rows[2]], [0.1, 0.12, 0.6, -0.08, 0.4, -0.16], atol=1e-14)
    side = json.loads(out.with_suffix(".json").read_text())
    assert side["d_range"][0] < -0.4 and side["d_range"][1] > 0.4


def test_curve_guards(capsys):
    assert main(["curve", *GARCH]) == 3
    assert "no curve exists" in capsys.readouterr().err
    assert main(["curve", *WORKED, "--d", "3.0"]) == 1
    err = capsys.readouterr().err
    assert "outside the valid range" in err and "1.49" in err


def test_impulse(capsys):
    assert main(["impulse", *GARCH, "--K", "3"]) == 0
    rows = list(csv.reader(capsys.readouterr().out.splitlines()))
    assert rows[0] == ["k", "h"]
    np.testing.assert_allclose([float(r[1]) for r in rows[1:]], [0.3, 0.15, 0.075, 0.0375])


@pytest.fixture
def data_file(tmp_path):
    out = tmp_path / "obs.csv"
    main(["simulate", *GARCH, "--n", "3000", "--seed", "5", "--out", str(out)])
    return out


def test_reconstruct_matches_simulation(tmp_path, data_file):
    out = tmp_path / "rec.csv"
    sim = read_csv(data_file)
    assert main(["reconstruct", *GARCH, "--data", str(data_file), "--out", str(out)]) == 0
    rec = read_csv(out)
    assert rec[0] == ["k", "y", "x"]
    assert len(rec) == len(sim)
    x_true = np.array([float(r[2]) for r in sim[1:]])
    x_rec = np.array([float(r[2]) for r in rec[1:]])
    # started at the fixed point, the filtered path forgets the gap
    assert np.max(np.abs(x_rec[200:] - x_true[200:])) <= 1e-10


def test_fit_json(tmp_path, data_file):
    out = tmp_path / "fit.json"
    assert main(["fit", "--family", "garch", "--omega", "0.2", "--a", "0.3", "--b", "0.2",
                 "--data", str(data_file), "--out", str(out)]) == 0
    res = json.loads(out.read_text())
    est = [res["theta_hat"]["omega"], *res["theta_hat"]["a"], *res["theta_hat"]["b"]]
    assert np.all(np.abs(np.subtract(est, [0.1, 0.5, 0.3])) <= 0.15)
    out2 = tmp_path / "fit2.json"
    main(["fit", "--family", "garch", "--omega", "0.2", "--a", "0.3", "--b", "0.2",
          "--data", str(data_file), "--out", str(out2)])
    assert out.read_bytes() == out2.read_bytes()


def test_profile_csv(tmp_path):
    data = tmp_path / "pois.csv"
    assert main(["simulate", *WORKED, "--n", "5000", "--seed", "1", "--out", str(data)]) == 0
    out = tmp_path / "prof.csv"
    assert main(["profile", *WORKED, "--data", str(data), "--d", "-0.1", "0", "0.1",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["d", "loglik"]
    vals = [float(r[1]) for r in rows[1:]]
    assert max(vals) - min(vals) <= 1e-4
    assert main(["profile", *GARCH, "--data", str(data)]) == 3


def test_bad_data_file(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("k,z\n0,1\n")
    assert main(["reconstruct", *GARCH, "--data", str(bad)]) == 2


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "lodm.cli", "check", *GARCH], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "Identifiable"
