import json
import math

import numpy as np
import pytest

from fitguide import read_dataset, save_model
from fitguide.cli import main


def test_gen_data_tiny(tmp_path, capsys):
    out = tmp_path / "d.csv"
    code = main(["gen-data", "--out", str(out), "--ni", "1", "--nj", "1",
                 "--t-bar", "0.01", "--step", "0.005"])
    assert code == 0
    data = read_dataset(out)
    assert len(data) <= 2


def test_gen_data_then_train_round_trip(tmp_path, capsys):
    data_path = tmp_path / "d.csv"
    model_path = tmp_path / "m.txt"
    report_path = tmp_path / "r.json"
    assert main(["gen-data", "--out", str(data_path), "--ni", "6", "--nj", "6",
                 "--t-bar", "1.5", "--step", "0.01"]) == 0
    assert main(["train", "--data", str(data_path), "--out", str(model_path),
                 "--report", str(report_path), "--epochs", "3", "--batch", "256"]) == 0
    report = json.loads(report_path.read_text(encoding="utf-8"))
    assert report["epochs_run"] == 3
    assert model_path.exists()


def test_solve_case_a(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    code = main(["solve", "--x0", "-10000", "--y0", "0", "--theta0", str(math.pi / 3),
                 "--speed", "500", "--tf", "25", "--out", str(out)])
    assert code == 0
    text = capsys.readouterr().out
    j_val = float(text.split("J=")[1].split()[0])
    assert j_val == pytest.approx(2.1350e4, rel=0.01)
    header = out.read_text(encoding="utf-8").splitlines()[0]
    assert header == "t,x,y,theta,r,sigma,u,a"


def test_guide_oracle(capsys):
    code = main(["guide", "--r", "10000", "--sigma", str(math.pi / 3),
                 "--tgo", "25", "--speed", "500"])
    assert code == 0
    text = capsys.readouterr().out
    assert "u=" in text and "a=" in text
    u_val = float(text.split("u=")[1].split()[0])
    a_val = float(text.split("a=")[1].split()[0])
    assert a_val == pytest.approx(500.0 * u_val)


def test_guide_nn_requires_model(capsys):
    code = main(["guide", "--r", "100", "--sigma", "0.3", "--tgo", "5",
                 "--speed", "100", "--law", "nn"])
    assert code == 1
    assert "requires --model" in capsys.readouterr().err


def test_simulate_from_config(tmp_path, capsys, model):
    model_path = tmp_path / "m.txt"
    save_model(model, model_path)
    config = {"x0": -5000.0, "y0": 0.0, "theta0": 1.0, "speed": 500.0,
              "t_f": 20.0, "guidance": "nn", "dt": 0.01}
    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(json.dumps(config), encoding="utf-8")
    out = tmp_path / "run.csv"
    code = main(["simulate", "--config", str(cfg_path), "--model", str(model_path),
                 "--out", str(out)])
    assert code == 0
    assert "simulate[nn]" in capsys.readouterr().out
    assert out.exists()


def test_simulate_rejects_unknown_keys(tmp_path, capsys):
    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(json.dumps({"x0": 1, "y0": 2, "theta0": 0, "speed": 1,
                                    "t_f": 5, "warp": 9}), encoding="utf-8")
    assert main(["simulate", "--config", str(cfg_path)]) == 1
    assert "unknown keys" in capsys.readouterr().err


def test_salvo_from_config(tmp_path, capsys):
    cfg = {
        "t_f": 30.0,
        "guidance": "pn",
        "interceptors": [
            {"x0": -6000.0, "y0": 0.0, "theta0": 0.3, "speed": 400.0},
            {"x0": 0.0, "y0": -7000.0, "theta0": 1.8, "speed": 400.0},
        ],
    }
    cfg_path = tmp_path / "salvo.json"
    cfg_path.write_text(json.dumps(cfg), encoding="utf-8")
    assert main(["salvo", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    assert "salvo #1" in out and "salvo #2" in out and "impact spread" in out


def test_verify_wiring(monkeypatch, capsys):
    import fitguide.verification as verification

    calls = {}

    class FakeResult:
        passed = True

    def fake_run(model_path=None, full_grid=True, dt=0.01):
        calls["args"] = (model_path, full_grid, dt)
        return [FakeResult()]

    monkeypatch.setattr(verification, "run_acceptance", fake_run)
    assert main(["verify", "--dt", "0.02"]) == 0
    assert calls["args"] == (None, True, 0.02)
    assert main(["verify", "--no-full-grid"]) == 0
    assert calls["args"][1] is False


def test_bad_flags_exit_2():
    with pytest.raises(SystemExit) as excinfo:
        main(["simulate"])  # missing --config
    assert excinfo.value.code == 2


def test_idempotent_outputs(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["gen-data", "--ni", "4", "--nj", "4", "--t-bar", "1.0", "--step", "0.01"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
