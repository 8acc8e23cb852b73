import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from semisic import cli
from semisic.povm import born_probabilities, random_rank_one_povm, sic_povm
from semisic.qmath import H, I2
from semisic.selftest import FitFailedError, q_max
from semisic.serialize import dumps, povm_to_dict
from semisic.walk import CompilationFailedError


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_povm_verify(capsys):
    code, rep, _ = run(capsys, "povm", "--B", "1/13", "--verify")
    assert code == 0
    assert rep["command"] == "povm" and rep["inputs"]["B"] == "1/13"
    assert rep["residuals"]["max_residual"] < 1e-10
    assert rep["outputs"]["verification"]["ok"]


def test_povm_out_of_range(capsys):
    code, rep, err = run(capsys, "povm", "--B", "1/10")
    assert code == 2 and rep is None
    assert "outside" in err


def test_povm_bad_number(capsys):
    code, _, _ = run(capsys, "povm", "--B", "thirteen")
    assert code == 2


def test_povm_sic_traces_and_files(capsys, tmp_path):
    code, rep, _ = run(capsys, "povm", "--B", "1/12", "--json", str(tmp_path / "p.json"), "--csv", str(tmp_path / "p.csv"))
    assert code == 0
    assert [e["weight"] for e in rep["outputs"]["povm"]["elements"]] == [0.5] * 4
    assert json.loads((tmp_path / "p.json").read_text())["elements"][0]["weight"] == 0.5
    rows = read_csv(tmp_path / "p.csv")
    assert list(rows[0]) == ["element", "trace", "bloch_x", "bloch_y", "bloch_z"] and len(rows) == 4


def test_usage_errors_exit_2():
    for argv in ([], ["povm"], ["simulate", "--shots", "x"]):
        with pytest.raises(SystemExit) as exc:
            cli.main(argv)
        assert exc.value.code == 2


def test_compile_b13_angles(capsys, tmp_path):
    out = tmp_path / "angles.csv"
    code, rep, err = run(capsys, "compile", "--B", "1/13", "--angles", "--angles-csv", str(out), "--out", str(tmp_path / "s.json"))
    assert code == 0 and "round-trip residual" in err
    assert rep["residuals"]["round_trip"] <= 1e-9
    rows = {r["label"]: r for r in read_csv(out)}
    assert list(read_csv(out)[0]) == ["B", "label", "kind", "angle_deg"]
    assert abs(float(rows["HWP3"]["angle_deg"]) - 26.53) < 0.05
    assert json.loads((tmp_path / "s.json").read_text())["steps"] == 5


def test_compile_b12_angles(capsys):
    code, rep, _ = run(capsys, "compile", "--B", "1/12", "--angles")
    angles = {r["label"]: r["angle_deg"] for r in rep["outputs"]["angles"]}
    assert code == 0
    assert abs(angles["HWP3"] - 22.5) < 0.05 and abs(angles["HWP5"] - 22.5) < 0.05


def test_compile_custom_povm(capsys, tmp_path):
    target = random_rank_one_povm(np.random.default_rng(3))
    path = tmp_path / "custom.json"
    path.write_text(dumps(povm_to_dict(target)))
    code, rep, _ = run(capsys, "compile", "--povm", str(path))
    assert code == 0 and rep["residuals"]["round_trip"] <= 1e-9


def test_compile_rejects_mixed_povm(capsys, tmp_path):
    from semisic.povm import povm_from_effects

    path = tmp_path / "mixed.json"
    path.write_text(dumps(povm_to_dict(povm_from_effects([I2 / 4] * 4))))
    code, _, _ = run(capsys, "compile", "--povm", str(path))
    assert code == 2


def test_compile_needs_exactly_one_source(capsys):
    assert run(capsys, "compile")[0] == 2
    assert run(capsys, "compile", "--B", "1/13", "--povm", "x.json")[0] == 2


def test_compile_failure_exit_3(capsys, monkeypatch):
    def boom(_):
        raise CompilationFailedError("forced")

    monkeypatch.setattr(cli, "compile_povm", boom)
    assert run(capsys, "compile", "--B", "1/13")[0] == 3


def test_simulate_plus_b13(capsys):
    code, rep, _ = run(capsys, "simulate", "--B", "1/13", "--state", "1.5708,0", "--shots", "0")
    assert code == 0
    np.testing.assert_allclose(rep["outputs"]["exact"], [0.1807, 0.3584, 0.2305, 0.2305], atol=2e-3)
    assert rep["outputs"]["ports"] == [5, 3, 1, -1]


def test_simulate_h_b12(capsys):
    code, rep, _ = run(capsys, "simulate", "--B", "1/12", "--state", "0,0")
    np.testing.assert_allclose(rep["outputs"]["exact"], born_probabilities(sic_povm(), H), atol=2e-3)


def test_simulate_deterministic_bytes():
    cmd = [sys.executable, "-m", "semisic.cli", "simulate", "--B", "1/14", "--shots", "1000000", "--seed", "7"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and json.loads(a)["outputs"]["counts"]


def test_simulate_fig3_csv_and_noise(capsys, tmp_path):
    noise = tmp_path / "noise.json"
    noise.write_text(json.dumps({"extinction_ratio": 220, "efficiency": [1, 0.99, 0.98, 0.99]}))
    fig = tmp_path / "fig3.csv"
    code, rep, _ = run(capsys, "simulate", "--B", "1/13", "--noise", str(noise), "--shots", "5000", "--fig3-csv", str(fig))
    assert code == 0 and rep["residuals"]["noise_shift"] < 0.02
    rows = read_csv(fig)
    assert list(rows[0]) == ["B", "outcome", "theory", "sampled", "stderr"] and len(rows) == 4


def test_simulate_schedule_file(capsys, tmp_path):
    sched = tmp_path / "s.json"
    run(capsys, "compile", "--B", "1/15", "--out", str(sched))
    code, rep, _ = run(capsys, "simulate", "--schedule", str(sched), "--state", "0,0")
    assert code == 0 and rep["outputs"]["ports"] == [5, 3, 1, -1]


def test_simulate_bad_inputs(capsys, tmp_path):
    assert run(capsys, "simulate", "--B", "1/13", "--state", "1.0")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "simulate", "--B", "1/13", "--noise", str(bad))[0] == 2


@pytest.mark.parametrize("B,expected", [("1/15", 8.0), ("1/13", 7.2363)])
def test_selftest_exact(capsys, B, expected):
    code, rep, _ = run(capsys, "selftest", "--B", B, "--shots", "0")
    res = rep["outputs"]["result"]
    assert code == 0
    assert abs(res["w"] - expected) < 1e-3
    assert res["q_bound"] == pytest.approx(q_max(B), abs=1e-10)


def test_selftest_sampled(capsys, tmp_path):
    fig, counts = tmp_path / "fig4.csv", tmp_path / "counts.csv"
    code, rep, _ = run(capsys, "selftest", "--B", "1/14", "--shots", "100000", "--seed", "3",
                       "--fig4-csv", str(fig), "--counts-csv", str(counts))
    res = rep["outputs"]["result"]
    assert code == 0
    assert abs(res["w"] - 7.5895) < 3 * res["stderr"]
    assert list(read_csv(fig)[0]) == ["B", "W", "stderr", "Q"]
    assert list(read_csv(counts)[0]) == ["x", "y", "b", "count"]


def test_selftest_witness_file(capsys, tmp_path):
    from semisic.selftest import default_witness

    path = tmp_path / "w.json"
    path.write_text(json.dumps(default_witness("1/13").to_dict()))
    code, rep, _ = run(capsys, "selftest", "--B", "1/13", "--witness", str(path))
    assert code == 0 and abs(rep["outputs"]["result"]["w"] - 7.2363) < 1e-3


def test_selftest_fit_failure_exit_3(capsys, monkeypatch):
    def fail(*args, **kwargs):
        raise FitFailedError("forced")

    monkeypatch.setattr(cli, "fit_witness", fail)
    assert run(capsys, "selftest", "--B", "1/13", "--fit")[0] == 3


def test_selftest_seesaw_scenario(capsys):
    code, rep, _ = run(capsys, "selftest", "--B", "1/13", "--scenario", "seesaw", "--restarts", "5")
    assert code == 0 and abs(rep["outputs"]["result"]["w"] - 7.2363) < 1e-3
    assert rep["residuals"]["semi_sic"] < 1e-3


def test_console_script_entry_point():
    out = subprocess.run(["semisic", "povm", "--B", "1/14", "--verify"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["version"]
