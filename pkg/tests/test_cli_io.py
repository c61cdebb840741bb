import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from gblab.cli import main
from gblab.errors import DomainError
from gblab.io import (OUTPUT_ENV, load_config, load_trajectory, output_dir, parse_key_values, save_trajectory,
                      simulation_config)
from gblab.simulator import SimulationConfig, run


def _rows(path):
    lines = path.read_text().splitlines()
    return lines[0], list(csv.DictReader(lines[1:]))


def test_threshold_curve_contains_p3_golden(tmp_path):
    assert main(["threshold-curve", "--pmin", "1.5", "--pmax", "5", "--steps", "350", "--out", str(tmp_path)]) == 0
    header, rows = _rows(tmp_path / "threshold.csv")
    assert header.startswith("# gblab threshold")
    assert len(rows) == 351
    r3 = [r for r in rows if float(r["p"]) == 3.0]
    assert len(r3) == 1
    r = r3[0]
    assert float(r["a2"]) == 0.0625
    assert float(r["a1"]) == pytest.approx(-(12 + np.pi ** 2) / 36 - 0.5, abs=1e-8)
    assert float(r["c_plus_paper"]) == pytest.approx(0.7153, abs=5e-4)
    assert float(r["bona_sachs"]) == pytest.approx(np.sqrt(0.5), abs=1e-12)


def test_threshold_curve_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["threshold-curve", "--pmin", "2", "--pmax", "4", "--steps", "20", "--out", str(d)]) == 0
    assert (a / "threshold.csv").read_bytes() == (b / "threshold.csv").read_bytes()


@pytest.mark.parametrize("argv", [["threshold-curve", "--pmin", "3", "--pmax", "3"],
                                  ["threshold-curve", "--pmin", "4", "--pmax", "2"],
                                  ["threshold-curve", "--steps", "0"]])
def test_empty_range_is_usage_error(tmp_path, capsys, argv):
    assert main(argv + ["--out", str(tmp_path)]) == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "DomainError"


def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as ei:
        main(["spectrum", "--kind", "nope"])
    assert ei.value.code == 2


def test_spectrum_Ltilde0(tmp_path, capsys):
    assert main(["spectrum", "--kind", "Ltilde0", "--p", "3", "--n", "1024", "--out", str(tmp_path)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == "gblab/spectrum v1"
    assert rep["eigenvalues"][0] == pytest.approx(-2.0, abs=1e-4)
    assert json.loads((tmp_path / "spectrum.json").read_text()) == rep


def test_simulate_then_diagnose_exact_soliton(tmp_path):
    out = str(tmp_path)
    assert main(["simulate", "--p", "3", "--c", "0.75", "--perturbation", "none", "--L", "50", "--n", "1024",
                 "--T", "3", "--out", out]) == 0
    assert main(["diagnose", str(tmp_path / "trajectory.npz"), "--out", out, "--refine", "2"]) == 0
    _, track = _rows(tmp_path / "track.csv")
    cs = np.array([float(r["c"]) for r in track])
    assert np.max(np.abs(cs - 0.75)) <= 1e-6
    _, cons = _rows(tmp_path / "trajectory_conserved.csv")
    assert list(cons[0]) == ["t", "E", "P"]


def test_diagnose_perturbed_run_emits_all_columns(tmp_path):
    out = str(tmp_path)
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# perturbed run\np = 3\nc = 0.75\ndelta = 0.01\nperturbation = gauss\n"
                   "L = 60\nn = 1024\nT = 2\nsnapshot_every = 0.25\n")
    assert main(["simulate", "--config", str(cfg), "--out", out]) == 0
    assert main(["diagnose", str(tmp_path / "trajectory.npz"), "--out", out, "--refine", "2"]) == 0
    header, rows = _rows(tmp_path / "diagnose.csv")
    assert header == "# gblab diagnose v1"
    names = ["t", "I", "J", "N", "H", "fd_dI", "rhs_I", "fd_dJ", "rhs_J", "fd_dN", "rhs_N", "P_local"]
    assert list(rows[0]) == names
    assert len(rows) == 9
    assert all(np.isfinite(float(r[k])) for r in rows for k in names)
    assert max(abs(float(r["P_local"])) for r in rows) > 0


def test_simulate_blowup_exit_3(tmp_path, capsys):
    code = main(["simulate", "--c", "0.0", "--delta", "3.0", "--perturbation", "gauss", "--L", "30", "--n", "512",
                 "--T", "5", "--dt", "0.001", "--out", str(tmp_path)])
    assert code == 3
    assert "BlowUp" in capsys.readouterr().err


def test_missing_trajectory_is_usage_error(tmp_path):
    assert main(["diagnose", str(tmp_path / "none.npz")]) == 2


def test_coercivity_and_profile_commands(tmp_path):
    out = str(tmp_path)
    assert main(["coercivity", "--form", "B_L", "--cmin", "0.75", "--cmax", "0.9", "--steps", "2", "--n", "64",
                 "--out", out]) == 0
    _, rows = _rows(tmp_path / "coercivity.csv")
    assert len(rows) == 2
    assert main(["profile", "--p", "3", "--c", "0.5", "--points", "11", "--out", out]) == 0
    assert (tmp_path / "profile.csv").exists()


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "env"))
    assert output_dir(None) == tmp_path / "env"
    assert output_dir(str(tmp_path / "flag")) == tmp_path / "flag"
    assert main(["threshold-curve", "--pmin", "2", "--pmax", "3", "--steps", "2"]) == 0
    assert (tmp_path / "env" / "threshold.csv").exists()


def test_config_parsing(tmp_path):
    vals = parse_key_values(["# c", "", "p = 4", "sponge = yes  # trailing", "n=512"])
    assert vals == {"p": "4", "sponge": "yes", "n": "512"}
    cfg = simulation_config(vals, c=0.9)
    assert cfg.p == 4.0 and cfg.sponge is True and cfg.n == 512 and cfg.c == 0.9
    with pytest.raises(DomainError):
        parse_key_values(["p 4"])
    with pytest.raises(DomainError):
        simulation_config({"bogus": "1"})
    with pytest.raises(DomainError):
        simulation_config({"sponge": "maybe"})
    with pytest.raises(DomainError):
        load_config(tmp_path / "absent.cfg")


def test_trajectory_round_trip(tmp_path):
    cfg = SimulationConfig(p=3, c=0.5, delta=0.01, perturbation="random", seed=4, L=40, n=256, T=1,
                           snapshot_every=0.5)
    traj = run(cfg)
    npz, cons = save_trajectory(tmp_path, traj, "rt")
    back = load_trajectory(npz)
    assert np.array_equal(back.times, traj.times)
    for a, b in zip(back.snapshots, traj.snapshots):
        assert np.array_equal(a.u1, b.u1) and np.array_equal(a.u2, b.u2)
    assert back.meta["config"] == cfg
    assert back.grid.L == traj.grid.L and back.grid.n == traj.grid.n
    assert cons.read_text().startswith("# gblab conserved v1")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "gblab", "threshold-curve", "--pmin", "3", "--pmax", "2"],
                       capture_output=True, text=True)
    assert r.returncode == 2
    assert json.loads(r.stderr.strip().splitlines()[-1])["error"] == "DomainError"
