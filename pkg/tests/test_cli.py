import os

import numpy as np
import pytest

from zvnav.cli import main

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def walk_files(tmp_path):
    imu = tmp_path / "imu.csv"
    gt = tmp_path / "gt.csv"
    rc = run("synth", "--profile", "walk", "--duration", "12", "--seed", "1",
             "--out", imu, "--gt-out", gt)
    assert rc == 0
    return imu, gt


def test_navigate_with_labels_then_eval(walk_files, tmp_path, capsys):
    imu, gt = walk_files
    traj = tmp_path / "traj.csv"
    assert run("navigate", "--imu", imu, "--labels", "--out", traj) == 0
    assert run("eval", "--traj", traj, "--gt", gt, "--align", "none") == 0
    out = capsys.readouterr().out
    values = dict(line.split() for line in out.strip().splitlines()
                  if line and not line.startswith("samples"))
    assert float(values["armse_2d"]) < 0.05


def test_navigate_detector_deterministic(walk_files, tmp_path):
    imu, _ = walk_files
    t1, t2 = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["navigate", "--imu", imu, "--detector", "shoe", "--gamma", "1e6"]
    assert run(*args, "--out", t1) == 0
    assert run(*args, "--out", t2) == 0
    assert t1.read_bytes() == t2.read_bytes()


def test_missing_model_exits_2_with_path(walk_files, tmp_path, capsys):
    imu, _ = walk_files
    missing = tmp_path / "nope.json"
    rc = run("navigate", "--imu", imu, "--model", missing,
             "--out", tmp_path / "t.csv")
    assert rc == 2
    assert str(missing) in capsys.readouterr().err


def test_detector_without_gamma_is_usage_error(walk_files, tmp_path):
    imu, _ = walk_files
    rc = run("navigate", "--imu", imu, "--detector", "shoe",
             "--out", tmp_path / "t.csv")
    assert rc == 1


def test_conflicting_zv_sources_usage_error(walk_files, tmp_path):
    imu, _ = walk_files
    rc = run("navigate", "--imu", imu, "--detector", "shoe", "--gamma", "1e6",
             "--labels", "--out", tmp_path / "t.csv")
    assert rc == 1


def test_detect_writes_statistic_csv(walk_files, tmp_path):
    imu, _ = walk_files
    out = tmp_path / "zv.csv"
    assert run("detect", "--imu", imu, "--detector", "ared", "--gamma", "0.5",
               "--out", out) == 0
    header = out.read_text().splitlines()[0]
    assert header == "t,statistic,flag"


def test_infer_with_fixture_model(walk_files, tmp_path):
    imu, _ = walk_files
    out = tmp_path / "zv.csv"
    model = os.path.join(FIXTURES, "random_model.json")
    assert run("infer", "--imu", imu, "--model", model, "--out", out) == 0
    data = np.loadtxt(out, delimiter=",", skiprows=1)
    assert np.all(data[:, 1] >= 0) and np.all(data[:, 1] <= 1)


def test_sweep_singleton_matches_navigate_eval(walk_files, tmp_path, capsys):
    imu, gt = walk_files
    table = tmp_path / "sweep.csv"
    assert run("sweep", "--imu", imu, "--gt", gt, "--detector", "shoe",
               "--grid-min", "1e6", "--grid-max", "1e6", "--grid-points", "1",
               "--out", table) == 0
    lines = table.read_text().strip().splitlines()
    assert lines[0] == "trial,gamma,armse"
    sweep_err = float(lines[1].split(",")[2])

    traj = tmp_path / "traj.csv"
    assert run("navigate", "--imu", imu, "--detector", "shoe", "--gamma", "1e6",
               "--out", traj) == 0
    capsys.readouterr()
    assert run("eval", "--traj", traj, "--gt", gt, "--align", "none") == 0
    out = capsys.readouterr().out
    values = dict(line.split() for line in out.strip().splitlines())
    assert sweep_err == pytest.approx(float(values["armse_2d"]), rel=1e-12)


def test_optimize_threshold_command(walk_files, capsys):
    imu, gt = walk_files
    rc = run("optimize-threshold", "--imu", imu, "--gt", gt, "--detector", "shoe",
             "--grid-min", "1e5", "--grid-max", "1e8", "--grid-points", "4")
    assert rc == 0
    out = capsys.readouterr().out
    values = dict(line.split() for line in out.strip().splitlines())
    assert float(values["best_armse"]) < 0.1


def test_eval_marker_report(walk_files, tmp_path, capsys):
    imu, gt = walk_files
    traj = tmp_path / "traj.csv"
    assert run("navigate", "--imu", imu, "--labels", "--out", traj) == 0
    # markers on the ground-truth path itself
    gt_rows = np.loadtxt(gt, delimiter=",", skiprows=1)
    markers = tmp_path / "markers.csv"
    with open(markers, "w") as f:
        f.write("t,px,py,pz\n")
        for k in (400, 1200, 2000):
            f.write(",".join(repr(float(v)) for v in gt_rows[k, :4]) + "\n")
    capsys.readouterr()
    assert run("eval", "--traj", traj, "--gt", gt, "--markers", markers,
               "--align", "none") == 0
    out = capsys.readouterr().out
    marker_lines = [l for l in out.splitlines() if l.startswith("marker_")]
    assert len(marker_lines) == 3
    assert all(float(l.split()[1]) < 0.05 for l in marker_lines)
