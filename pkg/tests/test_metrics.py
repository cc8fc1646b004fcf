import numpy as np
import pytest

from zvnav.errors import ValidationError
from zvnav.imu import GroundTruth, Trajectory
from zvnav.metrics import armse, marker_errors, rigid_align


def make_traj(times, positions):
    n = len(times)
    quats = np.tile([1.0, 0.0, 0.0, 0.0], (n, 1))
    return Trajectory(times=np.asarray(times, dtype=float),
                      positions=np.asarray(positions, dtype=float),
                      velocities=np.zeros((n, 3)), quaternions=quats)


def random_walk(rng, n=200):
    times = np.arange(n) / 200.0
    positions = np.cumsum(rng.normal(scale=0.01, size=(n, 3)), axis=0)
    return times, positions


# ---------------------------------------------------------------------------
# armse


def test_identical_trajectories_zero_error():
    rng = np.random.default_rng(0)
    times, pos = random_walk(rng)
    traj = make_traj(times, pos)
    gt = GroundTruth(times=times, positions=pos)
    report = armse(traj, gt)
    assert report.armse_2d == 0.0
    assert report.armse_3d == 0.0
    assert report.end_error == 0.0


def test_constant_offset_hand_value():
    rng = np.random.default_rng(1)
    times, pos = random_walk(rng)
    traj = make_traj(times, pos + np.array([0.3, 0.4, 0.0]))
    gt = GroundTruth(times=times, positions=pos)
    report = armse(traj, gt, align="none")
    assert report.armse_2d == pytest.approx(0.5, rel=1e-12)
    assert report.armse_3d == pytest.approx(0.5, rel=1e-12)
    assert report.end_error == pytest.approx(0.5, rel=1e-12)
    # translation alignment removes the offset entirely
    report = armse(traj, gt, align="trans")
    assert report.armse_2d < 1e-12
    assert report.end_error_raw == pytest.approx(0.5, rel=1e-12)


def test_yaw_alignment_invariant_to_global_yaw():
    rng = np.random.default_rng(2)
    times, pos = random_walk(rng)
    gt = GroundTruth(times=times, positions=pos)
    alpha = 0.8
    c, s = np.cos(alpha), np.sin(alpha)
    Rz = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])
    rotated = pos @ Rz.T
    report = armse(make_traj(times, rotated), gt, align="yaw")
    assert report.armse_3d < 1e-9


def test_insufficient_overlap_rejected():
    rng = np.random.default_rng(3)
    times, pos = random_walk(rng)
    traj = make_traj(times[:50], pos[:50])  # 25% of the gt span
    gt = GroundTruth(times=times, positions=pos)
    with pytest.raises(ValidationError):
        armse(traj, gt)


def test_interpolation_at_offset_timestamps():
    # gt on a coarser clock; linear motion interpolates exactly
    t_gt = np.linspace(0.0, 1.0, 11)
    gt_pos = np.column_stack([t_gt, np.zeros(11), np.zeros(11)])
    gt = GroundTruth(times=t_gt, positions=gt_pos)
    t_est = np.linspace(0.0, 1.0, 201)
    est_pos = np.column_stack([t_est, np.zeros(201), np.zeros(201)])
    report = armse(make_traj(t_est, est_pos), gt)
    assert report.armse_3d < 1e-12


# ---------------------------------------------------------------------------
# rigid alignment


def test_rigid_align_identity():
    rng = np.random.default_rng(4)
    pts = rng.normal(size=(10, 3))
    R, t, s = rigid_align(pts, pts)
    np.testing.assert_allclose(R, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(t, 0.0, atol=1e-12)
    assert s == 1.0


def test_rigid_align_recovers_constructed_transform():
    rng = np.random.default_rng(5)
    from zvnav import quat
    q = rng.normal(size=4)
    R_true = quat.to_matrix(q / np.linalg.norm(q))
    t_true = rng.normal(size=3)
    src = rng.normal(size=(20, 3))
    dst = src @ R_true.T + t_true
    R, t, s = rigid_align(src, dst)
    np.testing.assert_allclose(R, R_true, atol=1e-9)
    np.testing.assert_allclose(t, t_true, atol=1e-9)
    assert s == 1.0


def test_rigid_align_recovers_scale():
    rng = np.random.default_rng(6)
    src = rng.normal(size=(15, 3))
    dst = 2.5 * src
    R, t, s = rigid_align(src, dst, with_scale=True)
    assert s == pytest.approx(2.5, rel=1e-9)
    np.testing.assert_allclose(R, np.eye(3), atol=1e-9)


def test_rigid_align_rejects_collinear():
    src = np.column_stack([np.arange(5.0), np.zeros(5), np.zeros(5)])
    dst = src.copy()
    with pytest.raises(ValidationError):
        rigid_align(src, dst)


def test_rigid_align_residual_never_worse_than_identity():
    rng = np.random.default_rng(7)
    for _ in range(10):
        src = rng.normal(size=(12, 3))
        dst = rng.normal(size=(12, 3))
        R, t, s = rigid_align(src, dst)
        res_aligned = np.sum((dst - (src @ R.T + t)) ** 2)
        res_identity = np.sum((dst - src) ** 2)
        assert res_aligned <= res_identity + 1e-12


# ---------------------------------------------------------------------------
# marker evaluation


def test_markers_on_trajectory_zero_distance():
    rng = np.random.default_rng(8)
    times, pos = random_walk(rng)
    traj = make_traj(times, pos)
    markers = [(float(times[k]), pos[k]) for k in (10, 50, 120)]
    out = marker_errors(traj, markers)
    assert [m for m, _ in out] == [0, 1, 2]
    assert all(d < 1e-12 for _, d in out)


def test_marker_offset_distance():
    times = np.arange(100) / 200.0
    pos = np.zeros((100, 3))
    traj = make_traj(times, pos)
    out = marker_errors(traj, [(0.25, np.array([1.0, 0.0, 0.0]))])
    assert out[0][1] == pytest.approx(1.0)


def test_marker_outside_span_skipped():
    times = np.arange(100) / 200.0
    traj = make_traj(times, np.zeros((100, 3)))
    with pytest.warns(UserWarning):
        out = marker_errors(traj, [(5.0, np.zeros(3))])
    assert out == []
