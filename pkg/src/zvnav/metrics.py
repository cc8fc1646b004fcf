"""Trajectory error metrics and rigid point-cloud alignment.

ARMSE is the RMSE of the per-timestep position residual over the whole
trial (ground truth linearly interpolated to the estimate's timestamps).

Alignment modes (the ZUPT-INS yaw state is unobservable, so evaluation
may compensate for a global yaw offset):
  none   raw residuals
  trans  translate the estimate so its first position matches ground truth
  yaw    best-fit rotation about z plus translation (default for ZUPT-INS)
  rigid  full least-squares rigid transform
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .imu import GroundTruth, Trajectory

ALIGN_MODES = ("none", "trans", "yaw", "rigid")


@dataclass(frozen=True)
class ErrorReport:
    armse_2d: float
    armse_3d: float
    end_error: float               # final-position distance after alignment
    end_error_raw: float           # final-position distance before alignment
    per_marker_errors: list | None = None

    def as_dict(self):
        d = {
            "armse_2d": self.armse_2d,
            "armse_3d": self.armse_3d,
            "end_error": self.end_error,
            "end_error_raw": self.end_error_raw,
        }
        if self.per_marker_errors is not None:
            for mid, err in self.per_marker_errors:
                d[f"marker_{mid}"] = err
        return d


def rigid_align(src, dst, with_scale=False):
    """Least-squares similarity transform: minimize ||dst - (s R src + t)||^2.

    Returns (R, t, s).  Requires >= 3 non-collinear correspondences.
    """
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 3:
        raise ValidationError("point lists must be matching (N,3) arrays")
    n = len(src)
    if n < 3:
        raise ValidationError("need at least 3 correspondences")
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    sc = src - mu_s
    dc = dst - mu_d
    cov = dc.T @ sc / n
    U, D, Vt = np.linalg.svd(cov)
    if D[1] <= max(D[0], 1.0) * 1e-12:
        raise ValidationError("degenerate (collinear) point configuration")
    S = np.eye(3)
    if np.linalg.det(U) * np.linalg.det(Vt) < 0:
        S[2, 2] = -1.0
    R = U @ S @ Vt
    if with_scale:
        var_s = np.sum(sc ** 2) / n
        s = float(np.trace(np.diag(D) @ S) / var_s)
    else:
        s = 1.0
    t = mu_d - s * R @ mu_s
    return R, t, s


def _yaw_align(est, ref):
    """Best rotation about z + translation mapping est onto ref."""
    mu_e = est.mean(axis=0)
    mu_r = ref.mean(axis=0)
    ec = est - mu_e
    rc = ref - mu_r
    num = np.sum(ec[:, 0] * rc[:, 1] - ec[:, 1] * rc[:, 0])
    den = np.sum(ec[:, 0] * rc[:, 0] + ec[:, 1] * rc[:, 1])
    alpha = np.arctan2(num, den)
    c, s = np.cos(alpha), np.sin(alpha)
    Rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return est @ Rz.T + (mu_r - Rz @ mu_e)


def _apply_alignment(est, ref, align):
    if align == "none":
        return est
    if align == "trans":
        return est + (ref[0] - est[0])
    if align == "yaw":
        return _yaw_align(est, ref)
    if align == "rigid":
        R, t, _ = rigid_align(est, ref)
        return est @ R.T + t
    raise ValidationError(f"unknown alignment mode {align!r}")


def armse(traj: Trajectory, gt: GroundTruth, dims=2, align="none") -> ErrorReport:
    """Position error report for one trial.

    Ground truth must cover at least 90% of the trajectory's overlap with
    it; ground truth is interpolated to trajectory timestamps.  `dims`
    selects which ARMSE (2D/3D) drives threshold optimization; both are
    always reported.
    """
    if align not in ALIGN_MODES:
        raise ValidationError(f"unknown alignment mode {align!r}")
    t0 = max(traj.times[0], gt.times[0])
    t1 = min(traj.times[-1], gt.times[-1])
    span = gt.times[-1] - gt.times[0]
    if span <= 0 or (t1 - t0) < 0.9 * span:
        raise ValidationError("trajectory covers less than 90% of ground-truth span")
    mask = (traj.times >= t0) & (traj.times <= t1)
    times = traj.times[mask]
    est = traj.positions[mask]
    ref = np.column_stack([np.interp(times, gt.times, gt.positions[:, i])
                           for i in range(3)])
    raw_end = float(np.linalg.norm(est[-1] - ref[-1]))
    est = _apply_alignment(est, ref, align)
    res = est - ref
    armse_2d = float(np.sqrt(np.mean(np.sum(res[:, :2] ** 2, axis=1))))
    armse_3d = float(np.sqrt(np.mean(np.sum(res ** 2, axis=1))))
    end = float(np.linalg.norm(res[-1]))
    return ErrorReport(armse_2d=armse_2d, armse_3d=armse_3d,
                       end_error=end, end_error_raw=raw_end)


def marker_errors(traj: Trajectory, markers):
    """Distance between the interpolated trajectory and each marker position.

    Markers outside the trajectory time span are skipped with a warning.
    Returns [(marker_index, distance_m), ...].
    """
    out = []
    for idx, (t, pos) in enumerate(markers):
        if t < traj.times[0] or t > traj.times[-1]:
            warnings.warn(f"marker {idx} at t={t} outside trajectory span; skipped")
            continue
        est = np.array([np.interp(t, traj.times, traj.positions[:, i])
                        for i in range(3)])
        out.append((idx, float(np.linalg.norm(est - np.asarray(pos, dtype=float)))))
    return out


def format_report(report: ErrorReport):
    """Key-value text block for CLI output."""
    lines = [f"{k} {v}" for k, v in report.as_dict().items()]
    return "\n".join(lines) + "\n"
