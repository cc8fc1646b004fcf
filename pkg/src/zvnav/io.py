"""CSV and config file formats.

IMU CSV:          t,ax,ay,az,gx,gy,gz[,zv]     (s, m/s^2, rad/s, zv in {0,1})
Ground-truth CSV: t,px,py,pz[,zv]              (s, m)
Trajectory CSV:   t,px,py,pz,vx,vy,vz,qw,qx,qy,qz
Detection CSV:    t,statistic,flag

All files are UTF-8 with '.' decimal separator and LF line endings.
Floats are written with repr (shortest round-trip) so write-then-read is
bit-exact.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import ParseError, ValidationError
from .imu import GroundTruth, ImuSequence, Trajectory

IMU_HEADER = ["t", "ax", "ay", "az", "gx", "gy", "gz"]
GT_HEADER = ["t", "px", "py", "pz"]
TRAJ_HEADER = ["t", "px", "py", "pz", "vx", "vy", "vz", "qw", "qx", "qy", "qz"]


def _read_rows(path, base_header, optional_label):
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty file", line=1) from None
        header = [h.strip() for h in header]
        has_label = False
        if header == base_header:
            pass
        elif optional_label and header == base_header + ["zv"]:
            has_label = True
        else:
            raise ParseError(
                f"unexpected header {header!r}, expected {base_header!r}"
                + (f" or {base_header + ['zv']!r}" if optional_label else ""),
                line=1,
            )
        ncol = len(base_header) + (1 if has_label else 0)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != ncol:
                raise ParseError(f"expected {ncol} columns, got {len(row)}", line=lineno)
            try:
                rows.append([float(v) for v in row])
            except ValueError as e:
                raise ParseError(str(e), line=lineno) from None
    if not rows:
        raise ParseError("no data rows", line=2)
    return np.array(rows), has_label


def _infer_rate(times):
    dts = np.diff(times)
    if len(dts) == 0:
        return 200.0
    return 1.0 / float(np.median(dts))


def load_imu_csv(path, rate_hz=None):
    """Load an IMU log.  Rate is inferred from the median timestep unless given."""
    data, has_label = _read_rows(path, IMU_HEADER, optional_label=True)
    times = data[:, 0]
    dt = np.diff(times)
    if len(dt) and np.min(dt) <= 0:
        row = int(np.argmax(dt <= 0)) + 2  # 1-based data row of the offending sample
        raise ValidationError(f"time not strictly increasing at row {row}")
    if rate_hz is None:
        rate_hz = _infer_rate(times)
    labels = data[:, 7].astype(int) if has_label else None
    return ImuSequence(times=times, accel=data[:, 1:4], gyro=data[:, 4:7],
                       rate_hz=rate_hz, labels=labels)


def save_imu_csv(path, seq: ImuSequence):
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        cols = IMU_HEADER + (["zv"] if seq.labels is not None else [])
        f.write(",".join(cols) + "\n")
        for k in range(len(seq)):
            vals = [seq.times[k], *seq.accel[k], *seq.gyro[k]]
            line = ",".join(repr(float(v)) for v in vals)
            if seq.labels is not None:
                line += f",{int(seq.labels[k])}"
            f.write(line + "\n")


def load_ground_truth_csv(path, markers=None):
    data, has_label = _read_rows(path, GT_HEADER, optional_label=True)
    labels = data[:, 4].astype(int) if has_label else None
    return GroundTruth(times=data[:, 0], positions=data[:, 1:4],
                       labels=labels, markers=markers)


def save_ground_truth_csv(path, gt: GroundTruth):
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        cols = GT_HEADER + (["zv"] if gt.labels is not None else [])
        f.write(",".join(cols) + "\n")
        for k in range(len(gt)):
            line = ",".join(repr(float(v)) for v in [gt.times[k], *gt.positions[k]])
            if gt.labels is not None:
                line += f",{int(gt.labels[k])}"
            f.write(line + "\n")


def load_marker_csv(path):
    """Markers share the ground-truth layout; returns [(t, position), ...]."""
    data, _ = _read_rows(path, GT_HEADER, optional_label=False)
    return [(float(r[0]), r[1:4].copy()) for r in data]


def save_trajectory_csv(path, traj: Trajectory):
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        f.write(",".join(TRAJ_HEADER) + "\n")
        for k in range(len(traj)):
            vals = [traj.times[k], *traj.positions[k], *traj.velocities[k],
                    *traj.quaternions[k]]
            f.write(",".join(repr(float(v)) for v in vals) + "\n")


def load_trajectory_csv(path):
    data, _ = _read_rows(path, TRAJ_HEADER, optional_label=False)
    return Trajectory(times=data[:, 0], positions=data[:, 1:4],
                      velocities=data[:, 4:7], quaternions=data[:, 7:11])


def save_detection_csv(path, times, decision):
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        f.write("t,statistic,flag\n")
        for t, s, z in zip(times, decision.statistic, decision.flag):
            f.write(f"{float(t)!r},{float(s)!r},{int(z)}\n")
