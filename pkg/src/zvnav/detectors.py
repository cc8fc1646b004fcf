"""Classical zero-velocity detectors and per-trial threshold optimization.

Windowing convention: statistic[k] is computed from samples k .. k+W-1.
The final W-1 timesteps replicate the last computable statistic so the
output always has the same length as the input (forcing "moving" there
would inject false negatives at trial end).

A timestep is flagged stationary when its statistic is <= the threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ValidationError
from .imu import GRAVITY, GroundTruth, ImuSequence


@dataclass(frozen=True)
class DetectorParams:
    """Fixed detector parameters; the threshold gamma is passed separately."""

    window_w: int = 5
    sigma_a: float = 9.8e-4    # accel noise std, m/s^2
    sigma_w: float = 8.726e-5  # gyro noise std, rad/s
    gravity_g: float = GRAVITY

    def __post_init__(self):
        if self.window_w < 2:
            raise ValidationError("window_w must be >= 2")
        if self.sigma_a <= 0 or self.sigma_w <= 0:
            raise ValidationError("noise sigmas must be positive")


@dataclass(frozen=True)
class ZvDecision:
    """Per-timestep detector output: test statistic and binary stationary flag."""

    statistic: np.ndarray
    flag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "statistic", np.asarray(self.statistic, dtype=float))
        object.__setattr__(self, "flag", np.asarray(self.flag, dtype=int))
        if self.statistic.shape != self.flag.shape:
            raise ValidationError("statistic/flag length mismatch")

    def __len__(self):
        return len(self.flag)


def _windows(arr, w):
    """(N-w+1, w, 3) sliding windows along the time axis."""
    if len(arr) < w:
        raise ValidationError(f"sequence length {len(arr)} shorter than window {w}")
    return sliding_window_view(arr, w, axis=0).transpose(0, 2, 1)


def _pad_tail(stat, n):
    if len(stat) == n:
        return stat
    return np.concatenate([stat, np.full(n - len(stat), stat[-1])])


def _decide(stat, gamma):
    return ZvDecision(statistic=stat, flag=(stat <= gamma).astype(int))


def shoe(seq: ImuSequence, params: DetectorParams, gamma: float) -> ZvDecision:
    """GLRT combining accel deviation from gravity direction and gyro energy."""
    w = params.window_w
    aw = _windows(seq.accel, w)           # (M, w, 3)
    gw = _windows(seq.gyro, w)
    abar = aw.mean(axis=1)                # (M, 3)
    norms = np.linalg.norm(abar, axis=1)  # (M,)
    grav = np.zeros_like(abar)
    nz = norms > 0
    grav[nz] = params.gravity_g * abar[nz] / norms[nz, None]
    # zero-mean-accel windows skip the gravity-direction term (grav stays 0)
    da = aw - grav[:, None, :]
    stat = (np.sum(da ** 2, axis=(1, 2)) / params.sigma_a ** 2
            + np.sum(gw ** 2, axis=(1, 2)) / params.sigma_w ** 2) / w
    return _decide(_pad_tail(stat, len(seq)), gamma)


def ared(seq: ImuSequence, params: DetectorParams, gamma_w: float) -> ZvDecision:
    """Windowed mean squared gyro norm."""
    gw = _windows(seq.gyro, params.window_w)
    stat = np.sum(gw ** 2, axis=(1, 2)) / params.window_w
    return _decide(_pad_tail(stat, len(seq)), gamma_w)


def amvd(seq: ImuSequence, params: DetectorParams, gamma_v: float) -> ZvDecision:
    """Windowed accel variance about the per-window mean."""
    aw = _windows(seq.accel, params.window_w)
    da = aw - aw.mean(axis=1, keepdims=True)
    stat = np.sum(da ** 2, axis=(1, 2)) / params.window_w
    return _decide(_pad_tail(stat, len(seq)), gamma_v)


def mbgtd(seq: ImuSequence, params: DetectorParams, gamma_m: float) -> ZvDecision:
    """Max mean pairwise distance between accel sub-windows.

    For the window of samples k .. k+W-1 and a split (i, j) with
    k <= i < j <= k+W-1, C_ij is the mean Euclidean distance between
    samples in [i, j-1] and samples in [j, k+W-1]; the statistic is the
    max of C_ij over all splits.
    """
    w = params.window_w
    aw = _windows(seq.accel, w)  # (M, w, 3)
    # pairwise distances inside each window: (M, w, w)
    d = np.linalg.norm(aw[:, :, None, :] - aw[:, None, :, :], axis=-1)
    # prefix sums over the second index so block sums are O(1) per split
    best = np.zeros(len(aw))
    for i in range(w - 1):
        for j in range(i + 1, w):
            block = d[:, i:j, j:w].sum(axis=(1, 2))
            c = block / ((j - i) * (w - j))
            np.maximum(best, c, out=best)
    return _decide(_pad_tail(best, len(seq)), gamma_m)


def velocity_labeler(gt: GroundTruth, gamma_v: float) -> ZvDecision:
    """Label stationary timesteps by thresholding numerically differentiated
    ground-truth positions (central differences, one-sided at the ends)."""
    if len(gt) < 3:
        raise ValidationError("need at least 3 ground-truth samples to differentiate")
    vel = np.gradient(gt.positions, gt.times, axis=0)
    speed = np.linalg.norm(vel, axis=1)
    return _decide(speed, gamma_v)


DETECTORS = {
    "shoe": shoe,
    "ared": ared,
    "amvd": amvd,
    "mbgtd": mbgtd,
}


def log_grid(lo, hi, n):
    """Default threshold grid; optimal thresholds span several decades."""
    return np.logspace(np.log10(lo), np.log10(hi), n)


def optimize_threshold(seq, gt, detector, grid, ins_config, params=None,
                       init=None, dims=2, align="none"):
    """Grid-search the detector threshold minimizing INS position ARMSE.

    Runs the full INS once per grid value.  Diverging runs score +inf.
    Ties break toward the smaller threshold.  Returns (best_gamma, best_armse).
    """
    from .eskf import init_from_rest, run_ins
    from .metrics import armse

    if len(grid) == 0:
        raise ValidationError("threshold grid is empty")
    if params is None:
        params = DetectorParams()
    detect = DETECTORS[detector] if isinstance(detector, str) else detector
    if init is None:
        init = init_from_rest(seq, ins_config)
    grid = np.sort(np.asarray(grid, dtype=float))
    errors = np.full(len(grid), np.inf)
    for idx, gamma in enumerate(grid):
        zv = detect(seq, params, gamma)
        try:
            traj = run_ins(seq, zv, ins_config, init)
            report = armse(traj, gt, dims=dims, align=align)
            errors[idx] = report.armse_2d if dims == 2 else report.armse_3d
        except Exception:
            continue  # divergence or no usable estimate: scored +inf
    best = int(np.argmin(errors))  # argmin takes the first (smallest) on ties
    return float(grid[best]), float(errors[best])
