"""Parametric synthetic foot-trajectory + IMU generator with exact ground truth.

The foot follows smooth stance/swing cycles: the position dwells exactly
during stance and moves along a C2-continuous polynomial arc during
swing.  Attitude pitches through swing (magnitude set by
rotation_intensity) and, on circuit paths, yaws to close a loop.

The IMU samples are constructed by *inverting the discrete strapdown
equations* on the exact pose sequence:

    v_k = (p_{k+1} - p_k) / dt
    a_k = R(q_{k-1})^T ((v_k - v_{k-1}) / dt + g)
    w_k = log(q_{k-1}^-1 * q_k) / dt

so that backward zeroth-order integration of the generated samples
reproduces the ground-truth positions to machine precision.  Sensor
noise, when enabled, is added after this exact construction.

Trials begin with a level rest of `lead_in_s` seconds (attitude
identity, position at the origin), so `init_from_rest` works and the
exact initial state is (p=origin, v=0, q=identity).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import quat
from .errors import ValidationError
from .imu import GRAVITY, GroundTruth, ImuSequence

MOTION_KINDS = ("walk", "run", "shuffle", "stair", "crawl", "rest")

STAIR_RISE_M = 0.17  # vertical rise per stride for the stair profile


@dataclass(frozen=True)
class GaitProfile:
    motion_kind: str = "walk"
    cadence_hz: float = 1.7        # steps per second; 0 means pure rest
    stride_m: float = 0.7
    stance_fraction: float = 0.55  # fraction of the cycle spent in stance
    swing_height_m: float = 0.12
    rotation_intensity: float = 4.0  # rad/s scale of swing-phase pitch rate
    accel_noise_std: float = 0.0
    gyro_noise_std: float = 0.0
    duration_s: float = 30.0
    path: str = "straight"         # straight | circuit
    lead_in_s: float = 1.0

    def __post_init__(self):
        if self.motion_kind not in MOTION_KINDS:
            raise ValidationError(f"unknown motion_kind {self.motion_kind!r}")
        if self.path not in ("straight", "circuit"):
            raise ValidationError(f"unknown path {self.path!r}")
        if self.cadence_hz < 0 or self.stride_m < 0 or self.swing_height_m < 0:
            raise ValidationError("cadence, stride and swing height must be >= 0")
        if self.cadence_hz > 0 and not 0.2 < self.stance_fraction < 0.8:
            raise ValidationError("stance_fraction must lie in (0.2, 0.8)")
        if self.duration_s <= 0 or self.lead_in_s < 0:
            raise ValidationError("durations must be positive")
        if self.accel_noise_std < 0 or self.gyro_noise_std < 0:
            raise ValidationError("noise stds must be >= 0")


_PRESETS = {
    "walk": GaitProfile(motion_kind="walk", cadence_hz=1.7, stride_m=0.7,
                        stance_fraction=0.55, swing_height_m=0.12,
                        rotation_intensity=4.0),
    "run": GaitProfile(motion_kind="run", cadence_hz=2.6, stride_m=1.1,
                       stance_fraction=0.3, swing_height_m=0.2,
                       rotation_intensity=9.0),
    "shuffle": GaitProfile(motion_kind="shuffle", cadence_hz=1.2, stride_m=0.25,
                           stance_fraction=0.6, swing_height_m=0.03,
                           rotation_intensity=1.0),
    "stair": GaitProfile(motion_kind="stair", cadence_hz=1.0, stride_m=0.3,
                         stance_fraction=0.6, swing_height_m=0.2,
                         rotation_intensity=1.2),
    "crawl": GaitProfile(motion_kind="crawl", cadence_hz=0.8, stride_m=0.35,
                         stance_fraction=0.6, swing_height_m=0.08,
                         rotation_intensity=0.6),
    "rest": GaitProfile(motion_kind="rest", cadence_hz=0.0, stride_m=0.0,
                        swing_height_m=0.0, rotation_intensity=0.0),
}


def default_profile(kind, **overrides) -> GaitProfile:
    """Preset profile for a motion kind, with optional field overrides."""
    if kind not in _PRESETS:
        raise ValidationError(f"unknown motion_kind {kind!r}")
    return replace(_PRESETS[kind], **overrides)


def _s5(u):
    """Quintic smoothstep: s(0)=0, s(1)=1, first and second derivatives zero
    at both ends."""
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _bump(u):
    """C2 arch with zero value/slope/curvature at both ends, peak 1 at u=0.5."""
    return 64.0 * (u * (1.0 - u)) ** 3


def _pitch(u):
    """Swing pitch shape: zero value and slope at both ends, order-1 peak."""
    return np.sin(2.0 * np.pi * u) * 0.5 * (1.0 - np.cos(2.0 * np.pi * u))


def _pose_at(profile: GaitProfile, t):
    """Exact continuous pose: (position, yaw, pitch, in_stance)."""
    if profile.cadence_hz == 0.0 or profile.stride_m == 0.0:
        return np.zeros(3), 0.0, 0.0, True
    T = 1.0 / profile.cadence_hz
    t_active = t - profile.lead_in_s
    n_strides = max(int(np.floor((profile.duration_s - profile.lead_in_s) *
                                 profile.cadence_hz)), 0)
    rise = STAIR_RISE_M if profile.motion_kind == "stair" else 0.0
    if profile.path == "circuit" and n_strides > 0:
        dpsi = 2.0 * np.pi / n_strides
    else:
        dpsi = 0.0

    def stride_start(i):
        # polygon vertex i of the path
        if dpsi == 0.0:
            p = np.array([i * profile.stride_m, 0.0, i * rise])
        else:
            headings = (np.arange(i) + 0.5) * dpsi
            p = np.array([
                profile.stride_m * np.sum(np.cos(headings)),
                profile.stride_m * np.sum(np.sin(headings)),
                i * rise,
            ])
        return p

    if t_active < 0:
        return np.zeros(3), 0.0, 0.0, True
    cycle = int(np.floor(t_active / T))
    if cycle >= n_strides:
        return stride_start(n_strides), dpsi * n_strides, 0.0, True
    tau = t_active - cycle * T
    ts = profile.stance_fraction * T
    psi0 = dpsi * cycle
    if tau < ts:
        return stride_start(cycle), psi0, 0.0, True
    u = (tau - ts) / (T - ts)
    p0 = stride_start(cycle)
    p1 = stride_start(cycle + 1)
    s = _s5(u)
    pos = p0 + (p1 - p0) * s
    pos = pos + np.array([0.0, 0.0, profile.swing_height_m * _bump(u)])
    yaw = psi0 + dpsi * s
    tw = T - ts
    amp = profile.rotation_intensity * tw / (2.0 * np.pi)
    pitch = amp * _pitch(u)
    return pos, yaw, pitch, False


def generate(profile: GaitProfile, seed=0, rate_hz=200.0, gravity=GRAVITY):
    """Generate one trial: (ImuSequence, GroundTruth with exact labels)."""
    n = int(round(profile.duration_s * rate_hz)) + 1
    dt = 1.0 / rate_hz
    times = np.arange(n) * dt
    g_vec = np.array([0.0, 0.0, gravity])

    pos = np.empty((n, 3))
    quats = np.empty((n, 4))
    stance = np.empty(n, dtype=bool)
    for k, t in enumerate(times):
        p, yaw, pitch, st = _pose_at(profile, t)
        pos[k] = p
        stance[k] = st
        quats[k] = quat.multiply(quat.from_axis_angle([0.0, 0.0, 1.0], yaw),
                                 quat.from_axis_angle([0.0, 1.0, 0.0], pitch))

    vel = np.zeros((n, 3))
    vel[:-1] = (pos[1:] - pos[:-1]) / dt
    if n > 1:
        vel[-1] = vel[-2]

    accel = np.empty((n, 3))
    gyro = np.zeros((n, 3))
    accel[0] = quat.to_matrix(quats[0]).T @ g_vec
    for k in range(1, n):
        Rprev = quat.to_matrix(quats[k - 1])
        accel[k] = Rprev.T @ ((vel[k] - vel[k - 1]) / dt + g_vec)
        dq = quat.multiply(quat.conjugate(quats[k - 1]), quats[k])
        gyro[k] = quat.to_rotvec(dq) / dt

    # stationary only where ground-truth velocity is exactly zero, with the
    # stance edges trimmed so central-difference velocities vanish as well
    labels = np.zeros(n, dtype=int)
    for k in range(n):
        lo = max(k - 1, 0)
        hi = min(k + 1, n - 1)
        labels[k] = int(stance[lo] and stance[k] and stance[hi])

    rng = np.random.default_rng(seed)
    if profile.accel_noise_std > 0:
        accel = accel + rng.normal(0.0, profile.accel_noise_std, accel.shape)
    if profile.gyro_noise_std > 0:
        gyro = gyro + rng.normal(0.0, profile.gyro_noise_std, gyro.shape)

    seq = ImuSequence(times=times, accel=accel, gyro=gyro, rate_hz=rate_hz,
                      labels=labels)
    gt = GroundTruth(times=times.copy(), positions=pos, labels=labels.copy())
    return seq, gt
