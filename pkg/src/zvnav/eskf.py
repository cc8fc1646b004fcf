"""Error-state Kalman filter INS with zero-velocity pseudo-measurements.

Nominal state: position p, velocity v, body-to-nav quaternion q.
Error state: delta_x = (dp, dv, dtheta) with the attitude error a local
(body-side) rotation vector: R_true = R(q) @ exp([dtheta]x).

Strapdown step (backward zeroth-order integration; position uses the
previous velocity):

    p_k = p_{k-1} + v_{k-1} dt
    v_k = v_{k-1} + (R(q_{k-1}) a_k - g) dt
    q_k = q_{k-1} * exp(omega_k dt)

No IMU bias states and no measurement gating are modelled; the filter is
a deliberately minimal baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from . import quat
from .errors import DivergenceError, NotAtRestError, ValidationError
from .imu import GRAVITY, ImuSequence, Trajectory

I3 = np.eye(3)


@dataclass(frozen=True)
class NavState:
    p: np.ndarray  # (3,) m
    v: np.ndarray  # (3,) m/s
    q: np.ndarray  # (4,) scalar-first unit quaternion

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))
        object.__setattr__(self, "q", np.asarray(self.q, dtype=float))

    @classmethod
    def origin(cls):
        return cls(p=np.zeros(3), v=np.zeros(3), q=quat.IDENTITY.copy())


@dataclass(frozen=True)
class EskfConfig:
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, GRAVITY]))
    accel_noise_std: float = 0.02    # m/s^2
    gyro_noise_std: float = 0.002    # rad/s
    zupt_noise_std: float = 0.01     # m/s
    initial_cov_diag: np.ndarray = field(
        default_factory=lambda: np.concatenate([np.zeros(3), np.full(3, 1e-4),
                                                np.full(3, 1e-6)]))

    def __post_init__(self):
        object.__setattr__(self, "gravity", np.asarray(self.gravity, dtype=float))
        object.__setattr__(self, "initial_cov_diag",
                           np.asarray(self.initial_cov_diag, dtype=float))
        if (self.accel_noise_std <= 0 or self.gyro_noise_std <= 0
                or self.zupt_noise_std <= 0):
            raise ValidationError("noise stds must be positive")

    def initial_cov(self):
        return np.diag(self.initial_cov_diag)


def load_eskf_config(path):
    """Read an EskfConfig from a YAML key-value file.

    Keys (all optional): gravity (3 floats), accel_noise_std, gyro_noise_std,
    zupt_noise_std, initial_cov_diag (9 floats).
    """
    with open(path, encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ValidationError("config file must contain a key-value mapping")
    known = {"gravity", "accel_noise_std", "gyro_noise_std", "zupt_noise_std",
             "initial_cov_diag"}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return EskfConfig(**raw)


def propagate(state: NavState, cov: np.ndarray, accel, gyro, dt, cfg: EskfConfig,
              step=None):
    """One strapdown + covariance propagation step."""
    if dt <= 0:
        raise ValidationError("dt must be positive")
    R = quat.to_matrix(state.q)
    p = state.p + state.v * dt
    v = state.v + (R @ accel - cfg.gravity) * dt
    q = quat.increment(state.q, gyro, dt)

    F = np.eye(9)
    F[0:3, 3:6] = I3 * dt
    F[3:6, 6:9] = -R @ quat.skew(accel) * dt
    F[6:9, 6:9] = I3 - quat.skew(np.asarray(gyro) * dt)

    Q = np.zeros((9, 9))
    Q[3:6, 3:6] = (cfg.accel_noise_std * dt) ** 2 * I3
    Q[6:9, 6:9] = (cfg.gyro_noise_std * dt) ** 2 * I3

    cov = F @ cov @ F.T + Q
    cov = 0.5 * (cov + cov.T)
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(v))
            and np.all(np.isfinite(q)) and np.all(np.isfinite(cov))):
        raise DivergenceError("non-finite state after propagation", step=step)
    return NavState(p=p, v=v, q=q), cov


def zupt_update(state: NavState, cov: np.ndarray, cfg: EskfConfig):
    """Fuse a zero-velocity pseudo-measurement (z = 0 - v, H = [0 I 0]).

    The error estimate is injected into the nominal state and reset to
    zero; the covariance uses the Joseph form and an identity reset
    Jacobian (the attitude reset correction is O(dtheta)).
    """
    H = np.zeros((3, 9))
    H[:, 3:6] = I3
    Rm = cfg.zupt_noise_std ** 2 * I3
    S = cov[3:6, 3:6] + Rm
    try:
        S_inv = np.linalg.inv(S)
    except np.linalg.LinAlgError as e:
        raise DivergenceError(f"innovation covariance singular: {e}") from None
    K = cov[:, 3:6] @ S_inv          # (9,3)
    dx = K @ (-state.v)              # innovation z = 0 - v
    IKH = np.eye(9) - K @ H
    cov = IKH @ cov @ IKH.T + K @ Rm @ K.T
    cov = 0.5 * (cov + cov.T)
    p = state.p + dx[0:3]
    v = state.v + dx[3:6]
    q = quat.normalize(quat.multiply(state.q, quat.from_rotvec(dx[6:9])))
    return NavState(p=p, v=v, q=q), cov


def run_ins(seq: ImuSequence, zv, cfg: EskfConfig, init: NavState) -> Trajectory:
    """Dead-reckon the whole sequence, applying a ZUPT at every flagged timestep."""
    flags = np.asarray(zv.flag if hasattr(zv, "flag") else zv, dtype=int)
    if len(flags) != len(seq):
        raise ValidationError("zero-velocity flags length does not match sequence")
    n = len(seq)
    pos = np.empty((n, 3))
    vel = np.empty((n, 3))
    quats = np.empty((n, 4))
    state = init
    cov = cfg.initial_cov()
    if flags[0]:
        state, cov = zupt_update(state, cov, cfg)
    pos[0], vel[0], quats[0] = state.p, state.v, state.q
    for k in range(1, n):
        dt = float(seq.times[k] - seq.times[k - 1])
        state, cov = propagate(state, cov, seq.accel[k], seq.gyro[k], dt, cfg, step=k)
        if flags[k]:
            state, cov = zupt_update(state, cov, cfg)
        pos[k], vel[k], quats[k] = state.p, state.v, state.q
    return Trajectory(times=seq.times.copy(), positions=pos, velocities=vel,
                      quaternions=quats)


def init_from_rest(seq: ImuSequence, cfg: EskfConfig, rest_duration=0.5) -> NavState:
    """Level the IMU from a stationary prefix: roll/pitch from the mean
    specific force (gravity direction), yaw = 0, p = v = 0."""
    mask = seq.times - seq.times[0] <= rest_duration + 1e-12
    if seq.times[mask][-1] - seq.times[0] < rest_duration - seq.dt:
        raise ValidationError(f"rest prefix shorter than {rest_duration} s")
    f = seq.accel[mask].mean(axis=0)
    g = np.linalg.norm(cfg.gravity)
    if abs(np.linalg.norm(f) - g) > 0.2 * g:
        raise NotAtRestError(
            f"prefix mean specific force {np.linalg.norm(f):.3f} m/s^2 "
            f"deviates more than 20% from gravity; IMU not at rest")
    roll = np.arctan2(f[1], f[2])
    pitch = np.arctan2(-f[0], np.hypot(f[1], f[2]))
    q = quat.multiply(quat.from_axis_angle([0.0, 1.0, 0.0], pitch),
                      quat.from_axis_angle([1.0, 0.0, 0.0], roll))
    return NavState(p=np.zeros(3), v=np.zeros(3), q=quat.normalize(q))
