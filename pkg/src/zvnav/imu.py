"""Core data model: IMU sequences, ground truth, trajectories.

All containers are numpy-backed and treated as immutable after
construction; nothing in the toolkit mutates them in place.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

GRAVITY = 9.80665  # default gravity magnitude, m/s^2


@dataclass(frozen=True)
class ImuSample:
    """One timestamped IMU reading: specific force + angular rate, IMU frame."""

    t: float
    accel: np.ndarray  # (3,) m/s^2
    gyro: np.ndarray   # (3,) rad/s


@dataclass(frozen=True)
class ImuSequence:
    """A fixed-rate IMU log.

    times  (N,)   seconds, strictly increasing
    accel  (N,3)  specific force, m/s^2, IMU frame
    gyro   (N,3)  angular rate, rad/s, IMU frame
    labels (N,)   optional binary zero-velocity labels (1 = stationary)
    """

    times: np.ndarray
    accel: np.ndarray
    gyro: np.ndarray
    rate_hz: float = 200.0
    labels: np.ndarray | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        a = np.asarray(self.accel, dtype=float)
        w = np.asarray(self.gyro, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "accel", a)
        object.__setattr__(self, "gyro", w)
        if self.labels is not None:
            object.__setattr__(self, "labels", np.asarray(self.labels, dtype=int))
        if t.ndim != 1 or len(t) < 1:
            raise ValidationError("sequence must contain at least one sample")
        if a.shape != (len(t), 3) or w.shape != (len(t), 3):
            raise ValidationError("accel/gyro must be (N,3) matching times")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(a)) and np.all(np.isfinite(w))):
            raise ValidationError("non-finite values in IMU data")
        if t[0] < 0:
            raise ValidationError("timestamps must be non-negative")
        if self.rate_hz <= 0:
            raise ValidationError("rate_hz must be positive")
        dt = np.diff(t)
        if len(dt) and np.min(dt) <= 0:
            k = int(np.argmax(dt <= 0))
            raise ValidationError(f"timestamps not strictly increasing at sample {k + 1}")
        nominal = 1.0 / self.rate_hz
        if len(dt) and np.max(np.abs(dt - nominal)) >= 0.5 * nominal:
            k = int(np.argmax(np.abs(dt - nominal) >= 0.5 * nominal))
            raise ValidationError(
                f"timestamp jitter exceeds half a sample period at sample {k + 1}"
            )
        if self.labels is not None and len(self.labels) != len(t):
            raise ValidationError("label vector length does not match sequence")

    def __len__(self):
        return len(self.times)

    @property
    def dt(self):
        return 1.0 / self.rate_hz

    def sample(self, k):
        return ImuSample(float(self.times[k]), self.accel[k], self.gyro[k])

    def channels(self):
        """(N,6) array [ax ay az gx gy gz] — network input layout."""
        return np.hstack([self.accel, self.gyro])


@dataclass(frozen=True)
class GroundTruth:
    """Reference positions with optional zero-velocity labels and marker events."""

    times: np.ndarray            # (N,) s, strictly increasing
    positions: np.ndarray        # (N,3) m
    labels: np.ndarray | None = None   # (N,) binary, 1 = stationary
    markers: list | None = None        # [(t, (3,) position), ...]

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", p)
        if self.labels is not None:
            object.__setattr__(self, "labels", np.asarray(self.labels, dtype=int))
        if p.shape != (len(t), 3):
            raise ValidationError("positions must be (N,3) matching times")
        if len(t) and np.any(np.diff(t) <= 0):
            raise ValidationError("ground-truth timestamps not strictly increasing")
        if self.labels is not None and len(self.labels) != len(t):
            raise ValidationError("ground-truth label length mismatch")

    def __len__(self):
        return len(self.times)


@dataclass(frozen=True)
class Trajectory:
    """INS output: timestamped position, velocity, orientation."""

    times: np.ndarray        # (N,)
    positions: np.ndarray    # (N,3)
    velocities: np.ndarray   # (N,3)
    quaternions: np.ndarray  # (N,4) scalar-first, body-to-nav

    def __post_init__(self):
        n = len(self.times)
        if (self.positions.shape != (n, 3) or self.velocities.shape != (n, 3)
                or self.quaternions.shape != (n, 4)):
            raise ValidationError("trajectory array shapes inconsistent")

    def __len__(self):
        return len(self.times)
