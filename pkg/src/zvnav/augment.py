"""Window extraction and training-time augmentation (rotation/scale/jitter).

A window is an (L, 6) block of [ax ay az gx gy gz] rows.  One random
rotation is applied identically to every accel and gyro vector in the
window, one scale factor multiplies all values (amplitude scaling — the
network never sees timestamps), and Gaussian jitter is added per element
afterwards, in raw sensor units.  Labels are never touched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import quat
from .errors import ValidationError
from .imu import ImuSequence


@dataclass(frozen=True)
class AugmentConfig:
    rotation: bool = True
    scale_range: tuple = (0.92, 1.02)
    jitter_std: float = 0.075
    rng_seed: int = 0

    def __post_init__(self):
        lo, hi = self.scale_range
        if lo <= 0 or hi <= 0 or hi < lo:
            raise ValidationError("scale_range bounds must be positive and ordered")
        if self.jitter_std < 0:
            raise ValidationError("jitter_std must be >= 0")


def random_rotation(rng):
    """Rotation matrix drawn uniformly from SO(3) via quaternion sampling."""
    q = rng.normal(size=4)
    return quat.to_matrix(q / np.linalg.norm(q))


def apply_rotation(window, R):
    out = np.asarray(window, dtype=float).copy()
    out[:, 0:3] = out[:, 0:3] @ R.T
    out[:, 3:6] = out[:, 3:6] @ R.T
    return out


def augment_window(window, cfg: AugmentConfig, rng=None):
    """Apply one rotation + one scale + per-element jitter to an (L, 6) window."""
    window = np.asarray(window, dtype=float)
    if window.ndim != 2 or window.shape[1] != 6:
        raise ValidationError(f"window must be (L, 6), got {window.shape}")
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    out = window.copy()
    if cfg.rotation:
        out = apply_rotation(out, random_rotation(rng))
    lo, hi = cfg.scale_range
    out *= rng.uniform(lo, hi)
    if cfg.jitter_std > 0:
        out += rng.normal(0.0, cfg.jitter_std, out.shape)
    return out


def extract_windows(seq, labels, window_len, count, seed):
    """Sample `count` windows uniformly over valid start indices.

    seq may be an ImuSequence or an (N, 6) array.  Each window is labeled
    by the flag at its final timestep.  Returns [(window, label), ...].
    """
    data = seq.channels() if isinstance(seq, ImuSequence) else np.asarray(seq, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if len(labels) != len(data):
        raise ValidationError("labels length does not match sequence")
    if window_len > len(data):
        raise ValidationError(
            f"window_len {window_len} exceeds sequence length {len(data)}")
    rng = np.random.default_rng(seed)
    starts = rng.integers(0, len(data) - window_len + 1, size=count)
    return [(data[s:s + window_len].copy(), int(labels[s + window_len - 1]))
            for s in starts]
