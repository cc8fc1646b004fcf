"""Quaternion algebra for strapdown navigation.

Convention (fixed globally for the whole toolkit):
  * Hamilton product, scalar-first storage ``[w, x, y, z]``.
  * A quaternion encodes the body-to-navigation rotation:
    ``v_nav = R(q) @ v_body``.
  * Body-frame angular increments compose on the right:
    ``q_k = q_{k-1} * exp(omega * dt)``.

All functions take and return plain length-4 numpy arrays.
"""

from __future__ import annotations

import numpy as np

IDENTITY = np.array([1.0, 0.0, 0.0, 0.0])

# Unit-norm tolerance for inputs to operations that require a rotation.
UNIT_TOL = 1e-6


def normalize(q):
    q = np.asarray(q, dtype=float)
    n = np.linalg.norm(q)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("cannot normalize zero or non-finite quaternion")
    return q / n


def _check_unit(q):
    n = np.linalg.norm(q)
    if abs(n - 1.0) > UNIT_TOL:
        raise ValueError(f"quaternion norm {n:.9f} deviates from 1 beyond {UNIT_TOL}")


def multiply(q1, q2):
    """Hamilton product q1 * q2."""
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def conjugate(q):
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def to_matrix(q):
    """3x3 rotation matrix R(q) mapping body vectors into the navigation frame."""
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def rotate(q, v):
    """Rotate body vector v into the navigation frame: R(q) @ v."""
    _check_unit(q)
    return to_matrix(q) @ np.asarray(v, dtype=float)


def from_rotvec(phi):
    """Quaternion exponential of a rotation vector (axis * angle, radians)."""
    phi = np.asarray(phi, dtype=float)
    angle = np.linalg.norm(phi)
    half = 0.5 * angle
    if angle < 1e-12:
        # second-order series: sin(half)/angle ~ 0.5 - angle^2/48
        k = 0.5 - angle * angle / 48.0
        return normalize(np.array([1.0 - half * half / 2.0, *(k * phi)]))
    k = np.sin(half) / angle
    return np.array([np.cos(half), *(k * phi)])


def to_rotvec(q):
    """Rotation vector (axis * angle) of a unit quaternion; angle in (-pi, pi]."""
    q = np.asarray(q, dtype=float)
    if q[0] < 0.0:
        q = -q
    vn = np.linalg.norm(q[1:])
    angle = 2.0 * np.arctan2(vn, q[0])
    if vn < 1e-12:
        return 2.0 * q[1:]
    return q[1:] * (angle / vn)


def from_axis_angle(axis, angle):
    axis = np.asarray(axis, dtype=float)
    return from_rotvec(axis / np.linalg.norm(axis) * angle)


def _right_mult_matrix(p):
    """Matrix M such that q * p == M @ q (right multiplication by p)."""
    w, x, y, z = p
    return np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ])


def increment(q, omega, dt, method="exp"):
    """Advance q by the body-frame rotation omega * dt.

    method="exp"   exact quaternion exponential (norm-preserving, default)
    method="omega" first-order 4x4 rate-matrix form, renormalized afterwards
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    _check_unit(q)
    phi = np.asarray(omega, dtype=float) * dt
    if method == "exp":
        return normalize(multiply(q, from_rotvec(phi)))
    if method == "omega":
        p = np.array([0.0, *phi])
        return normalize(q + 0.5 * _right_mult_matrix(p) @ np.asarray(q, dtype=float))
    raise ValueError(f"unknown increment method {method!r}")


def skew(v):
    """3x3 cross-product matrix [v]x."""
    x, y, z = v
    return np.array([
        [0.0, -z, y],
        [z, 0.0, -x],
        [-y, x, 0.0],
    ])
