import numpy as np
import pytest

from zvnav import quat


def random_unit(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def test_rotate_identity():
    v = np.array([1.0, 2.0, 3.0])
    assert np.allclose(quat.rotate(quat.IDENTITY, v), v)


def test_rotate_90_about_z():
    q = quat.from_axis_angle([0, 0, 1], np.pi / 2)
    out = quat.rotate(q, [1.0, 0.0, 0.0])
    assert np.allclose(out, [0.0, 1.0, 0.0], atol=1e-12)


def test_rotate_zero_vector():
    rng = np.random.default_rng(3)
    q = random_unit(rng)
    assert np.allclose(quat.rotate(q, np.zeros(3)), np.zeros(3))


def test_rotate_rejects_non_unit():
    with pytest.raises(ValueError):
        quat.rotate(np.array([2.0, 0.0, 0.0, 0.0]), [1.0, 0.0, 0.0])


def test_rotate_matches_matrix_on_random_quats():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        q = random_unit(rng)
        v = rng.normal(size=3)
        assert np.allclose(quat.rotate(q, v), quat.to_matrix(q) @ v, atol=1e-12)


def test_rotate_preserves_norm():
    rng = np.random.default_rng(11)
    for _ in range(100):
        q = random_unit(rng)
        v = rng.normal(size=3)
        assert np.isclose(np.linalg.norm(quat.rotate(q, v)), np.linalg.norm(v))


def test_increment_zero_rotation():
    rng = np.random.default_rng(5)
    q = random_unit(rng)
    out = quat.increment(q, np.zeros(3), 0.005)
    assert np.allclose(out, q, atol=1e-15)


def test_increment_quarter_turn():
    out = quat.increment(quat.IDENTITY, [0.0, 0.0, np.pi / 2], 1.0)
    expect = [np.cos(np.pi / 4), 0.0, 0.0, np.sin(np.pi / 4)]
    assert np.allclose(out, expect, atol=1e-12)


def test_increment_two_half_steps_fixed_axis():
    rng = np.random.default_rng(9)
    q = random_unit(rng)
    omega = np.array([0.3, -0.2, 0.5])
    full = quat.increment(q, omega, 0.02)
    half = quat.increment(quat.increment(q, omega, 0.01), omega, 0.01)
    assert np.allclose(full, half, atol=1e-12)


def test_increment_preserves_unit_norm():
    rng = np.random.default_rng(13)
    q = random_unit(rng)
    for _ in range(1000):
        q = quat.increment(q, rng.normal(size=3), 0.005)
        assert abs(np.linalg.norm(q) - 1.0) < 1e-9


def test_omega_matrix_mode_close_to_exp_at_imu_rates():
    # first-order rate-matrix error grows as (|omega| dt)^3; at gait-scale
    # rates and 200 Hz the two integrators agree tightly
    rng = np.random.default_rng(17)
    for _ in range(50):
        q = random_unit(rng)
        omega = rng.uniform(-3, 3, 3)
        a = quat.increment(q, omega, 0.005, method="exp")
        b = quat.increment(q, omega, 0.005, method="omega")
        assert np.allclose(a, b, atol=1e-6)


def test_rotvec_round_trip():
    rng = np.random.default_rng(19)
    for _ in range(200):
        phi = rng.normal(scale=0.5, size=3)
        if np.linalg.norm(phi) >= np.pi:  # wraps to the equivalent short rotation
            continue
        q = quat.from_rotvec(phi)
        assert np.allclose(quat.to_rotvec(q), phi, atol=1e-12)


def test_multiply_composes_rotations():
    rng = np.random.default_rng(23)
    q1, q2 = random_unit(rng), random_unit(rng)
    v = rng.normal(size=3)
    lhs = quat.rotate(quat.normalize(quat.multiply(q1, q2)), v)
    rhs = quat.rotate(q1, quat.rotate(q2, v))
    assert np.allclose(lhs, rhs, atol=1e-12)
