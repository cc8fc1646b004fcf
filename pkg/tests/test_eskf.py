import numpy as np
import pytest

from conftest import rest_sequence
from zvnav import quat, synth
from zvnav.detectors import ZvDecision
from zvnav.errors import NotAtRestError, ValidationError
from zvnav.eskf import (EskfConfig, NavState, init_from_rest, load_eskf_config,
                        propagate, run_ins, zupt_update)
from zvnav.imu import GRAVITY


def cfg():
    return EskfConfig()


def all_flags(n, value):
    return ZvDecision(statistic=np.zeros(n), flag=np.full(n, value, dtype=int))


def assert_psd_symmetric(cov):
    assert np.allclose(cov, cov.T, atol=1e-9)
    assert np.min(np.linalg.eigvalsh(cov)) >= -1e-9


# ---------------------------------------------------------------------------
# propagate


def test_propagate_rest_gravity_cancels():
    state = NavState.origin()
    cov = cfg().initial_cov()
    state2, cov2 = propagate(state, cov, [0.0, 0.0, GRAVITY], np.zeros(3), 0.005, cfg())
    assert np.allclose(state2.p, 0.0, atol=1e-15)
    assert np.allclose(state2.v, 0.0, atol=1e-15)
    assert_psd_symmetric(cov2)


def test_propagate_previous_velocity_convention():
    state = NavState.origin()
    state2, _ = propagate(state, cfg().initial_cov(), [1.0, 0.0, GRAVITY],
                          np.zeros(3), 0.005, cfg())
    # position uses the previous (zero) velocity; only velocity moves
    assert np.allclose(state2.p, [0.0, 0.0, 0.0])
    assert np.allclose(state2.v, [0.005, 0.0, 0.0])


def test_propagate_covariance_trace_grows():
    state = NavState.origin()
    cov = cfg().initial_cov()
    for _ in range(10):
        tr = np.trace(cov)
        state, cov = propagate(state, cov, [0.0, 0.0, GRAVITY], np.zeros(3),
                               0.005, cfg())
        assert np.trace(cov) > tr
        assert_psd_symmetric(cov)


# ---------------------------------------------------------------------------
# zupt update


def test_zupt_zero_innovation_keeps_state():
    state = NavState.origin()
    cov = np.eye(9) * 0.01
    state2, cov2 = zupt_update(state, cov, cfg())
    assert np.allclose(state2.p, state.p)
    assert np.allclose(state2.v, state.v)
    assert np.allclose(state2.q, state.q)
    # velocity block contracts
    assert np.all(np.diag(cov2)[3:6] < np.diag(cov)[3:6])
    assert_psd_symmetric(cov2)


def test_zupt_matches_scalar_kalman_analogue():
    # decoupled axis: prior var 1, meas var 1, v=0.4 -> posterior 0.2, var 0.5
    c = EskfConfig(zupt_noise_std=1.0)
    state = NavState(p=np.zeros(3), v=np.array([0.4, 0.0, 0.0]), q=quat.IDENTITY)
    cov = np.zeros((9, 9))
    cov[3, 3] = 1.0
    state2, cov2 = zupt_update(state, cov, c)
    assert state2.v[0] == pytest.approx(0.2)
    assert cov2[3, 3] == pytest.approx(0.5)


def test_zupt_never_increases_diagonal():
    rng = np.random.default_rng(0)
    A = rng.normal(size=(9, 9))
    cov = A @ A.T * 1e-3
    state = NavState(p=np.zeros(3), v=rng.normal(size=3) * 0.1, q=quat.IDENTITY)
    _, cov2 = zupt_update(state, cov, cfg())
    assert np.all(np.diag(cov2) <= np.diag(cov) + 1e-15)
    assert_psd_symmetric(cov2)


def test_zupt_leaves_yaw_variance_when_level():
    # level IMU: the yaw error column is uncorrelated with velocity, so a
    # ZUPT cannot reduce it
    state = NavState.origin()
    cov = cfg().initial_cov()
    for _ in range(20):
        state, cov = propagate(state, cov, [0.0, 0.0, GRAVITY], np.zeros(3),
                               0.005, cfg())
    yaw_var = cov[8, 8]
    _, cov2 = zupt_update(state, cov, cfg())
    assert cov2[8, 8] == pytest.approx(yaw_var, rel=1e-9)
    # roll/pitch variances are reduced (they couple into velocity via gravity)
    assert cov2[6, 6] < cov[6, 6]
    assert cov2[7, 7] < cov[7, 7]


# ---------------------------------------------------------------------------
# run_ins


def test_run_ins_rest_with_continuous_zupt(rest_seq):
    traj = run_ins(rest_seq, all_flags(len(rest_seq), 1), cfg(), NavState.origin())
    assert np.max(np.linalg.norm(traj.positions, axis=1)) < 1e-3


def test_run_ins_deterministic():
    seq, gt = synth.generate(synth.default_profile("walk", duration_s=5.0,
                                                   gyro_noise_std=0.01), seed=8)
    zv = ZvDecision(statistic=np.zeros(len(seq)), flag=seq.labels)
    init = NavState.origin()
    t1 = run_ins(seq, zv, cfg(), init)
    t2 = run_ins(seq, zv, cfg(), init)
    np.testing.assert_array_equal(t1.positions, t2.positions)
    np.testing.assert_array_equal(t1.quaternions, t2.quaternions)


def test_run_ins_flag_length_mismatch():
    seq = rest_sequence(n=10)
    with pytest.raises(ValidationError):
        run_ins(seq, all_flags(5, 1), cfg(), NavState.origin())


def test_rest_any_attitude_zero_drift():
    # tilted rest: leveling from the accel mean must cancel gravity
    rng = np.random.default_rng(4)
    for _ in range(3):
        roll, pitch = rng.uniform(-0.5, 0.5, 2)
        q = quat.multiply(quat.from_axis_angle([0, 1, 0], pitch),
                          quat.from_axis_angle([1, 0, 0], roll))
        f = quat.to_matrix(q).T @ np.array([0.0, 0.0, GRAVITY])
        seq = rest_sequence(n=2000, accel=f)  # 10 s at 200 Hz
        init = init_from_rest(seq, cfg())
        traj = run_ins(seq, all_flags(len(seq), 0), cfg(), init)
        assert np.max(np.linalg.norm(traj.velocities, axis=1)) < 1e-3


# ---------------------------------------------------------------------------
# init_from_rest


def test_init_from_rest_level(rest_seq):
    state = init_from_rest(rest_seq, cfg())
    assert np.allclose(state.q, quat.IDENTITY, atol=1e-9)
    assert np.allclose(state.p, 0.0)
    assert np.allclose(state.v, 0.0)


def test_init_from_rest_recovers_pitch():
    g = GRAVITY
    f = [-g * np.sin(np.pi / 6), 0.0, g * np.cos(np.pi / 6)]
    seq = rest_sequence(n=200, accel=f)
    state = init_from_rest(seq, cfg())
    # leveled attitude reprojects gravity onto the measured direction
    recovered = quat.to_matrix(state.q).T @ np.array([0.0, 0.0, g])
    assert np.allclose(recovered, f, atol=g * np.deg2rad(0.1))


def test_init_from_rest_rejects_shaking():
    seq = rest_sequence(n=200, accel=[0.0, 0.0, 2 * GRAVITY])
    with pytest.raises(NotAtRestError):
        init_from_rest(seq, cfg())


def test_init_from_rest_needs_long_enough_prefix():
    seq = rest_sequence(n=20)  # 0.1 s
    with pytest.raises(ValidationError):
        init_from_rest(seq, cfg())


# ---------------------------------------------------------------------------
# config file


def test_load_eskf_config(tmp_path):
    p = tmp_path / "eskf.yaml"
    p.write_text("accel_noise_std: 0.05\n"
                 "gravity: [0.0, 0.0, 9.81]\n")
    c = load_eskf_config(p)
    assert c.accel_noise_std == 0.05
    assert np.allclose(c.gravity, [0, 0, 9.81])
    assert c.zupt_noise_std == 0.01  # default retained


def test_load_eskf_config_rejects_unknown_keys(tmp_path):
    p = tmp_path / "eskf.yaml"
    p.write_text("zupt_std: 0.1\n")
    with pytest.raises(ValidationError):
        load_eskf_config(p)
