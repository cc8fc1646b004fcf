import numpy as np
import pytest

from zvnav.imu import GRAVITY, ImuSequence


def rest_sequence(n=200, rate=200.0, accel=None, gyro=None, g=GRAVITY):
    """A stationary, level IMU log."""
    times = np.arange(n) / rate
    a = np.tile(accel if accel is not None else [0.0, 0.0, g], (n, 1))
    w = np.tile(gyro if gyro is not None else [0.0, 0.0, 0.0], (n, 1))
    return ImuSequence(times=times, accel=a, gyro=w, rate_hz=rate)


@pytest.fixture
def rest_seq():
    return rest_sequence()
