"""Zero-velocity-aided inertial navigation toolkit.

Classical and learned zero-velocity detectors feed pseudo-measurements
into an error-state Kalman filter to produce drift-bounded foot
trajectories from raw IMU logs.
"""

from .augment import AugmentConfig, augment_window, extract_windows
from .detectors import (DetectorParams, ZvDecision, amvd, ared, mbgtd,
                        optimize_threshold, shoe, velocity_labeler)
from .errors import DivergenceError, NotAtRestError, ParseError, ValidationError
from .eskf import (EskfConfig, NavState, init_from_rest, load_eskf_config,
                   propagate, run_ins, zupt_update)
from .imu import GroundTruth, ImuSample, ImuSequence, Trajectory
from .io import (load_ground_truth_csv, load_imu_csv, load_trajectory_csv,
                 save_ground_truth_csv, save_imu_csv, save_trajectory_csv)
from .lstm import (LstmLayerWeights, LstmModel, forward_sequence, gate_confidence,
                   load_model, lstm_cell_step, save_model)
from .metrics import ErrorReport, armse, marker_errors, rigid_align
from .synth import GaitProfile, default_profile, generate

__version__ = "0.1.0"
