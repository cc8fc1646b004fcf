"""Command-line front end.

Commands: synth, detect, infer, navigate, optimize-threshold, eval, sweep.
Exit codes: 0 success, 1 usage error, 2 data/validation error,
3 numerical divergence.  Set ZVNAV_LOG_LEVEL to control verbosity.

All commands emit tidy CSV tables or key-value text; plotting is out of
scope.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from . import augment, detectors, eskf, io, lstm, metrics, synth
from .errors import DivergenceError, ValidationError

log = logging.getLogger("zvnav")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_DIVERGED = 3


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _detector_params(args):
    return detectors.DetectorParams(window_w=args.window, sigma_a=args.sigma_a,
                                    sigma_w=args.sigma_w, gravity_g=args.gravity_mag)


def _add_detector_args(p):
    p.add_argument("--detector", choices=sorted(detectors.DETECTORS))
    p.add_argument("--gamma", type=float)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--sigma-a", type=float, default=9.8e-4)
    p.add_argument("--sigma-w", type=float, default=8.726e-5)
    p.add_argument("--gravity-mag", type=float, default=9.80665)


def _add_grid_args(p):
    p.add_argument("--grid-min", type=float, required=True)
    p.add_argument("--grid-max", type=float, required=True)
    p.add_argument("--grid-points", type=int, default=25)
    p.add_argument("--grid-linear", action="store_true",
                   help="linear grid instead of the default log spacing")


def _grid(args):
    if args.grid_linear:
        return np.linspace(args.grid_min, args.grid_max, args.grid_points)
    return detectors.log_grid(args.grid_min, args.grid_max, args.grid_points)


def _load_config(path):
    return eskf.load_eskf_config(path) if path else eskf.EskfConfig()


def _zv_from_args(args, seq):
    """Resolve the zero-velocity source: detector, model file, or label column."""
    sources = [args.detector is not None, args.model is not None, args.labels]
    if sum(sources) != 1:
        raise UsageError("choose exactly one of --detector, --model, --labels")
    if args.labels:
        if seq.labels is None:
            raise ValidationError("IMU file has no zv label column")
        return detectors.ZvDecision(statistic=seq.labels.astype(float),
                                    flag=seq.labels)
    if args.model is not None:
        model = lstm.load_model(args.model)
        probs = lstm.forward_sequence(model, seq)
        thr = args.threshold if args.threshold is not None else model.confidence_threshold
        return lstm.gate_confidence(probs, thr)
    if args.gamma is None:
        raise UsageError("--detector requires --gamma")
    detect = detectors.DETECTORS[args.detector]
    return detect(seq, _detector_params(args), args.gamma)


def cmd_synth(args):
    overrides = {}
    for field, name in [("cadence_hz", "cadence"), ("stride_m", "stride"),
                        ("stance_fraction", "stance_fraction"),
                        ("swing_height_m", "swing_height"),
                        ("rotation_intensity", "rotation_intensity"),
                        ("accel_noise_std", "noise_accel"),
                        ("gyro_noise_std", "noise_gyro"),
                        ("lead_in_s", "lead_in")]:
        v = getattr(args, name)
        if v is not None:
            overrides[field] = v
    overrides["duration_s"] = args.duration
    overrides["path"] = args.path
    profile = synth.default_profile(args.profile, **overrides)
    seq, gt = synth.generate(profile, seed=args.seed, rate_hz=args.rate)
    io.save_imu_csv(args.out, seq)
    if args.gt_out:
        io.save_ground_truth_csv(args.gt_out, gt)
    log.info("wrote %d samples to %s", len(seq), args.out)
    return EXIT_OK


def cmd_detect(args):
    seq = io.load_imu_csv(args.imu)
    if args.gamma is None or args.detector is None:
        raise UsageError("detect requires --detector and --gamma")
    zv = detectors.DETECTORS[args.detector](seq, _detector_params(args), args.gamma)
    io.save_detection_csv(args.out, seq.times, zv)
    return EXIT_OK


def cmd_infer(args):
    seq = io.load_imu_csv(args.imu)
    model = lstm.load_model(args.model)
    probs = lstm.forward_sequence(model, seq)
    thr = args.threshold if args.threshold is not None else model.confidence_threshold
    zv = lstm.gate_confidence(probs, thr)
    io.save_detection_csv(args.out, seq.times, zv)
    return EXIT_OK


def cmd_navigate(args):
    seq = io.load_imu_csv(args.imu)
    cfg = _load_config(args.config)
    zv = _zv_from_args(args, seq)
    init = eskf.init_from_rest(seq, cfg, rest_duration=args.rest_duration)
    traj = eskf.run_ins(seq, zv, cfg, init)
    io.save_trajectory_csv(args.out, traj)
    frac = float(np.mean(zv.flag))
    sys.stdout.write(f"samples {len(seq)}\nstationary_fraction {frac!r}\n")
    return EXIT_OK


def cmd_optimize_threshold(args):
    seq = io.load_imu_csv(args.imu)
    gt = io.load_ground_truth_csv(args.gt)
    cfg = _load_config(args.config)
    best_gamma, best_armse = detectors.optimize_threshold(
        seq, gt, args.detector, _grid(args), cfg, params=_detector_params(args),
        dims=args.dims, align=args.align)
    sys.stdout.write(f"best_gamma {best_gamma!r}\nbest_armse {best_armse!r}\n")
    return EXIT_OK


def cmd_eval(args):
    traj = io.load_trajectory_csv(args.traj)
    markers = io.load_marker_csv(args.markers) if args.markers else None
    gt = io.load_ground_truth_csv(args.gt, markers=markers)
    report = metrics.armse(traj, gt, dims=args.dims, align=args.align)
    if markers:
        per_marker = metrics.marker_errors(traj, markers)
        report = metrics.ErrorReport(
            armse_2d=report.armse_2d, armse_3d=report.armse_3d,
            end_error=report.end_error, end_error_raw=report.end_error_raw,
            per_marker_errors=per_marker)
    text = metrics.format_report(report)
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    if args.csv_out:
        d = report.as_dict()
        with open(args.csv_out, "w", encoding="utf-8") as f:
            f.write(",".join(d.keys()) + "\n")
            f.write(",".join(repr(float(v)) for v in d.values()) + "\n")
    return EXIT_OK


def cmd_sweep(args):
    if len(args.imu) != len(args.gt):
        raise UsageError("--imu and --gt must be given the same number of times")
    cfg = _load_config(args.config)
    params = _detector_params(args)
    detect = detectors.DETECTORS[args.detector]
    grid = np.sort(_grid(args))
    rows = []
    table = np.zeros((len(args.imu), len(grid)))
    for ti, (imu_path, gt_path) in enumerate(zip(args.imu, args.gt)):
        seq = io.load_imu_csv(imu_path)
        gt = io.load_ground_truth_csv(gt_path)
        init = eskf.init_from_rest(seq, cfg)
        for gi, gamma in enumerate(grid):
            zv = detect(seq, params, gamma)
            try:
                traj = eskf.run_ins(seq, zv, cfg, init)
                report = metrics.armse(traj, gt, dims=args.dims, align=args.align)
                err = report.armse_2d if args.dims == 2 else report.armse_3d
            except (DivergenceError, ValidationError):
                err = float("inf")
            table[ti, gi] = err
            rows.append((imu_path, gamma, err))
    with open(args.out, "w", encoding="utf-8") as f:
        f.write("trial,gamma,armse\n")
        for trial, gamma, err in rows:
            f.write(f"{trial},{float(gamma)!r},{float(err)!r}\n")
        for gi, gamma in enumerate(grid):
            f.write(f"aggregate,{float(gamma)!r},{float(np.mean(table[:, gi]))!r}\n")
    return EXIT_OK


def build_parser():
    parser = Parser(prog="zvnav",
                    description="Zero-velocity-aided inertial navigation toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic trial")
    p.add_argument("--profile", choices=sorted(synth.MOTION_KINDS), default="walk")
    p.add_argument("--duration", type=float, default=30.0)
    p.add_argument("--rate", type=float, default=200.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--path", choices=["straight", "circuit"], default="straight")
    for name in ["cadence", "stride", "stance-fraction", "swing-height",
                 "rotation-intensity", "noise-accel", "noise-gyro", "lead-in"]:
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--gt-out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("detect", help="run a classical detector over an IMU log")
    p.add_argument("--imu", required=True)
    _add_detector_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("infer", help="run the learned detector over an IMU log")
    p.add_argument("--imu", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("navigate", help="full pipeline: IMU -> ZV -> ESKF trajectory")
    p.add_argument("--imu", required=True)
    _add_detector_args(p)
    p.add_argument("--model")
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--labels", action="store_true",
                   help="use the IMU file's zv label column")
    p.add_argument("--config")
    p.add_argument("--rest-duration", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_navigate)

    p = sub.add_parser("optimize-threshold",
                       help="grid-search the detector threshold minimizing ARMSE")
    p.add_argument("--imu", required=True)
    p.add_argument("--gt", required=True)
    _add_detector_args(p)
    _add_grid_args(p)
    p.add_argument("--config")
    p.add_argument("--dims", type=int, choices=[2, 3], default=2)
    p.add_argument("--align", choices=metrics.ALIGN_MODES, default="none")
    p.set_defaults(func=cmd_optimize_threshold)

    p = sub.add_parser("eval", help="compare a trajectory against ground truth")
    p.add_argument("--traj", required=True)
    p.add_argument("--gt", required=True)
    p.add_argument("--markers")
    p.add_argument("--dims", type=int, choices=[2, 3], default=2)
    p.add_argument("--align", choices=metrics.ALIGN_MODES, default="yaw")
    p.add_argument("--out")
    p.add_argument("--csv-out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="error-vs-threshold table over trials")
    p.add_argument("--imu", action="append", required=True)
    p.add_argument("--gt", action="append", required=True)
    _add_detector_args(p)
    _add_grid_args(p)
    p.add_argument("--config")
    p.add_argument("--dims", type=int, choices=[2, 3], default=2)
    p.add_argument("--align", choices=metrics.ALIGN_MODES, default="none")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None):
    logging.basicConfig(level=os.environ.get("ZVNAV_LOG_LEVEL", "WARNING"))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as e:
        print(f"divergence: {e}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
