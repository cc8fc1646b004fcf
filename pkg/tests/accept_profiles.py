"""Shared synthetic trial definitions for the acceptance suite.

The same noise floors (flags documented in
trainer/scripts/make_fixtures.sh) are used to generate the trainer's
training CSVs, whose seeds (1-20) never overlap the held-out evaluation
seeds below.
"""

from zvnav import synth

NOISE = {
    "walk": dict(accel_noise_std=0.02, gyro_noise_std=0.01),
    "run": dict(accel_noise_std=0.1, gyro_noise_std=0.05),
    "crawl": dict(accel_noise_std=0.05, gyro_noise_std=0.02),
}

# held-out mixed-intensity evaluation trials: (kind, seed, duration).
# Crawling and running have disjoint workable SHOE threshold ranges
# (low-energy swing vs high noise floor), so no single gamma is optimal
# across the set.
TEST_TRIALS = [
    ("walk", 101, 20.0),
    ("walk", 102, 20.0),
    ("run", 201, 20.0),
    ("run", 202, 20.0),
    ("crawl", 301, 20.0),
    ("crawl", 302, 20.0),
]

# probe sequence for cross-implementation golden vectors
PROBE = ("walk", 999, 5.0)


def trial_profile(kind, duration):
    return synth.default_profile(kind, duration_s=duration, **NOISE[kind])


def generate_trial(kind, seed, duration):
    return synth.generate(trial_profile(kind, duration), seed=seed)
