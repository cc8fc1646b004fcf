"""Regenerate the committed random-model fixture and its golden vectors.

Run from the repo root:  python3 tests/fixtures/gen_random_model.py

The golden probabilities are produced by the scalar-loop oracle in
tests/test_lstm.py, not by the vectorized engine under test.
"""

import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from test_lstm import forward_scalar  # noqa: E402

from zvnav.lstm import random_model, save_model  # noqa: E402

HERE = os.path.dirname(os.path.abspath(__file__))


def main():
    model = random_model(2, 16, seed=1, scale=0.3)
    save_model(os.path.join(HERE, "random_model.json"), model)
    probe = np.random.default_rng(1).normal(size=(50, 6))
    probs = forward_scalar(model, probe)
    with open(os.path.join(HERE, "random_model_golden.csv"), "w") as f:
        f.write("x0,x1,x2,x3,x4,x5,p_moving,p_stationary\n")
        for row, p in zip(probe, probs):
            f.write(",".join(repr(float(v)) for v in [*row, *p]) + "\n")


if __name__ == "__main__":
    main()
