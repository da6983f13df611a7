import numpy as np
import pytest

from gazeintent.core import Fixation, GazeSample, ObjectContext, TaskLabel, Trial
from gazeintent.synth import SynthConfig, generate_dataset


def make_stream(rng, n_segments=8, jitter=0, min_jump=150, max_jump=400):
    """Piecewise-dwell gaze stream on an integer grid.

    Dwell positions jump by at least ``min_jump`` px (beyond the default
    dispersion bound), so fixation windows never span two dwells; ``jitter``
    adds integer scatter inside a dwell. Returns an (n, 4) float array of
    t/x/y/confidence with integer-valued times and coordinates.
    """
    rows = []
    t = 0
    x, y = int(rng.integers(200, 800)), int(rng.integers(200, 800))
    for _ in range(n_segments):
        dwell = int(rng.integers(20, 600))
        period = int(rng.integers(5, 20))
        end = t + dwell
        while t <= end:
            jx = int(rng.integers(-jitter, jitter + 1)) if jitter else 0
            jy = int(rng.integers(-jitter, jitter + 1)) if jitter else 0
            conf = 1.0 if rng.random() > 0.15 else 0.3  # some samples fail the gate
            rows.append((float(t), float(x + jx), float(y + jy), conf))
            t += period
        angle = rng.uniform(0, 2 * np.pi)
        jump = rng.uniform(min_jump, max_jump)
        x = int(x + jump * np.cos(angle))
        y = int(y + jump * np.sin(angle))
        t += int(rng.integers(10, 120))
    return np.array(rows, dtype=float)


def to_samples(arr):
    return [GazeSample(t_ms=r[0], x=r[1], y=r[2], confidence=r[3]) for r in arr]


def make_trial(rng, n_fix=None, label=TaskLabel.GRASP, shape_id="square"):
    """A random trial with arbitrary geometry (not synth-calibrated)."""
    n = n_fix or int(rng.integers(1, 25))
    t = 0.0
    fixations = []
    for _ in range(n):
        dur = float(rng.uniform(80, 400))
        fixations.append(
            Fixation(t_start_ms=t, duration_ms=dur,
                     x=float(rng.uniform(0, 600)), y=float(rng.uniform(0, 600)))
        )
        t += dur + float(rng.uniform(30, 80))
    centroid = (float(rng.uniform(100, 500)), float(rng.uniform(100, 500)))
    return Trial(
        trial_id="t", participant_id="p", task_label=label,
        fixations=tuple(fixations),
        object=ObjectContext(
            centroid=centroid,
            grasp_thumb=(centroid[0] - 30.0, centroid[1]),
            grasp_index=(centroid[0] + 30.0, centroid[1]),
            shape_id=shape_id,
        ),
    )


@pytest.fixture(scope="session")
def small_dataset():
    """60+60 calibrated trials: enough signal for fast classifier tests."""
    train, test = generate_dataset(SynthConfig(n_per_class=60, n_test_per_class=10, seed=17))
    return train, test
