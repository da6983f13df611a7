"""Online recognition over a sliding window.

A grasp trial and a view trial are rasterized into 120 Hz gaze streams and
replayed through a live session (3 s window, 500 ms hop, two consecutive
grasp verdicts to fire). The deployed model is KNN on combination C4,
trained on window-level features so it sees the same distribution it
classifies.
"""
import numpy as np

from gazeintent import Combination, ModelKind, SynthConfig, TaskLabel, generate_dataset, \
    generate_trial, rasterize, replay, train
from gazeintent.synth import windowed_training_set

cfg = SynthConfig(n_per_class=160, n_test_per_class=0, seed=11)
train_trials, _ = generate_dataset(cfg)
fvs, labels = windowed_training_set(train_trials)
x = np.stack([fv.project(Combination.C4.members) for fv in fvs])
model = train(ModelKind.KNN, x, labels, Combination.C4, seed=0)
print(f"deployed model: KNN / C4 trained on {len(x)} window samples\n")

for tag, task in enumerate((TaskLabel.GRASP, TaskLabel.VIEW)):
    trial = generate_trial(task, "cross", np.random.default_rng([3, tag]), cfg)
    samples = rasterize(trial, rate_hz=120.0, repeat_to_ms=5800.0)
    print(f"--- replaying a {task.value} trial ({len(samples)} samples, 5.8 s) ---")
    for e in replay(samples, trial.object, model):
        mark = "  <<< FIRED" if e.fired else ""
        fv = e.window_features
        detail = f"adf2i={fv.adf2i:6.1f} var={fv.var:7.1f}" if fv else "(too few fixations)"
        print(f"  t={e.t_ms:6.0f} ms  {e.label.value:12s} {detail}{mark}")
    print()
