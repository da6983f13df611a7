"""The four features that separate grasping from viewing.

One example trial per task, then class means over 200 trials. Grasping gaze
hugs the index finger's grip point (small adf2i) and concentrates (small
var); viewing gaze wanders over the whole shape. The centroid distance is
the same in both tasks on average.
"""
import numpy as np

from gazeintent import SynthConfig, TaskLabel, compute_features, generate_trial

cfg = SynthConfig(seed=1)

single = {}
means = {}
for tag, task in enumerate((TaskLabel.GRASP, TaskLabel.VIEW)):
    fvs = [
        compute_features(t.fixations, t.object)
        for i in range(200)
        for t in [generate_trial(task, "square", np.random.default_rng([1, tag, i]), cfg)]
    ]
    single[task.value] = fvs[0]
    means[task.value] = {
        name: float(np.mean([getattr(fv, name) for fv in fvs]))
        for name in ("adf2c", "adf2i", "adf2t", "var", "n_fix")
    }

print(f"{'feature':8s} {'GRASP (one)':>12s} {'VIEW (one)':>12s} "
      f"{'GRASP (mean)':>14s} {'VIEW (mean)':>14s}")
for name in ("adf2c", "adf2i", "adf2t", "var", "n_fix"):
    print(f"{name:8s} {getattr(single['GRASP'], name):12.2f} "
          f"{getattr(single['VIEW'], name):12.2f} "
          f"{means['GRASP'][name]:14.2f} {means['VIEW'][name]:14.2f}")

print("\nvar is the strongest separator; adf2i points at the grasp intention;")
print("adf2c matches across tasks on average and carries no class signal.")
