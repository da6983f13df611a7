"""Detect fixations in a scripted gaze stream.

A viewer stares at three spots in turn, with fast saccades in between. The
dispersion detector should find the stable windows and ignore the jumps.
"""
import numpy as np

from gazeintent import FixationDetectorConfig, GazeSample, detect_fixations

rng = np.random.default_rng(0)
PERIOD = 1000.0 / 120.0  # 120 Hz

samples = []
t = 0.0
for cx, cy, dwell_ms in [(320, 240, 350), (420, 180, 260), (250, 300, 500)]:
    end = t + dwell_ms
    while t <= end:  # ~2 px of tracker noise around the dwell point
        samples.append(GazeSample(
            t_ms=t,
            x=cx + rng.normal(0, 2.0),
            y=cy + rng.normal(0, 2.0),
            confidence=float(rng.uniform(0.8, 1.0)),
        ))
        t += PERIOD
    t += 40.0  # saccade gap, no usable samples

config = FixationDetectorConfig()  # 3.01 deg * 30 px/deg, 80..400 ms
print(f"dispersion bound: {config.dispersion_max_px:.1f} px, "
      f"duration {config.dur_min_ms:.0f}..{config.dur_max_ms:.0f} ms")
print(f"stream: {len(samples)} samples over {samples[-1].t_ms:.0f} ms\n")

for i, f in enumerate(detect_fixations(samples, config)):
    print(f"fixation {i}: t={f.t_start_ms:7.1f} ms  dur={f.duration_ms:5.1f} ms  "
          f"pos=({f.x:6.1f}, {f.y:6.1f})")
