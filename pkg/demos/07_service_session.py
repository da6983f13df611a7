"""A complete WebSocket session against the recognition service.

Runs the service in-process (no network), initializes a session with a
shape's object context, streams a rasterized grasp trial in batches, and
prints every message the service sends back — ending in a fired intention,
the signal a robot arm would act on.
"""
import json

import numpy as np
from fastapi.testclient import TestClient

from gazeintent import Combination, ModelKind, SynthConfig, TaskLabel, generate_dataset, \
    generate_trial, rasterize, train
from gazeintent.service import ModelStore, build_app
from gazeintent.synth import windowed_training_set

cfg = SynthConfig(n_per_class=120, n_test_per_class=0, seed=11)
train_trials, _ = generate_dataset(cfg)
fvs, labels = windowed_training_set(train_trials)
x = np.stack([fv.project(Combination.C4.members) for fv in fvs])
model = train(ModelKind.KNN, x, labels, Combination.C4, seed=0)

client = TestClient(build_app(ModelStore(models={"knn-c4": model}, default_id="knn-c4")))
print("GET /health ->", client.get("/health").json())
print("GET /models ->", client.get("/models").json())

trial = generate_trial(TaskLabel.GRASP, "square", np.random.default_rng([2026, 0, 0]), cfg)
samples = rasterize(trial, rate_hz=120.0, repeat_to_ms=4200.0)
batches = [samples[i:i + 40] for i in range(0, len(samples), 40)]
obj = trial.object

with client.websocket_connect("/session") as ws:
    ws.send_text(json.dumps({
        "v": 1, "seq": 1, "type": "init",
        "payload": {"object": {"centroid": list(obj.centroid),
                               "grasp_thumb": list(obj.grasp_thumb),
                               "grasp_index": list(obj.grasp_index),
                               "shape_id": obj.shape_id}},
    }))
    print("\nack ->", json.loads(ws.receive_text())["payload"])
    fired = False
    seq = 1
    for batch in batches:
        seq += 1
        ws.send_text(json.dumps({
            "v": 1, "seq": seq, "type": "samples",
            "payload": {"samples": [
                {"t_ms": s.t_ms, "x": s.x, "y": s.y, "confidence": s.confidence}
                for s in batch
            ]},
        }))
        # intention messages for the two boundaries this stream crosses
        if batch[-1].t_ms >= 3500.0 and not fired:
            while not fired:
                msg = json.loads(ws.receive_text())
                p = msg["payload"]
                if msg["type"] == "fixation":
                    print(f"fixation  t={p['t_start_ms']:7.1f} pos=({p['x']:.0f},{p['y']:.0f})")
                elif msg["type"] == "features":
                    print(f"features  t={p['t_ms']:6.0f} adf2i={p['adf2i']:.1f} var={p['var']:.1f}")
                elif msg["type"] == "intention":
                    print(f"intention t={p['t_ms']:6.0f} {p['label']} fired={p['fired']}")
                    fired = p["fired"]
print("\nsession closed; a fired GRASP is the robot trigger")
