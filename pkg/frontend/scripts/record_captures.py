"""Record real service transcripts for the UI tests.

Drives the in-process recognition service with the two pointer behaviors the
demo cares about — holding steady near the index grasp marker, and sweeping
loosely across the shape — and saves every server message together with the
number of samples the client had sent when it arrived. The vitest suite
replays these captures through a fake socket, so the UI is tested against
genuine protocol traffic without a running backend.

Run from the frontend directory:  python3 scripts/record_captures.py
"""
import json
import math
import os

import numpy as np
from fastapi.testclient import TestClient

from gazeintent import Combination, GazeSample, ModelKind, train
from gazeintent.service import ModelStore, build_app
from gazeintent.stream import replay
from gazeintent.synth import SynthConfig, generate_dataset, grasp_offset, windowed_training_set
from gazeintent.core import ObjectContext

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")
RATE_HZ = 60.0
CENTER = (360.0, 220.0)  # the demo canvas placement


def build_model():
    cfg = SynthConfig(n_per_class=120, n_test_per_class=0, seed=11)
    train_trials, _ = generate_dataset(cfg)
    fvs, labels = windowed_training_set(train_trials)
    x = np.stack([fv.project(Combination.C4.members) for fv in fvs])
    return train(ModelKind.KNN, x, labels, Combination.C4, seed=0)


def pointer_samples(kind: str, seconds: float, rng: np.random.Generator, target):
    period = 1000.0 / RATE_HZ
    n = int(seconds * RATE_HZ)
    out = []
    for k in range(n):
        t = k * period
        if kind == "steady":
            x = target[0] + rng.uniform(-2, 2)
            y = target[1] + rng.uniform(-2, 2)
        else:  # loose sweep over the whole shape
            x = CENTER[0] + 60.0 * math.sin(2 * math.pi * t / 1700.0)
            y = CENTER[1] + 55.0 * math.sin(2 * math.pi * t / 2300.0 + 1.0)
        out.append(GazeSample(t_ms=t, x=x, y=y, confidence=1.0))
    return out


def expected_message_count(samples, context, model):
    """How many messages the server will have sent after these samples."""
    events = replay(samples, context, model)
    count = 0
    last_start = float("-inf")
    for e in events:
        for f in e.fixations:
            if f.t_start_ms > last_start:
                last_start = f.t_start_ms
                count += 1
        if e.window_features is not None:
            count += 1
        count += 1
    return count


def record(kind: str, path: str, model):
    r0, _ = grasp_offset(SynthConfig())
    context = ObjectContext(
        centroid=CENTER,
        grasp_thumb=(CENTER[0] - r0, CENTER[1]),
        grasp_index=(CENTER[0] + r0, CENTER[1]),
        shape_id="square",
    )
    rng = np.random.default_rng(77)
    samples = pointer_samples(kind, 5.5, rng, context.grasp_index)

    store = ModelStore(models={"knn-c4": model}, default_id="knn-c4")
    client = TestClient(build_app(store))
    init_payload = {
        "object": {
            "centroid": list(context.centroid),
            "grasp_thumb": list(context.grasp_thumb),
            "grasp_index": list(context.grasp_index),
            "shape_id": context.shape_id,
        }
    }
    timeline = []
    with client.websocket_connect("/session") as ws:
        ws.send_text(json.dumps({"v": 1, "seq": 1, "type": "init", "payload": init_payload}))
        timeline.append({"after_samples": 0, "message": json.loads(ws.receive_text())})
        seq = 1
        sent = 0
        received = 1
        batch = 6  # ~100 ms at 60 Hz, the UI's flush cadence
        for i in range(0, len(samples), batch):
            chunk = samples[i : i + batch]
            seq += 1
            ws.send_text(json.dumps({
                "v": 1, "seq": seq, "type": "samples",
                "payload": {"samples": [
                    {"t_ms": s.t_ms, "x": s.x, "y": s.y, "confidence": s.confidence}
                    for s in chunk
                ]},
            }))
            sent += len(chunk)
            want = 1 + expected_message_count(samples[:sent], context, model)
            while received < want:
                timeline.append({"after_samples": sent, "message": json.loads(ws.receive_text())})
                received += 1

    fired = [
        t for t in timeline
        if t["message"]["type"] == "intention" and t["message"]["payload"]["fired"]
    ]
    capture = {"kind": kind, "init": init_payload, "timeline": timeline}
    with open(path, "w") as fh:
        json.dump(capture, fh, indent=1)
    types = [t["message"]["type"] for t in timeline]
    print(f"{kind}: {len(timeline)} messages "
          f"({types.count('fixation')} fixation, {types.count('features')} features, "
          f"{types.count('intention')} intention, {len(fired)} fired) -> {path}")


if __name__ == "__main__":
    os.makedirs(OUT_DIR, exist_ok=True)
    model = build_model()
    record("steady", os.path.join(OUT_DIR, "capture_steady_grasp.json"), model)
    record("sweep", os.path.join(OUT_DIR, "capture_loose_sweep.json"), model)
