import json
import os

import numpy as np
import pytest

from gazeintent import io
from gazeintent.core import GazeSample, TaskLabel
from gazeintent.features import Combination, extract
from gazeintent.learn import ModelKind, repeated_eval, train
from gazeintent.stream import replay
from gazeintent.synth import SynthConfig, generate_dataset, rasterize


@pytest.fixture(scope="module")
def dataset():
    cfg = SynthConfig(n_per_class=15, n_test_per_class=4, seed=3)
    train_trials, test_trials = generate_dataset(cfg)
    return cfg, train_trials, test_trials


def test_gaze_stream_roundtrip(tmp_path):
    samples = [GazeSample(t_ms=8.0 * i, x=1.5 * i, y=-0.5 * i, confidence=0.9) for i in range(20)]
    path = str(tmp_path / "stream.jsonl")
    io.write_gaze_stream(path, samples)
    back = io.read_gaze_stream(path)
    assert back == samples
    with open(path) as fh:
        first = json.loads(fh.readline())
    assert set(first) == {"t_ms", "x", "y", "confidence"}


def test_dataset_roundtrip_with_manifest(tmp_path, dataset):
    cfg, train_trials, _ = dataset
    path = str(tmp_path / "data.jsonl")
    io.write_dataset(path, train_trials, cfg)
    cfg2, trials2 = io.read_dataset(path)
    assert cfg2 == cfg
    assert trials2 == train_trials
    with open(path) as fh:
        lines = [json.loads(l) for l in fh if l.strip()]
    assert "synth_config" in lines[0]
    assert set(lines[1]) == {"trial_id", "participant_id", "task_label", "fixations", "object"}
    assert set(lines[1]["object"]) == {"centroid", "grasp_thumb", "grasp_index", "shape_id"}


def test_dataset_without_manifest(tmp_path, dataset):
    _, train_trials, _ = dataset
    path = str(tmp_path / "plain.jsonl")
    io.write_dataset(path, train_trials[:4])
    cfg, trials = io.read_dataset(path)
    assert cfg is None and trials == train_trials[:4]


def test_fixation_roundtrip(tmp_path, dataset):
    _, train_trials, _ = dataset
    fixations = list(train_trials[0].fixations)
    path = str(tmp_path / "fix.jsonl")
    io.write_fixations(path, fixations)
    assert io.read_fixations(path) == fixations


def test_feature_dump_fields(tmp_path, dataset):
    _, train_trials, _ = dataset
    path = str(tmp_path / "features.jsonl")
    io.write_feature_dump(path, train_trials)
    rows = io.read_feature_dump(path)
    assert len(rows) == len(train_trials)
    assert set(rows[0]) == {
        "trial_id", "task_label", "adf2c", "adf2t", "adf2i", "var", "n_fix", "shape_id",
    }
    assert rows[0]["task_label"] in ("GRASP", "VIEW")


def test_model_roundtrip(tmp_path, dataset):
    _, train_trials, _ = dataset
    x = np.stack([extract(t, Combination.C2) for t in train_trials])
    y = [t.task_label for t in train_trials]
    model = train(ModelKind.DECISION_TREE, x, y, Combination.C2)
    path = str(tmp_path / "model.json")
    io.write_model(path, model)
    clone = io.read_model(path)
    assert clone.predict(x) == model.predict(x)


def test_report_rows_shape(tmp_path, dataset):
    _, train_trials, test_trials = dataset
    results = repeated_eval(
        train_trials, test_trials,
        combinations=(Combination.C4,), kinds=(ModelKind.KNN,), n_repeats=2, seed=0,
    )
    path = str(tmp_path / "report.jsonl")
    io.write_report(path, results)
    rows = io.read_report(path)
    assert {r["testset"] for r in rows} == {"test1", "test2"}
    assert all(
        set(r) == {"combination", "kind", "testset", "mean_accuracy", "std_accuracy", "n_repeats"}
        for r in rows
    )


def test_event_log_format(tmp_path, dataset):
    _, train_trials, _ = dataset
    x = np.stack([extract(t, Combination.C4) for t in train_trials])
    y = [t.task_label for t in train_trials]
    model = train(ModelKind.KNN, x, y, Combination.C4)
    trial = train_trials[0]
    events = replay(rasterize(trial, repeat_to_ms=4000.0), trial.object, model)
    path = str(tmp_path / "events.jsonl")
    io.write_events(path, events)
    with open(path) as fh:
        rows = [json.loads(l) for l in fh if l.strip()]
    assert len(rows) == len(events)
    assert all(set(r) == {"t_ms", "label", "fired", "features"} for r in rows)


def test_write_atomic_never_leaves_partials(tmp_path):
    target = tmp_path / "out.txt"
    io.write_atomic(str(target), "hello\n")
    assert target.read_text() == "hello\n"
    assert [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")] == []
    # a failing writer must clean up and leave the old content alone
    with pytest.raises(TypeError):
        io.write_atomic(str(target), None)  # not a string: write fails
    assert target.read_text() == "hello\n"
    assert [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")] == []
