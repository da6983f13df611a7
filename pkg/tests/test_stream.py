import numpy as np
import pytest

from gazeintent.core import GazeSample, TaskLabel
from gazeintent.features import Combination, compute_features
from gazeintent.io import events_text
from gazeintent.learn import ModelKind, Standardization, TrainedModel, train
from gazeintent.stream import (
    IntentionLabel,
    StreamSession,
    WindowConfig,
    replay,
    window_feature_rows,
)
from gazeintent.synth import (
    SynthConfig,
    generate_dataset,
    generate_trial,
    rasterize,
    windowed_training_set,
)

CFG = SynthConfig(n_per_class=120, n_test_per_class=0, seed=11)


@pytest.fixture(scope="module")
def deployed_model():
    """C4 + KNN trained on sliding-window features, the deployment recipe."""
    train_trials, _ = generate_dataset(CFG)
    fvs, labels = windowed_training_set(train_trials)
    x = np.stack([fv.project(Combination.C4.members) for fv in fvs])
    return train(ModelKind.KNN, x, labels, Combination.C4, seed=0)


def constant_score_model(bias: float) -> TrainedModel:
    """Always-GRASP (bias >= 0) or always-VIEW linear stub for logic tests."""
    return TrainedModel(
        ModelKind.SVM_LINEAR,
        Combination.C4,
        Standardization(mean=np.zeros(3), std=np.ones(3)),
        {"weights": np.zeros(3), "bias": bias, "lambda": 0.0, "epochs": 0},
    )


def steady_samples(until_ms: float, x=100.0, y=100.0, period=10.0):
    t = 0.0
    out = []
    while t <= until_ms:
        out.append(GazeSample(t_ms=t, x=x, y=y))
        t += period
    return out


def grasp_trial(i):
    rng = np.random.default_rng([2026, i, 0])
    return generate_trial(TaskLabel.GRASP, ("square", "cross", "t-up")[i % 3], rng, CFG)


def view_trial(i):
    rng = np.random.default_rng([2026, i, 1])
    return generate_trial(TaskLabel.VIEW, ("square", "cross", "t-up")[i % 3], rng, CFG)


def test_no_event_before_first_full_window(deployed_model):
    trial = grasp_trial(0)
    session = StreamSession(trial.object, deployed_model)
    events = session.push_samples(
        [s for s in rasterize(trial, repeat_to_ms=5800.0) if s.t_ms < 2999.0]
    )
    assert events == []


def test_sparse_window_is_insufficient_and_never_fires():
    model = constant_score_model(bias=1.0)  # would say GRASP given any features
    trial = grasp_trial(1)
    # two lonely samples then silence until past several boundaries
    samples = [
        GazeSample(t_ms=0.0, x=10.0, y=10.0),
        GazeSample(t_ms=100.0, x=10.0, y=10.0),
        GazeSample(t_ms=4500.0, x=10.0, y=10.0),
    ]
    events = StreamSession(trial.object, model).push_samples(samples)
    assert len(events) == 4  # boundaries 3000..4500
    assert all(e.label is IntentionLabel.INSUFFICIENT for e in events)
    assert not any(e.fired for e in events)
    assert all(e.window_features is None for e in events)


def test_consecutive_debounce_and_refractory():
    model = constant_score_model(bias=1.0)
    trial = grasp_trial(2)
    events = StreamSession(trial.object, model).push_samples(steady_samples(8000.0))
    by_t = {e.t_ms: e for e in events}
    assert by_t[3000.0].label is IntentionLabel.GRASP and not by_t[3000.0].fired
    assert by_t[3500.0].fired  # second consecutive grasp window
    # refractory (2 s) pauses everything after the fire
    assert all(not (3500.0 < t <= 5500.0) for t in by_t)
    assert 6000.0 in by_t and not by_t[6000.0].fired  # counter restarted
    assert by_t[6500.0].fired


def test_consecutive_required_one_fires_immediately():
    model = constant_score_model(bias=1.0)
    trial = grasp_trial(3)
    window = WindowConfig(consecutive_required=1)
    events = StreamSession(trial.object, model, window).push_samples(steady_samples(3000.0))
    assert events[0].t_ms == 3000.0 and events[0].fired


def test_always_view_never_fires():
    model = constant_score_model(bias=-1.0)
    trial = view_trial(0)
    events = StreamSession(trial.object, model).push_samples(steady_samples(8000.0))
    assert all(e.label is IntentionLabel.VIEW and not e.fired for e in events)


def test_time_regression_rejected(deployed_model):
    trial = grasp_trial(4)
    session = StreamSession(trial.object, deployed_model)
    session.push_sample(GazeSample(t_ms=100.0, x=0.0, y=0.0))
    with pytest.raises(ValueError):
        session.push_sample(GazeSample(t_ms=99.0, x=0.0, y=0.0))


def test_missing_context_or_model_rejected(deployed_model):
    trial = grasp_trial(5)
    with pytest.raises(ValueError):
        StreamSession(None, deployed_model)
    with pytest.raises(ValueError):
        StreamSession(trial.object, None)


def test_grasp_replays_fire_once_within_deadline(deployed_model):
    deadline = 3000.0 + 2 * 500.0
    for i in range(6):
        trial = grasp_trial(i)
        samples = rasterize(trial, rate_hz=120.0, repeat_to_ms=5800.0)
        fired = [e for e in replay(samples, trial.object, deployed_model) if e.fired]
        assert len(fired) == 1, f"seed {i}"
        assert fired[0].t_ms <= deadline


def test_view_replays_never_fire(deployed_model):
    for i in range(6):
        trial = view_trial(i)
        samples = rasterize(trial, rate_hz=120.0, repeat_to_ms=5800.0)
        fired = [e for e in replay(samples, trial.object, deployed_model) if e.fired]
        assert fired == [], f"seed {i}"


def test_chunking_invariance_is_byte_exact(deployed_model):
    trial = grasp_trial(0)
    samples = rasterize(trial, rate_hz=120.0, repeat_to_ms=5800.0)
    whole = replay(samples, trial.object, deployed_model)

    one_by_one = StreamSession(trial.object, deployed_model)
    e1 = [ev for s in samples for ev in one_by_one.push_sample(s)]

    rng = np.random.default_rng(0)
    chunked = StreamSession(trial.object, deployed_model)
    e2, i = [], 0
    while i < len(samples):
        step = int(rng.integers(1, 23))
        e2.extend(chunked.push_samples(samples[i : i + step]))
        i += step

    assert events_text(whole) == events_text(e1) == events_text(e2)


def test_window_classification_matches_offline(deployed_model):
    trial = view_trial(1)
    samples = rasterize(trial, rate_hz=120.0, repeat_to_ms=5800.0)
    events = replay(samples, trial.object, deployed_model)
    offline = dict(window_feature_rows(samples, trial.object))
    assert len(events) > 0
    for e in events:
        fv = offline[e.t_ms]
        if e.window_features is None:
            assert fv is None
            continue
        assert fv == e.window_features  # bit-equal features
        label = deployed_model.predict_one(fv.project(Combination.C4.members))
        assert label.value == e.label.value


def test_window_config_validation():
    with pytest.raises(ValueError):
        WindowConfig(hop_ms=4000.0)
    with pytest.raises(ValueError):
        WindowConfig(min_fixations=0)
    with pytest.raises(ValueError):
        WindowConfig(window_ms=-1.0)
