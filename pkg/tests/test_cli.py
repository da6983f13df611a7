import json
import os

import pytest

from gazeintent import io
from gazeintent.cli import main
from gazeintent.core import GazeSample


def run(args):
    return main(args)


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """synth -> train once; several tests reuse the artifacts."""
    root = tmp_path_factory.mktemp("cli")
    train_path = str(root / "train.jsonl")
    test_path = str(root / "test.jsonl")
    assert run(["synth", "--seed", "7", "--n", "40", "--n-test", "8",
                "--out-train", train_path, "--out-test", test_path]) == 0
    model_path = str(root / "knn_c4.json")
    assert run(["train", "--input", train_path, "--output", model_path,
                "--kind", "knn", "--combination", "c4", "--seed", "0", "--windowed"]) == 0
    return root, train_path, test_path, model_path


def test_synth_is_deterministic(tmp_path):
    a1, b1 = str(tmp_path / "a1.jsonl"), str(tmp_path / "b1.jsonl")
    a2, b2 = str(tmp_path / "a2.jsonl"), str(tmp_path / "b2.jsonl")
    assert run(["synth", "--seed", "7", "--n", "10", "--out-train", a1, "--out-test", b1]) == 0
    assert run(["synth", "--seed", "7", "--n", "10", "--out-train", a2, "--out-test", b2]) == 0
    assert open(a1, "rb").read() == open(a2, "rb").read()
    assert open(b1, "rb").read() == open(b2, "rb").read()


def test_detect_on_stationary_fixture(tmp_path):
    stream = str(tmp_path / "stream.jsonl")
    out = str(tmp_path / "fix.jsonl")
    io.write_gaze_stream(stream, [GazeSample(t_ms=10.0 * i, x=7.0, y=7.0) for i in range(101)])
    assert run(["detect", "--input", stream, "--output", out]) == 0
    fixations = io.read_fixations(out)
    assert [(f.t_start_ms, f.duration_ms) for f in fixations] == [
        (0.0, 400.0), (410.0, 400.0), (820.0, 180.0),
    ]


def test_extract_writes_contract_fields(workspace, tmp_path):
    _, train_path, _, _ = workspace
    out = str(tmp_path / "features.jsonl")
    assert run(["extract", "--input", train_path, "--output", out]) == 0
    rows = io.read_feature_dump(out)
    assert len(rows) == 80
    assert set(rows[0]) == {"trial_id", "task_label", "adf2c", "adf2t", "adf2i",
                            "var", "n_fix", "shape_id"}


def test_eval_single_cell(workspace, tmp_path):
    _, train_path, test_path, _ = workspace
    out = str(tmp_path / "report.jsonl")
    assert run(["eval", "--input", train_path, "--test2", test_path, "--grid", "one",
                "--combination", "c4", "--kind", "knn", "--repeats", "3",
                "--seed", "1", "--output", out]) == 0
    rows = io.read_report(out)
    assert {r["testset"] for r in rows} == {"test1", "test2"}
    for r in rows:
        assert r["mean_accuracy"] >= 0.85
        assert r["n_repeats"] == 3


def test_ftest_report(workspace, tmp_path):
    _, train_path, _, _ = workspace
    dump = str(tmp_path / "features.jsonl")
    out = str(tmp_path / "ftest.jsonl")
    assert run(["extract", "--input", train_path, "--output", dump]) == 0
    assert run(["ftest", "--input", dump, "--output", out,
                "--permutations", "400", "--seed", "2"]) == 0
    with open(out) as fh:
        rows = [json.loads(l) for l in fh if l.strip()]
    feats = {r["feature"] for r in rows}
    pairs = {r["pair"] for r in rows}
    assert feats == {"adf2c", "adf2i", "adf2t", "var"}
    assert pairs == {"grasp_vs_view", "vertical_grasp_vs_view", "horizontal_grasp_vs_view"}
    by = {(r["feature"], r["pair"]): r for r in rows}
    assert by[("var", "grasp_vs_view")]["p"] < 0.01
    assert by[("adf2i", "grasp_vs_view")]["p"] < 0.01


def test_replay_fires_on_grasp(workspace, tmp_path):
    root, train_path, _, model_path = workspace
    _, trials = io.read_dataset(train_path)
    trial = next(t for t in trials if t.task_label.value == "GRASP")
    from gazeintent.synth import rasterize

    stream = str(tmp_path / "gaze.jsonl")
    io.write_gaze_stream(stream, rasterize(trial, rate_hz=120.0, repeat_to_ms=5800.0))
    ctx_path = str(tmp_path / "ctx.json")
    with open(ctx_path, "w") as fh:
        json.dump({"centroid": list(trial.object.centroid),
                   "grasp_thumb": list(trial.object.grasp_thumb),
                   "grasp_index": list(trial.object.grasp_index),
                   "shape_id": trial.object.shape_id}, fh)
    out = str(tmp_path / "events.jsonl")
    assert run(["replay", "--input", stream, "--context", ctx_path,
                "--model", model_path, "--output", out]) == 0
    with open(out) as fh:
        events = [json.loads(l) for l in fh if l.strip()]
    assert sum(1 for e in events if e["fired"]) == 1


def test_unknown_flag_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["detect", "--nope"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err.lower()


def test_missing_file_leaves_no_output(tmp_path, capsys):
    out = str(tmp_path / "never.jsonl")
    code = run(["detect", "--input", str(tmp_path / "absent.jsonl"), "--output", out])
    assert code == 2
    assert "error" in capsys.readouterr().err.lower()
    assert not os.path.exists(out)


def test_train_rejects_bad_combination(workspace, tmp_path, capsys):
    _, train_path, _, _ = workspace
    with pytest.raises(SystemExit):
        run(["train", "--input", train_path, "--output", str(tmp_path / "m.json"),
             "--combination", "c9", "--seed", "0"])
