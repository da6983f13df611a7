"""File formats: line-oriented JSON records, written atomically.

Formats (one JSON object per line unless noted):
  gaze stream   {"t_ms", "x", "y", "confidence"}
  fixations     {"t_start_ms", "duration_ms", "x", "y"}
  dataset       optional manifest line {"synth_config": {...}} then one trial
                object per line with the Trial field names
  feature dump  {"trial_id", "task_label", "adf2c", "adf2t", "adf2i", "var",
                 "n_fix", "shape_id"}
  model         single JSON document (see learn.TrainedModel.to_dict)
  report        {"combination", "kind", "testset", "mean_accuracy",
                 "std_accuracy", "n_repeats"}
  event log     {"t_ms", "label", "fired", "features"}
  f-test report {"feature", "pair", "f", "p", "df_between", "df_within",
                 "n_permutations"}
"""
from __future__ import annotations

import json
import os
import tempfile
from typing import Iterable, Sequence

from .core import Fixation, GazeSample, ObjectContext, TaskLabel, Trial
from .features import FeatureVector, compute_features
from .learn import EvalReport, TrainedModel
from .stats import FTestResult
from .stream import IntentionEvent
from .synth import SynthConfig


def write_atomic(path: str, text: str):
    """Write via a temp file and rename, so readers never see partial output."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_lines(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r) + "\n" for r in records)


# ---- gaze streams ----

def sample_to_dict(s: GazeSample) -> dict:
    return {"t_ms": s.t_ms, "x": s.x, "y": s.y, "confidence": s.confidence}


def write_gaze_stream(path: str, samples: Sequence[GazeSample]):
    write_atomic(path, _dump_lines(sample_to_dict(s) for s in samples))


def read_gaze_stream(path: str) -> list[GazeSample]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                out.append(GazeSample(t_ms=d["t_ms"], x=d["x"], y=d["y"], confidence=d["confidence"]))
    return out


# ---- fixations ----

def fixation_to_dict(f: Fixation) -> dict:
    return {"t_start_ms": f.t_start_ms, "duration_ms": f.duration_ms, "x": f.x, "y": f.y}


def fixation_from_dict(d: dict) -> Fixation:
    return Fixation(t_start_ms=d["t_start_ms"], duration_ms=d["duration_ms"], x=d["x"], y=d["y"])


def write_fixations(path: str, fixations: Sequence[Fixation]):
    write_atomic(path, _dump_lines(fixation_to_dict(f) for f in fixations))


def read_fixations(path: str) -> list[Fixation]:
    with open(path) as fh:
        return [fixation_from_dict(json.loads(line)) for line in fh if line.strip()]


# ---- trials and datasets ----

def trial_to_dict(t: Trial) -> dict:
    return {
        "trial_id": t.trial_id,
        "participant_id": t.participant_id,
        "task_label": t.task_label.value,
        "fixations": [fixation_to_dict(f) for f in t.fixations],
        "object": {
            "centroid": list(t.object.centroid),
            "grasp_thumb": list(t.object.grasp_thumb),
            "grasp_index": list(t.object.grasp_index),
            "shape_id": t.object.shape_id,
        },
    }


def trial_from_dict(d: dict) -> Trial:
    obj = d["object"]
    return Trial(
        trial_id=d["trial_id"],
        participant_id=d["participant_id"],
        task_label=TaskLabel(d["task_label"]),
        fixations=tuple(fixation_from_dict(f) for f in d["fixations"]),
        object=ObjectContext(
            centroid=tuple(obj["centroid"]),
            grasp_thumb=tuple(obj["grasp_thumb"]),
            grasp_index=tuple(obj["grasp_index"]),
            shape_id=obj["shape_id"],
        ),
    )


def write_dataset(path: str, trials: Sequence[Trial], config: SynthConfig | None = None):
    records = []
    if config is not None:
        records.append({"synth_config": config.as_dict()})
    records.extend(trial_to_dict(t) for t in trials)
    write_atomic(path, _dump_lines(records))


def read_dataset(path: str) -> tuple[SynthConfig | None, list[Trial]]:
    config = None
    trials = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            if "synth_config" in d:
                config = SynthConfig.from_dict(d["synth_config"])
            else:
                trials.append(trial_from_dict(d))
    return config, trials


# ---- feature dumps ----

def feature_row(trial: Trial, fv: FeatureVector | None = None) -> dict:
    fv = fv if fv is not None else compute_features(trial.fixations, trial.object)
    row = {"trial_id": trial.trial_id, "task_label": trial.task_label.value}
    row.update(fv.as_dict())
    row["shape_id"] = trial.object.shape_id
    return row


def write_feature_dump(path: str, trials: Sequence[Trial]):
    write_atomic(path, _dump_lines(feature_row(t) for t in trials))


def read_feature_dump(path: str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


# ---- models ----

def write_model(path: str, model: TrainedModel):
    write_atomic(path, json.dumps(model.to_dict(), indent=2) + "\n")


def read_model(path: str) -> TrainedModel:
    with open(path) as fh:
        return TrainedModel.from_dict(json.load(fh))


# ---- evaluation reports ----

def _combination_name(comb) -> str:
    return comb.value if hasattr(comb, "value") else "+".join(comb)


def report_rows(results: dict) -> list[dict]:
    rows = []
    for (comb, kind), cell in sorted(
        results.items(), key=lambda kv: (_combination_name(kv[0][0]), kv[0][1].value)
    ):
        for testset in ("test1", "test2"):
            rep: EvalReport | None = cell.get(testset)
            if rep is None:
                continue
            rows.append(
                {
                    "combination": _combination_name(comb),
                    "kind": kind.value,
                    "testset": testset,
                    "mean_accuracy": rep.mean_accuracy,
                    "std_accuracy": rep.std_accuracy,
                    "n_repeats": rep.n_repeats,
                }
            )
    return rows


def write_report(path: str, results: dict):
    write_atomic(path, _dump_lines(report_rows(results)))


def read_report(path: str) -> list[dict]:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


# ---- event logs ----

def event_to_dict(e: IntentionEvent) -> dict:
    return {
        "t_ms": e.t_ms,
        "label": e.label.value,
        "fired": e.fired,
        "features": e.window_features.as_dict() if e.window_features is not None else None,
    }


def write_events(path: str, events: Sequence[IntentionEvent]):
    write_atomic(path, _dump_lines(event_to_dict(e) for e in events))


def events_text(events: Sequence[IntentionEvent]) -> str:
    return _dump_lines(event_to_dict(e) for e in events)


# ---- f-test reports ----

def ftest_row(feature: str, pair: str, r: FTestResult) -> dict:
    return {
        "feature": feature,
        "pair": pair,
        "f": r.f_statistic,
        "p": r.p_value,
        "df_between": r.df_between,
        "df_within": r.df_within,
        "n_permutations": r.n_permutations,
    }


def write_ftest_report(path: str, rows: Sequence[dict]):
    write_atomic(path, _dump_lines(rows))
