"""Operator command line: gazeintent <subcommand>.

Subcommands: detect, extract, synth, train, eval, ftest, replay, serve.
Stochastic subcommands require an explicit --seed; outputs are written
atomically, so a failed run never leaves a partial file.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import io
from .core import FixationDetectorConfig, ObjectContext, TaskLabel, detect_fixations
from .features import Combination, extract
from .learn import Hyperparameters, ModelKind, repeated_eval, train
from .shapes import GRASP_AXIS
from .stats import one_way_f_test
from .stream import WindowConfig, replay
from .synth import SynthConfig, generate_dataset

_KINDS = {
    "knn": ModelKind.KNN,
    "svm": ModelKind.SVM_LINEAR,
    "sgd": ModelKind.SGD_LOGISTIC,
    "dtree": ModelKind.DECISION_TREE,
}
_COMBINATIONS = {c.value.lower(): c for c in Combination}


def _detector_config(args) -> FixationDetectorConfig:
    return FixationDetectorConfig(
        dispersion_max_deg=args.dispersion_deg,
        px_per_deg=args.px_per_deg,
        dur_min_ms=args.dur_min_ms,
        dur_max_ms=args.dur_max_ms,
        min_confidence=args.min_confidence,
    )


def _add_detector_flags(p: argparse.ArgumentParser):
    p.add_argument("--dispersion-deg", type=float, default=3.01)
    p.add_argument("--px-per-deg", type=float, default=30.0)
    p.add_argument("--dur-min-ms", type=float, default=80.0)
    p.add_argument("--dur-max-ms", type=float, default=400.0)
    p.add_argument("--min-confidence", type=float, default=0.6)


def _cmd_detect(args) -> int:
    samples = io.read_gaze_stream(args.input)
    fixations = detect_fixations(samples, _detector_config(args))
    io.write_fixations(args.output, fixations)
    print(f"wrote {len(fixations)} fixations to {args.output}")
    return 0


def _cmd_extract(args) -> int:
    _, trials = io.read_dataset(args.input)
    io.write_feature_dump(args.output, trials)
    print(f"wrote {len(trials)} feature rows to {args.output}")
    return 0


def _cmd_synth(args) -> int:
    config = SynthConfig(n_per_class=args.n, n_test_per_class=args.n_test, seed=args.seed)
    train_trials, test_trials = generate_dataset(config)
    io.write_dataset(args.out_train, train_trials, config)
    io.write_dataset(args.out_test, test_trials, config)
    print(f"wrote {len(train_trials)} train trials to {args.out_train}, "
          f"{len(test_trials)} test trials to {args.out_test}")
    return 0


def _cmd_train(args) -> int:
    _, trials = io.read_dataset(args.input)
    combination = _COMBINATIONS[args.combination]
    if args.windowed:
        from .synth import windowed_training_set

        fvs, labels = windowed_training_set(trials)
        x = np.stack([fv.project(combination.members) for fv in fvs])
    else:
        x = np.stack([extract(t, combination) for t in trials])
        labels = [t.task_label for t in trials]
    hyper = Hyperparameters(knn_k=args.k, svm_lambda=args.svm_lambda,
                            epochs=args.epochs, max_depth=args.max_depth)
    model = train(_KINDS[args.kind], x, labels, combination, seed=args.seed, hyper=hyper)
    io.write_model(args.output, model)
    print(f"wrote {model.kind.value} / {combination.value} model to {args.output}")
    return 0


def _cmd_eval(args) -> int:
    _, trials = io.read_dataset(args.input)
    test2 = None
    if args.test2:
        _, test2 = io.read_dataset(args.test2)
    if args.grid == "all":
        combinations = tuple(Combination)
        kinds = tuple(ModelKind)
    else:
        combinations = (_COMBINATIONS[args.combination],)
        kinds = (_KINDS[args.kind],)
    results = repeated_eval(
        trials, test2, combinations, kinds,
        n_repeats=args.repeats, k=args.folds, seed=args.seed,
    )
    io.write_report(args.output, results)
    for row in io.report_rows(results):
        print(f"{row['combination']} {row['kind']:13s} {row['testset']}: "
              f"{row['mean_accuracy']:.3f} +/- {row['std_accuracy']:.3f}")
    print(f"wrote report to {args.output}")
    return 0


def _cmd_ftest(args) -> int:
    rows_in = io.read_feature_dump(args.input)
    if not rows_in:
        raise ValueError("empty feature dump")
    pairs = {"grasp_vs_view": lambda r: True}
    if all(r.get("shape_id") in GRASP_AXIS for r in rows_in):
        pairs["vertical_grasp_vs_view"] = lambda r: GRASP_AXIS[r["shape_id"]] == "v"
        pairs["horizontal_grasp_vs_view"] = lambda r: GRASP_AXIS[r["shape_id"]] == "h"
    out_rows = []
    for feature in ("adf2c", "adf2i", "adf2t", "var"):
        for pair, grasp_filter in pairs.items():
            grasp = [r[feature] for r in rows_in
                     if r["task_label"] == TaskLabel.GRASP.value and grasp_filter(r)]
            view = [r[feature] for r in rows_in if r["task_label"] == TaskLabel.VIEW.value]
            if len(grasp) < 2 or len(view) < 2:
                continue
            result = one_way_f_test([grasp, view], n_permutations=args.permutations,
                                    rng=np.random.default_rng(args.seed))
            out_rows.append(io.ftest_row(feature, pair, result))
            print(f"{feature:6s} {pair:26s} F={result.f_statistic:10.3f} p={result.p_value:.4g}")
    io.write_ftest_report(args.output, out_rows)
    print(f"wrote f-test report to {args.output}")
    return 0


def _cmd_replay(args) -> int:
    samples = io.read_gaze_stream(args.input)
    with open(args.context) as fh:
        ctx = json.load(fh)
    context = ObjectContext(
        centroid=tuple(ctx["centroid"]),
        grasp_thumb=tuple(ctx["grasp_thumb"]),
        grasp_index=tuple(ctx["grasp_index"]),
        shape_id=ctx.get("shape_id", ""),
    )
    model = io.read_model(args.model)
    window = WindowConfig(
        window_ms=args.window_ms,
        hop_ms=args.hop_ms,
        min_fixations=args.min_fixations,
        consecutive_required=args.consecutive,
        refractory_ms=args.refractory_ms,
    )
    events = replay(samples, context, model, window, _detector_config(args))
    io.write_events(args.output, events)
    fired = sum(1 for e in events if e.fired)
    print(f"wrote {len(events)} events ({fired} fired) to {args.output}")
    return 0


def _cmd_serve(args) -> int:
    from .service import ModelStore, run_server

    store = ModelStore.from_dir(args.models, args.default)
    print(f"serving {len(store.models)} model(s) on {args.host}:{args.port}")
    run_server(store, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gazeintent")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="gaze stream file -> fixation file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    _add_detector_flags(p)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("extract", help="trial dataset -> feature dump")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("synth", help="generate a calibrated synthetic dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=320, help="trials per class (training set)")
    p.add_argument("--n-test", type=int, default=30, help="trials per class (held-out shapes)")
    p.add_argument("--out-train", default="dataset_train.jsonl")
    p.add_argument("--out-test", default="dataset_test.jsonl")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="dataset + kind + combination -> model file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--kind", choices=sorted(_KINDS), default="knn")
    p.add_argument("--combination", choices=sorted(_COMBINATIONS), default="c4")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--k", type=int, default=5, help="KNN neighbor count")
    p.add_argument("--svm-lambda", type=float, default=1e-3)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--max-depth", type=int, default=5)
    p.add_argument("--windowed", action="store_true",
                   help="train on sliding-window features from rasterized replays "
                        "(recommended for models deployed behind replay/serve)")
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="dataset (+test2) -> accuracy report table")
    p.add_argument("--input", required=True)
    p.add_argument("--test2", default=None)
    p.add_argument("--output", required=True)
    p.add_argument("--grid", choices=["all", "one"], default="all")
    p.add_argument("--combination", choices=sorted(_COMBINATIONS), default="c4")
    p.add_argument("--kind", choices=sorted(_KINDS), default="knn")
    p.add_argument("--repeats", type=int, default=100)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("ftest", help="feature dump -> per-feature significance report")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--permutations", type=int, default=10000)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(func=_cmd_ftest)

    p = sub.add_parser("replay", help="gaze stream + context + model -> event log")
    p.add_argument("--input", required=True)
    p.add_argument("--context", required=True, help="JSON file with the object context")
    p.add_argument("--model", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--window-ms", type=float, default=3000.0)
    p.add_argument("--hop-ms", type=float, default=500.0)
    p.add_argument("--min-fixations", type=int, default=2)
    p.add_argument("--consecutive", type=int, default=2)
    p.add_argument("--refractory-ms", type=float, default=2000.0)
    _add_detector_flags(p)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("serve", help="start the streaming recognition service")
    p.add_argument("--models", required=True, help="directory of model .json files")
    p.add_argument("--default", default=None, help="model id used when init names none")
    p.add_argument("--host", default=os.environ.get("GAZEINTENT_HOST", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(os.environ.get("GAZEINTENT_PORT", "8099")))
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
