"""Classifiers and the cross-validation protocol.

Four classifier kinds over the five feature combinations: k-nearest
neighbors, linear SVM (hinge loss), logistic regression fitted by SGD, and
a small CART decision tree. All operate on per-feature standardized inputs;
standardization is always fitted on training data only.

The SVM/SGD solver is Pegasos-style subgradient descent on augmented
vectors (bias as a constant feature), learning rate 1/(lambda * t). Each
epoch's end-of-epoch weights are accepted only if they do not increase the
full training objective, which makes the recorded per-epoch loss curve
non-increasing by construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.special import expit

from .core import TaskLabel, Trial
from .features import CANONICAL_ORDER, Combination, compute_features

_POS = TaskLabel.GRASP  # positive class everywhere: ties and zero scores go to GRASP


class ModelKind(str, Enum):
    KNN = "KNN"
    SVM_LINEAR = "SVM_LINEAR"
    SGD_LOGISTIC = "SGD_LOGISTIC"
    DECISION_TREE = "DECISION_TREE"


@dataclass(frozen=True)
class Hyperparameters:
    knn_k: int = 5
    svm_lambda: float = 1e-3
    epochs: int = 200
    max_depth: int = 5
    min_leaf: int = 2


DEFAULT_HYPER = Hyperparameters()


def _labels_to_pm(labels) -> np.ndarray:
    vals = [TaskLabel(l) for l in labels]
    bad = [v for v in vals if v is TaskLabel.UNLABELED]
    if bad:
        raise ValueError("cannot train/evaluate on UNLABELED trials")
    return np.array([1.0 if v is _POS else -1.0 for v in vals])


def _pm_to_labels(pm: np.ndarray) -> list[TaskLabel]:
    return [_POS if v > 0 else TaskLabel.VIEW for v in pm]


@dataclass(frozen=True)
class Standardization:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, x: np.ndarray) -> "Standardization":
        mean = x.mean(axis=0)
        std = x.std(axis=0)
        std = np.where(std > 0, std, 1.0)  # degenerate features pass through
        return cls(mean=mean, std=std)

    def apply(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.std


@dataclass
class TrainedModel:
    """A fitted classifier plus everything needed to reproduce its decisions."""

    kind: ModelKind
    combination: Combination
    standardization: Standardization
    parameters: dict
    loss_history: tuple[float, ...] = ()

    @property
    def n_features(self) -> int:
        return int(self.standardization.mean.shape[0])

    def decision_pm(self, x: np.ndarray) -> np.ndarray:
        """Predictions as +-1 (GRASP positive) for an (n, d) array of raw features."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {x.shape[1]}")
        xs = self.standardization.apply(x)
        if self.kind is ModelKind.KNN:
            return _knn_decide(xs, self.parameters["train_x"], self.parameters["train_y"], self.parameters["k"])
        if self.kind in (ModelKind.SVM_LINEAR, ModelKind.SGD_LOGISTIC):
            score = xs @ self.parameters["weights"] + self.parameters["bias"]
            return np.where(score >= 0, 1.0, -1.0)
        return _tree_decide(xs, self.parameters["nodes"])

    def predict(self, x: np.ndarray) -> list[TaskLabel]:
        return _pm_to_labels(self.decision_pm(x))

    def predict_one(self, vector) -> TaskLabel:
        return self.predict(np.atleast_2d(vector))[0]

    def to_dict(self) -> dict:
        params = {}
        if self.kind is ModelKind.KNN:
            params = {
                "k": self.parameters["k"],
                "train_x": self.parameters["train_x"].tolist(),
                "train_y": self.parameters["train_y"].tolist(),
            }
        elif self.kind in (ModelKind.SVM_LINEAR, ModelKind.SGD_LOGISTIC):
            params = {
                "weights": self.parameters["weights"].tolist(),
                "bias": float(self.parameters["bias"]),
                "lambda": self.parameters["lambda"],
                "epochs": self.parameters["epochs"],
            }
        else:
            params = {"nodes": [dict(n) for n in self.parameters["nodes"]]}
        return {
            "format_version": 1,
            "kind": self.kind.value,
            "combination": self.combination.value,
            "standardization": {
                "mean": self.standardization.mean.tolist(),
                "std": self.standardization.std.tolist(),
            },
            "parameters": params,
            "loss_history": list(self.loss_history),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainedModel":
        if d.get("format_version") != 1:
            raise ValueError(f"unsupported model format_version: {d.get('format_version')!r}")
        kind = ModelKind(d["kind"])
        params = dict(d["parameters"])
        if kind is ModelKind.KNN:
            params["train_x"] = np.asarray(params["train_x"], dtype=float)
            params["train_y"] = np.asarray(params["train_y"], dtype=float)
        elif kind in (ModelKind.SVM_LINEAR, ModelKind.SGD_LOGISTIC):
            params["weights"] = np.asarray(params["weights"], dtype=float)
        return cls(
            kind=kind,
            combination=Combination(d["combination"]),
            standardization=Standardization(
                mean=np.asarray(d["standardization"]["mean"], dtype=float),
                std=np.asarray(d["standardization"]["std"], dtype=float),
            ),
            parameters=params,
            loss_history=tuple(d.get("loss_history", ())),
        )


def _knn_decide(xq: np.ndarray, train_x: np.ndarray, train_y: np.ndarray, k: int) -> np.ndarray:
    d2 = ((xq[:, None, :] - train_x[None, :, :]) ** 2).sum(axis=2)
    nn = np.argsort(d2, axis=1, kind="stable")[:, :k]  # stable: distance ties go to lower index
    votes = train_y[nn].sum(axis=1)
    return np.where(votes >= 0, 1.0, -1.0)


def _tree_decide(xs: np.ndarray, nodes: Sequence[dict]) -> np.ndarray:
    out = np.empty(len(xs))
    for r, v in enumerate(xs):
        idx = 0
        while "label" not in nodes[idx]:
            node = nodes[idx]
            idx = node["left"] if v[node["feature"]] <= node["threshold"] else node["right"]
        out[r] = nodes[idx]["label"]
    return out


def _gini_best_split(x: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best (feature, threshold, weighted_gini) over all midpoint splits, or None."""
    n, d = x.shape
    best = None
    for f in range(d):
        order = np.argsort(x[:, f], kind="stable")
        v = x[order, f]
        pos = np.cumsum(y[order] > 0)
        sizes_l = np.arange(1, n)
        valid = (v[1:] > v[:-1]) & (sizes_l >= min_leaf) & ((n - sizes_l) >= min_leaf)
        if not valid.any():
            continue
        pl = pos[:-1]
        pr = pos[-1] - pl
        sl = sizes_l
        sr = n - sl
        gini_l = 1.0 - (pl / sl) ** 2 - ((sl - pl) / sl) ** 2
        gini_r = 1.0 - (pr / sr) ** 2 - ((sr - pr) / sr) ** 2
        w = (sl * gini_l + sr * gini_r) / n
        w = np.where(valid, w, np.inf)
        i = int(np.argmin(w))  # argmin is the first minimum: lowest threshold on ties
        if best is None or w[i] < best[2] - 1e-15:
            best = (f, float((v[i] + v[i + 1]) / 2.0), float(w[i]))
    return best


def _build_tree(x: np.ndarray, y: np.ndarray, max_depth: int, min_leaf: int) -> list[dict]:
    nodes: list[dict] = []

    def leaf(ys: np.ndarray) -> int:
        nodes.append({"label": 1.0 if ys.sum() >= 0 else -1.0})
        return len(nodes) - 1

    def build(idx: np.ndarray, depth: int) -> int:
        ys = y[idx]
        node_gini = 1.0 - (ys > 0).mean() ** 2 - (ys < 0).mean() ** 2
        if depth >= max_depth or node_gini == 0.0 or len(idx) < 2 * min_leaf:
            return leaf(ys)
        split = _gini_best_split(x[idx], ys, min_leaf)
        if split is None or split[2] >= node_gini - 1e-15:  # no impurity reduction
            return leaf(ys)
        f, thr, _ = split
        mask = x[idx, f] <= thr
        me = len(nodes)
        nodes.append({"feature": int(f), "threshold": thr, "left": -1, "right": -1})
        nodes[me]["left"] = build(idx[mask], depth + 1)
        nodes[me]["right"] = build(idx[~mask], depth + 1)
        return me

    build(np.arange(len(x)), 0)
    return nodes


def _fit_linear_batch(
    xb: np.ndarray,
    yb: np.ndarray,
    loss: str,
    lam: float,
    epochs: int,
    rngs: Sequence[np.random.Generator],
) -> tuple[np.ndarray, np.ndarray]:
    """Fit B independent linear models in lockstep; returns (W, loss_history).

    xb: (B, n, d) standardized features, yb: (B, n) labels in {-1, +1}.
    Each fit shuffles with its own generator. W has an extra trailing bias
    component (constant-one feature).
    """
    b, n, d = xb.shape
    xa = np.concatenate([xb, np.ones((b, n, 1))], axis=2)
    w = np.zeros((b, d + 1))
    hist = np.empty((b, epochs))
    prev_obj = np.full(b, np.inf)
    rows = np.arange(b)
    t = 0
    for ep in range(epochs):
        order = np.stack([rng.permutation(n) for rng in rngs])
        w_before = w.copy()
        for step in range(n):
            t += 1
            lr = 1.0 / (lam * t)
            xs = xa[rows, order[:, step]]
            ys = yb[rows, order[:, step]]
            margin = np.einsum("bd,bd->b", w, xs) * ys
            if loss == "hinge":
                coef = np.where(margin < 1.0, 1.0, 0.0)
            else:
                coef = expit(-margin)
            w *= 1.0 - lr * lam
            w += (lr * coef * ys)[:, None] * xs
        f = np.einsum("bnd,bd->bn", xa, w)
        if loss == "hinge":
            data = np.maximum(0.0, 1.0 - yb * f).mean(axis=1)
        else:
            data = np.logaddexp(0.0, -yb * f).mean(axis=1)
        obj = 0.5 * lam * (w * w).sum(axis=1) + data
        worse = obj > prev_obj
        if worse.any():  # monotone safeguard: reject epochs that regress
            w[worse] = w_before[worse]
            obj = np.where(worse, prev_obj, obj)
        hist[:, ep] = obj
        prev_obj = obj
    return w, hist


def train(
    kind: ModelKind,
    x: np.ndarray,
    labels,
    combination: Combination = Combination.C5,
    seed: int = 0,
    hyper: Hyperparameters = DEFAULT_HYPER,
) -> TrainedModel:
    """Fit one classifier on labeled feature vectors.

    Requires both classes present and consistent dimensions. ``seed`` only
    affects the SVM/SGD sample order; KNN and the tree are deterministic.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("x must be a 2-D array of feature vectors")
    y = _labels_to_pm(labels)
    if len(y) != len(x):
        raise ValueError("x and labels must have the same length")
    if len(np.unique(y)) < 2:
        raise ValueError("training data must contain both classes")

    kind = ModelKind(kind)
    std = Standardization.fit(x)
    xs = std.apply(x)

    if kind is ModelKind.KNN:
        params = {"k": hyper.knn_k, "train_x": xs, "train_y": y}
        return TrainedModel(kind, Combination(combination), std, params)
    if kind in (ModelKind.SVM_LINEAR, ModelKind.SGD_LOGISTIC):
        loss = "hinge" if kind is ModelKind.SVM_LINEAR else "logistic"
        w, hist = _fit_linear_batch(
            xs[None, :, :], y[None, :], loss, hyper.svm_lambda, hyper.epochs,
            [np.random.default_rng([seed, 0])],
        )
        params = {
            "weights": w[0, :-1],
            "bias": float(w[0, -1]),
            "lambda": hyper.svm_lambda,
            "epochs": hyper.epochs,
        }
        return TrainedModel(kind, Combination(combination), std, params, tuple(hist[0]))
    nodes = _build_tree(xs, y, hyper.max_depth, hyper.min_leaf)
    return TrainedModel(kind, Combination(combination), std, {"nodes": nodes})


def predict(model: TrainedModel, vector) -> TaskLabel:
    """Label one feature vector with a trained model."""
    return model.predict_one(vector)


@dataclass(frozen=True)
class FoldDetail:
    test_indices: tuple[int, ...]
    standardization_mean: tuple[float, ...]
    standardization_std: tuple[float, ...]


@dataclass(frozen=True)
class EvalReport:
    """Accuracy summary; ``accuracies`` holds the per-unit values the
    mean/std are computed from (folds for one CV run, repeats otherwise)."""

    accuracies: tuple[float, ...]
    mean_accuracy: float
    std_accuracy: float
    n_repeats: int
    confusion: dict
    folds: tuple[FoldDetail, ...] = ()

    @classmethod
    def from_accuracies(cls, accs, n_repeats, confusion, folds=()) -> "EvalReport":
        a = np.asarray(accs, dtype=float)
        return cls(
            accuracies=tuple(float(v) for v in a),
            mean_accuracy=float(a.mean()),
            std_accuracy=float(a.std()),
            n_repeats=n_repeats,
            confusion=dict(confusion),
            folds=tuple(folds),
        )


def _members_of(combination) -> tuple[str, ...]:
    """A Combination or an explicit tuple of feature names (ablation vectors)."""
    if isinstance(combination, Combination):
        return combination.members
    members = tuple(combination)
    unknown = set(members) - set(CANONICAL_ORDER)
    if unknown or not members:
        raise ValueError(f"unknown feature members: {sorted(unknown)}")
    return members


def _extract_xy(dataset: Sequence[Trial], combination) -> tuple[np.ndarray, np.ndarray]:
    members = _members_of(combination)
    x = np.stack([compute_features(t.fixations, t.object).project(members) for t in dataset])
    y = _labels_to_pm([t.task_label for t in dataset])
    return x, y


def _stratified_folds(y: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """fold id per sample; classes dealt round-robin so folds are near-equal."""
    fold_of = np.empty(len(y), dtype=int)
    for cls in np.unique(y):
        idx = np.where(y == cls)[0]
        idx = idx[rng.permutation(len(idx))]
        fold_of[idx] = np.arange(len(idx)) % k
    return fold_of


def _confusion_update(conf: dict, y_true: np.ndarray, y_pred: np.ndarray):
    conf["tp"] += int(((y_true > 0) & (y_pred > 0)).sum())
    conf["tn"] += int(((y_true < 0) & (y_pred < 0)).sum())
    conf["fp"] += int(((y_true < 0) & (y_pred > 0)).sum())
    conf["fn"] += int(((y_true > 0) & (y_pred < 0)).sum())


def _fit_decide(kind, xs_train, y_train, xs_test, hyper, rng_key) -> np.ndarray:
    """Train on standardized features, return +-1 decisions for xs_test."""
    if kind is ModelKind.KNN:
        return _knn_decide(xs_test, xs_train, y_train, hyper.knn_k)
    if kind is ModelKind.DECISION_TREE:
        nodes = _build_tree(xs_train, y_train, hyper.max_depth, hyper.min_leaf)
        return _tree_decide(xs_test, nodes)
    loss = "hinge" if kind is ModelKind.SVM_LINEAR else "logistic"
    w, _ = _fit_linear_batch(
        xs_train[None], y_train[None], loss, hyper.svm_lambda, hyper.epochs,
        [np.random.default_rng(rng_key)],
    )
    score = xs_test @ w[0, :-1] + w[0, -1]
    return np.where(score >= 0, 1.0, -1.0)


def kfold_cv(
    dataset: Sequence[Trial],
    k: int = 5,
    combination: Combination = Combination.C4,
    kind: ModelKind = ModelKind.KNN,
    rng: np.random.Generator | int = 0,
    hyper: Hyperparameters = DEFAULT_HYPER,
) -> EvalReport:
    """One repeat of shuffled stratified k-fold cross-validation.

    Standardization is refit per fold on the training portion only. Every
    training fold must contain both classes; the shuffle is retried a few
    times if not (only possible for pathologically small classes).
    """
    if len(dataset) < k:
        raise ValueError(f"dataset of {len(dataset)} trials is smaller than k={k}")
    rng = np.random.default_rng(rng) if isinstance(rng, int) else rng
    x, y = _extract_xy(dataset, combination)
    kind = ModelKind(kind)

    for _ in range(100):
        fold_of = _stratified_folds(y, k, rng)
        if all(len(np.unique(y[fold_of != f])) == 2 for f in range(k)):
            break
    else:
        raise ValueError("could not build folds with both classes in every training fold")

    accs, folds = [], []
    conf = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    for f in range(k):
        tr = fold_of != f
        te = ~tr
        std = Standardization.fit(x[tr])
        pred = _fit_decide(kind, std.apply(x[tr]), y[tr], std.apply(x[te]), hyper, rng.integers(2**63))
        accs.append(float((pred == y[te]).mean()))
        _confusion_update(conf, y[te], pred)
        folds.append(FoldDetail(tuple(np.where(te)[0]), tuple(std.mean), tuple(std.std)))
    return EvalReport.from_accuracies(accs, 1, conf, folds)


ALL_COMBINATIONS = tuple(Combination)
ALL_KINDS = tuple(ModelKind)


def repeated_eval(
    dataset: Sequence[Trial],
    test2: Sequence[Trial] | None = None,
    combinations: Sequence[Combination] = ALL_COMBINATIONS,
    kinds: Sequence[ModelKind] = ALL_KINDS,
    n_repeats: int = 100,
    k: int = 5,
    seed: int = 0,
    hyper: Hyperparameters = DEFAULT_HYPER,
) -> dict:
    """The full evaluation grid: repeated CV plus optional held-out shapes.

    Returns {(combination, kind): {"test1": EvalReport, "test2": EvalReport or None}}.
    Test1 accuracies are per-repeat means over folds; test2 accuracies come
    from training on the whole dataset and scoring the held-out trials, once
    per repeat. Deterministic given ``seed``; repeats use independent
    substreams keyed by (seed, cell, repeat).
    """
    if test2 is not None:
        shared = {t.object.shape_id for t in dataset} & {t.object.shape_id for t in test2}
        if shared:
            raise ValueError(f"test2 shapes overlap the dataset shapes: {sorted(shared)}")
    if len(dataset) < k:
        raise ValueError(f"dataset of {len(dataset)} trials is smaller than k={k}")

    combinations = [c if isinstance(c, tuple) else Combination(c) for c in combinations]
    kinds = [ModelKind(kd) for kd in kinds]
    results = {}
    for ci, comb in enumerate(combinations):
        x, y = _extract_xy(dataset, comb)
        x2, y2 = _extract_xy(test2, comb) if test2 is not None else (None, None)
        for ki, kind in enumerate(kinds):
            cell = 1000 * ci + ki
            results[(comb, kind)] = _eval_cell(
                x, y, x2, y2, kind, n_repeats, k, seed, cell, hyper
            )
    return results


def _eval_cell(x, y, x2, y2, kind, n_repeats, k, seed, cell, hyper) -> dict:
    n = len(y)
    plans = []  # (fold_of, rng for solver seeds) per repeat
    for rep in range(n_repeats):
        rng = np.random.default_rng([seed, cell, rep])
        for _ in range(100):
            fold_of = _stratified_folds(y, k, rng)
            if all(len(np.unique(y[fold_of != f])) == 2 for f in range(k)):
                break
        else:
            raise ValueError("could not build folds with both classes in every training fold")
        plans.append((fold_of, rng))

    conf = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
    if kind in (ModelKind.SVM_LINEAR, ModelKind.SGD_LOGISTIC):
        fold_accs = _cv_linear_batched(x, y, plans, k, kind, hyper, conf)
        rep_accs = fold_accs.mean(axis=1)
    else:
        fold_accs = np.empty((n_repeats, k))
        for rep, (fold_of, rng) in enumerate(plans):
            for f in range(k):
                tr = fold_of != f
                te = ~tr
                std = Standardization.fit(x[tr])
                pred = _fit_decide(kind, std.apply(x[tr]), y[tr], std.apply(x[te]), hyper, rng.integers(2**63))
                fold_accs[rep, f] = (pred == y[te]).mean()
                _confusion_update(conf, y[te], pred)
        rep_accs = fold_accs.mean(axis=1)
    test1 = EvalReport.from_accuracies(rep_accs, n_repeats, conf)

    test2_report = None
    if x2 is not None:
        accs2 = []
        conf2 = {"tp": 0, "tn": 0, "fp": 0, "fn": 0}
        std = Standardization.fit(x)
        xs_all, xs_t2 = std.apply(x), std.apply(x2)
        if kind in (ModelKind.KNN, ModelKind.DECISION_TREE):
            pred = _fit_decide(kind, xs_all, y, xs_t2, hyper, 0)  # deterministic fit
            acc = float((pred == y2).mean())
            accs2 = [acc] * n_repeats
            _confusion_update(conf2, y2, pred)
        else:
            loss = "hinge" if kind is ModelKind.SVM_LINEAR else "logistic"
            rngs = [np.random.default_rng([seed, cell, rep, 1]) for rep in range(n_repeats)]
            xb = np.broadcast_to(xs_all, (n_repeats, *xs_all.shape))
            yb = np.broadcast_to(y, (n_repeats, n))
            w, _ = _fit_linear_batch(np.ascontiguousarray(xb), np.ascontiguousarray(yb),
                                     loss, hyper.svm_lambda, hyper.epochs, rngs)
            scores = xs_t2 @ w[:, :-1].T + w[:, -1]  # (n2, B)
            preds = np.where(scores >= 0, 1.0, -1.0)
            accs2 = list((preds == y2[:, None]).mean(axis=0))
            _confusion_update(conf2, y2, preds[:, 0])
        test2_report = EvalReport.from_accuracies(accs2, n_repeats, conf2)
    return {"test1": test1, "test2": test2_report}


def _cv_linear_batched(x, y, plans, k, kind, hyper, conf) -> np.ndarray:
    """All (repeat, fold) SVM/SGD fits batched in lockstep, grouped by train size.

    Results are identical to fitting each fold on its own: per-fold solver
    seeds are drawn in plan order and each fit shuffles with its own stream.
    """
    loss = "hinge" if kind is ModelKind.SVM_LINEAR else "logistic"
    entries = []  # (xs_train, y_train, std, test_mask, rng) in plan order
    for fold_of, rng in plans:
        for f in range(k):
            tr = fold_of != f
            std = Standardization.fit(x[tr])
            entries.append((std.apply(x[tr]), y[tr], std, ~tr, np.random.default_rng(rng.integers(2**63))))

    accs = np.empty(len(entries))
    by_size: dict[int, list[int]] = {}
    for i, e in enumerate(entries):
        by_size.setdefault(len(e[1]), []).append(i)
    for idxs in by_size.values():
        w, _ = _fit_linear_batch(
            np.stack([entries[i][0] for i in idxs]),
            np.stack([entries[i][1] for i in idxs]),
            loss, hyper.svm_lambda, hyper.epochs,
            [entries[i][4] for i in idxs],
        )
        for row, i in enumerate(idxs):
            std, te = entries[i][2], entries[i][3]
            score = std.apply(x[te]) @ w[row, :-1] + w[row, -1]
            pred = np.where(score >= 0, 1.0, -1.0)
            accs[i] = (pred == y[te]).mean()
            _confusion_update(conf, y[te], pred)
    return accs.reshape(len(plans), k)
