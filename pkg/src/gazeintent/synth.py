"""Synthetic trial generator calibrated to the measured gaze statistics.

Grasp trials put an isotropic Gaussian fixation cloud on the index-finger
grasp point; view trials put a wider cloud on the object centroid. Cloud
widths are solved so that the per-trial distance-variance statistic matches
the measured class means (29.85 px^2 grasping, 256.67 px^2 viewing), and the
grasp-point offset from the centroid is solved so that the centroid-distance
feature carries no class signal, reproducing its observed null result.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import optimize, special, stats

from .core import Fixation, GazeSample, TaskLabel, Trial
from .shapes import ALL_SHAPES, TEST_SHAPES, TRAIN_SHAPES, object_context

#: variance of the distance from an isotropic 2D Gaussian draw to its center,
#: per unit sigma^2 (Rayleigh distance distribution)
RAYLEIGH_VAR_COEF = 2.0 - math.pi / 2.0

_CENTROID_BOX = ((180.0, 140.0), (460.0, 340.0))  # keeps clouds inside a 640x480 scene


@dataclass(frozen=True)
class SynthConfig:
    """Generator parameters; defaults reproduce the measured statistics."""

    n_per_class: int = 320
    n_test_per_class: int = 30
    grasp_count_mean: float = 8.18
    grasp_count_std: float = 0.99
    view_count_mean: float = 8.62
    view_count_std: float = 0.76
    target_var_grasp: float = 29.85
    target_var_view: float = 256.67
    grasp_anchor: str = "INDEX_POINT"
    seed: int = 0
    train_shapes: tuple[str, ...] = TRAIN_SHAPES
    test_shapes: tuple[str, ...] = TEST_SHAPES

    def __post_init__(self):
        if self.n_per_class < 1 or self.n_test_per_class < 0:
            raise ValueError("trial counts must be positive")
        for name in ("grasp_count_std", "view_count_std", "target_var_grasp", "target_var_view"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.grasp_anchor != "INDEX_POINT":
            raise ValueError("only INDEX_POINT grasp anchoring is supported")
        object.__setattr__(self, "train_shapes", tuple(self.train_shapes))
        object.__setattr__(self, "test_shapes", tuple(self.test_shapes))
        if set(self.train_shapes) & set(self.test_shapes):
            raise ValueError("train and test shape sets must be disjoint")
        unknown = (set(self.train_shapes) | set(self.test_shapes)) - set(ALL_SHAPES)
        if unknown:
            raise ValueError(f"unknown shapes: {sorted(unknown)}")

    def as_dict(self) -> dict:
        return {
            "n_per_class": self.n_per_class,
            "n_test_per_class": self.n_test_per_class,
            "grasp_count_mean": self.grasp_count_mean,
            "grasp_count_std": self.grasp_count_std,
            "view_count_mean": self.view_count_mean,
            "view_count_std": self.view_count_std,
            "target_var_grasp": self.target_var_grasp,
            "target_var_view": self.target_var_view,
            "grasp_anchor": self.grasp_anchor,
            "seed": self.seed,
            "train_shapes": list(self.train_shapes),
            "test_shapes": list(self.test_shapes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SynthConfig":
        d = dict(d)
        for key in ("train_shapes", "test_shapes"):
            if key in d:
                d[key] = tuple(d[key])
        return cls(**d)


def calibrate_sigma(target_var: float) -> float:
    """Per-axis Gaussian sigma whose expected distance-variance is ``target_var``.

    Uses the Rayleigh relation Var(d) = (2 - pi/2) sigma^2, i.e. the
    large-sample limit where the cloud center is known exactly.
    """
    if target_var < 0:
        raise ValueError(f"target_var must be >= 0, got {target_var}")
    return math.sqrt(target_var / RAYLEIGH_VAR_COEF)


def _sigma_for_count(target_var: float, n: int) -> float:
    # Finite-sample correction: with n points the variance statistic is taken
    # against the sample mean and divided by n, which shrinks its expectation
    # by ~(1 - 1/n)^2; widen the cloud to compensate.
    return calibrate_sigma(target_var) / (1.0 - 1.0 / n)


def _count_distribution(mean: float, std: float, lo: int = 2, hi: int = 40):
    """Integer counts from rounding a clamped normal, with exact probabilities."""
    ns = np.arange(lo, hi + 1)
    if std == 0:
        p = (ns == min(max(lo, round(mean)), hi)).astype(float)
        return ns, p
    p = stats.norm.cdf(ns + 0.5, mean, std) - stats.norm.cdf(ns - 0.5, mean, std)
    p[0] += stats.norm.cdf(lo - 0.5, mean, std)
    p[-1] += 1.0 - stats.norm.cdf(hi + 0.5, mean, std)
    return ns, p / p.sum()


def _rice_mean(nu, sigma):
    # mean distance from a fixed point at distance nu to an isotropic
    # Gaussian draw with per-axis std sigma (scaled Laguerre form, stable)
    t = np.asarray(nu, dtype=float) ** 2 / (2.0 * sigma**2)
    return sigma * math.sqrt(math.pi / 2.0) * ((1 + t) * special.i0e(t / 2) + t * special.i1e(t / 2))


def _rice_var(nu, sigma):
    return 2.0 * sigma**2 + np.asarray(nu, dtype=float) ** 2 - _rice_mean(nu, sigma) ** 2


@lru_cache(maxsize=16)
def _grasp_offset(
    target_var_grasp: float,
    target_var_view: float,
    grasp_count_mean: float,
    grasp_count_std: float,
    view_count_mean: float,
    view_count_std: float,
) -> tuple[float, float]:
    """(mean, std) of the per-trial grasp-point offset from the centroid.

    Solved so the grasp-class centroid-distance feature matches the view
    class in both mean and variance: equal means reproduce the non-significant
    centroid-distance result, equal variances keep the feature carrying no
    class signal a distribution-aware classifier could pick up.
    """
    ns_g, pg = _count_distribution(grasp_count_mean, grasp_count_std)
    ns_v, pv = _count_distribution(view_count_mean, view_count_std)
    sig_g = np.array([_sigma_for_count(target_var_grasp, n) for n in ns_g])
    sig_v = np.array([_sigma_for_count(target_var_view, n) for n in ns_v])

    # view-class moments of the per-trial mean distance to the centroid
    m_v = float(np.sum(pv * sig_v * math.sqrt(math.pi / 2.0)))
    var_v = float(
        np.sum(pv * RAYLEIGH_VAR_COEF * sig_v**2 / ns_v)
        + np.sum(pv * (sig_v * math.sqrt(math.pi / 2.0) - m_v) ** 2)
    )

    gh_x, gh_w = np.polynomial.hermite_e.hermegauss(21)
    w = gh_w / gh_w.sum()

    def grasp_moments(r0: float, sr: float) -> tuple[float, float]:
        rs = np.clip(r0 + sr * gh_x, 1e-9, None)
        mean = 0.0
        ex2 = 0.0
        for n, p, s in zip(ns_g, pg, sig_g):
            mu = _rice_mean(rs, s)
            var = _rice_var(rs, s) / n
            mean += p * float(np.sum(w * mu))
            ex2 += p * float(np.sum(w * (var + mu**2)))
        return mean, ex2 - mean**2

    r0, sr = m_v, 0.0
    for _ in range(60):
        r0 = optimize.brentq(lambda r: grasp_moments(r, sr)[0] - m_v, 1e-6, 10.0 * m_v + 100.0)
        gap = var_v - grasp_moments(r0, sr)[1]
        sr_new = math.sqrt(max(sr**2 + gap, 0.0))
        if abs(sr_new - sr) < 1e-9:
            sr = sr_new
            break
        sr = sr_new
    return r0, sr


def grasp_offset(config: SynthConfig) -> tuple[float, float]:
    """Nominal distance and per-trial jitter of the grasp points from the centroid."""
    return _grasp_offset(
        config.target_var_grasp,
        config.target_var_view,
        config.grasp_count_mean,
        config.grasp_count_std,
        config.view_count_mean,
        config.view_count_std,
    )


def _draw_count(rng: np.random.Generator, mean: float, std: float) -> int:
    return max(2, round(float(rng.normal(mean, std))))


def generate_trial(
    task: TaskLabel,
    shape_id: str,
    rng: np.random.Generator,
    config: SynthConfig = SynthConfig(),
    trial_id: str = "trial",
    participant_id: str = "synth",
) -> Trial:
    """One synthetic trial: fixation cloud, timestamps, and object context."""
    task = TaskLabel(task)
    if task not in (TaskLabel.GRASP, TaskLabel.VIEW):
        raise ValueError("task must be GRASP or VIEW")
    r0, sr = grasp_offset(config)

    (x0, y0), (x1, y1) = _CENTROID_BOX
    centroid = (float(rng.uniform(x0, x1)), float(rng.uniform(y0, y1)))
    r_trial = max(1e-6, float(rng.normal(r0, sr)))
    context = object_context(shape_id, centroid, r_trial)

    if task is TaskLabel.GRASP:
        n = _draw_count(rng, config.grasp_count_mean, config.grasp_count_std)
        sigma = _sigma_for_count(config.target_var_grasp, n)
        center = context.grasp_index
    else:
        n = _draw_count(rng, config.view_count_mean, config.view_count_std)
        sigma = _sigma_for_count(config.target_var_view, n)
        center = context.centroid

    pos = rng.normal(loc=center, scale=sigma, size=(n, 2))
    durations = rng.uniform(80.0, 400.0, size=n)
    gaps = rng.uniform(30.0, 80.0, size=n)

    fixations = []
    t = 0.0
    for k in range(n):
        fixations.append(
            Fixation(t_start_ms=t, duration_ms=float(durations[k]), x=float(pos[k, 0]), y=float(pos[k, 1]))
        )
        t += durations[k] + gaps[k]

    return Trial(
        trial_id=trial_id,
        participant_id=participant_id,
        task_label=task,
        fixations=tuple(fixations),
        object=context,
    )


def _generate_set(config: SynthConfig, shapes: tuple[str, ...], n_per_class: int, tag: str, index_base: int):
    trials = []
    k = index_base
    for i in range(n_per_class):
        for task in (TaskLabel.GRASP, TaskLabel.VIEW):
            shape = shapes[i % len(shapes)]
            rng = np.random.default_rng([config.seed, k])  # per-trial stream: (seed, index)
            trials.append(
                generate_trial(
                    task,
                    shape,
                    rng,
                    config,
                    trial_id=f"{tag}-{task.value.lower()}-{i:05d}",
                    participant_id=f"synth-{config.seed}",
                )
            )
            k += 1
    return trials, k


def generate_dataset(config: SynthConfig = SynthConfig()) -> tuple[list[Trial], list[Trial]]:
    """(train, test) trial lists; test trials use only the held-out shapes."""
    train, k = _generate_set(config, config.train_shapes, config.n_per_class, "train", 0)
    test, _ = _generate_set(config, config.test_shapes, config.n_test_per_class, "test", k)
    return train, test


def rasterize(
    trial: Trial,
    rate_hz: float = 120.0,
    confidence: float = 1.0,
    repeat_to_ms: float | None = None,
    gap_ms: float = 50.0,
) -> list[GazeSample]:
    """Expand a trial's fixations into constant-position gaze sample runs.

    Produces the raw-stream view of the trial for end-to-end tests: each
    fixation becomes samples at its position covering its duration; saccade
    gaps carry no samples. With ``repeat_to_ms`` the fixation sequence loops
    (separated by ``gap_ms``) until the stream covers that many milliseconds.
    """
    if rate_hz <= 0:
        raise ValueError("rate_hz must be positive")
    period = 1000.0 / rate_hz
    samples: list[GazeSample] = []
    offset = 0.0
    while True:
        for f in trial.fixations:
            t = offset + f.t_start_ms
            end = t + f.duration_ms
            while t <= end:
                samples.append(GazeSample(t_ms=t, x=f.x, y=f.y, confidence=confidence))
                t += period
        if repeat_to_ms is None or not trial.fixations:
            break
        last = trial.fixations[-1]
        offset += last.t_start_ms + last.duration_ms + gap_ms
        if offset >= repeat_to_ms:
            break
    if repeat_to_ms is not None:
        samples = [s for s in samples if s.t_ms <= repeat_to_ms]
    return samples


def windowed_training_set(
    trials,
    window=None,
    detector=None,
    rate_hz: float = 120.0,
    repeat_to_ms: float = 5800.0,
):
    """Sliding-window features harvested from rasterized replays of trials.

    Returns (list of FeatureVector, list of TaskLabel), one entry per
    classifiable window. Models meant to run behind the live session are
    better trained on these than on whole-trial features: re-detecting
    fixations inside a window merges nearby ones and shifts the feature
    distribution, and this harvest bakes that shift into the training data.
    """
    from .stream import WindowConfig, window_feature_rows
    from .core import FixationDetectorConfig

    window = window or WindowConfig()
    detector = detector or FixationDetectorConfig()
    features, labels = [], []
    for trial in trials:
        samples = rasterize(trial, rate_hz=rate_hz, repeat_to_ms=repeat_to_ms)
        for _, fv in window_feature_rows(samples, trial.object, window, detector):
            if fv is not None:
                features.append(fv)
                labels.append(trial.task_label)
    return features, labels
