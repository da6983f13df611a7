"""Gaze stream model and dispersion-based fixation detection.

A fixation is a stretch of gaze samples whose maximum pairwise distance
stays under a dispersion threshold for long enough. Everything downstream
(features, classification, streaming) works on the fixations produced here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class TaskLabel(str, Enum):
    GRASP = "GRASP"
    VIEW = "VIEW"
    UNLABELED = "UNLABELED"


class UnsortedSamplesError(ValueError):
    """Raised when a gaze stream's timestamps decrease."""


@dataclass(frozen=True)
class GazeSample:
    """One timestamped 2D gaze point in scene pixels.

    ``t_ms`` counts milliseconds since session start; ``confidence`` is the
    tracker's quality estimate in [0, 1].
    """

    t_ms: float
    x: float
    y: float
    confidence: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")
        if self.t_ms < 0:
            raise ValueError(f"t_ms must be >= 0, got {self.t_ms}")


@dataclass(frozen=True)
class Fixation:
    """A detected stable-gaze event.

    Position is the arithmetic mean of the member samples; duration is
    last member time minus first member time.
    """

    t_start_ms: float
    duration_ms: float
    x: float
    y: float

    @property
    def t_mid_ms(self) -> float:
        return self.t_start_ms + self.duration_ms / 2.0

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)


@dataclass(frozen=True)
class FixationDetectorConfig:
    """Detector thresholds.

    The dispersion bound is expressed in degrees of visual angle and
    converted to pixels with ``px_per_deg``; duration bounds are inclusive.
    """

    dispersion_max_deg: float = 3.01
    px_per_deg: float = 30.0
    dur_min_ms: float = 80.0
    dur_max_ms: float = 400.0
    min_confidence: float = 0.6

    def __post_init__(self):
        for name in ("dispersion_max_deg", "px_per_deg", "dur_min_ms", "dur_max_ms", "min_confidence"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.dur_min_ms >= self.dur_max_ms:
            raise ValueError("dur_min_ms must be < dur_max_ms")

    @property
    def dispersion_max_px(self) -> float:
        return self.dispersion_max_deg * self.px_per_deg


@dataclass(frozen=True)
class ObjectContext:
    """Object centroid plus thumb/index grasp points, all in scene pixels."""

    centroid: tuple[float, float]
    grasp_thumb: tuple[float, float]
    grasp_index: tuple[float, float]
    shape_id: str = ""

    def __post_init__(self):
        for name in ("centroid", "grasp_thumb", "grasp_index"):
            p = getattr(self, name)
            if not (math.isfinite(p[0]) and math.isfinite(p[1])):
                raise ValueError(f"{name} must be finite, got {p}")
        if tuple(self.grasp_thumb) == tuple(self.grasp_index):
            raise ValueError("grasp_thumb and grasp_index must differ")


@dataclass(frozen=True)
class Trial:
    """One labeled recording unit: fixations plus the object they relate to."""

    trial_id: str
    participant_id: str
    task_label: TaskLabel
    fixations: tuple[Fixation, ...]
    object: ObjectContext

    def __post_init__(self):
        object.__setattr__(self, "fixations", tuple(self.fixations))
        object.__setattr__(self, "task_label", TaskLabel(self.task_label))
        starts = [f.t_start_ms for f in self.fixations]
        if any(a > b for a, b in zip(starts, starts[1:])):
            raise ValueError("trial fixations must be ordered by t_start_ms")


def _as_arrays(samples) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Accept a GazeSample sequence or an (n, 4) array of t/x/y/confidence."""
    if isinstance(samples, np.ndarray):
        if samples.ndim != 2 or samples.shape[1] != 4:
            raise ValueError("sample array must have shape (n, 4): t_ms, x, y, confidence")
        a = np.asarray(samples, dtype=float)
        return a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    t = np.fromiter((s.t_ms for s in samples), dtype=float, count=len(samples))
    x = np.fromiter((s.x for s in samples), dtype=float, count=len(samples))
    y = np.fromiter((s.y for s in samples), dtype=float, count=len(samples))
    c = np.fromiter((s.confidence for s in samples), dtype=float, count=len(samples))
    return t, x, y, c


def detect_fixations(
    samples: Sequence[GazeSample] | np.ndarray,
    config: FixationDetectorConfig = FixationDetectorConfig(),
) -> list[Fixation]:
    """Detect fixations by greedy dispersion-threshold windowing.

    Samples below ``min_confidence`` are discarded first. A window grows
    left to right while the maximum pairwise distance of its members stays
    within the dispersion bound and its duration stays within ``dur_max_ms``.
    When it can grow no further it is emitted iff its duration reaches
    ``dur_min_ms``; scanning then resumes after the emitted window. A window
    too short to emit is retried from its second sample, so no candidate
    start is skipped.

    Returns fixations sorted by start time, non-overlapping. Empty input or
    all-low-confidence input yields an empty list; decreasing timestamps
    raise :class:`UnsortedSamplesError`.
    """
    t, x, y, conf = _as_arrays(samples)
    if t.size == 0:
        return []
    if np.any(np.diff(t) < 0):
        raise UnsortedSamplesError("gaze samples must be sorted by t_ms")

    keep = conf >= config.min_confidence
    t, x, y = t[keep], x[keep], y[keep]
    n = t.size
    if n == 0:
        return []

    thr_sq = config.dispersion_max_px ** 2
    tl = t.tolist()
    xl = x.tolist()
    yl = y.tolist()
    out: list[Fixation] = []
    i = 0
    j = 0  # window is samples[i..j] inclusive
    # window bounding box, for cheap exact accept/reject of candidates
    xmin = xmax = xl[0]
    ymin = ymax = yl[0]
    while True:
        cand = j + 1
        if cand < n and (tl[cand] - tl[i]) <= config.dur_max_ms:
            cx, cy = xl[cand], yl[cand]
            far_x = max(cx - xmin, xmax - cx)
            far_y = max(cy - ymin, ymax - cy)
            # distance from the candidate to the farthest member lies between
            # the largest axis gap and the far bbox corner; scan only between
            if far_x * far_x + far_y * far_y <= thr_sq:
                ok = True
            elif max(far_x, far_y) ** 2 > thr_sq:
                ok = False
            else:
                dx = x[i : j + 1] - cx
                dy = y[i : j + 1] - cy
                ok = bool(np.max(dx * dx + dy * dy) <= thr_sq)
            if ok:
                j = cand
                xmin = min(xmin, cx)
                xmax = max(xmax, cx)
                ymin = min(ymin, cy)
                ymax = max(ymax, cy)
                continue
        # window can grow no further
        duration = tl[j] - tl[i]
        if duration >= config.dur_min_ms:
            out.append(
                Fixation(
                    t_start_ms=float(tl[i]),
                    duration_ms=float(duration),
                    x=float(np.mean(x[i : j + 1])),
                    y=float(np.mean(y[i : j + 1])),
                )
            )
            i = j + 1
            j = i
        else:
            i += 1
            if i > j:
                j = i
        if i >= n or j >= n:
            break
        xs = x[i : j + 1]
        ys = y[i : j + 1]
        xmin, xmax = float(xs.min()), float(xs.max())
        ymin, ymax = float(ys.min()), float(ys.max())
    return out
