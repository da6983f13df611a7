"""Online sliding-window intention recognition.

A session buffers a live gaze stream; every time the stream time crosses a
hop boundary it detects fixations over the trailing window, extracts the
model's feature combination and classifies. A grasp decision fires only
after the configured number of consecutive grasp-labeled windows, and firing
is followed by a refractory pause while the grasp would be executed.

Events are a pure function of the cumulative sample sequence, so feeding
samples one at a time or in batches yields identical event sequences.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .core import (
    Fixation,
    FixationDetectorConfig,
    GazeSample,
    ObjectContext,
    detect_fixations,
)
from .features import FeatureVector, compute_features
from .learn import TrainedModel


class IntentionLabel(str, Enum):
    GRASP = "GRASP"
    VIEW = "VIEW"
    INSUFFICIENT = "INSUFFICIENT"


@dataclass(frozen=True)
class WindowConfig:
    window_ms: float = 3000.0
    hop_ms: float = 500.0
    min_fixations: int = 2
    consecutive_required: int = 2
    refractory_ms: float = 2000.0

    def __post_init__(self):
        if self.window_ms <= 0 or self.hop_ms <= 0:
            raise ValueError("window_ms and hop_ms must be positive")
        if self.hop_ms > self.window_ms:
            raise ValueError("hop_ms must be <= window_ms")
        if self.min_fixations < 1 or self.consecutive_required < 1:
            raise ValueError("min_fixations and consecutive_required must be >= 1")
        if self.refractory_ms < 0:
            raise ValueError("refractory_ms must be >= 0")


@dataclass(frozen=True)
class IntentionEvent:
    """Per-window verdict. ``fired`` marks the debounced grasp decision.

    ``window_features`` is None for INSUFFICIENT windows. ``fixations`` holds
    the window's fixations for downstream consumers (e.g. the service); it is
    not part of the serialized event-log record.
    """

    t_ms: float
    label: IntentionLabel
    window_features: FeatureVector | None
    fired: bool
    fixations: tuple[Fixation, ...] = ()


class StreamSession:
    """One live recognition stream; push_sample calls must be serialized."""

    def __init__(
        self,
        context: ObjectContext,
        model: TrainedModel,
        window: WindowConfig = WindowConfig(),
        detector: FixationDetectorConfig = FixationDetectorConfig(),
    ):
        if context is None or model is None:
            raise ValueError("session needs an ObjectContext and a TrainedModel")
        self.context = context
        self.model = model
        self.window = window
        self.detector = detector
        self._samples: list[GazeSample] = []
        self._last_t: float | None = None
        self._next_boundary = window.window_ms
        self._consecutive = 0
        self._refractory_until = float("-inf")

    def push_sample(self, sample: GazeSample) -> list[IntentionEvent]:
        """Buffer one sample; returns events for every hop boundary it crosses."""
        if self._last_t is not None and sample.t_ms < self._last_t:
            raise ValueError(f"sample time regressed: {sample.t_ms} < {self._last_t}")
        self._last_t = sample.t_ms
        self._samples.append(sample)

        events = []
        while sample.t_ms >= self._next_boundary:
            event = self._evaluate(self._next_boundary)
            if event is not None:
                events.append(event)
            self._next_boundary += self.window.hop_ms
        self._prune()
        return events

    def push_samples(self, samples: Iterable[GazeSample]) -> list[IntentionEvent]:
        events = []
        for s in samples:
            events.extend(self.push_sample(s))
        return events

    def _evaluate(self, boundary: float) -> IntentionEvent | None:
        if boundary <= self._refractory_until:
            return None  # grasp being executed; classification paused
        start = boundary - self.window.window_ms
        window_samples = [s for s in self._samples if start <= s.t_ms <= boundary]
        fixations = detect_fixations(window_samples, self.detector)
        fixations = [f for f in fixations if start <= f.t_mid_ms <= boundary]

        if len(fixations) < self.window.min_fixations:
            self._consecutive = 0
            return IntentionEvent(boundary, IntentionLabel.INSUFFICIENT, None, False, tuple(fixations))

        fv = compute_features(fixations, self.context)
        label = self.model.predict_one(fv.project(self.model.combination.members))
        if label.value == IntentionLabel.GRASP.value:
            self._consecutive += 1
            fired = self._consecutive >= self.window.consecutive_required
            if fired:
                self._consecutive = 0
                self._refractory_until = boundary + self.window.refractory_ms
            return IntentionEvent(boundary, IntentionLabel.GRASP, fv, fired, tuple(fixations))
        self._consecutive = 0
        return IntentionEvent(boundary, IntentionLabel.VIEW, fv, False, tuple(fixations))

    def _prune(self):
        cutoff = self._next_boundary - self.window.window_ms
        if self._samples and self._samples[0].t_ms < cutoff:
            self._samples = [s for s in self._samples if s.t_ms >= cutoff]


def replay(
    samples: Sequence[GazeSample],
    context: ObjectContext,
    model: TrainedModel,
    window: WindowConfig = WindowConfig(),
    detector: FixationDetectorConfig = FixationDetectorConfig(),
) -> list[IntentionEvent]:
    """Run a recorded gaze stream through a fresh session."""
    session = StreamSession(context, model, window, detector)
    return session.push_samples(samples)


def window_feature_rows(
    samples: Sequence[GazeSample],
    context: ObjectContext,
    window: WindowConfig = WindowConfig(),
    detector: FixationDetectorConfig = FixationDetectorConfig(),
) -> list[tuple[float, FeatureVector | None]]:
    """Offline sweep of a recorded stream: (boundary time, features) per window.

    Applies the same windowing rules as a live session but no classifier, no
    debouncing and no refractory pause, so every hop boundary is evaluated.
    Windows with fewer than ``min_fixations`` fixations yield None features.
    """
    if not samples:
        return []
    rows = []
    boundary = window.window_ms
    last_t = samples[-1].t_ms
    while boundary <= last_t:
        start = boundary - window.window_ms
        in_range = [s for s in samples if start <= s.t_ms <= boundary]
        fixations = detect_fixations(in_range, detector)
        fixations = [f for f in fixations if start <= f.t_mid_ms <= boundary]
        if len(fixations) < window.min_fixations:
            rows.append((boundary, None))
        else:
            rows.append((boundary, compute_features(fixations, context)))
        boundary += window.hop_ms
    return rows
