"""The four fixation features and their combinations.

adf2c / adf2t / adf2i are mean Euclidean distances from a trial's fixations
to the object centroid, thumb grasp point and index-finger grasp point.
var is the population variance of the distances from each fixation to the
mean fixation position: small when gaze is concentrated, large when it
wanders over the object.

All sums use math.fsum, so every feature is exactly invariant under
reordering of the fixations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .core import Fixation, ObjectContext, Trial


class InsufficientDataError(ValueError):
    """Raised when an operation needs fixations but got none."""


#: Projection order for combination vectors.
CANONICAL_ORDER = ("adf2c", "adf2i", "adf2t", "var")


class Combination(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"

    @property
    def members(self) -> tuple[str, ...]:
        return _COMBINATION_MEMBERS[self]


_COMBINATION_MEMBERS = {
    Combination.C1: ("adf2t", "var"),
    Combination.C2: ("adf2i", "var"),
    Combination.C3: ("adf2c", "adf2t", "var"),
    Combination.C4: ("adf2c", "adf2i", "var"),
    Combination.C5: ("adf2c", "adf2i", "adf2t", "var"),
}


@dataclass(frozen=True)
class FeatureVector:
    """All four features plus the fixation count for one trial or window."""

    adf2c: float
    adf2t: float
    adf2i: float
    var: float
    n_fix: int

    def as_dict(self) -> dict:
        return {
            "adf2c": self.adf2c,
            "adf2t": self.adf2t,
            "adf2i": self.adf2i,
            "var": self.var,
            "n_fix": self.n_fix,
        }

    def project(self, members: Iterable[str]) -> np.ndarray:
        return np.array([getattr(self, m) for m in members], dtype=float)


def _require_fixations(fixations: Sequence[Fixation]):
    if len(fixations) == 0:
        raise InsufficientDataError("at least one fixation is required")


def _mean_distance_to(fixations: Sequence[Fixation], point: tuple[float, float]) -> float:
    px, py = point
    return math.fsum(math.hypot(f.x - px, f.y - py) for f in fixations) / len(fixations)


def adf2c(fixations: Sequence[Fixation], centroid: tuple[float, float]) -> float:
    """Mean distance from the fixations to the object centroid."""
    _require_fixations(fixations)
    return _mean_distance_to(fixations, centroid)


def grasp_distances(fixations: Sequence[Fixation], context: ObjectContext) -> tuple[float, float]:
    """(adf2t, adf2i): mean distances to the thumb and index grasp points."""
    _require_fixations(fixations)
    return (
        _mean_distance_to(fixations, context.grasp_thumb),
        _mean_distance_to(fixations, context.grasp_index),
    )


def var_of_distances(fixations: Sequence[Fixation]) -> float:
    """Population variance of fixation distances to the mean fixation position."""
    _require_fixations(fixations)
    n = len(fixations)
    ox = math.fsum(f.x for f in fixations) / n
    oy = math.fsum(f.y for f in fixations) / n
    d = [math.hypot(f.x - ox, f.y - oy) for f in fixations]
    m = math.fsum(d) / n
    return math.fsum((di - m) ** 2 for di in d) / n


def compute_features(fixations: Sequence[Fixation], context: ObjectContext) -> FeatureVector:
    """Compute the full FeatureVector for a fixation sequence in one context."""
    _require_fixations(fixations)
    t, i = grasp_distances(fixations, context)
    return FeatureVector(
        adf2c=adf2c(fixations, context.centroid),
        adf2t=t,
        adf2i=i,
        var=var_of_distances(fixations),
        n_fix=len(fixations),
    )


def extract(trial: Trial, combination: Combination) -> np.ndarray:
    """Feature vector of a trial projected onto one combination.

    Members appear in canonical order (adf2c, adf2i, adf2t, var), restricted
    to the combination.
    """
    fv = compute_features(trial.fixations, trial.object)
    return fv.project(Combination(combination).members)
