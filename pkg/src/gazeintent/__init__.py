"""gazeintent: grasping-intention recognition from 2D gaze streams.

Detects fixations in raw gaze data, computes distance/concentration features
against an object's centroid and grasp points, trains and evaluates intention
classifiers, and runs online sliding-window recognition behind a WebSocket
service.
"""

from .core import (
    Fixation,
    FixationDetectorConfig,
    GazeSample,
    ObjectContext,
    TaskLabel,
    Trial,
    UnsortedSamplesError,
    detect_fixations,
)
from .features import (
    Combination,
    FeatureVector,
    InsufficientDataError,
    adf2c,
    compute_features,
    extract,
    grasp_distances,
    var_of_distances,
)
from .learn import (
    EvalReport,
    Hyperparameters,
    ModelKind,
    TrainedModel,
    kfold_cv,
    predict,
    repeated_eval,
    train,
)
from .stats import FTestResult, one_way_f_test
from .stream import IntentionEvent, IntentionLabel, StreamSession, WindowConfig, replay
from .synth import SynthConfig, calibrate_sigma, generate_dataset, generate_trial, rasterize

__version__ = "0.1.0"

__all__ = [
    "Combination",
    "EvalReport",
    "FTestResult",
    "FeatureVector",
    "Fixation",
    "FixationDetectorConfig",
    "GazeSample",
    "Hyperparameters",
    "InsufficientDataError",
    "IntentionEvent",
    "IntentionLabel",
    "ModelKind",
    "ObjectContext",
    "StreamSession",
    "SynthConfig",
    "TaskLabel",
    "TrainedModel",
    "Trial",
    "UnsortedSamplesError",
    "WindowConfig",
    "adf2c",
    "calibrate_sigma",
    "compute_features",
    "detect_fixations",
    "extract",
    "generate_dataset",
    "generate_trial",
    "grasp_distances",
    "kfold_cv",
    "one_way_f_test",
    "predict",
    "rasterize",
    "repeated_eval",
    "replay",
    "train",
    "var_of_distances",
]
