"""Online action recognition from 3D skeleton streams.

Postures are standardized, mapped through a two-layer hierarchy of
self-organizing maps with a time-invariant trace encoding in between,
and classified by a small supervised readout; in parallel the object
being acted on is identified by proximity to the acting hand.
"""

__version__ = "0.1.0"

from .config import (
    Config,
    GeneratorConfig,
    PipelineConfig,
    SomLayerConfig,
    SupervisedConfig,
    load_config,
)
from .errors import SomActionError
from .evaluate import EvalReport, evaluate
from .generate import generate_stream
from .objects import ObjectFrame, pair_by_time, resolve_target
from .pipeline import (
    ActionVerdict,
    RecognizerModel,
    StreamSummary,
    TrainReport,
    load_model,
    recognize,
    run_online,
    save_model,
    train_pipeline,
    verdict_to_json,
)
from .skeleton import BodyPart, Bounds, SkeletonFrame, preprocess_frame
from .som import SomGrid, TrainingSchedule, activity, net_input, winner
from .stream import ActionWindow, ManifestEntry, iter_windows, parse_record
from .supervised import SupervisedLayer
from .trace import ActivityTrace, TraceEncoder, encode, fit_encoder, record_trace

__all__ = [
    "ActionVerdict",
    "ActionWindow",
    "ActivityTrace",
    "BodyPart",
    "Bounds",
    "Config",
    "EvalReport",
    "GeneratorConfig",
    "ManifestEntry",
    "ObjectFrame",
    "PipelineConfig",
    "RecognizerModel",
    "SkeletonFrame",
    "SomActionError",
    "SomGrid",
    "SomLayerConfig",
    "StreamSummary",
    "SupervisedConfig",
    "SupervisedLayer",
    "TraceEncoder",
    "TrainReport",
    "TrainingSchedule",
    "activity",
    "encode",
    "evaluate",
    "fit_encoder",
    "generate_stream",
    "iter_windows",
    "load_config",
    "load_model",
    "net_input",
    "pair_by_time",
    "parse_record",
    "preprocess_frame",
    "recognize",
    "record_trace",
    "resolve_target",
    "run_online",
    "save_model",
    "train_pipeline",
    "verdict_to_json",
    "winner",
]

