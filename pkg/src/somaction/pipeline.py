"""Training orchestration and the online recognition runtime.

Training runs in two phases: the first layer organizes over pooled
posture vectors, then, with layer 1 frozen, each window's winner trace
is encoded into an ordered vector; those train the second layer, and
the flattened second-layer activity maps train the supervised readout.

At run time the two streams are folded per window and merged when the
end mark arrives: the skeleton substream drives the action label, the
object substream the acted-on object, and both land in one verdict.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import IO, Callable, Iterable

import numpy as np

from .config import PipelineConfig, pipeline_config_from_dict, pipeline_config_to_dict
from .errors import (
    DegenerateSkeleton,
    DegenerateTriangle,
    EmptyTrainingSet,
    EmptyWindow,
    MissingLabel,
)
from .objects import pair_by_time, resolve_target
from .skeleton import (
    JOINT_NAMES,
    BodyPart,
    Bounds,
    SkeletonFrame,
    attend,
    fit_bounds,
    preprocess_frame,
)
from .som import SomGrid, activity, train as train_som, winner
from .stream import ActionWindow, StreamStats, iter_windows
from .supervised import SupervisedLayer, activate, train as train_supervised
from .trace import ActivityTrace, TraceEncoder, encode, fit_encoder, record_trace

FORMAT_VERSION = 1


def hand_joint_for(part: BodyPart) -> int:
    """The joint used as 'the hand' in the proximity measure.

    Prefers a member joint whose name ends in Hand; a part without one
    (legs, trunk) falls back to its last joint, which is the extremity
    under the default part layout.
    """
    for j in part.joints:
        if JOINT_NAMES[j].endswith("Hand"):
            return j
    return part.joints[-1]


@dataclass
class RecognizerModel:
    """Everything needed to turn a window of frames into a verdict."""

    labels: tuple[str, ...]
    part: BodyPart
    bounds: Bounds
    layer1: SomGrid
    encoder: TraceEncoder
    layer2: SomGrid
    output: SupervisedLayer
    config: PipelineConfig
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        self.labels = tuple(self.labels)
        if self.layer2.dim != self.encoder.dim:
            raise ValueError(
                f"second layer expects {self.layer2.dim}-dim input but the "
                f"encoder produces {self.encoder.dim}"
            )
        rows, cols = self.layer2.shape
        if self.output.dim != rows * cols:
            raise ValueError(
                f"readout expects {self.output.dim}-dim input but the second "
                f"layer activity map has {rows * cols} cells"
            )
        if self.output.labels != self.labels:
            raise ValueError("model labels and readout labels disagree")
        if self.bounds.lo.shape[0] != self.part.dim:
            raise ValueError("bounds dimension does not match the attended part")


@dataclass
class ActionVerdict:
    """Merged result for one action window."""

    label: str
    activations: dict[str, float]
    object_id: int | None
    object_scores: dict[int, float]
    t_start: int
    t_end: int
    frame_count: int
    latency_ms: float | None = None


def verdict_to_json(v: ActionVerdict) -> str:
    return json.dumps(
        {
            "label": v.label,
            "activations": v.activations,
            "object_id": v.object_id,
            "object_scores": {str(k): s for k, s in v.object_scores.items()},
            "t_start": v.t_start,
            "t_end": v.t_end,
            "latency_ms": v.latency_ms,
        }
    )


def _usable_postures(window: ActionWindow, model_part: BodyPart, bounds: Bounds | None):
    """Preprocess and attend every usable skeleton frame of a window.

    Degenerate frames are skipped; if nothing survives, the last
    preprocessing error (or EmptyWindow) is raised.
    """
    frames: list[SkeletonFrame] = []
    last_err: Exception | None = None
    for f in window.skeleton_frames:
        try:
            frames.append(preprocess_frame(f))
        except (DegenerateSkeleton, DegenerateTriangle) as err:
            last_err = err
    if not frames:
        if last_err is not None:
            raise last_err
        raise EmptyWindow("window contains no skeleton frames")
    if bounds is None:
        return frames, None
    return frames, [attend(f, model_part, bounds) for f in frames]


def window_winners(model: RecognizerModel, window: ActionWindow) -> list[tuple[int, int]]:
    """Layer-1 winner per usable frame, in frame order."""
    _, vectors = _usable_postures(window, model.part, model.bounds)
    sigma = model.config.activity_sigma
    return [winner(activity(model.layer1, v, sigma)) for v in vectors]


def window_encoding(model: RecognizerModel, window: ActionWindow) -> tuple[ActivityTrace, np.ndarray]:
    """The window's deduplicated trace and its ordered-vector encoding."""
    trace = record_trace(
        window_winners(model, window), model.layer1.shape, model.config.dedupe_trace
    )
    return trace, encode(trace, model.encoder)


@dataclass
class TrainReport:
    """Table of training-set recognition per label plus convergence logs."""

    labels: tuple[str, ...]
    per_label: dict[str, tuple[int, int]]
    total: int
    recognized: int
    layer1_qe: list[float] = field(repr=False, default_factory=list)
    layer2_qe: list[float] = field(repr=False, default_factory=list)
    supervised_accuracy: list[float] = field(repr=False, default_factory=list)

    @property
    def accuracy(self) -> float:
        return self.recognized / self.total if self.total else 0.0


def train_pipeline(
    windows: list[ActionWindow], config: PipelineConfig
) -> tuple[RecognizerModel, TrainReport]:
    """Fit the full hierarchy on labeled windows.

    Labels are taken from the windows' start marks, ordered by first
    appearance. All randomness (weight init and presentation shuffles)
    derives from config.seed.
    """
    if not windows:
        raise EmptyTrainingSet("no training windows")
    labels: list[str] = []
    for i, w in enumerate(windows):
        if w.label is None:
            raise MissingLabel(f"training window {i} has no label on its start mark")
        if w.label not in labels:
            labels.append(w.label)

    part = BodyPart.named(config.attended_part)
    seeds = np.random.SeedSequence(config.seed).spawn(6)
    rngs = [np.random.default_rng(s) for s in seeds]

    # Phase 1: organize layer 1 over every posture in the training set.
    preprocessed = [_usable_postures(w, part, None)[0] for w in windows]
    bounds = fit_bounds([f for frames in preprocessed for f in frames], part)
    vectors_per_window = [
        [attend(f, part, bounds) for f in frames] for frames in preprocessed
    ]
    pooled = np.array([v for vs in vectors_per_window for v in vs])
    layer1 = SomGrid.random(config.layer1.rows, config.layer1.cols, part.dim, rngs[0])
    layer1_qe = train_som(layer1, pooled, config.layer1.schedule(), rngs[1])

    # Phase 2: freeze layer 1, encode traces, train layer 2 and readout.
    sigma = config.activity_sigma
    traces = [
        record_trace(
            [winner(activity(layer1, v, sigma)) for v in vs],
            layer1.shape,
            config.dedupe_trace,
        )
        for vs in vectors_per_window
    ]
    encoder = fit_encoder(traces)
    ordered = np.array([encode(t, encoder) for t in traces])
    layer2 = SomGrid.random(config.layer2.rows, config.layer2.cols, encoder.dim, rngs[2])
    layer2_qe = train_som(layer2, ordered, config.layer2.schedule(), rngs[3])

    maps = np.array(
        [activity(layer2, v, config.supervised_input_sigma).ravel() for v in ordered]
    )
    output = SupervisedLayer.random(labels, maps.shape[1], rngs[4])
    window_labels = [w.label for w in windows]
    sup_log = train_supervised(
        output,
        maps,
        window_labels,
        rngs[5],
        epochs=config.supervised.epochs,
        beta=config.supervised.beta,
        printed_error_sign=config.supervised.printed_error_sign,
    )

    model = RecognizerModel(
        tuple(labels), part, bounds, layer1, encoder, layer2, output, config
    )

    per_label = {lab: [0, 0] for lab in labels}
    for w in windows:
        got = recognize(model, w).label
        per_label[w.label][0] += 1
        if got == w.label:
            per_label[w.label][1] += 1
    report = TrainReport(
        labels=tuple(labels),
        per_label={k: (n, hit) for k, (n, hit) in per_label.items()},
        total=sum(n for n, _ in per_label.values()),
        recognized=sum(hit for _, hit in per_label.values()),
        layer1_qe=layer1_qe,
        layer2_qe=layer2_qe,
        supervised_accuracy=sup_log,
    )
    return model, report


def recognize(model: RecognizerModel, window: ActionWindow) -> ActionVerdict:
    """Classify one window and resolve its target object.

    The two substreams are processed independently over the same window
    and merged into a single verdict; a window without object records
    yields a verdict with no object.
    """
    _, ordered_vec = window_encoding(model, window)
    amap = activity(model.layer2, ordered_vec, model.config.supervised_input_sigma)
    scores = activate(model.output, amap.ravel())

    object_id: int | None = None
    object_scores: dict[int, float] = {}
    if window.object_frames:
        pairs = pair_by_time(window.skeleton_frames, window.object_frames)
        resolution = resolve_target(
            pairs, hand_joint_for(model.part), model.config.object_aggregate
        )
        object_id = resolution.object_id
        object_scores = resolution.scores

    return ActionVerdict(
        label=scores.best,
        activations=scores.as_dict(),
        object_id=object_id,
        object_scores=object_scores,
        t_start=window.t_start,
        t_end=window.t_end,
        frame_count=len(window.skeleton_frames),
    )


@dataclass
class StreamSummary:
    """What happened during one replay: volume, verdicts, latency."""

    actions: int = 0
    mean_latency_ms: float = 0.0
    p95_latency_ms: float = 0.0
    records: int = 0
    malformed: int = 0
    discarded_frames: int = 0
    open_window_discarded: bool = False


def run_online(
    model: RecognizerModel,
    lines: Iterable[str],
    sink: Callable[[ActionVerdict], None],
) -> StreamSummary:
    """Replay a record stream, emitting one verdict per completed window.

    Latency is wall time from the moment the end mark is seen to the
    verdict being handed to the sink. Malformed lines are skipped (and
    counted); frames outside any window are discarded.
    """
    stats = StreamStats()
    latencies: list[float] = []
    for window in iter_windows(lines, stats):
        t_end_mark = time.perf_counter()
        verdict = recognize(model, window)
        verdict.latency_ms = (time.perf_counter() - t_end_mark) * 1000.0
        latencies.append(verdict.latency_ms)
        sink(verdict)
    summary = StreamSummary(
        actions=len(latencies),
        records=stats.records,
        malformed=stats.malformed,
        discarded_frames=stats.discarded_frames,
        open_window_discarded=stats.open_window_discarded,
    )
    if latencies:
        summary.mean_latency_ms = float(np.mean(latencies))
        summary.p95_latency_ms = float(np.percentile(latencies, 95))
    return summary


def save_model(model: RecognizerModel, fp: IO[str]) -> None:
    """Write the model as one versioned JSON document.

    Weights go out as decimal text that round-trips to the exact same
    float64 values, so save/load cannot perturb verdicts.
    """
    doc = {
        "format_version": model.format_version,
        "labels": list(model.labels),
        "part": {"name": model.part.name, "joints": list(model.part.joints)},
        "bounds": {"lo": model.bounds.lo.tolist(), "hi": model.bounds.hi.tolist()},
        "layer1": _grid_doc(model.layer1),
        "encoder": {"n_segments": model.encoder.n_segments},
        "layer2": _grid_doc(model.layer2),
        "output": {
            "labels": list(model.output.labels),
            "weights": model.output.weights.tolist(),
        },
        "config": pipeline_config_to_dict(model.config),
    }
    json.dump(doc, fp)
    fp.write("\n")


def _grid_doc(grid: SomGrid) -> dict:
    rows, cols = grid.shape
    return {
        "rows": rows,
        "cols": cols,
        "dim": grid.dim,
        "weights": grid.weights.reshape(-1).tolist(),
    }


def _grid_from_doc(doc: dict) -> SomGrid:
    w = np.array(doc["weights"], dtype=float).reshape(doc["rows"], doc["cols"], doc["dim"])
    return SomGrid(w)


def load_model(fp: IO[str]) -> RecognizerModel:
    doc = json.load(fp)
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported model format_version {version!r}")
    part = BodyPart(doc["part"]["name"], tuple(doc["part"]["joints"]))
    return RecognizerModel(
        labels=tuple(doc["labels"]),
        part=part,
        bounds=Bounds(np.array(doc["bounds"]["lo"]), np.array(doc["bounds"]["hi"])),
        layer1=_grid_from_doc(doc["layer1"]),
        encoder=TraceEncoder(int(doc["encoder"]["n_segments"])),
        layer2=_grid_from_doc(doc["layer2"]),
        output=SupervisedLayer(doc["output"]["labels"], np.array(doc["output"]["weights"])),
        config=pipeline_config_from_dict(doc["config"]),
        format_version=version,
    )
