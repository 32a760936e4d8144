"""Held-out evaluation: replay a labeled stream and score the verdicts.

The ground truth arrives as a manifest that lists, per window in order,
the action label and the acted-on object id. Evaluation replays the
stream through the online runtime, so the numbers reflect exactly what
a live consumer of the verdict stream would see.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ManifestMismatch
from .pipeline import ActionVerdict, RecognizerModel, StreamSummary, run_online
from .stream import ManifestEntry, iter_windows


@dataclass
class EvalReport:
    """Per-action and aggregate scores for one evaluation run."""

    labels: tuple[str, ...]
    confusion: np.ndarray
    object_total: int
    object_correct: int
    summary: StreamSummary

    def __post_init__(self):
        self.labels = tuple(self.labels)
        c = len(self.labels)
        if self.confusion.shape != (c, c):
            raise ValueError(f"confusion matrix must be {c}x{c}")

    def tested(self, label: str) -> int:
        return int(self.confusion[self.labels.index(label)].sum())

    def recognized(self, label: str) -> int:
        i = self.labels.index(label)
        return int(self.confusion[i, i])

    @property
    def total(self) -> int:
        return int(self.confusion.sum())

    @property
    def total_recognized(self) -> int:
        return int(np.trace(self.confusion))

    @property
    def accuracy(self) -> float:
        return self.total_recognized / self.total if self.total else 0.0

    @property
    def object_accuracy(self) -> float:
        return self.object_correct / self.object_total if self.object_total else 0.0

    def format_table(self) -> str:
        width = max(len("action"), *(len(lab) for lab in self.labels))
        lines = [f"{'action':<{width}}  tested  recognized  accuracy"]
        for lab in self.labels:
            n, k = self.tested(lab), self.recognized(lab)
            pct = 100.0 * k / n if n else 0.0
            lines.append(f"{lab:<{width}}  {n:>6}  {k:>10}  {pct:>7.1f}%")
        lines.append(
            f"{'total':<{width}}  {self.total:>6}  {self.total_recognized:>10}"
            f"  {100.0 * self.accuracy:>7.1f}%"
        )
        lines.append(
            f"objects: {self.object_correct}/{self.object_total}"
            f" ({100.0 * self.object_accuracy:.1f}%)"
        )
        lines.append("confusion (rows true, columns recognized):")
        cell = max(width, *(len(lab) for lab in self.labels), 5)
        header = " " * width + "  " + "  ".join(f"{lab:>{cell}}" for lab in self.labels)
        lines.append(header)
        for i, lab in enumerate(self.labels):
            row = "  ".join(f"{int(v):>{cell}}" for v in self.confusion[i])
            lines.append(f"{lab:<{width}}  {row}")
        lines.append(
            f"latency: mean {self.summary.mean_latency_ms:.1f} ms,"
            f" p95 {self.summary.p95_latency_ms:.1f} ms"
        )
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "per_action": {
                lab: {
                    "tested": self.tested(lab),
                    "recognized": self.recognized(lab),
                    "accuracy": (
                        self.recognized(lab) / self.tested(lab) if self.tested(lab) else 0.0
                    ),
                }
                for lab in self.labels
            },
            "total": {
                "tested": self.total,
                "recognized": self.total_recognized,
                "accuracy": self.accuracy,
            },
            "objects": {
                "tested": self.object_total,
                "recognized": self.object_correct,
                "accuracy": self.object_accuracy,
            },
            "confusion": self.confusion.astype(int).tolist(),
            "latency_ms": {
                "mean": self.summary.mean_latency_ms,
                "p95": self.summary.p95_latency_ms,
            },
        }


def evaluate(
    model: RecognizerModel,
    lines: Iterable[str],
    manifest: Sequence[ManifestEntry],
) -> EvalReport:
    """Score the model's verdicts on a stream against its manifest.

    The manifest must line up with the stream one entry per window, in
    order; a count mismatch, an entry whose label the model does not
    know, or a disagreement with a label embedded in the stream's own
    start marks all raise ManifestMismatch.
    """
    lines = list(lines)
    verdicts: list[ActionVerdict] = []
    summary = run_online(model, lines, verdicts.append)

    if len(verdicts) != len(manifest):
        raise ManifestMismatch(
            f"stream produced {len(verdicts)} windows but the manifest lists "
            f"{len(manifest)}"
        )
    for window, entry in zip(iter_windows(lines), manifest):
        if window.label is not None and window.label != entry.label:
            raise ManifestMismatch(
                f"window {entry.index} is marked {window.label!r} but the "
                f"manifest says {entry.label!r}"
            )

    c = len(model.labels)
    index = {lab: i for i, lab in enumerate(model.labels)}
    confusion = np.zeros((c, c), dtype=int)
    object_correct = 0
    for verdict, entry in zip(verdicts, manifest):
        if entry.label not in index:
            raise ManifestMismatch(f"manifest label {entry.label!r} is unknown to the model")
        confusion[index[entry.label], index[verdict.label]] += 1
        if verdict.object_id == entry.target_object_id:
            object_correct += 1

    return EvalReport(
        labels=model.labels,
        confusion=confusion,
        object_total=len(manifest),
        object_correct=object_correct,
        summary=summary,
    )
