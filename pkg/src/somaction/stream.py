"""Line-oriented record streams and window assembly.

A stream is a text file (or any line iterable) with one JSON record per
line. Skeleton and object records carry the two sensor substreams;
mark records delimit action windows the way a hand-operated switch
would. Everything between a start and its end mark belongs to one
action; frames outside any window are discarded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Union

import numpy as np

from .errors import MalformedRecord, UnbalancedMarks
from .objects import ObjectFrame
from .skeleton import SkeletonFrame

MARK_START = "start"
MARK_END = "end"


@dataclass(frozen=True)
class Mark:
    """Window delimiter; start marks may carry the action label."""

    t: int
    action: str
    label: str | None = None


Record = Union[SkeletonFrame, ObjectFrame, Mark]


def parse_record(line: str, line_no: int = 0) -> Record:
    """Decode one stream line, raising MalformedRecord with its line number."""
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as err:
        raise MalformedRecord(f"invalid JSON ({err.msg})", line_no) from None
    if not isinstance(raw, dict):
        raise MalformedRecord("record must be a JSON object", line_no)
    t = raw.get("t")
    if not isinstance(t, (int, float)) or isinstance(t, bool):
        raise MalformedRecord("missing or non-numeric 't'", line_no)
    kind = raw.get("kind")
    try:
        if kind == "skeleton":
            joints = np.asarray(raw["joints"], dtype=float)
            return SkeletonFrame(t, joints)
        if kind == "objects":
            positions = {}
            for entry in raw["objects"]:
                oid = entry["id"]
                if not isinstance(oid, int) or isinstance(oid, bool):
                    raise ValueError(f"object id {oid!r} is not an integer")
                if oid in positions:
                    raise ValueError(f"duplicate object id {oid}")
                positions[oid] = entry["pos"]
            return ObjectFrame(t, positions)
        if kind == "mark":
            action = raw["action"]
            if action not in (MARK_START, MARK_END):
                raise ValueError(f"mark action must be start or end, got {action!r}")
            label = raw.get("label")
            if label is not None and not isinstance(label, str):
                raise ValueError("mark label must be a string")
            return Mark(t, action, label)
    except MalformedRecord:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise MalformedRecord(str(err), line_no) from None
    raise MalformedRecord(f"unknown record kind {kind!r}", line_no)


def serialize_record(rec: Record) -> str:
    """One-line JSON form of a record, inverse of parse_record."""
    if isinstance(rec, SkeletonFrame):
        doc = {"t": rec.t, "kind": "skeleton", "joints": rec.joints.tolist()}
    elif isinstance(rec, ObjectFrame):
        doc = {
            "t": rec.t,
            "kind": "objects",
            "objects": [
                {"id": oid, "pos": rec.positions[oid].tolist()}
                for oid in sorted(rec.positions)
            ],
        }
    elif isinstance(rec, Mark):
        doc = {"t": rec.t, "kind": "mark", "action": rec.action}
        if rec.label is not None:
            doc["label"] = rec.label
    else:
        raise TypeError(f"not a stream record: {type(rec).__name__}")
    return json.dumps(doc)


@dataclass
class ActionWindow:
    """All frames captured between one start mark and its end mark."""

    t_start: int
    t_end: int
    skeleton_frames: list[SkeletonFrame]
    object_frames: list[ObjectFrame]
    label: str | None = None


@dataclass
class StreamStats:
    """Bookkeeping for one pass over a stream."""

    records: int = 0
    malformed: int = 0
    malformed_lines: list[int] = field(default_factory=list)
    windows: int = 0
    discarded_frames: int = 0
    open_window_discarded: bool = False


def iter_windows(
    lines: Iterable[str],
    stats: StreamStats | None = None,
    strict: bool = False,
) -> Iterator[ActionWindow]:
    """Yield complete action windows from a record stream.

    Malformed lines are counted and skipped unless strict is set, in
    which case the MalformedRecord propagates. An end mark without an
    open window, or a second start inside one, raises UnbalancedMarks.
    A window still open at end of stream is dropped and flagged in the
    stats rather than guessed at.
    """
    if stats is None:
        stats = StreamStats()
    open_window: ActionWindow | None = None
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            rec = parse_record(line, line_no)
        except MalformedRecord:
            if strict:
                raise
            stats.malformed += 1
            stats.malformed_lines.append(line_no)
            continue
        stats.records += 1
        if isinstance(rec, Mark):
            if rec.action == MARK_START:
                if open_window is not None:
                    raise UnbalancedMarks(
                        f"line {line_no}: start mark while a window is already open"
                    )
                open_window = ActionWindow(rec.t, rec.t, [], [], rec.label)
            else:
                if open_window is None:
                    raise UnbalancedMarks(f"line {line_no}: end mark without a start")
                open_window.t_end = rec.t
                stats.windows += 1
                yield open_window
                open_window = None
        elif isinstance(rec, SkeletonFrame):
            if open_window is None:
                stats.discarded_frames += 1
            else:
                open_window.skeleton_frames.append(rec)
        else:
            if open_window is None:
                stats.discarded_frames += 1
            else:
                open_window.object_frames.append(rec)
    if open_window is not None:
        stats.open_window_discarded = True


def window_to_records(window: ActionWindow) -> list[Record]:
    """Serialize-ready record list for one window, marks included.

    Frames are interleaved by timestamp (skeleton first on ties), so
    writing these lines reproduces a well-formed single-window stream.
    """
    frames: list[Record] = sorted(
        [*window.skeleton_frames, *window.object_frames],
        key=lambda r: (r.t, isinstance(r, ObjectFrame)),
    )
    start = Mark(window.t_start, MARK_START, window.label)
    end = Mark(window.t_end, MARK_END)
    return [start, *frames, end]


@dataclass(frozen=True)
class ManifestEntry:
    """Ground truth for one window: its position, label and target object."""

    index: int
    label: str
    target_object_id: int


def write_manifest(entries: Iterable[ManifestEntry], fp: IO[str]) -> None:
    for e in entries:
        fp.write(
            json.dumps(
                {"index": e.index, "label": e.label, "target_object_id": e.target_object_id}
            )
            + "\n"
        )


def read_manifest(fp: IO[str]) -> list[ManifestEntry]:
    """Parse a manifest, demanding indexes 0..N-1 in order."""
    entries: list[ManifestEntry] = []
    for line_no, line in enumerate(fp, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            entry = ManifestEntry(
                int(raw["index"]), str(raw["label"]), int(raw["target_object_id"])
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as err:
            raise MalformedRecord(f"bad manifest entry ({err})", line_no) from None
        if entry.index != len(entries):
            raise MalformedRecord(
                f"manifest index {entry.index} out of order (expected {len(entries)})",
                line_no,
            )
        entries.append(entry)
    return entries
