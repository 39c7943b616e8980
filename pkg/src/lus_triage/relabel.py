"""Active-learning loop: relabel queue, clinician overrides, retraining export.

Frames worth re-annotating are queued by two unsupervised signals: a low
quality label, or a detection set that is exactly pleura and nothing else.
Clinician overrides land in an append-only JSONL log where the latest record
per frame wins; reviewed frames export as a retraining dataset.
"""

from __future__ import annotations

import enum
import json
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .boxes import BBox, Detection, FrameDetections
from .label_format import write_label_file
from .landmarks import ClassIdTable, LandmarkClass
from .scoring import QualityLabel
from .video import VideoAnalysis
from .voc_format import write_voc_xml

EXPORT_FORMATS = ("label-text", "xml")


class QueueReason(enum.Enum):
    LowQuality = "LowQuality"
    PleuraOnly = "PleuraOnly"
    ClinicianFlag = "ClinicianFlag"


class QueueStatus(enum.Enum):
    Pending = "Pending"
    Reviewed = "Reviewed"
    Exported = "Exported"


@dataclass(frozen=True)
class RelabelQueueEntry:
    frame_id: str
    video_id: str
    reason: QueueReason
    enqueued_at: str
    status: QueueStatus


@dataclass(frozen=True)
class Annotation:
    """One corner-form ground-truth box."""

    cls: LandmarkClass
    bbox: BBox


@dataclass(frozen=True)
class OverrideRecord:
    """A whole-frame annotation replacement; never a diff."""

    frame_id: str
    author: str
    created_at: str
    annotations: tuple[Annotation, ...]
    note: str | None = None


class OverrideLogError(ValueError):
    """Raised for unreadable or malformed override-log lines."""


def select_for_relabel(
    videos: Sequence[VideoAnalysis],
    quality_cutoff: QualityLabel = QualityLabel.BelowAverage,
    existing: Iterable[str] = (),
    enqueued_at: str | Callable[[str], str] = "",
) -> list[RelabelQueueEntry]:
    """Queue frames whose quality label is at or below the cutoff, and frames
    that detected pleura alone (the stronger signal, so it names the reason).

    Frames already pending (`existing`) are skipped, keeping re-selection
    idempotent. `enqueued_at` is a fixed timestamp or a per-frame lookup.
    """
    skip = set(existing)
    stamp = enqueued_at if callable(enqueued_at) else (lambda _fid: enqueued_at)
    entries: list[RelabelQueueEntry] = []
    for video in videos:
        for frame in video.frames:
            if frame.frame_id in skip:
                continue
            if frame.present_classes == {LandmarkClass.Pleura}:
                reason = QueueReason.PleuraOnly
            elif frame.quality.label <= quality_cutoff:
                reason = QueueReason.LowQuality
            else:
                continue
            entries.append(
                RelabelQueueEntry(
                    frame_id=frame.frame_id,
                    video_id=video.video_id,
                    reason=reason,
                    enqueued_at=stamp(frame.frame_id),
                    status=QueueStatus.Pending,
                )
            )
    return entries


def record_to_json(record: OverrideRecord) -> dict:
    return {
        "frame_id": record.frame_id,
        "author": record.author,
        "created_at": record.created_at,
        "annotations": [
            {"class": a.cls.name, "bbox": list(a.bbox.as_list())} for a in record.annotations
        ],
        "note": record.note,
    }


def record_from_json(raw: dict, where: str = "override record") -> OverrideRecord:
    try:
        annotations = tuple(
            Annotation(LandmarkClass[a["class"]], BBox(*a["bbox"]))
            for a in raw["annotations"]
        )
        return OverrideRecord(
            frame_id=raw["frame_id"],
            author=raw["author"],
            created_at=raw["created_at"],
            annotations=annotations,
            note=raw.get("note"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise OverrideLogError(f"{where}: {exc}") from exc


class OverrideLog:
    """Append-only JSONL file of override records for one study.

    Replaying the file from empty reproduces the effective state exactly;
    the log is the single source of truth for clinician corrections.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def append(self, record: OverrideRecord) -> None:
        line = json.dumps(record_to_json(record), sort_keys=True)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a") as fh:
            fh.write(line + "\n")

    def records(self) -> list[OverrideRecord]:
        if not self.path.exists():
            return []
        records = []
        for number, line in enumerate(self.path.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise OverrideLogError(f"{self.path} line {number}: {exc}") from exc
            records.append(record_from_json(raw, f"{self.path} line {number}"))
        return records

    def effective(self) -> dict[str, OverrideRecord]:
        """Latest record per frame, in log (= append) order."""
        state: dict[str, OverrideRecord] = {}
        for record in self.records():
            state[record.frame_id] = record
        return state


@dataclass(frozen=True)
class ExportItem:
    """Everything needed to write one frame of a retraining set."""

    frame_id: str
    image: Path | None
    image_size: tuple[int, int]
    annotations: tuple[Annotation, ...]


def export_retraining_set(
    items: Sequence[ExportItem],
    target_dir: str | Path,
    fmt: str = "label-text",
    exported_at: str = "",
    id_table: ClassIdTable | None = None,
) -> dict:
    """Write annotation files (and copy images) for reviewed frames.

    Returns the export manifest: the file listing plus per-class counts.
    """
    if fmt not in EXPORT_FORMATS:
        raise ValueError(f"unknown export format {fmt!r} (expected one of {EXPORT_FORMATS})")
    target = Path(target_dir)
    (target / "labels").mkdir(parents=True, exist_ok=True)
    (target / "images").mkdir(parents=True, exist_ok=True)

    frames_out = []
    class_counts: dict[str, int] = {}
    for item in items:
        detections = tuple(
            Detection(a.bbox, a.cls, 1.0) for a in item.annotations
        )
        frame = FrameDetections(item.frame_id, item.image_size, detections)
        if fmt == "label-text":
            label_rel = f"labels/{item.frame_id}.txt"
            (target / label_rel).write_text(
                write_label_file(frame, with_confidence=False, id_table=id_table)
            )
        else:
            label_rel = f"labels/{item.frame_id}.xml"
            (target / label_rel).write_text(write_voc_xml(frame))
        image_rel = None
        if item.image is not None and item.image.exists():
            image_rel = f"images/{item.image.name}"
            shutil.copyfile(item.image, target / image_rel)
        frames_out.append(
            {"frame_id": item.frame_id, "image": image_rel, "label_file": label_rel}
        )
        for a in item.annotations:
            class_counts[a.cls.name] = class_counts.get(a.cls.name, 0) + 1

    return {
        "schema_version": 1,
        "exported_at": exported_at,
        "format": fmt,
        "frames": frames_out,
        "class_counts": class_counts,
    }
