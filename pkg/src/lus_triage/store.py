"""File-backed study store behind the HTTP service and CLI.

Layout: one directory per study under a root, each holding manifest.json,
the referenced image/label files, an append-only overrides.jsonl, and an
exports/ directory of retraining-set manifests. Every piece of served state
is a pure function of those files, so a restarted process answers GETs
identically: timestamps shown on derived resources come from file mtimes,
never from the wall clock.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from PIL import Image, UnidentifiedImageError

from .boxes import BBox, FrameDetections
from .config import PipelineConfig
from .label_format import parse_label_file
from .landmarks import LandmarkClass
from .manifest import FrameRecord, ManifestError, StudyManifest, VideoRecord, load_manifest
from .relabel import (
    Annotation,
    ExportItem,
    OverrideLog,
    OverrideRecord,
    QueueStatus,
    RelabelQueueEntry,
    export_retraining_set,
    select_for_relabel,
)
from .scoring import FrameAnalysis, analyze_frame, quality_score, severity_score
from .video import VideoAnalysis, aggregate_video, report_svg, scan_report

OVERRIDE_LOG_NAME = "overrides.jsonl"
EXPORTS_DIR_NAME = "exports"

# Stand-in when a frame's image file is absent: scoring and IoU are
# scale-invariant, so any positive extent works for label denormalization.
UNKNOWN_IMAGE_SIZE = (1, 1)


class StudyNotFound(KeyError):
    pass


class VideoNotFound(KeyError):
    pass


class FrameNotFound(KeyError):
    pass


class OverrideValidationError(ValueError):
    pass


def rfc3339(timestamp: float) -> str:
    """Seconds-precision UTC timestamp string."""
    stamp = datetime.fromtimestamp(timestamp, tz=timezone.utc)
    return stamp.isoformat(timespec="seconds").replace("+00:00", "Z")


def utc_now() -> str:
    return rfc3339(datetime.now(tz=timezone.utc).timestamp())


def probe_image_size(path: Path) -> tuple[int, int] | None:
    try:
        with Image.open(path) as image:
            return image.size
    except (OSError, UnidentifiedImageError):
        return None


@dataclass(frozen=True)
class FrameInfo:
    """Everything the store knows about one frame."""

    video_id: str
    record: FrameRecord
    image_path: Path | None
    image_size: tuple[int, int]
    analysis: FrameAnalysis
    ground_truth: tuple[Annotation, ...] | None
    enqueued_at: str


@dataclass
class StudyState:
    """Immutable snapshot derived from one study's files."""

    study: StudyManifest
    directory: Path
    videos: dict[str, VideoAnalysis]
    frames: dict[str, FrameInfo]
    overrides: dict[str, OverrideRecord]
    exported_ids: frozenset[str]
    queue: list[RelabelQueueEntry]
    generated_at: str


def _mtime(path: Path) -> float:
    return path.stat().st_mtime


def _parse_labels(
    directory: Path,
    rel: str | None,
    frame_id: str,
    image_size: tuple[int, int],
    expects_confidence: bool,
    config: PipelineConfig,
) -> FrameDetections:
    if rel is None:
        return FrameDetections(frame_id, image_size)
    path = directory / rel
    if not path.exists():
        return FrameDetections(frame_id, image_size)
    return parse_label_file(
        path.read_text(),
        image_size,
        expects_confidence=expects_confidence,
        frame_id=frame_id,
        id_table=config.id_table,
    )


def build_state(directory: Path, config: PipelineConfig) -> StudyState:
    """Derive a study's full served state from its directory contents."""
    study = load_manifest(directory / "manifest.json")
    manifest_mtime = _mtime(directory / "manifest.json")
    input_mtimes = [manifest_mtime]

    frames: dict[str, FrameInfo] = {}
    videos: dict[str, VideoAnalysis] = {}
    for video in study.videos:
        analyses: list[FrameAnalysis] = []
        for record in video.frames:
            image_path = directory / record.image
            size = probe_image_size(image_path) or UNKNOWN_IMAGE_SIZE
            detections = _parse_labels(
                directory, record.detections, record.frame_id, size, True, config
            )
            analysis = analyze_frame(
                detections,
                config.confidence_threshold,
                config.nms_iou_threshold,
                artifact_requires_pleura=config.artifact_requires_pleura,
            )
            ground_truth: tuple[Annotation, ...] | None = None
            if record.ground_truth is not None and (directory / record.ground_truth).exists():
                gt_frame = _parse_labels(
                    directory, record.ground_truth, record.frame_id, size, False, config
                )
                ground_truth = tuple(Annotation(d.cls, d.bbox) for d in gt_frame.detections)
                input_mtimes.append(_mtime(directory / record.ground_truth))
            if record.detections is not None and (directory / record.detections).exists():
                enqueue_stamp = _mtime(directory / record.detections)
                input_mtimes.append(enqueue_stamp)
            else:
                enqueue_stamp = manifest_mtime
            frames[record.frame_id] = FrameInfo(
                video_id=video.video_id,
                record=record,
                image_path=image_path if image_path.exists() else None,
                image_size=size,
                analysis=analysis,
                ground_truth=ground_truth,
                enqueued_at=rfc3339(enqueue_stamp),
            )
            analyses.append(analysis)
        videos[video.video_id] = aggregate_video(
            video.video_id, analyses, config.summary_quality_min
        )

    log = OverrideLog(directory / OVERRIDE_LOG_NAME)
    overrides = log.effective()
    if log.path.exists():
        input_mtimes.append(_mtime(log.path))

    exported_ids = set()
    exports_dir = directory / EXPORTS_DIR_NAME
    if exports_dir.is_dir():
        for manifest_path in sorted(exports_dir.glob("*.json")):
            payload = json.loads(manifest_path.read_text())
            for entry in payload.get("frames", []):
                exported_ids.add(entry["frame_id"])

    selected = select_for_relabel(
        [videos[v.video_id] for v in study.videos],
        quality_cutoff=config.relabel_quality_cutoff,
        enqueued_at=lambda fid: frames[fid].enqueued_at,
    )
    queue = []
    for entry in selected:
        if entry.frame_id in exported_ids:
            status = QueueStatus.Exported
        elif entry.frame_id in overrides:
            status = QueueStatus.Reviewed
        else:
            status = QueueStatus.Pending
        queue.append(
            RelabelQueueEntry(
                entry.frame_id, entry.video_id, entry.reason, entry.enqueued_at, status
            )
        )

    return StudyState(
        study=study,
        directory=directory,
        videos=videos,
        frames=frames,
        overrides=overrides,
        exported_ids=frozenset(exported_ids),
        queue=queue,
        generated_at=rfc3339(max(input_mtimes)),
    )


def _videos_by_location(state: StudyState) -> dict[int, list[VideoAnalysis]]:
    by_location: dict[int, list[VideoAnalysis]] = {}
    for video in state.study.videos:
        if video.scan_location is not None:
            by_location.setdefault(video.scan_location, []).append(
                state.videos[video.video_id]
            )
    return by_location


def report_dict(state: StudyState) -> dict:
    built = scan_report(state.study.study_id, _videos_by_location(state), state.generated_at)
    return {
        "schema_version": 1,
        "study_id": built.study_id,
        "generated_at": built.generated_at,
        "locations": {
            str(loc): {
                "location": result.location,
                "video_severity": result.video_severity,
                "color": result.color.value,
                "boxplot": result.boxplot.as_dict() if result.boxplot else None,
            }
            for loc, result in built.locations.items()
        },
    }


def report_svg_text(state: StudyState) -> str:
    return report_svg(
        scan_report(state.study.study_id, _videos_by_location(state), state.generated_at)
    )


class StudyStore:
    """Loads studies from disk and serializes all mutations per study."""

    def __init__(
        self,
        root: str | Path,
        config: PipelineConfig | None = None,
        clock=utc_now,
    ):
        self.root = Path(root)
        if not self.root.is_dir():
            raise ManifestError(f"store root {self.root} is not a directory")
        self.config = config or PipelineConfig()
        self._clock = clock
        self._cache: dict[str, tuple[tuple, StudyState]] = {}
        self._cache_lock = threading.Lock()
        self._study_locks: dict[str, threading.Lock] = {}

    # -- discovery -------------------------------------------------------

    def _study_dirs(self) -> dict[str, Path]:
        found: dict[str, Path] = {}
        for manifest_path in sorted(self.root.glob("*/manifest.json")):
            study_id = load_manifest(manifest_path).study_id
            if study_id in found:
                raise ManifestError(f"duplicate study_id {study_id!r} under {self.root}")
            found[study_id] = manifest_path.parent
        return found

    def study_ids(self) -> list[str]:
        return sorted(self._study_dirs())

    def _study_dir(self, study_id: str) -> Path:
        directory = self._study_dirs().get(study_id)
        if directory is None:
            raise StudyNotFound(study_id)
        return directory

    def _lock_for(self, study_id: str) -> threading.Lock:
        with self._cache_lock:
            return self._study_locks.setdefault(study_id, threading.Lock())

    # -- state derivation --------------------------------------------------

    def _signature(self, directory: Path) -> tuple:
        parts = []
        for path in sorted(directory.rglob("*")):
            if path.is_file():
                stat = path.stat()
                parts.append((str(path), stat.st_mtime_ns, stat.st_size))
        return tuple(parts)

    def state(self, study_id: str) -> StudyState:
        directory = self._study_dir(study_id)
        signature = self._signature(directory)
        with self._cache_lock:
            cached = self._cache.get(study_id)
            if cached is not None and cached[0] == signature:
                return cached[1]
        state = self._build_state(directory)
        with self._cache_lock:
            self._cache[study_id] = (signature, state)
        return state

    def _build_state(self, directory: Path) -> StudyState:
        return build_state(directory, self.config)

    # -- JSON views --------------------------------------------------------

    def study_summaries(self) -> list[dict]:
        summaries = []
        for study_id in self.study_ids():
            state = self.state(study_id)
            summaries.append(
                {
                    "study_id": study_id,
                    "probe_type": state.study.probe_type,
                    "video_count": len(state.study.videos),
                    "frame_count": len(state.frames),
                    "pending_reviews": sum(
                        1 for e in state.queue if e.status is QueueStatus.Pending
                    ),
                }
            )
        return summaries

    def report(self, study_id: str) -> dict:
        return report_dict(self.state(study_id))

    def report_svg(self, study_id: str) -> str:
        return report_svg_text(self.state(study_id))

    def _video_record(self, state: StudyState, video_id: str) -> VideoRecord:
        for video in state.study.videos:
            if video.video_id == video_id:
                return video
        raise VideoNotFound(video_id)

    def video(self, study_id: str, video_id: str) -> dict:
        state = self.state(study_id)
        record = self._video_record(state, video_id)
        analysis = state.videos[video_id]
        return {
            "schema_version": 1,
            "study_id": study_id,
            "video_id": video_id,
            "scan_location": record.scan_location,
            "fps": record.fps,
            "video_severity": analysis.video_severity,
            "diagnosis": analysis.diagnosis.value,
            "worst_frame_id": analysis.worst_frame_id,
            "summary_frame_ids": list(analysis.summary_frame_ids),
            "frames": [
                {
                    "frame_id": f.frame_id,
                    "severity_score": f.severity.score,
                    "severity_class": f.severity.severity_class,
                    "quality_score": f.quality.score,
                    "quality_label": f.quality.label.name,
                    "overridden": f.frame_id in state.overrides,
                }
                for f in analysis.frames
            ],
        }

    def _display_scores(self, state: StudyState, frame_id: str) -> tuple:
        """Quality/severity shown for a frame: override-aware, else pipeline."""
        info = state.frames[frame_id]
        override = state.overrides.get(frame_id)
        if override is not None:
            present = frozenset(a.cls for a in override.annotations)
            return (
                quality_score(
                    present,
                    artifact_requires_pleura=self.config.artifact_requires_pleura,
                ),
                severity_score(present),
            )
        return info.analysis.quality, info.analysis.severity

    def frame(self, study_id: str, frame_id: str) -> dict:
        state = self.state(study_id)
        info = state.frames.get(frame_id)
        if info is None:
            raise FrameNotFound(frame_id)
        override = state.overrides.get(frame_id)
        if override is not None:
            effective = override.annotations
            source = "override"
        elif info.ground_truth is not None:
            effective = info.ground_truth
            source = "ground-truth"
        else:
            effective = ()
            source = "none"
        quality, severity = self._display_scores(state, frame_id)
        return {
            "schema_version": 1,
            "study_id": study_id,
            "video_id": info.video_id,
            "frame_id": frame_id,
            "image": info.record.image,
            "image_size": list(info.image_size),
            "detections": [
                {
                    "class": d.cls.name,
                    "bbox": list(d.bbox.as_list()),
                    "confidence": d.confidence,
                }
                for d in info.analysis.detections
            ],
            "quality": {
                "score": quality.score,
                "label": quality.label.name,
                "components": sorted(quality.components),
            },
            "severity": {
                "score": severity.score,
                "severity_class": severity.severity_class,
                "driving_class": severity.driving_class.name if severity.driving_class else None,
            },
            "effective_annotations": [
                {"class": a.cls.name, "bbox": list(a.bbox.as_list())} for a in effective
            ],
            "annotation_source": source,
            "overridden": override is not None,
        }

    def frame_image_path(self, study_id: str, frame_id: str) -> Path:
        state = self.state(study_id)
        info = state.frames.get(frame_id)
        if info is None:
            raise FrameNotFound(frame_id)
        if info.image_path is None:
            raise FrameNotFound(f"{frame_id}: image file missing")
        return info.image_path

    def queue(self, study_id: str) -> dict:
        state = self.state(study_id)
        return {
            "schema_version": 1,
            "study_id": study_id,
            "entries": [
                {
                    "frame_id": e.frame_id,
                    "video_id": e.video_id,
                    "reason": e.reason.value,
                    "enqueued_at": e.enqueued_at,
                    "status": e.status.value,
                }
                for e in state.queue
            ],
        }

    # -- mutations -----------------------------------------------------------

    def apply_override(
        self,
        study_id: str,
        frame_id: str,
        author: str,
        annotations: list[dict],
        note: str | None = None,
    ) -> dict:
        with self._lock_for(study_id):
            state = self.state(study_id)
            info = state.frames.get(frame_id)
            if info is None:
                raise FrameNotFound(frame_id)
            parsed: list[Annotation] = []
            width, height = info.image_size
            for i, raw in enumerate(annotations):
                try:
                    cls = LandmarkClass[raw["class"]]
                except KeyError:
                    raise OverrideValidationError(
                        f"annotation {i}: unknown class {raw.get('class')!r}"
                    ) from None
                try:
                    bbox = BBox(*raw["bbox"])
                except (TypeError, ValueError) as exc:
                    raise OverrideValidationError(f"annotation {i}: {exc}") from exc
                if bbox.x_min < 0 or bbox.y_min < 0 or bbox.x_max > width or bbox.y_max > height:
                    raise OverrideValidationError(
                        f"annotation {i}: box {bbox.as_list()} outside image "
                        f"bounds {width}x{height}"
                    )
                parsed.append(Annotation(cls, bbox))
            record = OverrideRecord(
                frame_id=frame_id,
                author=author,
                created_at=self._clock(),
                annotations=tuple(parsed),
                note=note,
            )
            OverrideLog(state.directory / OVERRIDE_LOG_NAME).append(record)
            fresh = self.state(study_id)
            quality, severity = self._display_scores(fresh, frame_id)
            status = next(
                (e.status.value for e in fresh.queue if e.frame_id == frame_id), None
            )
            return {
                "schema_version": 1,
                "record": {
                    "frame_id": record.frame_id,
                    "author": record.author,
                    "created_at": record.created_at,
                    "annotations": [
                        {"class": a.cls.name, "bbox": list(a.bbox.as_list())}
                        for a in record.annotations
                    ],
                    "note": record.note,
                },
                "quality": {"score": quality.score, "label": quality.label.name},
                "severity": {
                    "score": severity.score,
                    "severity_class": severity.severity_class,
                    "driving_class": severity.driving_class.name
                    if severity.driving_class
                    else None,
                },
                "queue_status": status,
            }

    def export(self, study_id: str, fmt: str = "label-text") -> dict:
        with self._lock_for(study_id):
            state = self.state(study_id)
            reviewed = [e for e in state.queue if e.status is QueueStatus.Reviewed]
            items = []
            for entry in reviewed:
                info = state.frames[entry.frame_id]
                override = state.overrides[entry.frame_id]
                items.append(
                    ExportItem(
                        frame_id=entry.frame_id,
                        image=info.image_path,
                        image_size=info.image_size,
                        annotations=override.annotations,
                    )
                )
            exports_dir = state.directory / EXPORTS_DIR_NAME
            exports_dir.mkdir(exist_ok=True)
            number = 1
            while (exports_dir / f"export-{number:04d}.json").exists():
                number += 1
            name = f"export-{number:04d}"
            manifest = export_retraining_set(
                items,
                exports_dir / name,
                fmt=fmt,
                exported_at=self._clock(),
                id_table=self.config.id_table,
            )
            manifest["export_id"] = name
            manifest["study_id"] = study_id
            (exports_dir / f"{name}.json").write_text(
                json.dumps(manifest, indent=2, sort_keys=True) + "\n"
            )
            return manifest
