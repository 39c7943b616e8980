"""Study manifest: binds frames to videos and videos to scan locations."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

PROBE_TYPES = ("convex", "linear", "phased")
SCAN_LOCATIONS = range(1, 15)


class ManifestError(ValueError):
    """Schema violation or inconsistent manifest content."""


@dataclass(frozen=True)
class FrameRecord:
    frame_id: str
    image: str
    detections: str | None = None
    ground_truth: str | None = None


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    scan_location: int | None
    fps: float
    frames: tuple[FrameRecord, ...]


@dataclass(frozen=True)
class StudyManifest:
    study_id: str
    probe_type: str
    subject: dict
    videos: tuple[VideoRecord, ...]
    base_dir: Path = field(default_factory=Path, compare=False)

    def resolve(self, relative: str) -> Path:
        return self.base_dir / relative

    def video(self, video_id: str) -> VideoRecord:
        for v in self.videos:
            if v.video_id == video_id:
                return v
        raise KeyError(video_id)

    def frame_index(self) -> dict[str, tuple[VideoRecord, FrameRecord]]:
        return {f.frame_id: (v, f) for v in self.videos for f in v.frames}


def _require(data: dict, key: str, kind, where: str):
    if key not in data:
        raise ManifestError(f"{where}: missing required field {key!r}")
    value = data[key]
    if not isinstance(value, kind):
        raise ManifestError(f"{where}: field {key!r} has wrong type {type(value).__name__}")
    return value


def parse_manifest(data: dict, base_dir: Path | None = None) -> StudyManifest:
    """Validate a decoded manifest document."""
    if not isinstance(data, dict):
        raise ManifestError("manifest root must be a JSON object")
    study_id = _require(data, "study_id", str, "manifest")
    probe_type = _require(data, "probe_type", str, "manifest")
    if probe_type not in PROBE_TYPES:
        raise ManifestError(f"manifest: probe_type {probe_type!r} not one of {PROBE_TYPES}")
    subject = _require(data, "subject", dict, "manifest")
    raw_videos = _require(data, "videos", list, "manifest")

    videos: list[VideoRecord] = []
    seen_videos: set[str] = set()
    seen_frames: set[str] = set()
    for vi, raw_video in enumerate(raw_videos):
        where = f"videos[{vi}]"
        if not isinstance(raw_video, dict):
            raise ManifestError(f"{where}: must be an object")
        video_id = _require(raw_video, "video_id", str, where)
        if video_id in seen_videos:
            raise ManifestError(f"{where}: duplicate video_id {video_id!r}")
        seen_videos.add(video_id)
        location = raw_video.get("scan_location")
        if location is not None:
            if not isinstance(location, int) or isinstance(location, bool):
                raise ManifestError(f"{where}: scan_location must be an integer or null")
            if location not in SCAN_LOCATIONS:
                raise ManifestError(
                    f"{where}: scan_location {location} outside 1..14"
                )
        fps = _require(raw_video, "fps", (int, float), where)
        if isinstance(fps, bool) or fps <= 0:
            raise ManifestError(f"{where}: fps must be a positive number")
        raw_frames = _require(raw_video, "frames", list, where)
        frames: list[FrameRecord] = []
        for fi, raw_frame in enumerate(raw_frames):
            fwhere = f"{where}.frames[{fi}]"
            if not isinstance(raw_frame, dict):
                raise ManifestError(f"{fwhere}: must be an object")
            frame_id = _require(raw_frame, "frame_id", str, fwhere)
            if frame_id in seen_frames:
                raise ManifestError(f"{fwhere}: duplicate frame_id {frame_id!r}")
            seen_frames.add(frame_id)
            image = _require(raw_frame, "image", str, fwhere)
            detections = raw_frame.get("detections")
            ground_truth = raw_frame.get("ground_truth")
            for key, value in (("detections", detections), ("ground_truth", ground_truth)):
                if value is not None and not isinstance(value, str):
                    raise ManifestError(f"{fwhere}: {key} must be a path or null")
            frames.append(FrameRecord(frame_id, image, detections, ground_truth))
        videos.append(VideoRecord(video_id, location, float(fps), tuple(frames)))

    return StudyManifest(
        study_id=study_id,
        probe_type=probe_type,
        subject=subject,
        videos=tuple(videos),
        base_dir=base_dir or Path(),
    )


def load_manifest(path: str | Path, strict: bool = False) -> StudyManifest:
    """Load and validate a manifest file.

    With `strict`, every referenced image/label file must exist on disk.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from None
    manifest = parse_manifest(data, base_dir=path.parent)
    if strict:
        for video in manifest.videos:
            for frame in video.frames:
                for rel in (frame.image, frame.detections, frame.ground_truth):
                    if rel is not None and not manifest.resolve(rel).exists():
                        raise ManifestError(
                            f"frame {frame.frame_id!r}: referenced file not found: {rel}"
                        )
    return manifest
