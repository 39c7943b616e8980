"""Shared helpers that materialize synthetic study directories on disk."""

from __future__ import annotations

import json
from pathlib import Path

from PIL import Image

from lus_triage.boxes import BBox, Detection, FrameDetections
from lus_triage.label_format import write_label_file
from lus_triage.landmarks import LandmarkClass

P = LandmarkClass.Pleura
R = LandmarkClass.Rib
S = LandmarkClass.Shadow
A = LandmarkClass.ALines
B = LandmarkClass.BLines
BP = LandmarkClass.BPatch
C = LandmarkClass.Consolidation
AB = LandmarkClass.AirBronchogram

# Class sets that pin each severity score, for planting per-frame scores.
SETS_FOR_SEVERITY = {
    -2: (),
    -1: (P,),
    0: (P, A),
    1: (P, B),
    2: (P, BP),
    3: (P, C),
    4: (P, AB),
}

IMAGE_SIZE = (64, 48)


def detections_for(classes, confidence=0.9):
    """Non-overlapping detections, one per class, inside IMAGE_SIZE."""
    return [
        Detection(BBox(2 + 7 * i, 2, 8 + 7 * i, 8), cls, confidence)
        for i, cls in enumerate(classes)
    ]


def write_frame_files(study_dir: Path, frame_id: str, detections, ground_truth=None):
    """Write the image plus detection/ground-truth label files for one frame."""
    (study_dir / "images").mkdir(exist_ok=True)
    (study_dir / "labels").mkdir(exist_ok=True)
    image_rel = f"images/{frame_id}.png"
    Image.new("L", IMAGE_SIZE, color=40).save(study_dir / image_rel)
    det_rel = f"labels/{frame_id}.txt"
    frame = FrameDetections(frame_id, IMAGE_SIZE, tuple(detections))
    (study_dir / det_rel).write_text(write_label_file(frame, with_confidence=True))
    gt_rel = None
    if ground_truth is not None:
        (study_dir / "gt").mkdir(exist_ok=True)
        gt_rel = f"gt/{frame_id}.txt"
        gt_frame = FrameDetections(frame_id, IMAGE_SIZE, tuple(ground_truth))
        (study_dir / gt_rel).write_text(write_label_file(gt_frame, with_confidence=False))
    return image_rel, det_rel, gt_rel


def write_study(root: Path, study_id: str, videos, probe_type: str = "convex") -> Path:
    """Create a study directory from video specs.

    Each video spec: (video_id, scan_location, frames) where frames is a
    list of either a severity score (int; planted via SETS_FOR_SEVERITY) or
    a dict {"classes": [...], "confidence": float, "ground_truth": [...]}.
    """
    study_dir = root / study_id
    study_dir.mkdir(parents=True)
    manifest_videos = []
    for video_id, scan_location, frames in videos:
        frame_entries = []
        for index, spec in enumerate(frames):
            frame_id = f"{video_id}_f{index}"
            if isinstance(spec, int):
                spec = {"classes": SETS_FOR_SEVERITY[spec]}
            detections = detections_for(
                spec["classes"], confidence=spec.get("confidence", 0.9)
            )
            ground_truth = None
            if spec.get("ground_truth") is not None:
                ground_truth = [
                    Detection(d.bbox, d.cls, 1.0)
                    for d in detections_for(spec["ground_truth"])
                ]
            image_rel, det_rel, gt_rel = write_frame_files(
                study_dir, frame_id, detections, ground_truth
            )
            frame_entries.append(
                {
                    "frame_id": frame_id,
                    "image": image_rel,
                    "detections": det_rel,
                    "ground_truth": gt_rel,
                }
            )
        manifest_videos.append(
            {
                "video_id": video_id,
                "scan_location": scan_location,
                "fps": 20,
                "frames": frame_entries,
            }
        )
    manifest = {
        "study_id": study_id,
        "probe_type": probe_type,
        "subject": {},
        "videos": manifest_videos,
    }
    (study_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return study_dir


def standard_study(root: Path, study_id: str = "study-001") -> Path:
    """One study exercising report colors, the queue, and overrides.

    Location 3 peaks at severity 4, location 7 stays at 0, location 9 is
    absent. Video vq has a pleura-only frame (queued, PleuraOnly) and an
    undetected frame (queued, LowQuality).
    """
    return write_study(
        root,
        study_id,
        videos=[
            ("v3", 3, [0, 2, 4, 1]),
            ("v7", 7, [0, 0]),
            ("vq", 1, [{"classes": (P,)}, -2, {"classes": (P, B), "ground_truth": (P, B)}]),
        ],
    )
