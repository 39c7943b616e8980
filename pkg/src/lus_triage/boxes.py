"""Geometric primitives: boxes, detections, IoU, confidence filtering, NMS."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .landmarks import LandmarkClass


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in corner form, continuous pixel coordinates."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        coords = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(c) for c in coords):
            raise ValueError(f"box coordinates must be finite, got {coords}")
        if self.x_min > self.x_max or self.y_min > self.y_max:
            raise ValueError(f"box corners out of order: {coords}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def as_list(self) -> list[float]:
        return [self.x_min, self.y_min, self.x_max, self.y_max]


@dataclass(frozen=True)
class Detection:
    """A classified box with detector confidence."""

    bbox: BBox
    cls: LandmarkClass
    confidence: float

    def __post_init__(self):
        if not (0.0 <= self.confidence <= 1.0):
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class FrameDetections:
    """All detections of one frame, with the frame's pixel dimensions."""

    frame_id: str
    image_size: tuple[int, int]
    detections: tuple[Detection, ...] = field(default_factory=tuple)

    def present_classes(self) -> frozenset[LandmarkClass]:
        return frozenset(d.cls for d in self.detections)


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union; 0 when the union has zero area."""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0 or iy <= 0:
        return 0.0
    inter = ix * iy
    union = a.area + b.area - inter
    if union <= 0:
        return 0.0
    return inter / union


def filter_confidence(
    dets: list[Detection] | tuple[Detection, ...], threshold: float
) -> list[Detection]:
    """Keep detections at or above the confidence threshold, order preserved."""
    if not (0.0 <= threshold <= 1.0):
        raise ValueError(f"confidence threshold {threshold} outside [0, 1]")
    return [d for d in dets if d.confidence >= threshold]


def nms(
    dets: list[Detection] | tuple[Detection, ...], iou_threshold: float
) -> list[Detection]:
    """Class-wise greedy non-maximum suppression.

    Within each class, detections are visited by descending confidence
    (ties broken by input position) and dropped when their IoU with an
    already-kept box of the same class is strictly above the threshold.
    Boxes of different classes never suppress each other: the scoring
    rules downstream need co-located pleura and manifestation boxes to
    survive together.

    Returns the kept detections sorted by descending confidence, input
    position as tie-break.
    """
    if not (0.0 <= iou_threshold <= 1.0):
        raise ValueError(f"IoU threshold {iou_threshold} outside [0, 1]")
    order = sorted(range(len(dets)), key=lambda i: (-dets[i].confidence, i))
    kept_by_class: dict[LandmarkClass, list[Detection]] = {}
    kept: list[Detection] = []
    for i in order:
        det = dets[i]
        peers = kept_by_class.setdefault(det.cls, [])
        if any(iou(det.bbox, k.bbox) > iou_threshold for k in peers):
            continue
        peers.append(det)
        kept.append(det)
    return kept
