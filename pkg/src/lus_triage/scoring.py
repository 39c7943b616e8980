"""Per-frame image-quality and infection-severity scoring.

Quality sums fixed bucket values for the landmarks present in a frame and
bands the total into five labels. Severity takes the worst manifestation
present, with pleura as a mandatory gate: no pleura means the frame counts
as undetected.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import AbstractSet, Iterable

from .boxes import Detection, FrameDetections, filter_confidence, nms
from .landmarks import MANIFESTATION_CLASSES, LandmarkClass


class QualityLabel(enum.IntEnum):
    """Quality bands, ordered worst to best so labels compare naturally."""

    Bad = 0
    BelowAverage = 1
    Average = 2
    Good = 3
    Excellent = 4


QUALITY_BUCKETS: dict[str, int] = {
    "pleura": 30,
    "rib": 15,
    "shadow": 10,
    "artifact": 45,
}

SEVERITY_VALUES: dict[LandmarkClass, int] = {
    LandmarkClass.ALines: 0,
    LandmarkClass.BLines: 1,
    LandmarkClass.BPatch: 2,
    LandmarkClass.Consolidation: 3,
    LandmarkClass.AirBronchogram: 4,
}

SCORE_TO_CLASS: dict[int, int] = {-2: 0, -1: 6, 0: 1, 1: 2, 2: 3, 3: 4, 4: 5}


@dataclass(frozen=True)
class QualityResult:
    """Quality score 0..100, its band label, and the awarded buckets."""

    score: int
    label: QualityLabel
    components: frozenset[str]


@dataclass(frozen=True)
class SeverityResult:
    """Severity score -2..4, display class 0..6, and the deciding landmark."""

    score: int
    severity_class: int
    driving_class: LandmarkClass | None


@dataclass(frozen=True)
class FrameAnalysis:
    """A frame's kept detections with both scores derived from them."""

    frame_id: str
    detections: tuple[Detection, ...]
    quality: QualityResult
    severity: SeverityResult

    @property
    def present_classes(self) -> frozenset[LandmarkClass]:
        return frozenset(d.cls for d in self.detections)


def quality_label(score: int) -> QualityLabel:
    """Band a quality score into its label."""
    if score >= 90:
        return QualityLabel.Excellent
    if score >= 75:
        return QualityLabel.Good
    if score >= 45:
        return QualityLabel.Average
    if score >= 30:
        return QualityLabel.BelowAverage
    return QualityLabel.Bad


def quality_score(
    present: AbstractSet[LandmarkClass] | Iterable[LandmarkClass],
    *,
    artifact_requires_pleura: bool = False,
) -> QualityResult:
    """Score image quality from the set of classes present in a frame.

    Buckets are independent: 30 for pleura, 15 for rib, 10 for shadow, and
    45 once if any manifestation class appears, no matter how many do.
    """
    present = frozenset(present)
    awarded = set()
    if LandmarkClass.Pleura in present:
        awarded.add("pleura")
    if LandmarkClass.Rib in present:
        awarded.add("rib")
    if LandmarkClass.Shadow in present:
        awarded.add("shadow")
    if present & MANIFESTATION_CLASSES:
        if not artifact_requires_pleura or LandmarkClass.Pleura in present:
            awarded.add("artifact")
    score = sum(QUALITY_BUCKETS[name] for name in awarded)
    return QualityResult(score, quality_label(score), frozenset(awarded))


def severity_score(
    present: AbstractSet[LandmarkClass] | Iterable[LandmarkClass],
) -> SeverityResult:
    """Score infection severity from the set of classes present in a frame.

    Pleura is mandatory: without it the frame is undetected (-2, Class 0).
    With pleura but no manifestation the frame is Class 6 (-1). Otherwise
    the worst manifestation present decides the score.
    """
    present = frozenset(present)
    if LandmarkClass.Pleura not in present:
        return SeverityResult(-2, SCORE_TO_CLASS[-2], None)
    manifestations = present & MANIFESTATION_CLASSES
    if not manifestations:
        return SeverityResult(-1, SCORE_TO_CLASS[-1], None)
    driving = max(manifestations, key=SEVERITY_VALUES.__getitem__)
    score = SEVERITY_VALUES[driving]
    return SeverityResult(score, SCORE_TO_CLASS[score], driving)


def analyze_frame(
    frame: FrameDetections,
    conf_threshold: float = 0.25,
    nms_threshold: float = 0.45,
    *,
    artifact_requires_pleura: bool = False,
) -> FrameAnalysis:
    """Filter and suppress a frame's detections, then score what remains."""
    kept = nms(filter_confidence(frame.detections, conf_threshold), nms_threshold)
    present = frozenset(d.cls for d in kept)
    return FrameAnalysis(
        frame_id=frame.frame_id,
        detections=tuple(kept),
        quality=quality_score(present, artifact_requires_pleura=artifact_requires_pleura),
        severity=severity_score(present),
    )
