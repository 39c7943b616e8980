"""Video-level aggregation, binary diagnosis, summaries, and the scan report.

A video's severity is the severity of its worst frame. Videos roll up into
the 14-point scan report: one color-coded cell per protocol location, with
a box plot over the detected frames' severity scores.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping, Sequence

from .scoring import FrameAnalysis, QualityLabel

UNDETECTED_SEVERITY = -2
SCAN_LOCATION_COUNT = 14


class Diagnosis(enum.Enum):
    Abnormal = "Abnormal"
    Normal = "Normal"
    Undetected = "Undetected"


class ReportColor(enum.Enum):
    Green = "Green"
    YellowGreen = "YellowGreen"
    Yellow = "Yellow"
    Orange = "Orange"
    Red = "Red"
    Black = "Black"


# Presentation constants for renderers (SVG report, review UI); the color
# *names* above are the contract, these hex values are not.
COLOR_HEX: dict[ReportColor, str] = {
    ReportColor.Green: "#2ca02c",
    ReportColor.YellowGreen: "#9acd32",
    ReportColor.Yellow: "#ffd700",
    ReportColor.Orange: "#ff8c00",
    ReportColor.Red: "#d62728",
    ReportColor.Black: "#000000",
}

_SEVERITY_COLORS: dict[int, ReportColor] = {
    0: ReportColor.Green,
    1: ReportColor.YellowGreen,
    2: ReportColor.Yellow,
    3: ReportColor.Orange,
    4: ReportColor.Red,
}


@dataclass(frozen=True)
class FiveNumberSummary:
    """Box-plot statistics: minimum, quartiles, maximum."""

    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float

    def as_dict(self) -> dict[str, float]:
        return {
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
        }


@dataclass(frozen=True)
class VideoAnalysis:
    """Per-video rollup of frame analyses."""

    video_id: str
    frames: tuple[FrameAnalysis, ...]
    video_severity: int
    diagnosis: Diagnosis
    worst_frame_id: str | None
    summary_frame_ids: tuple[str, ...]


@dataclass(frozen=True)
class ScanLocationResult:
    """One cell of the 14-point report."""

    location: int
    video_severity: int | None
    color: ReportColor
    boxplot: FiveNumberSummary | None


@dataclass(frozen=True)
class StudyReport:
    """The full 14-point scan report; every location key is present."""

    study_id: str
    locations: dict[int, ScanLocationResult]
    generated_at: str | None = None


def classify_video_binary(video_severity: int) -> Diagnosis:
    """Diagnose a video from its severity: >=1 abnormal, 0 normal, <0 undetected."""
    if video_severity >= 1:
        return Diagnosis.Abnormal
    if video_severity == 0:
        return Diagnosis.Normal
    return Diagnosis.Undetected


def summarize_video(
    frames: Sequence[FrameAnalysis],
    quality_min: QualityLabel | None = None,
) -> list[str]:
    """Pick summary frames: severity >= 1, optionally gated on quality label."""
    return [
        f.frame_id
        for f in frames
        if f.severity.score >= 1
        and (quality_min is None or f.quality.label >= quality_min)
    ]


def aggregate_video(
    video_id: str,
    frames: Sequence[FrameAnalysis],
    quality_min: QualityLabel | None = None,
) -> VideoAnalysis:
    """Roll frame analyses up to video severity, diagnosis, and summary."""
    severity = UNDETECTED_SEVERITY
    worst: str | None = None
    for frame in frames:
        if worst is None or frame.severity.score > severity:
            severity = frame.severity.score
            worst = frame.frame_id
    return VideoAnalysis(
        video_id=video_id,
        frames=tuple(frames),
        video_severity=severity,
        diagnosis=classify_video_binary(severity),
        worst_frame_id=worst,
        summary_frame_ids=tuple(summarize_video(frames, quality_min)),
    )


def severity_boxplot(scores: Sequence[int]) -> FiveNumberSummary | None:
    """Five-number summary with linear-interpolation quantiles; None if empty."""
    if not scores:
        return None
    if any(s < 0 for s in scores):
        raise ValueError("box plot input must be detected-frame scores (>= 0)")
    ordered = sorted(float(s) for s in scores)

    def quantile(p: float) -> float:
        pos = p * (len(ordered) - 1)
        lo = int(pos)
        hi = min(lo + 1, len(ordered) - 1)
        return ordered[lo] + (pos - lo) * (ordered[hi] - ordered[lo])

    return FiveNumberSummary(
        minimum=ordered[0],
        q1=quantile(0.25),
        median=quantile(0.5),
        q3=quantile(0.75),
        maximum=ordered[-1],
    )


def severity_color(video_severity: int | None) -> ReportColor:
    """Map a location's severity to its report color; unknown/undetected is black."""
    if video_severity is None or video_severity < 0:
        return ReportColor.Black
    return _SEVERITY_COLORS[video_severity]


def scan_report(
    study_id: str,
    by_location: Mapping[int, Sequence[VideoAnalysis]],
    generated_at: str | None = None,
) -> StudyReport:
    """Build the 14-point report; locations without data render black.

    Several videos may share one location (repeat acquisitions); the cell
    takes the worst video severity and pools every frame into the box plot.
    """
    for location in by_location:
        if not 1 <= location <= SCAN_LOCATION_COUNT:
            raise ValueError(f"scan location {location} outside 1..{SCAN_LOCATION_COUNT}")
    locations: dict[int, ScanLocationResult] = {}
    for location in range(1, SCAN_LOCATION_COUNT + 1):
        videos = by_location.get(location, ())
        if not videos:
            locations[location] = ScanLocationResult(location, None, ReportColor.Black, None)
            continue
        severity = max(v.video_severity for v in videos)
        detected = [
            f.severity.score for v in videos for f in v.frames if f.severity.score >= 0
        ]
        locations[location] = ScanLocationResult(
            location=location,
            video_severity=severity,
            color=severity_color(severity),
            boxplot=severity_boxplot(detected),
        )
    return StudyReport(study_id=study_id, locations=locations, generated_at=generated_at)


def report_svg(report: StudyReport) -> str:
    """Render the report as a standalone SVG: two columns of seven cells.

    Locations 1-7 label the left column L1-L7, 8-14 the right column R1-R7.
    """
    cell, pad = 64, 8
    width = 2 * cell + 3 * pad
    height = 7 * cell + 8 * pad + 24
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<text x="{pad}" y="18" font-family="sans-serif" font-size="14">'
        f"{report.study_id}</text>",
    ]
    for location in range(1, SCAN_LOCATION_COUNT + 1):
        column = 0 if location <= 7 else 1
        row = (location - 1) % 7
        x = pad + column * (cell + pad)
        y = 24 + pad + row * (cell + pad)
        result = report.locations[location]
        fill = COLOR_HEX[result.color]
        label = f"L{location}" if column == 0 else f"R{location - 7}"
        text_fill = "#ffffff" if result.color is ReportColor.Black else "#000000"
        parts.append(
            f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}" '
            f'stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{x + cell / 2}" y="{y + cell / 2 + 5}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14" fill="{text_fill}">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
