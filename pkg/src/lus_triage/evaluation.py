"""Detector evaluation: matching, average precision, curves, confusion metrics.

Matching is greedy per frame and class in descending confidence order, so
results at a confidence cutoff equal re-matching the cutoff subset. AP uses
all-point interpolation with precision/recall evaluated at distinct
confidence boundaries, making it invariant to tie order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .boxes import FrameDetections, iou
from .landmarks import LandmarkClass
from .scoring import FrameAnalysis

IOU_GRID: tuple[float, ...] = tuple(round(0.5 + 0.05 * i, 2) for i in range(10))

FRAME_CLASS_LABELS: tuple[str, ...] = tuple(f"Class {k}" for k in range(1, 6))
NO_CLASS_LABEL = "No class"


class EvaluationError(ValueError):
    """Raised for malformed evaluation inputs."""


@dataclass(frozen=True)
class ClassMatches:
    """(confidence, is_true_positive) records plus ground-truth count."""

    records: tuple[tuple[float, bool], ...]
    gt_count: int


@dataclass(frozen=True)
class MatchResult:
    """Per-class matching outcome at one IoU threshold."""

    iou_threshold: float
    classes: dict[LandmarkClass, ClassMatches]


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassMetrics:
    """One-vs-rest metrics; None where the denominator is zero."""

    accuracy: float | None
    sensitivity: float | None
    specificity: float | None


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with rows = actual labels, columns = predicted labels."""

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.counts) != len(self.row_labels):
            raise EvaluationError("confusion matrix rows do not match row labels")
        for row in self.counts:
            if len(row) != len(self.col_labels):
                raise EvaluationError("confusion matrix columns do not match column labels")
            if any(c < 0 for c in row):
                raise EvaluationError("confusion matrix counts must be non-negative")


def _frames_by_id(frames: Iterable[FrameDetections], kind: str) -> dict[str, FrameDetections]:
    by_id: dict[str, FrameDetections] = {}
    for frame in frames:
        if frame.frame_id in by_id:
            raise EvaluationError(f"duplicate {kind} frame_id {frame.frame_id!r}")
        by_id[frame.frame_id] = frame
    return by_id


def match_detections(
    gt: Sequence[FrameDetections],
    pred: Sequence[FrameDetections],
    iou_threshold: float,
) -> MatchResult:
    """Greedily match predictions to ground truth per frame and class.

    Within a frame, predictions in descending-confidence order claim the
    unmatched same-class GT box of highest IoU >= iou_threshold (IoU ties
    go to the lowest GT index). Each GT box matches at most once.
    """
    gt_by_id = _frames_by_id(gt, "ground-truth")
    pred_by_id = _frames_by_id(pred, "prediction")
    for frame_id in pred_by_id:
        if frame_id not in gt_by_id:
            raise EvaluationError(f"prediction frame {frame_id!r} has no ground-truth frame")

    records: dict[LandmarkClass, list[tuple[float, bool]]] = {c: [] for c in LandmarkClass}
    gt_counts: dict[LandmarkClass, int] = {c: 0 for c in LandmarkClass}
    for frame_id, gt_frame in gt_by_id.items():
        pred_frame = pred_by_id.get(frame_id)
        for cls in LandmarkClass:
            gt_boxes = [d.bbox for d in gt_frame.detections if d.cls is cls]
            gt_counts[cls] += len(gt_boxes)
            if pred_frame is None:
                continue
            preds = [d for d in pred_frame.detections if d.cls is cls]
            preds.sort(key=lambda d: -d.confidence)  # stable: ties keep input order
            matched = [False] * len(gt_boxes)
            for det in preds:
                best_index = None
                best_iou = 0.0
                for gt_index, gt_box in enumerate(gt_boxes):
                    if matched[gt_index]:
                        continue
                    overlap = iou(det.bbox, gt_box)
                    if overlap >= iou_threshold and (best_index is None or overlap > best_iou):
                        best_index, best_iou = gt_index, overlap
                if best_index is not None:
                    matched[best_index] = True
                records[cls].append((det.confidence, best_index is not None))

    return MatchResult(
        iou_threshold=iou_threshold,
        classes={
            cls: ClassMatches(tuple(records[cls]), gt_counts[cls]) for cls in LandmarkClass
        },
    )


def average_precision(
    records: Sequence[tuple[float, bool]], gt_count: int
) -> float | None:
    """All-point-interpolated AP for one class.

    Returns None (undefined) when there is neither ground truth nor any
    prediction; 0.0 when predictions exist but ground truth does not.
    """
    if gt_count == 0:
        return None if not records else 0.0
    if not records:
        return 0.0
    ordered = sorted(records, key=lambda r: -r[0])
    # One PR point per distinct confidence value, at the end of its run, so
    # tied confidences form a single point and input order cannot matter.
    points: list[tuple[float, float]] = []
    tp = fp = 0
    for i, (confidence, is_tp) in enumerate(ordered):
        if is_tp:
            tp += 1
        else:
            fp += 1
        if i + 1 == len(ordered) or ordered[i + 1][0] != confidence:
            points.append((tp / gt_count, tp / (tp + fp)))
    envelope = [0.0] * len(points)
    best = 0.0
    for i in range(len(points) - 1, -1, -1):
        best = max(best, points[i][1])
        envelope[i] = best
    ap = 0.0
    prev_recall = 0.0
    for (recall, _), precision in zip(points, envelope):
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return ap


def class_average_precisions(match: MatchResult) -> dict[LandmarkClass, float | None]:
    """AP per class; None marks classes absent from both GT and predictions."""
    return {
        cls: average_precision(m.records, m.gt_count) for cls, m in match.classes.items()
    }


def mean_ap(
    gt: Sequence[FrameDetections],
    pred: Sequence[FrameDetections],
    iou_thresholds: Sequence[float] = (0.5,),
) -> float | None:
    """Mean AP over defined classes, averaged over IoU thresholds.

    Re-matches at every threshold. Returns None when no class is defined
    (no ground truth and no predictions at all).
    """
    if not iou_thresholds:
        raise EvaluationError("iou_thresholds must be non-empty")
    per_threshold: list[float] = []
    for threshold in iou_thresholds:
        aps = class_average_precisions(match_detections(gt, pred, threshold))
        defined = [ap for ap in aps.values() if ap is not None]
        if defined:
            per_threshold.append(sum(defined) / len(defined))
    if not per_threshold:
        return None
    return sum(per_threshold) / len(per_threshold)


def precision_recall_at(matches: ClassMatches, threshold: float) -> CurvePoint:
    """Precision/recall/F1 over predictions with confidence >= threshold."""
    tp = sum(1 for c, is_tp in matches.records if c >= threshold and is_tp)
    picked = sum(1 for c, _ in matches.records if c >= threshold)
    precision = tp / picked if picked else 0.0
    recall = tp / matches.gt_count if matches.gt_count else 0.0
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return CurvePoint(threshold, precision, recall, f1)


def pr_f1_curves(
    match: MatchResult, grid: Sequence[float]
) -> dict[str, list[CurvePoint]]:
    """Curve points per class plus a pooled "all" aggregate over the grid."""
    for threshold in grid:
        if not 0.0 <= threshold <= 1.0:
            raise EvaluationError(f"confidence grid value {threshold} outside [0, 1]")
    pooled = ClassMatches(
        records=tuple(r for m in match.classes.values() for r in m.records),
        gt_count=sum(m.gt_count for m in match.classes.values()),
    )
    curves = {
        cls.name: [precision_recall_at(m, t) for t in grid]
        for cls, m in match.classes.items()
    }
    curves["all"] = [precision_recall_at(pooled, t) for t in grid]
    return curves


def confusion_metrics(
    matrix: ConfusionMatrix, excluded_columns: Sequence[str] = ()
) -> dict[str, ClassMetrics]:
    """One-vs-rest accuracy/sensitivity/specificity over the core sub-matrix.

    Excluded columns (e.g. a "No class" spill column) are dropped entirely:
    their counts contribute to no numerator or denominator.
    """
    excluded = set(excluded_columns)
    unknown = excluded - set(matrix.col_labels)
    if unknown:
        raise EvaluationError(f"excluded columns not in matrix: {sorted(unknown)}")
    core_cols = [j for j, label in enumerate(matrix.col_labels) if label not in excluded]
    core_labels = tuple(matrix.col_labels[j] for j in core_cols)
    if core_labels != matrix.row_labels:
        raise EvaluationError(
            "core sub-matrix must be square with matching row/column labels"
        )
    core = [[row[j] for j in core_cols] for row in matrix.counts]
    total = sum(sum(row) for row in core)
    size = len(core_labels)

    def ratio(num: int, denom: int) -> float | None:
        return num / denom if denom else None

    metrics: dict[str, ClassMetrics] = {}
    for k, label in enumerate(core_labels):
        tp = core[k][k]
        fn = sum(core[k]) - tp
        fp = sum(core[i][k] for i in range(size)) - tp
        tn = total - tp - fn - fp
        metrics[label] = ClassMetrics(
            accuracy=ratio(tp + tn, total),
            sensitivity=ratio(tp, tp + fn),
            specificity=ratio(tn, tn + fp),
        )
    return metrics


def binary_video_metrics(
    counts: Sequence[Sequence[int]],
) -> dict[str, float | None]:
    """Accuracy/precision/recall for rows {Abnormal, Normal} x columns
    {Abnormal, Normal, Undetected}; Abnormal is the positive class.

    Undetected columns count against accuracy and recall but are excluded
    from precision (they are not Abnormal predictions).
    """
    if len(counts) != 2 or any(len(row) != 3 for row in counts):
        raise EvaluationError("binary video matrix must be 2x3")
    if any(c < 0 for row in counts for c in row):
        raise EvaluationError("binary video matrix counts must be non-negative")
    tp = counts[0][0]
    tn = counts[1][1]
    grand_total = sum(sum(row) for row in counts)
    predicted_abnormal = counts[0][0] + counts[1][0]
    actual_abnormal = sum(counts[0])

    def ratio(num: int, denom: int) -> float | None:
        return num / denom if denom else None

    return {
        "accuracy": ratio(tp + tn, grand_total),
        "precision": ratio(tp, predicted_abnormal),
        "recall": ratio(tp, actual_abnormal),
    }


def build_frame_confusion(
    gt_classes: Sequence[int], analyses: Sequence[FrameAnalysis]
) -> ConfusionMatrix:
    """Frame-classification confusion: GT classes 1..5 vs predicted severity
    class, with predicted Class 0/6 folded into a "No class" column."""
    if len(gt_classes) != len(analyses):
        raise EvaluationError("one ground-truth class per analyzed frame required")
    col_labels = FRAME_CLASS_LABELS + (NO_CLASS_LABEL,)
    counts = [[0] * len(col_labels) for _ in FRAME_CLASS_LABELS]
    for gt_class, analysis in zip(gt_classes, analyses):
        if not 1 <= gt_class <= 5:
            raise EvaluationError(f"ground-truth class {gt_class} outside 1..5")
        predicted = analysis.severity.severity_class
        column = predicted - 1 if 1 <= predicted <= 5 else len(col_labels) - 1
        counts[gt_class - 1][column] += 1
    return ConfusionMatrix(
        row_labels=FRAME_CLASS_LABELS,
        col_labels=col_labels,
        counts=tuple(tuple(row) for row in counts),
    )
