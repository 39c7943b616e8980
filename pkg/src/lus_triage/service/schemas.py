"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class ApiModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)


class ErrorBody(ApiModel):
    code: str
    message: str


class ErrorEnvelope(ApiModel):
    error: ErrorBody


class StudySummary(ApiModel):
    study_id: str
    probe_type: str
    video_count: int
    frame_count: int
    pending_reviews: int


class StudyList(ApiModel):
    schema_version: int = 1
    studies: list[StudySummary]


class Boxplot(ApiModel):
    min: float
    q1: float
    median: float
    q3: float
    max: float


class LocationResult(ApiModel):
    location: int
    video_severity: Optional[int]
    color: str
    boxplot: Optional[Boxplot]


class Report(ApiModel):
    schema_version: int = 1
    study_id: str
    generated_at: Optional[str]
    locations: dict[str, LocationResult]


class FrameScore(ApiModel):
    frame_id: str
    severity_score: int
    severity_class: int
    quality_score: int
    quality_label: str
    overridden: bool


class Video(ApiModel):
    schema_version: int = 1
    study_id: str
    video_id: str
    scan_location: Optional[int]
    fps: float
    video_severity: int
    diagnosis: str
    worst_frame_id: Optional[str]
    summary_frame_ids: list[str]
    frames: list[FrameScore]


class DetectionOut(ApiModel):
    cls: str = Field(alias="class")
    bbox: list[float]
    confidence: float


class AnnotationOut(ApiModel):
    cls: str = Field(alias="class")
    bbox: list[float]


class Quality(ApiModel):
    score: int
    label: str
    components: list[str] = []


class Severity(ApiModel):
    score: int
    severity_class: int
    driving_class: Optional[str]


class Frame(ApiModel):
    schema_version: int = 1
    study_id: str
    video_id: str
    frame_id: str
    image: str
    image_size: list[int]
    detections: list[DetectionOut]
    quality: Quality
    severity: Severity
    effective_annotations: list[AnnotationOut]
    annotation_source: Literal["override", "ground-truth", "none"]
    overridden: bool


class QueueEntry(ApiModel):
    frame_id: str
    video_id: str
    reason: str
    enqueued_at: str
    status: str


class Queue(ApiModel):
    schema_version: int = 1
    study_id: str
    entries: list[QueueEntry]


class AnnotationIn(ApiModel):
    cls: str = Field(alias="class")
    bbox: list[float] = Field(min_length=4, max_length=4)


class OverrideRequest(ApiModel):
    author: str
    annotations: list[AnnotationIn]
    note: Optional[str] = None


class OverrideRecordOut(ApiModel):
    frame_id: str
    author: str
    created_at: str
    annotations: list[AnnotationOut]
    note: Optional[str]


class OverrideResponse(ApiModel):
    schema_version: int = 1
    record: OverrideRecordOut
    quality: Quality
    severity: Severity
    queue_status: Optional[str]


class ExportRequest(ApiModel):
    format: Literal["label-text", "xml"] = "label-text"


class ExportFrame(ApiModel):
    frame_id: str
    image: Optional[str]
    label_file: str


class ExportManifest(ApiModel):
    schema_version: int = 1
    export_id: str
    study_id: str
    exported_at: str
    format: str
    frames: list[ExportFrame]
    class_counts: dict[str, int]
