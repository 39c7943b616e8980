"""Runtime configuration shared by the CLI and the service."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .landmarks import (
    DEFAULT_NAME_ALIASES,
    ClassIdTable,
    LandmarkClass,
    load_name_aliases,
)
from .scoring import QualityLabel

ENV_CONFIG = "TRIAGE_CONFIG"


class ConfigError(ValueError):
    """Raised for malformed configuration files."""


def _quality_label(name: str, where: str) -> QualityLabel:
    try:
        return QualityLabel[name]
    except KeyError:
        options = ", ".join(label.name for label in QualityLabel)
        raise ConfigError(f"{where}: unknown quality label {name!r} (expected one of {options})") from None


@dataclass(frozen=True, eq=False)
class PipelineConfig:
    """Thresholds and knobs for scoring, summaries, and the service."""

    confidence_threshold: float = 0.25
    nms_iou_threshold: float = 0.45
    artifact_requires_pleura: bool = False
    summary_quality_min: QualityLabel | None = None
    relabel_quality_cutoff: QualityLabel = QualityLabel.BelowAverage
    id_table: ClassIdTable = field(default_factory=ClassIdTable)
    name_aliases: dict[str, LandmarkClass] = field(
        default_factory=lambda: dict(DEFAULT_NAME_ALIASES)
    )
    cors_origins: tuple[str, ...] = ("*",)
    bearer_token: str | None = None

    def __post_init__(self) -> None:
        for name in ("confidence_threshold", "nms_iou_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be within [0, 1], got {value}")


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Load configuration from `path`, $TRIAGE_CONFIG, or built-in defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG) or None
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a JSON object")

    kwargs: dict = {}
    for key in ("confidence_threshold", "nms_iou_threshold"):
        if key in raw:
            if not isinstance(raw[key], (int, float)) or isinstance(raw[key], bool):
                raise ConfigError(f"{path}: {key} must be a number")
            kwargs[key] = float(raw[key])

    quality = raw.get("quality", {})
    if "artifact_requires_pleura" in quality:
        kwargs["artifact_requires_pleura"] = bool(quality["artifact_requires_pleura"])

    summary = raw.get("summary", {})
    if summary.get("quality_min") is not None:
        kwargs["summary_quality_min"] = _quality_label(
            summary["quality_min"], f"{path}: summary.quality_min"
        )

    relabel = raw.get("relabel", {})
    if relabel.get("quality_cutoff") is not None:
        kwargs["relabel_quality_cutoff"] = _quality_label(
            relabel["quality_cutoff"], f"{path}: relabel.quality_cutoff"
        )

    # File paths inside the config resolve relative to the config file itself.
    if raw.get("class_id_table") is not None:
        kwargs["id_table"] = ClassIdTable.load(path.parent / raw["class_id_table"])
    if raw.get("name_aliases") is not None:
        kwargs["name_aliases"] = load_name_aliases(path.parent / raw["name_aliases"])

    service = raw.get("service", {})
    if "cors_origins" in service:
        origins = service["cors_origins"]
        if not isinstance(origins, list) or not all(isinstance(o, str) for o in origins):
            raise ConfigError(f"{path}: service.cors_origins must be a list of strings")
        kwargs["cors_origins"] = tuple(origins)
    if service.get("bearer_token") is not None:
        kwargs["bearer_token"] = str(service["bearer_token"])

    return PipelineConfig(**kwargs)
