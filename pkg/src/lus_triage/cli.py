"""Command-line interface: batch scoring, evaluation, and service plumbing.

Batch commands (`score`, `report`, `evaluate`, ...) operate on manifest
files directly; the queue/override/export commands and `serve` operate on
a store root (a directory of study directories).
"""

from __future__ import annotations

import contextlib
import csv
import json
import shutil
from pathlib import Path

import click

from .config import ConfigError, PipelineConfig, load_config
from .evaluation import (
    IOU_GRID,
    ConfusionMatrix,
    EvaluationError,
    class_average_precisions,
    confusion_metrics,
    match_detections,
    mean_ap,
    pr_f1_curves,
)
from .label_format import LabelParseError
from .landmarks import TaxonomyError
from .manifest import ManifestError, load_manifest
from .relabel import OverrideLogError
from .store import (
    UNKNOWN_IMAGE_SIZE,
    FrameNotFound,
    StudyNotFound,
    StudyStore,
    VideoNotFound,
    _parse_labels,
    build_state,
    probe_image_size,
    report_dict,
    report_svg_text,
)

_USER_ERRORS = (
    ConfigError,
    EvaluationError,
    LabelParseError,
    ManifestError,
    OverrideLogError,
    TaxonomyError,
    KeyError,
    ValueError,
    OSError,
)

# Confidence grid for precision/recall/F1 curve exports.
CURVE_GRID = tuple(round(0.05 * i, 2) for i in range(21))


@contextlib.contextmanager
def _user_errors():
    try:
        yield
    except click.ClickException:
        raise
    except StudyNotFound as exc:
        raise click.ClickException(f"study not found: {exc.args[0]}") from exc
    except VideoNotFound as exc:
        raise click.ClickException(f"video not found: {exc.args[0]}") from exc
    except FrameNotFound as exc:
        raise click.ClickException(f"frame not found: {exc.args[0]}") from exc
    except _USER_ERRORS as exc:
        message = str(exc.args[0]) if exc.args else str(exc)
        raise click.ClickException(message) from exc


def _dump(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _emit(payload: dict, out: Path | None) -> None:
    if out is None:
        click.echo(_dump(payload), nl=False)
    else:
        out.write_text(_dump(payload))


def _config(path: Path | None) -> PipelineConfig:
    return load_config(path)


path_arg = click.Path(exists=True, dir_okay=False, path_type=Path)
dir_arg = click.Path(exists=True, file_okay=False, path_type=Path)
out_arg = click.Path(dir_okay=False, writable=True, path_type=Path)
config_opt = click.option(
    "--config", "config_path", type=path_arg, default=None, help="Pipeline config JSON."
)


@click.group()
def main() -> None:
    """Lung-ultrasound triage toolkit."""


@main.command()
@click.option("--manifest", required=True, type=path_arg)
@config_opt
@click.option("--out", type=out_arg, default=None, help="Write JSON here, else stdout.")
def score(manifest: Path, config_path: Path | None, out: Path | None) -> None:
    """Score every frame and video of a study manifest.

    Output depends only on input file contents and config, so repeated
    runs are byte-identical.
    """
    with _user_errors():
        config = _config(config_path)
        state = build_state(manifest.parent, config)
        videos = []
        for record in state.study.videos:
            analysis = state.videos[record.video_id]
            videos.append(
                {
                    "video_id": record.video_id,
                    "scan_location": record.scan_location,
                    "fps": record.fps,
                    "video_severity": analysis.video_severity,
                    "diagnosis": analysis.diagnosis.value,
                    "worst_frame_id": analysis.worst_frame_id,
                    "summary_frame_ids": list(analysis.summary_frame_ids),
                    "frames": [
                        {
                            "frame_id": frame.frame_id,
                            "detections": [
                                {
                                    "class": d.cls.name,
                                    "bbox": list(d.bbox.as_list()),
                                    "confidence": d.confidence,
                                }
                                for d in frame.detections
                            ],
                            "quality": {
                                "score": frame.quality.score,
                                "label": frame.quality.label.name,
                                "components": sorted(frame.quality.components),
                            },
                            "severity": {
                                "score": frame.severity.score,
                                "severity_class": frame.severity.severity_class,
                                "driving_class": frame.severity.driving_class.name
                                if frame.severity.driving_class
                                else None,
                            },
                        }
                        for frame in analysis.frames
                    ],
                }
            )
        _emit(
            {"schema_version": 1, "study_id": state.study.study_id, "videos": videos},
            out,
        )


@main.command()
@click.option("--manifest", required=True, type=path_arg)
@click.option("--video", "video_id", required=True)
@config_opt
@click.option("--out", required=True, type=click.Path(file_okay=False, path_type=Path))
def summarize(manifest: Path, video_id: str, config_path: Path | None, out: Path) -> None:
    """Copy a video's summary frames into a directory plus a summary list."""
    with _user_errors():
        config = _config(config_path)
        state = build_state(manifest.parent, config)
        analysis = state.videos.get(video_id)
        if analysis is None:
            raise click.ClickException(f"video {video_id!r} not in manifest")
        out.mkdir(parents=True, exist_ok=True)
        entries = []
        for frame_id in analysis.summary_frame_ids:
            info = state.frames[frame_id]
            copied = None
            if info.image_path is not None:
                copied = Path(info.record.image).name
                shutil.copy2(info.image_path, out / copied)
            entries.append({"frame_id": frame_id, "image": copied})
        _emit(
            {
                "schema_version": 1,
                "video_id": video_id,
                "video_severity": analysis.video_severity,
                "diagnosis": analysis.diagnosis.value,
                "frames": entries,
            },
            out / "summary.json",
        )
        click.echo(f"wrote {len(entries)} summary frames to {out}")


@main.command()
@click.option("--manifest", required=True, type=path_arg)
@config_opt
@click.option("--out", type=out_arg, default=None, help="Write JSON here, else stdout.")
@click.option("--svg", type=out_arg, default=None, help="Also write the SVG color map.")
def report(manifest: Path, config_path: Path | None, out: Path | None, svg: Path | None) -> None:
    """Emit the 14-location scan report for a study manifest."""
    with _user_errors():
        config = _config(config_path)
        state = build_state(manifest.parent, config)
        _emit(report_dict(state), out)
        if svg is not None:
            svg.write_text(report_svg_text(state))


def _evaluation_frames(manifest_path: Path, field: str, config: PipelineConfig) -> dict:
    """frame_id -> FrameDetections parsed from one side of an evaluation."""
    study = load_manifest(manifest_path)
    directory = manifest_path.parent
    frames = {}
    for video in study.videos:
        for record in video.frames:
            size = probe_image_size(directory / record.image) or UNKNOWN_IMAGE_SIZE
            rel = record.ground_truth if field == "ground_truth" else record.detections
            frames[record.frame_id] = _parse_labels(
                directory, rel, record.frame_id, size, field == "detections", config
            )
    return frames


@main.command()
@click.option("--gt-manifest", required=True, type=path_arg)
@click.option("--pred-manifest", required=True, type=path_arg)
@click.option("--iou", default="0.5", help='IoU threshold, or "sweep" for 0.50:0.05:0.95.')
@config_opt
@click.option("--out", type=out_arg, default=None, help="Write JSON here, else stdout.")
@click.option("--curves", type=out_arg, default=None, help="Write PR/F1 curves CSV here.")
def evaluate(
    gt_manifest: Path,
    pred_manifest: Path,
    iou: str,
    config_path: Path | None,
    out: Path | None,
    curves: Path | None,
) -> None:
    """Match detections against ground truth and report AP/mAP."""
    with _user_errors():
        config = _config(config_path)
        if iou == "sweep":
            thresholds = list(IOU_GRID)
        else:
            value = float(iou)
            if not 0.0 <= value <= 1.0:
                raise click.ClickException(f"--iou {iou} outside [0, 1]")
            thresholds = [value]
        gt = list(_evaluation_frames(gt_manifest, "ground_truth", config).values())
        pred = list(_evaluation_frames(pred_manifest, "detections", config).values())

        per_threshold = {}
        for threshold in thresholds:
            match = match_detections(gt, pred, threshold)
            aps = class_average_precisions(match)
            defined = [ap for ap in aps.values() if ap is not None]
            per_threshold[f"{threshold:.2f}"] = {
                "per_class_ap": {cls.name: ap for cls, ap in aps.items()},
                "mAP": sum(defined) / len(defined) if defined else None,
            }
        payload = {
            "schema_version": 1,
            "iou_thresholds": thresholds,
            "per_threshold": per_threshold,
            "mAP": mean_ap(gt, pred, thresholds),
        }
        _emit(payload, out)
        if curves is not None:
            match = match_detections(gt, pred, thresholds[0])
            by_class = pr_f1_curves(match, CURVE_GRID)
            with curves.open("w", newline="") as handle:
                writer = csv.writer(handle)
                writer.writerow(["class", "threshold", "precision", "recall", "f1"])
                for name, points in by_class.items():
                    for point in points:
                        writer.writerow(
                            [name, point.threshold, point.precision, point.recall, point.f1]
                        )


@main.command()
@click.option("--confusion", required=True, type=path_arg, help="Confusion-matrix JSON.")
@click.option("--exclude", "excluded", multiple=True, help="Column label to drop.")
@click.option("--out", type=out_arg, default=None, help="Write JSON here, else stdout.")
def metrics(confusion: Path, excluded: tuple[str, ...], out: Path | None) -> None:
    """Per-class accuracy/sensitivity/specificity from a confusion matrix.

    Input: {"row_labels": [...], "col_labels": [...], "counts": [[...]]}.
    """
    with _user_errors():
        raw = json.loads(confusion.read_text())
        matrix = ConfusionMatrix(
            row_labels=tuple(raw["row_labels"]),
            col_labels=tuple(raw["col_labels"]),
            counts=tuple(tuple(row) for row in raw["counts"]),
        )
        per_class = confusion_metrics(matrix, excluded_columns=excluded)
        _emit(
            {
                "schema_version": 1,
                "excluded_columns": list(excluded),
                "per_class": {
                    label: {
                        "accuracy": m.accuracy,
                        "sensitivity": m.sensitivity,
                        "specificity": m.specificity,
                    }
                    for label, m in per_class.items()
                },
            },
            out,
        )


@main.command()
@click.option("--root", required=True, type=dir_arg, help="Directory of study directories.")
@click.option("--study", "study_id", required=True)
@config_opt
@click.option("--out", type=out_arg, default=None, help="Write JSON here, else stdout.")
def queue(root: Path, study_id: str, config_path: Path | None, out: Path | None) -> None:
    """Print a study's relabel queue."""
    with _user_errors():
        store = StudyStore(root, _config(config_path))
        _emit(store.queue(study_id), out)


@main.command()
@click.option("--root", required=True, type=dir_arg)
@click.option("--study", "study_id", required=True)
@click.option("--frame", "frame_id", required=True)
@click.option("--author", required=True)
@click.option(
    "--annotations",
    "annotations_path",
    required=True,
    type=path_arg,
    help='JSON list of {"class", "bbox"} objects.',
)
@click.option("--note", default=None)
@config_opt
def override(
    root: Path,
    study_id: str,
    frame_id: str,
    author: str,
    annotations_path: Path,
    note: str | None,
    config_path: Path | None,
) -> None:
    """Append a corrected-label record for one frame."""
    with _user_errors():
        store = StudyStore(root, _config(config_path))
        annotations = json.loads(annotations_path.read_text())
        if not isinstance(annotations, list):
            raise click.ClickException("annotations file must hold a JSON list")
        result = store.apply_override(study_id, frame_id, author, annotations, note)
        _emit(result, None)


@main.command()
@click.option("--root", required=True, type=dir_arg)
@click.option("--study", "study_id", required=True)
@click.option(
    "--format",
    "fmt",
    type=click.Choice(["label-text", "xml"]),
    default="label-text",
    show_default=True,
)
@config_opt
def export(root: Path, study_id: str, fmt: str, config_path: Path | None) -> None:
    """Export reviewed overrides as a retraining set."""
    with _user_errors():
        store = StudyStore(root, _config(config_path))
        _emit(store.export(study_id, fmt), None)


@main.command()
@click.option("--root", required=True, type=dir_arg)
@click.option("--addr", default="127.0.0.1:8000", show_default=True, help="HOST:PORT.")
@config_opt
def serve(root: Path, addr: str, config_path: Path | None) -> None:
    """Run the HTTP review service."""
    import uvicorn

    from .service import create_app

    with _user_errors():
        host, _, port_text = addr.rpartition(":")
        if not host or not port_text.isdigit():
            raise click.ClickException(f"--addr {addr!r} is not HOST:PORT")
        app = create_app(root, _config(config_path))
    uvicorn.run(app, host=host, port=int(port_text))


if __name__ == "__main__":
    main()
