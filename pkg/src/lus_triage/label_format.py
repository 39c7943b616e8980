"""Plain-text label files: `class_id cx cy w h [confidence]` per line.

The wire format is center-form with coordinates normalized to the image
size, as exported by the usual box-annotation tools. Internally everything
is corner-form pixels; conversion happens here and only here.
"""

from __future__ import annotations

from .boxes import BBox, Detection, FrameDetections
from .landmarks import ClassIdTable

CLAMP_TOLERANCE = 1e-6


class LabelParseError(ValueError):
    """Malformed label line; message carries the 1-based line number."""


def _clamp01(value: float, line_no: int, field_name: str) -> float:
    if value < -CLAMP_TOLERANCE or value > 1.0 + CLAMP_TOLERANCE:
        raise LabelParseError(
            f"line {line_no}: {field_name} value {value} outside [0, 1]"
        )
    return min(1.0, max(0.0, value))


def parse_label_file(
    text: str,
    image_size: tuple[int, int],
    expects_confidence: bool,
    frame_id: str = "",
    id_table: ClassIdTable | None = None,
) -> FrameDetections:
    """Parse a label file into corner-form pixel detections.

    Detection files carry a trailing confidence column; ground-truth files
    do not and their boxes get confidence 1.0. Normalized values may stray
    outside [0, 1] by at most 1e-6 (silently clamped); anything further is
    treated as a corrupt file.
    """
    table = id_table or ClassIdTable()
    width, height = image_size
    n_fields = 6 if expects_confidence else 5
    detections: list[Detection] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != n_fields:
            raise LabelParseError(
                f"line {line_no}: expected {n_fields} fields, got {len(fields)}"
            )
        try:
            class_id = int(fields[0])
        except ValueError:
            raise LabelParseError(
                f"line {line_no}: class id {fields[0]!r} is not an integer"
            ) from None
        try:
            values = [float(f) for f in fields[1:]]
        except ValueError:
            raise LabelParseError(f"line {line_no}: non-numeric field in {line!r}") from None
        try:
            cls = table.from_id(class_id)
        except Exception:
            raise LabelParseError(
                f"line {line_no}: class id {class_id} outside 0..7"
            ) from None
        names = ("cx", "cy", "w", "h", "confidence")[: n_fields - 1]
        clamped = [_clamp01(v, line_no, name) for v, name in zip(values, names)]
        cx, cy, w, h = clamped[:4]
        confidence = clamped[4] if expects_confidence else 1.0
        bbox = BBox(
            x_min=min(max((cx - w / 2) * width, 0.0), width),
            y_min=min(max((cy - h / 2) * height, 0.0), height),
            x_max=min(max((cx + w / 2) * width, 0.0), width),
            y_max=min(max((cy + h / 2) * height, 0.0), height),
        )
        detections.append(Detection(bbox, cls, confidence))
    return FrameDetections(frame_id, image_size, tuple(detections))


def _fmt(value: float) -> str:
    # Six decimals normally; full precision when rounding would lose the value
    # (confidences must survive a write/parse round trip exactly).
    fixed = f"{value:.6f}"
    return fixed if float(fixed) == value else repr(value)


def write_label_file(
    frame: FrameDetections,
    with_confidence: bool,
    id_table: ClassIdTable | None = None,
) -> str:
    """Serialize detections back to normalized center form, one per line.

    Boxes are clamped to the image bounds before conversion, so every
    written field lands in [0, 1].
    """
    table = id_table or ClassIdTable()
    width, height = frame.image_size
    lines = []
    for d in frame.detections:
        x_min = min(max(d.bbox.x_min, 0.0), width)
        x_max = min(max(d.bbox.x_max, 0.0), width)
        y_min = min(max(d.bbox.y_min, 0.0), height)
        y_max = min(max(d.bbox.y_max, 0.0), height)
        values = [
            (x_min + x_max) / 2 / width,
            (y_min + y_max) / 2 / height,
            (x_max - x_min) / width,
            (y_max - y_min) / height,
        ]
        fields = [str(table.to_id(d.cls))] + [_fmt(v) for v in values]
        if with_confidence:
            fields.append(_fmt(d.confidence))
        lines.append(" ".join(fields))
    return "".join(line + "\n" for line in lines)
