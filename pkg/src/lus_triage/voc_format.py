"""XML annotation interchange (annotation/size/object/bndbox schema)."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .boxes import BBox, Detection, FrameDetections
from .landmarks import CANONICAL_XML_NAMES, LandmarkClass, TaxonomyError, class_from_name


class VocParseError(ValueError):
    """Malformed or unmappable annotation XML."""


def _int_of(element: ET.Element | None, tag: str) -> int:
    if element is None or element.text is None:
        raise VocParseError(f"missing <{tag}> element")
    try:
        return int(float(element.text))
    except ValueError:
        raise VocParseError(f"<{tag}> is not numeric: {element.text!r}") from None


def parse_voc_xml(
    text: str, aliases: dict[str, LandmarkClass] | None = None
) -> FrameDetections:
    """Parse annotation XML into corner-form detections with confidence 1.0."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise VocParseError(f"malformed XML: {exc}") from None
    size = root.find("size")
    if size is None:
        raise VocParseError("missing <size> element")
    width = _int_of(size.find("width"), "width")
    height = _int_of(size.find("height"), "height")
    filename_el = root.find("filename")
    frame_id = filename_el.text if filename_el is not None and filename_el.text else ""
    detections = []
    for obj in root.iter("object"):
        name_el = obj.find("name")
        if name_el is None or not name_el.text:
            raise VocParseError("object without a <name>")
        try:
            cls = class_from_name(name_el.text, aliases)
        except TaxonomyError:
            raise VocParseError(f"unmapped class name {name_el.text!r}") from None
        bnd = obj.find("bndbox")
        if bnd is None:
            raise VocParseError(f"object {name_el.text!r} without a <bndbox>")
        x_min = _int_of(bnd.find("xmin"), "xmin")
        y_min = _int_of(bnd.find("ymin"), "ymin")
        x_max = _int_of(bnd.find("xmax"), "xmax")
        y_max = _int_of(bnd.find("ymax"), "ymax")
        if x_min >= x_max or y_min >= y_max:
            raise VocParseError(
                f"degenerate box ({x_min},{y_min},{x_max},{y_max}) for {name_el.text!r}"
            )
        detections.append(Detection(BBox(x_min, y_min, x_max, y_max), cls, 1.0))
    return FrameDetections(frame_id, (width, height), tuple(detections))


def write_voc_xml(frame: FrameDetections, depth: int = 1) -> str:
    """Serialize to annotation XML; coordinates are rounded to integers."""
    root = ET.Element("annotation")
    ET.SubElement(root, "filename").text = frame.frame_id
    size = ET.SubElement(root, "size")
    ET.SubElement(size, "width").text = str(frame.image_size[0])
    ET.SubElement(size, "height").text = str(frame.image_size[1])
    ET.SubElement(size, "depth").text = str(depth)
    for d in frame.detections:
        obj = ET.SubElement(root, "object")
        ET.SubElement(obj, "name").text = CANONICAL_XML_NAMES[d.cls]
        bnd = ET.SubElement(obj, "bndbox")
        ET.SubElement(bnd, "xmin").text = str(int(round(d.bbox.x_min)))
        ET.SubElement(bnd, "ymin").text = str(int(round(d.bbox.y_min)))
        ET.SubElement(bnd, "xmax").text = str(int(round(d.bbox.x_max)))
        ET.SubElement(bnd, "ymax").text = str(int(round(d.bbox.y_max)))
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"
