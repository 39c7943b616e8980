"""Landmark taxonomy: the eight detectable lung-ultrasound classes.

Three structural landmarks anchor image quality (pleura, rib, shadow);
five manifestation classes drive infection severity (A-lines through
air bronchograms).
"""

from __future__ import annotations

import enum
import json
from pathlib import Path


class LandmarkClass(enum.Enum):
    """One of the eight landmark classes, with its canonical integer id."""

    ALines = 0
    AirBronchogram = 1
    BLines = 2
    BPatch = 3
    Consolidation = 4
    Pleura = 5
    Rib = 6
    Shadow = 7

    @property
    def is_structural(self) -> bool:
        return self in STRUCTURAL_CLASSES

    @property
    def is_manifestation(self) -> bool:
        return self in MANIFESTATION_CLASSES


STRUCTURAL_CLASSES = frozenset(
    {LandmarkClass.Pleura, LandmarkClass.Rib, LandmarkClass.Shadow}
)
MANIFESTATION_CLASSES = frozenset(
    {
        LandmarkClass.ALines,
        LandmarkClass.BLines,
        LandmarkClass.BPatch,
        LandmarkClass.Consolidation,
        LandmarkClass.AirBronchogram,
    }
)

# Written to annotation XML; also the keys accepted by the default alias table.
CANONICAL_XML_NAMES: dict[LandmarkClass, str] = {
    LandmarkClass.ALines: "a-lines",
    LandmarkClass.AirBronchogram: "air-bronchogram",
    LandmarkClass.BLines: "b-lines",
    LandmarkClass.BPatch: "b-patch",
    LandmarkClass.Consolidation: "consolidation",
    LandmarkClass.Pleura: "pleura",
    LandmarkClass.Rib: "rib",
    LandmarkClass.Shadow: "shadow",
}

DEFAULT_NAME_ALIASES: dict[str, LandmarkClass] = {
    **{name: cls for cls, name in CANONICAL_XML_NAMES.items()},
    **{cls.name.lower(): cls for cls in LandmarkClass},
    "alines": LandmarkClass.ALines,
    "a_lines": LandmarkClass.ALines,
    "a lines": LandmarkClass.ALines,
    "blines": LandmarkClass.BLines,
    "b_lines": LandmarkClass.BLines,
    "b lines": LandmarkClass.BLines,
    "b_patch": LandmarkClass.BPatch,
    "b patch": LandmarkClass.BPatch,
    "consolidations": LandmarkClass.Consolidation,
    "air_bronchogram": LandmarkClass.AirBronchogram,
    "air bronchogram": LandmarkClass.AirBronchogram,
    "air-bronchograms": LandmarkClass.AirBronchogram,
}


class TaxonomyError(ValueError):
    """Raised for unknown class names or ids."""


def class_from_id(class_id: int, table: ClassIdTable | None = None) -> LandmarkClass:
    """Resolve an integer id to a class, via `table` or the canonical ids."""
    if table is not None:
        return table.from_id(class_id)
    try:
        return LandmarkClass(class_id)
    except ValueError:
        raise TaxonomyError(f"class id {class_id} outside 0..7") from None


def class_from_name(name: str, aliases: dict[str, LandmarkClass] | None = None) -> LandmarkClass:
    """Resolve a (case-insensitive) class name, via the alias table."""
    table = DEFAULT_NAME_ALIASES if aliases is None else aliases
    cls = table.get(name.strip().lower())
    if cls is None:
        raise TaxonomyError(f"unknown class name {name!r}")
    return cls


class ClassIdTable:
    """Bijective mapping between the 8 classes and integer ids 0..7.

    The default ids are the canonical ones baked into LandmarkClass; a
    different wire ordering (e.g. to interoperate with a foreign training
    set) can be loaded from a JSON file mapping class name -> id.
    """

    def __init__(self, ids: dict[LandmarkClass, int] | None = None):
        if ids is None:
            ids = {cls: cls.value for cls in LandmarkClass}
        if set(ids) != set(LandmarkClass) or sorted(ids.values()) != list(range(8)):
            raise TaxonomyError("class-id table must map all 8 classes onto ids 0..7")
        self._to_id = dict(ids)
        self._from_id = {i: cls for cls, i in ids.items()}

    def to_id(self, cls: LandmarkClass) -> int:
        return self._to_id[cls]

    def from_id(self, class_id: int) -> LandmarkClass:
        try:
            return self._from_id[class_id]
        except KeyError:
            raise TaxonomyError(f"class id {class_id} outside 0..7") from None

    @classmethod
    def load(cls, path: str | Path) -> ClassIdTable:
        raw = json.loads(Path(path).read_text())
        if not isinstance(raw, dict):
            raise TaxonomyError(f"{path}: class-id table must be a JSON object")
        ids: dict[LandmarkClass, int] = {}
        for name, class_id in raw.items():
            if not isinstance(class_id, int):
                raise TaxonomyError(f"{path}: id for {name!r} must be an integer")
            ids[class_from_name(name)] = class_id
        return cls(ids)


def load_name_aliases(path: str | Path) -> dict[str, LandmarkClass]:
    """Load a JSON map of lowercase name -> canonical class name."""
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise TaxonomyError(f"{path}: alias table must be a JSON object")
    aliases = dict(DEFAULT_NAME_ALIASES)
    for alias, canonical in raw.items():
        try:
            cls = LandmarkClass[canonical]
        except KeyError:
            raise TaxonomyError(
                f"{path}: alias {alias!r} maps to unknown class {canonical!r}"
            ) from None
        aliases[alias.strip().lower()] = cls
    return aliases
