"""Hierarchical element framework: query types, themes, elements, and the scoring rubric.

The framework is plain data loaded from a JSON (or TOML) file so a new
domain can be dropped in by substituting the file. Loaded frameworks are
immutable and safe to share across threads.
"""
from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class FrameworkError(Exception):
    """Raised when a framework file cannot be loaded or fails validation."""


class QueryType(str, Enum):
    PLANNING = "Planning"
    CONSULTING = "Consulting"
    GUIDING = "Guiding"


RUBRIC_DIMENSION_IDS = ("Rel", "Cxt", "Log", "Cr", "Acc", "Comp", "Prac")

GENERAL_ELEMENTS_PER_CATEGORY = 6
GENERAL_ELEMENT_MAX_POINTS = 2
SPECIFIC_ELEMENTS_PER_THEME = 3
SUB_ELEMENTS_PER_ELEMENT = 4

# category ceiling: 6 elements x 2 points
CATEGORY_MAX = GENERAL_ELEMENTS_PER_CATEGORY * GENERAL_ELEMENT_MAX_POINTS


@dataclass(frozen=True)
class Theme:
    id: str
    display_name: str
    provenance: str = "source"


@dataclass(frozen=True)
class GeneralElement:
    id: str
    category: QueryType
    name: str
    lexicon: tuple[str, ...]
    max_points: int = GENERAL_ELEMENT_MAX_POINTS


@dataclass(frozen=True)
class SubElement:
    name: str
    lexicon: tuple[str, ...]


@dataclass(frozen=True)
class SpecificElement:
    id: str
    theme: str
    name: str
    sub_elements: tuple[SubElement, ...]


@dataclass(frozen=True)
class RubricDimension:
    id: str
    name: str
    description: str
    low_anchor: str
    high_anchor: str
    scale_min: int = 1
    scale_max: int = 7


@dataclass(frozen=True)
class ElementFramework:
    version: str
    themes: tuple[Theme, ...]
    general_elements: tuple[GeneralElement, ...]
    specific_elements: tuple[SpecificElement, ...]
    rubric: tuple[RubricDimension, ...]
    checksum: str = field(default="", compare=False)

    def theme_ids(self) -> list[str]:
        return [t.id for t in self.themes]

    def general_for(self, category: QueryType) -> list[GeneralElement]:
        return [e for e in self.general_elements if e.category == category]

    def specific_for(self, theme_id: str) -> list[SpecificElement]:
        return [e for e in self.specific_elements if e.theme == theme_id]

    def dimension(self, dim_id: str) -> RubricDimension:
        for d in self.rubric:
            if d.id == dim_id:
                return d
        raise KeyError(dim_id)

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "themes": [
                {"id": t.id, "display_name": t.display_name, "provenance": t.provenance}
                for t in self.themes
            ],
            "general_elements": [
                {
                    "id": e.id,
                    "category": e.category.value,
                    "name": e.name,
                    "lexicon": list(e.lexicon),
                    "max_points": e.max_points,
                }
                for e in self.general_elements
            ],
            "specific_elements": [
                {
                    "id": e.id,
                    "theme": e.theme,
                    "name": e.name,
                    "sub_elements": [
                        {"name": s.name, "lexicon": list(s.lexicon)} for s in e.sub_elements
                    ],
                }
                for e in self.specific_elements
            ],
            "rubric": [
                {
                    "id": d.id,
                    "name": d.name,
                    "description": d.description,
                    "low_anchor": d.low_anchor,
                    "high_anchor": d.high_anchor,
                    "scale_min": d.scale_min,
                    "scale_max": d.scale_max,
                }
                for d in self.rubric
            ],
        }


def compute_checksum(doc: dict) -> str:
    """Content hash over the canonical serialization, ignoring any stored checksum."""
    doc = {k: v for k, v in doc.items() if k != "checksum"}
    canonical = json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def default_framework_path() -> Path:
    return Path(str(resources.files("lettot").joinpath("data/framework.json")))


def _parse_doc(doc: dict) -> ElementFramework:
    try:
        themes = tuple(
            Theme(t["id"], t["display_name"], t.get("provenance", "source"))
            for t in doc["themes"]
        )
        general = tuple(
            GeneralElement(
                e["id"],
                QueryType(e["category"]),
                e["name"],
                tuple(e["lexicon"]),
                int(e.get("max_points", GENERAL_ELEMENT_MAX_POINTS)),
            )
            for e in doc["general_elements"]
        )
        specific = tuple(
            SpecificElement(
                e["id"],
                e["theme"],
                e["name"],
                tuple(SubElement(s["name"], tuple(s["lexicon"])) for s in e["sub_elements"]),
            )
            for e in doc["specific_elements"]
        )
        rubric = tuple(
            RubricDimension(
                d["id"],
                d.get("name", d["id"]),
                d["description"],
                d["low_anchor"],
                d["high_anchor"],
                int(d.get("scale_min", 1)),
                int(d.get("scale_max", 7)),
            )
            for d in doc["rubric"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise FrameworkError(f"malformed framework document: {exc!r}") from exc
    fw = ElementFramework(
        version=str(doc.get("version", "0")),
        themes=themes,
        general_elements=general,
        specific_elements=specific,
        rubric=rubric,
    )
    return ElementFramework(
        version=fw.version,
        themes=fw.themes,
        general_elements=fw.general_elements,
        specific_elements=fw.specific_elements,
        rubric=fw.rubric,
        checksum=compute_checksum(fw.to_dict()),
    )


def load_framework(path: str | Path | None = None) -> ElementFramework:
    """Load and validate a framework file (JSON or TOML by extension)."""
    p = Path(path) if path is not None else default_framework_path()
    if not p.exists():
        raise FrameworkError(f"framework file not found: {p}")
    try:
        if p.suffix == ".toml":
            with open(p, "rb") as f:
                doc = tomllib.load(f)
        else:
            with open(p, encoding="utf-8") as f:
                doc = json.load(f)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise FrameworkError(f"cannot parse {p}: {exc}") from exc
    fw = _parse_doc(doc)
    violations = validate_framework(fw)
    if violations:
        raise FrameworkError(violations[0])
    return fw


def validate_framework(fw: ElementFramework) -> list[str]:
    """Return all invariant violations, deterministically ordered. Empty list = valid."""
    out: list[str] = []

    theme_ids = [t.id for t in fw.themes]
    for tid in sorted({t for t in theme_ids if theme_ids.count(t) > 1}):
        out.append(f"duplicate theme id: {tid}")
    if not fw.themes:
        out.append("framework defines 0 themes")

    seen_general: dict[str, int] = {}
    for e in fw.general_elements:
        seen_general[e.category.value] = seen_general.get(e.category.value, 0) + 1
        if not e.lexicon or any(not p for p in e.lexicon):
            out.append(f"general element {e.id} has an empty lexicon")
        if e.max_points != GENERAL_ELEMENT_MAX_POINTS:
            out.append(f"general element {e.id} has max_points {e.max_points}, expected "
                       f"{GENERAL_ELEMENT_MAX_POINTS}")
    for qt in QueryType:
        n = seen_general.get(qt.value, 0)
        if n != GENERAL_ELEMENTS_PER_CATEGORY:
            out.append(f"category {qt.value} has {n} general elements, expected "
                       f"{GENERAL_ELEMENTS_PER_CATEGORY}")

    specific_ids = [e.id for e in fw.specific_elements]
    for sid in sorted({s for s in specific_ids if specific_ids.count(s) > 1}):
        out.append(f"duplicate specific element id: {sid}")
    per_theme: dict[str, int] = {}
    for e in fw.specific_elements:
        per_theme[e.theme] = per_theme.get(e.theme, 0) + 1
        if e.theme not in theme_ids:
            out.append(f"specific element {e.id} references unknown theme {e.theme}")
        if len(e.sub_elements) != SUB_ELEMENTS_PER_ELEMENT:
            out.append(f"element {e.id} has {len(e.sub_elements)} sub-elements, expected "
                       f"{SUB_ELEMENTS_PER_ELEMENT}")
        for s in e.sub_elements:
            if not s.lexicon or any(not p for p in s.lexicon):
                out.append(f"sub-element {e.id}/{s.name} has an empty lexicon")
    for t in fw.themes:
        n = per_theme.get(t.id, 0)
        if n != SPECIFIC_ELEMENTS_PER_THEME:
            out.append(f"theme {t.id} has {n} specific elements, expected "
                       f"{SPECIFIC_ELEMENTS_PER_THEME}")

    dim_ids = tuple(d.id for d in fw.rubric)
    if dim_ids != RUBRIC_DIMENSION_IDS:
        out.append(f"rubric dimensions {dim_ids} do not match the expected "
                   f"{RUBRIC_DIMENSION_IDS}")
    for d in fw.rubric:
        if not d.low_anchor or not d.high_anchor:
            out.append(f"rubric dimension {d.id} has an empty scale anchor")
        if (d.scale_min, d.scale_max) != (1, 7):
            out.append(f"rubric dimension {d.id} scale is {d.scale_min}-{d.scale_max}, "
                       f"expected 1-7")

    return out
