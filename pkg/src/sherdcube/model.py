"""Typed domain records for ceramic sample data and their structural validation.

The record types mirror the source database layout: a central sample linked to
geographic, descriptive, dating, grouping, analysis, and media tables.
Everything is an immutable value; validation is pure and returns violations as
data rather than raising.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable

TECHNIQUES = ("CHEMISTRY", "PETRO", "BINO", "SEM", "DIFFRACTION", "DILATO", "OTHER")
UNITS = ("wt_percent", "ppm", "dimensionless")
MEDIA_KINDS = ("drawing", "photo", "petrographic_image", "binocular_image", "other")
GROUP_BASES = ("chemical", "petrographic", "other")

# Geographic hierarchy, finest to coarsest.
LOCATION_LEVELS = ("site", "town", "region", "country")

_FIRING_MODE_RE = re.compile(r"^mode [A-Za-z]$")


@dataclass(frozen=True)
class Unknown:
    """Sentinel member standing in for a missing value at one hierarchy level.

    Kept distinct from real labels so aggregation never silently drops rows
    with gaps in their hierarchy path.
    """

    level: str

    def __str__(self) -> str:
        return f"⟨unknown {self.level}⟩"


@dataclass(frozen=True)
class Ungrouped:
    """Sentinel member for samples assigned to no chemical group."""

    def __str__(self) -> str:
        return "⟨ungrouped⟩"


UNGROUPED = Ungrouped()

# A dimension label: a stored string or a sentinel.
Label = "str | Unknown | Ungrouped"


def display(label: "str | Unknown | Ungrouped") -> str:
    """Human-readable form of a label; identity for plain strings."""
    return label if isinstance(label, str) else str(label)


def is_sentinel(label: "str | Unknown | Ungrouped") -> bool:
    return not isinstance(label, str)


@dataclass(frozen=True, slots=True)
class Sample:
    """Central ceramic object record; all links are by id into sibling tables."""

    sample_id: str
    provenance_ref: str
    description_ref: str | None = None
    dating_ref: str | None = None
    group_ref: str | None = None
    supposed_origin_ref: str | None = None
    attribution_ref: str | None = None
    storage_outside_ref: str | None = None
    media: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class LocationRef:
    """A geographic reference; any subset of the four levels may be present."""

    location_id: str
    site: str | None = None
    town: str | None = None
    region: str | None = None
    country: str | None = None
    latitude: float | None = None
    longitude: float | None = None


@dataclass(frozen=True, slots=True)
class Description:
    """Archaeological description of a sample (typology, category, flags)."""

    description_id: str
    free_text: str
    typology: str
    category: str
    part_object: str | None = None
    waster: bool = False
    firing_mode: str | None = None


@dataclass(frozen=True, slots=True)
class Dating:
    dating_id: str
    period: str
    sub_period: str | None = None
    start_year: int | None = None
    end_year: int | None = None


@dataclass(frozen=True, slots=True)
class ChemicalGroup:
    group_id: str
    name: str
    basis: str = "chemical"


@dataclass(frozen=True, slots=True)
class AnalysisResult:
    """One individual measured value for one sample.

    A sample analysed twice for the same component carries distinct run_tags.
    """

    analysis_id: str
    sample_ref: str
    technique: str
    component: str
    value: float
    unit: str
    run_tag: str = ""


@dataclass(frozen=True, slots=True)
class MediaRef:
    media_id: str
    kind: str
    uri: str
    caption: str | None = None


@dataclass
class Dataset:
    """A parsed bundle of records, possibly invalid until validated."""

    samples: list[Sample] = field(default_factory=list)
    locations: list[LocationRef] = field(default_factory=list)
    descriptions: list[Description] = field(default_factory=list)
    datings: list[Dating] = field(default_factory=list)
    groups: list[ChemicalGroup] = field(default_factory=list)
    analyses: list[AnalysisResult] = field(default_factory=list)
    media: list[MediaRef] = field(default_factory=list)


@dataclass(frozen=True)
class Vocabulary:
    """Controlled vocabularies used by validation; data, not code."""

    categories: frozenset[str]
    firing_modes: tuple[str, ...] = ()
    part_objects: tuple[str, ...] = ()
    periods: tuple[str, ...] = ()

    @classmethod
    def from_dict(cls, raw: dict) -> "Vocabulary":
        return cls(
            categories=frozenset(raw.get("categories", ())),
            firing_modes=tuple(raw.get("firing_modes", ())),
            part_objects=tuple(raw.get("part_objects", ())),
            periods=tuple(raw.get("periods", ())),
        )

    @classmethod
    def load(cls, path: str) -> "Vocabulary":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def default_vocabulary() -> Vocabulary:
    raw = json.loads(
        resources.files("sherdcube").joinpath("vocabularies.json").read_text("utf-8")
    )
    return Vocabulary.from_dict(raw)


@dataclass(frozen=True)
class Violation:
    """One broken invariant: which record, which rule, and a readable message."""

    record_type: str
    record_id: str
    rule: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def rules(self) -> set[str]:
        return {v.rule for v in self.violations}

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)


def resolve_location_level(loc: LocationRef, level: str) -> "str | Unknown":
    """Return the stored label at one hierarchy level, or the Unknown sentinel.

    Never infers a level from its neighbours; a gap stays a gap.
    """
    if level not in LOCATION_LEVELS:
        raise ValueError(f"unknown location level: {level!r}")
    value = getattr(loc, level)
    if value:
        return value
    return Unknown(level)


def _duplicates(ids: Iterable[str]) -> list[str]:
    seen: set[str] = set()
    dupes: set[str] = set()
    for i in ids:
        if i in seen:
            dupes.add(i)
        seen.add(i)
    return sorted(dupes)


def validate_dataset(dataset: Dataset, vocabulary: Vocabulary | None = None) -> ValidationReport:
    """Check every structural invariant and report violations as data.

    Pure and order-insensitive: permuting the input records yields the same
    violation set. An empty report means the dataset is fit for the warehouse.
    """
    vocab = vocabulary if vocabulary is not None else default_vocabulary()
    out: list[Violation] = []

    def bad(record_type: str, record_id: str, rule: str, message: str) -> None:
        out.append(Violation(record_type, record_id, rule, message))

    tables = [
        ("Sample", [s.sample_id for s in dataset.samples]),
        ("LocationRef", [l.location_id for l in dataset.locations]),
        ("Description", [d.description_id for d in dataset.descriptions]),
        ("Dating", [d.dating_id for d in dataset.datings]),
        ("ChemicalGroup", [g.group_id for g in dataset.groups]),
        ("AnalysisResult", [a.analysis_id for a in dataset.analyses]),
        ("MediaRef", [m.media_id for m in dataset.media]),
    ]
    for record_type, ids in tables:
        for dup in _duplicates(ids):
            bad(record_type, dup, "id_unique", f"{record_type} id {dup!r} occurs more than once")

    location_ids = {l.location_id for l in dataset.locations}
    description_ids = {d.description_id for d in dataset.descriptions}
    dating_ids = {d.dating_id for d in dataset.datings}
    group_ids = {g.group_id for g in dataset.groups}
    sample_ids = {s.sample_id for s in dataset.samples}
    media_ids = {m.media_id for m in dataset.media}

    def check_ref(record_type: str, record_id: str, ref: str | None, target: set[str],
                  field_name: str, required: bool) -> None:
        if not ref:
            if required:
                bad(record_type, record_id, "ref_required", f"{field_name} is required")
            return
        if ref not in target:
            bad(record_type, record_id, "ref_integrity",
                f"{field_name} -> {ref!r} does not resolve")

    for s in dataset.samples:
        check_ref("Sample", s.sample_id, s.provenance_ref, location_ids, "provenance_ref", True)
        check_ref("Sample", s.sample_id, s.description_ref, description_ids, "description_ref", False)
        check_ref("Sample", s.sample_id, s.dating_ref, dating_ids, "dating_ref", False)
        check_ref("Sample", s.sample_id, s.group_ref, group_ids, "group_ref", False)
        check_ref("Sample", s.sample_id, s.supposed_origin_ref, location_ids, "supposed_origin_ref", False)
        check_ref("Sample", s.sample_id, s.attribution_ref, location_ids, "attribution_ref", False)
        check_ref("Sample", s.sample_id, s.storage_outside_ref, location_ids, "storage_outside_ref", False)
        for mid in s.media:
            check_ref("Sample", s.sample_id, mid, media_ids, "media", False)

    for loc in dataset.locations:
        if not any(getattr(loc, lv) for lv in LOCATION_LEVELS):
            bad("LocationRef", loc.location_id, "location_no_level",
                "at least one of site/town/region/country must be present")
        if (loc.latitude is None) != (loc.longitude is None):
            bad("LocationRef", loc.location_id, "latlon_pair",
                "latitude and longitude must be present together")
        if loc.latitude is not None and not -90.0 <= loc.latitude <= 90.0:
            bad("LocationRef", loc.location_id, "lat_range", f"latitude {loc.latitude} out of [-90, 90]")
        if loc.longitude is not None and not -180.0 <= loc.longitude <= 180.0:
            bad("LocationRef", loc.location_id, "lon_range", f"longitude {loc.longitude} out of [-180, 180]")

    for d in dataset.descriptions:
        if d.category not in vocab.categories:
            bad("Description", d.description_id, "category_vocab",
                f"category {d.category!r} not in vocabulary")
        if d.firing_mode is not None and not _FIRING_MODE_RE.match(d.firing_mode):
            bad("Description", d.description_id, "firing_mode_format",
                f"firing_mode {d.firing_mode!r} must look like 'mode A'")

    for d in dataset.datings:
        if d.start_year is not None and d.end_year is not None and d.start_year > d.end_year:
            bad("Dating", d.dating_id, "year_order",
                f"start_year {d.start_year} after end_year {d.end_year}")

    for g in dataset.groups:
        if not g.name:
            bad("ChemicalGroup", g.group_id, "group_name", "name must be non-empty")
        if g.basis not in GROUP_BASES:
            bad("ChemicalGroup", g.group_id, "basis_enum", f"basis {g.basis!r} not one of {GROUP_BASES}")

    run_keys: dict[tuple, str] = {}
    for a in dataset.analyses:
        check_ref("AnalysisResult", a.analysis_id, a.sample_ref, sample_ids, "sample_ref", True)
        if a.technique not in TECHNIQUES:
            bad("AnalysisResult", a.analysis_id, "technique_enum",
                f"technique {a.technique!r} not one of {TECHNIQUES}")
        if a.unit not in UNITS:
            bad("AnalysisResult", a.analysis_id, "unit_enum", f"unit {a.unit!r} not one of {UNITS}")
        if a.value < 0:
            bad("AnalysisResult", a.analysis_id, "value_nonneg", f"value {a.value} is negative")
        elif a.unit == "wt_percent" and a.value > 100:
            bad("AnalysisResult", a.analysis_id, "wt_percent_max",
                f"value {a.value} exceeds 100 wt_percent")
        key = (a.sample_ref, a.technique, a.component, a.run_tag)
        if key in run_keys:
            bad("AnalysisResult", a.analysis_id, "analysis_run_unique",
                f"duplicate run {key!r}; repeated analyses need distinct run_tags")
        else:
            run_keys[key] = a.analysis_id

    for m in dataset.media:
        if not m.uri:
            bad("MediaRef", m.media_id, "media_uri", "uri must be non-empty")
        if m.kind not in MEDIA_KINDS:
            bad("MediaRef", m.media_id, "media_kind_enum", f"kind {m.kind!r} not one of {MEDIA_KINDS}")

    out.sort(key=lambda v: (v.record_type, v.record_id, v.rule, v.message))
    return ValidationReport(tuple(out))
