"""Bundle parsing and star-schema flattening.

Source data arrives as a bundle of named tables (CSV or JSON). Parsing is
strict on column names and value types, lenient on column order. A validated
dataset is flattened into one fact row per analysis measurement plus four
dimension tables; missing dimension links route to sentinel members so no
fact is ever dropped.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .model import (
    AnalysisResult,
    ChemicalGroup,
    Dataset,
    Dating,
    Description,
    LocationRef,
    MediaRef,
    Sample,
    Unknown,
    ValidationReport,
    Vocabulary,
    validate_dataset,
    resolve_location_level,
    LOCATION_LEVELS,
)

UNKNOWN_KEY = "__unknown__"
UNGROUPED_KEY = "__ungrouped__"

FORMATS = ("csv_bundle", "json_bundle")

# table name -> (required columns, optional columns)
_TABLE_COLUMNS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    "samples": (
        ("sample_id", "description_id", "provenance_id", "dating_id", "group_id", "media_ids"),
        ("supposed_origin_id", "attribution_id", "storage_outside_id"),
    ),
    "locations": (("location_id", "site", "town", "region", "country", "lat", "lon"), ()),
    "analyses": (("analysis_id", "sample_id", "technique", "component", "value", "unit", "run_tag"), ()),
    "descriptions": (
        ("description_id", "free_text", "typology", "category"),
        ("part_object", "waster", "firing_mode"),
    ),
    "datings": (("dating_id", "period", "sub_period", "start_year", "end_year"), ()),
    "groups": (("group_id", "name", "basis"), ()),
    "media": (("media_id", "kind", "uri", "caption"), ()),
}

_REQUIRED_TABLES = ("samples", "locations", "analyses")
_OPTIONAL_TABLES = ("descriptions", "datings", "groups", "media")


class EtlError(Exception):
    """Base class for ingestion failures."""


class MissingFile(EtlError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"bundle is missing required file {name!r}")


class MalformedRow(EtlError):
    def __init__(self, file: str, line: int, reason: str):
        self.file = file
        self.line = line
        self.reason = reason
        super().__init__(f"{file}:{line}: {reason}")


class DuplicateId(EtlError):
    def __init__(self, record_type: str, record_id: str):
        self.record_type = record_type
        self.record_id = record_id
        super().__init__(f"duplicate {record_type} id {record_id!r}")


class ValidationFailed(EtlError):
    def __init__(self, report: ValidationReport):
        self.report = report
        first = report.violations[0] if report.violations else None
        detail = f"; first: {first.rule} on {first.record_id}" if first else ""
        super().__init__(f"dataset has {len(report)} violation(s){detail}")


@dataclass(frozen=True, slots=True)
class LocationPath:
    """A location resolved to all four hierarchy levels, gaps as sentinels."""

    site: "str | Unknown"
    town: "str | Unknown"
    region: "str | Unknown"
    country: "str | Unknown"

    def labels(self) -> tuple:
        return (self.site, self.town, self.region, self.country)


@dataclass(frozen=True, slots=True)
class FactRecord:
    """One analysis measurement bound to its four dimension keys."""

    sample_id: str
    analysis_id: str
    technique: str
    component: str
    value: float
    unit: str
    provenance_key: str
    dating_key: str
    description_key: str
    group_key: str


@dataclass
class StarSchema:
    """Fact table plus dimension tables.

    Dimension dicts map natural keys to source records; the reserved
    UNKNOWN_KEY / UNGROUPED_KEY entries hold None and stand for the sentinel
    members. Provenance rows are stored fully resolved.
    """

    facts: tuple[FactRecord, ...] = ()
    dim_provenance: dict[str, LocationPath] = field(default_factory=dict)
    dim_dating: dict[str, "Dating | None"] = field(default_factory=dict)
    dim_description: dict[str, "Description | None"] = field(default_factory=dict)
    dim_group: dict[str, "ChemicalGroup | None"] = field(default_factory=dict)

    @property
    def fact_count(self) -> int:
        return len(self.facts)


def _decode(name: str, data: "bytes | str") -> str:
    if isinstance(data, bytes):
        try:
            return data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRow(name, 0, f"not valid UTF-8: {exc}") from None
    return data


def _check_columns(name: str, header: list[str], table: str) -> None:
    required, optional = _TABLE_COLUMNS[table]
    seen = set(header)
    for col in required:
        if col not in seen:
            raise MalformedRow(name, 1, f"missing column {col!r}")
    allowed = set(required) | set(optional)
    for col in header:
        if col not in allowed:
            raise MalformedRow(name, 1, f"unknown column {col!r}")
    if len(seen) != len(header):
        raise MalformedRow(name, 1, "duplicate column name in header")


def _opt(value: "str | None") -> "str | None":
    """Empty string means missing."""
    if value is None:
        return None
    value = value.strip()
    return value or None


def _parse_float(name: str, line: int, column: str, raw: "str | None") -> "float | None":
    raw = _opt(raw)
    if raw is None:
        return None
    try:
        return float(raw)
    except ValueError:
        raise MalformedRow(name, line, f"column {column!r}: {raw!r} is not a number") from None


def _parse_int(name: str, line: int, column: str, raw: "str | None") -> "int | None":
    raw = _opt(raw)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise MalformedRow(name, line, f"column {column!r}: {raw!r} is not an integer") from None


def _parse_bool(name: str, line: int, column: str, raw: "str | None") -> bool:
    raw = _opt(raw)
    if raw is None:
        return False
    lowered = raw.lower()
    if lowered in ("true", "1", "yes"):
        return True
    if lowered in ("false", "0", "no"):
        return False
    raise MalformedRow(name, line, f"column {column!r}: {raw!r} is not a boolean")


def _require(name: str, line: int, column: str, raw: "str | None") -> str:
    value = _opt(raw)
    if value is None:
        raise MalformedRow(name, line, f"column {column!r} must be non-empty")
    return value


def _iter_rows(name: str, text: str, table: str):
    """Yield (line_number, row_dict) from CSV text after header checks."""
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow(name, 1, "empty file, header row required") from None
    header = [h.strip() for h in header]
    _check_columns(name, header, table)
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise MalformedRow(name, reader.line_num, f"expected {len(header)} cells, got {len(row)}")
        yield reader.line_num, dict(zip(header, row))


def _iter_json_rows(name: str, text: str, table: str):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRow(name, exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(data, list):
        raise MalformedRow(name, 1, "expected a JSON array of row objects")
    required, optional = _TABLE_COLUMNS[table]
    allowed = set(required) | set(optional)
    for i, row in enumerate(data, start=1):
        if not isinstance(row, dict):
            raise MalformedRow(name, i, "row is not an object")
        for col in row:
            if col not in allowed:
                raise MalformedRow(name, i, f"unknown column {col!r}")
        for col in required:
            if col not in row:
                raise MalformedRow(name, i, f"missing column {col!r}")
        yield i, {k: ("" if v is None else str(v)) for k, v in row.items()}


def _table_stream(files: Mapping[str, "bytes | str"], table: str, fmt: str):
    suffix = ".csv" if fmt == "csv_bundle" else ".json"
    name = table + suffix
    if name not in files:
        # tolerate bare table names as keys
        if table in files:
            name = table
        else:
            return None, None
    return name, _decode(name, files[name])


def parse_source(files: Mapping[str, "bytes | str"], format: str = "csv_bundle") -> Dataset:
    """Parse a bundle of named tables into domain records.

    Requires samples, locations and analyses tables; descriptions, datings,
    groups and media are optional. Raises MissingFile, MalformedRow or
    DuplicateId; semantic problems beyond that are left to validate_dataset.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown bundle format {format!r}")
    rows_of = _iter_rows if format == "csv_bundle" else _iter_json_rows

    tables: dict[str, list[tuple[int, dict]]] = {}
    names: dict[str, str] = {}
    for table in _REQUIRED_TABLES + _OPTIONAL_TABLES:
        name, text = _table_stream(files, table, format)
        if name is None:
            if table in _REQUIRED_TABLES:
                suffix = ".csv" if format == "csv_bundle" else ".json"
                raise MissingFile(table + suffix)
            tables[table] = []
            continue
        names[table] = name
        tables[table] = list(rows_of(name, text, table))

    dataset = Dataset()
    seen: dict[str, set[str]] = {}

    def unique(record_type: str, record_id: str) -> str:
        bucket = seen.setdefault(record_type, set())
        if record_id in bucket:
            raise DuplicateId(record_type, record_id)
        bucket.add(record_id)
        return record_id

    name = names.get("locations", "locations")
    for line, row in tables["locations"]:
        dataset.locations.append(LocationRef(
            location_id=unique("LocationRef", _require(name, line, "location_id", row.get("location_id"))),
            site=_opt(row.get("site")),
            town=_opt(row.get("town")),
            region=_opt(row.get("region")),
            country=_opt(row.get("country")),
            latitude=_parse_float(name, line, "lat", row.get("lat")),
            longitude=_parse_float(name, line, "lon", row.get("lon")),
        ))

    name = names.get("descriptions", "descriptions")
    for line, row in tables["descriptions"]:
        dataset.descriptions.append(Description(
            description_id=unique("Description", _require(name, line, "description_id", row.get("description_id"))),
            free_text=(row.get("free_text") or "").strip(),
            typology=_require(name, line, "typology", row.get("typology")),
            category=_require(name, line, "category", row.get("category")),
            part_object=_opt(row.get("part_object")),
            waster=_parse_bool(name, line, "waster", row.get("waster")),
            firing_mode=_opt(row.get("firing_mode")),
        ))

    name = names.get("datings", "datings")
    for line, row in tables["datings"]:
        dataset.datings.append(Dating(
            dating_id=unique("Dating", _require(name, line, "dating_id", row.get("dating_id"))),
            period=_require(name, line, "period", row.get("period")),
            sub_period=_opt(row.get("sub_period")),
            start_year=_parse_int(name, line, "start_year", row.get("start_year")),
            end_year=_parse_int(name, line, "end_year", row.get("end_year")),
        ))

    name = names.get("groups", "groups")
    for line, row in tables["groups"]:
        dataset.groups.append(ChemicalGroup(
            group_id=unique("ChemicalGroup", _require(name, line, "group_id", row.get("group_id"))),
            name=_require(name, line, "name", row.get("name")),
            basis=_opt(row.get("basis")) or "chemical",
        ))

    name = names.get("media", "media")
    for line, row in tables["media"]:
        dataset.media.append(MediaRef(
            media_id=unique("MediaRef", _require(name, line, "media_id", row.get("media_id"))),
            kind=_require(name, line, "kind", row.get("kind")),
            uri=_require(name, line, "uri", row.get("uri")),
            caption=_opt(row.get("caption")),
        ))

    name = names["samples"]
    for line, row in tables["samples"]:
        raw_media = _opt(row.get("media_ids"))
        media = tuple(m.strip() for m in raw_media.split(";") if m.strip()) if raw_media else ()
        dataset.samples.append(Sample(
            sample_id=unique("Sample", _require(name, line, "sample_id", row.get("sample_id"))),
            provenance_ref=_require(name, line, "provenance_id", row.get("provenance_id")),
            description_ref=_opt(row.get("description_id")),
            dating_ref=_opt(row.get("dating_id")),
            group_ref=_opt(row.get("group_id")),
            supposed_origin_ref=_opt(row.get("supposed_origin_id")),
            attribution_ref=_opt(row.get("attribution_id")),
            storage_outside_ref=_opt(row.get("storage_outside_id")),
            media=media,
        ))

    name = names["analyses"]
    for line, row in tables["analyses"]:
        value = _parse_float(name, line, "value", row.get("value"))
        if value is None:
            raise MalformedRow(name, line, "column 'value' must be non-empty")
        dataset.analyses.append(AnalysisResult(
            analysis_id=unique("AnalysisResult", _require(name, line, "analysis_id", row.get("analysis_id"))),
            sample_ref=_require(name, line, "sample_id", row.get("sample_id")),
            technique=_require(name, line, "technique", row.get("technique")),
            component=_require(name, line, "component", row.get("component")),
            value=value,
            unit=_require(name, line, "unit", row.get("unit")),
            run_tag=_opt(row.get("run_tag")) or "",
        ))

    return dataset


def build_star(
    dataset: Dataset,
    vocabulary: Vocabulary | None = None,
    location_enricher: "Callable[[LocationRef], LocationRef] | None" = None,
) -> StarSchema:
    """Flatten a valid dataset into the star schema.

    One fact per analysis record. Samples lacking a dating, description or
    group link route to the sentinel dimension members; provenance paths are
    materialised at all four levels so rollups never lose facts.

    location_enricher, when given, may repair gappy locations from an external
    source before resolution; it is off by default.
    """
    report = validate_dataset(dataset, vocabulary)
    if not report.ok:
        raise ValidationFailed(report)

    locations = dataset.locations
    if location_enricher is not None:
        locations = [location_enricher(loc) for loc in locations]

    dim_provenance = {
        loc.location_id: LocationPath(*(resolve_location_level(loc, lv) for lv in LOCATION_LEVELS))
        for loc in sorted(locations, key=lambda l: l.location_id)
    }
    dim_dating: dict[str, Dating | None] = {UNKNOWN_KEY: None}
    dim_dating.update({d.dating_id: d for d in sorted(dataset.datings, key=lambda d: d.dating_id)})
    dim_description: dict[str, Description | None] = {UNKNOWN_KEY: None}
    dim_description.update(
        {d.description_id: d for d in sorted(dataset.descriptions, key=lambda d: d.description_id)}
    )
    dim_group: dict[str, ChemicalGroup | None] = {UNGROUPED_KEY: None}
    dim_group.update({g.group_id: g for g in sorted(dataset.groups, key=lambda g: g.group_id)})

    samples = {s.sample_id: s for s in dataset.samples}
    facts = []
    for a in sorted(dataset.analyses, key=lambda a: (a.sample_ref, a.analysis_id)):
        s = samples[a.sample_ref]
        facts.append(FactRecord(
            sample_id=s.sample_id,
            analysis_id=a.analysis_id,
            technique=a.technique,
            component=a.component,
            value=a.value,
            unit=a.unit,
            provenance_key=s.provenance_ref,
            dating_key=s.dating_ref or UNKNOWN_KEY,
            description_key=s.description_ref or UNKNOWN_KEY,
            group_key=s.group_ref or UNGROUPED_KEY,
        ))

    return StarSchema(
        facts=tuple(facts),
        dim_provenance=dim_provenance,
        dim_dating=dim_dating,
        dim_description=dim_description,
        dim_group=dim_group,
    )


def _csv_bytes(header: list[str], rows: list[list[str]]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _label_cell(label) -> str:
    return label if isinstance(label, str) else ""


def export_star(star: StarSchema, format: str = "csv_bundle") -> dict[str, bytes]:
    """Serialise a star back to a source-shaped bundle.

    Re-parsing and re-building the exported bundle reproduces the star
    field-for-field. Sentinel dimension rows are not written (they are
    re-created on import); exported run tags reuse the analysis id, which
    keeps repeated measurements distinct.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown bundle format {format!r}")

    sample_rows: dict[str, list[str]] = {}
    analysis_rows: list[list[str]] = []
    for f in star.facts:
        sample_rows.setdefault(f.sample_id, [
            f.sample_id,
            "" if f.description_key == UNKNOWN_KEY else f.description_key,
            f.provenance_key,
            "" if f.dating_key == UNKNOWN_KEY else f.dating_key,
            "" if f.group_key == UNGROUPED_KEY else f.group_key,
            "",
        ])
        analysis_rows.append([
            f.analysis_id, f.sample_id, f.technique, f.component,
            repr(f.value), f.unit, f.analysis_id,
        ])

    location_rows = [
        [key, _label_cell(p.site), _label_cell(p.town), _label_cell(p.region), _label_cell(p.country), "", ""]
        for key, p in sorted(star.dim_provenance.items())
    ]
    description_rows = [
        [key, d.free_text, d.typology, d.category, d.part_object or "",
         "true" if d.waster else "false", d.firing_mode or ""]
        for key, d in sorted(star.dim_description.items()) if d is not None
    ]
    dating_rows = [
        [key, d.period, d.sub_period or "",
         "" if d.start_year is None else str(d.start_year),
         "" if d.end_year is None else str(d.end_year)]
        for key, d in sorted(star.dim_dating.items()) if d is not None
    ]
    group_rows = [
        [key, g.name, g.basis]
        for key, g in sorted(star.dim_group.items()) if g is not None
    ]

    tables = {
        "samples": (list(_TABLE_COLUMNS["samples"][0]), [sample_rows[k] for k in sorted(sample_rows)]),
        "locations": (list(_TABLE_COLUMNS["locations"][0]), location_rows),
        "analyses": (list(_TABLE_COLUMNS["analyses"][0]), sorted(analysis_rows)),
        "descriptions": (list(_TABLE_COLUMNS["descriptions"][0]) + list(_TABLE_COLUMNS["descriptions"][1]),
                         description_rows),
        "datings": (list(_TABLE_COLUMNS["datings"][0]), dating_rows),
        "groups": (list(_TABLE_COLUMNS["groups"][0]), group_rows),
        "media": (list(_TABLE_COLUMNS["media"][0]), []),
    }

    out: dict[str, bytes] = {}
    for table, (header, rows) in tables.items():
        if format == "csv_bundle":
            out[table + ".csv"] = _csv_bytes(header, rows)
        else:
            objs = [dict(zip(header, row)) for row in rows]
            out[table + ".json"] = json.dumps(objs, indent=1, ensure_ascii=False).encode("utf-8")
    return out


def write_bundle(directory: "str | os.PathLike", streams: Mapping[str, bytes]) -> None:
    os.makedirs(directory, exist_ok=True)
    for name, data in streams.items():
        with open(os.path.join(directory, name), "wb") as fh:
            fh.write(data)


def read_bundle(directory: "str | os.PathLike", format: str = "csv_bundle") -> dict[str, bytes]:
    """Collect the known table files from a directory into a bundle mapping."""
    suffix = ".csv" if format == "csv_bundle" else ".json"
    out: dict[str, bytes] = {}
    for table in _REQUIRED_TABLES + _OPTIONAL_TABLES:
        path = os.path.join(directory, table + suffix)
        if os.path.exists(path):
            with open(path, "rb") as fh:
                out[table + suffix] = fh.read()
    return out


def load_star(directory: "str | os.PathLike", format: str = "csv_bundle",
              vocabulary: Vocabulary | None = None) -> StarSchema:
    """Read a bundle directory, validate it and build the star."""
    return build_star(parse_source(read_bundle(directory, format), format), vocabulary)
