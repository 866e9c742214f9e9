"""sherdcube: embedded warehouse and OLAP engine for ceramic sample analyses."""

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
    Ungrouped,
    UNGROUPED,
    ValidationReport,
    Violation,
    Vocabulary,
    default_vocabulary,
    resolve_location_level,
    validate_dataset,
)
from .etl import (
    DuplicateId,
    FactRecord,
    MalformedRow,
    MissingFile,
    StarSchema,
    ValidationFailed,
    build_star,
    export_star,
    load_star,
    parse_source,
)
from .cube import (
    CellStats,
    Cube,
    CubeView,
    DimensionSpec,
    Member,
    MemberFilter,
    STANDARD_DIMENSIONS,
    TextFilter,
    build_cube,
)
from .cql import parse, plan_and_execute, pretty_print
from .generator import GeneratorManifest, default_manifest, generate

__version__ = "0.1.0"

__all__ = [
    "AnalysisResult",
    "ChemicalGroup",
    "Dataset",
    "Dating",
    "Description",
    "LocationRef",
    "MediaRef",
    "Sample",
    "Unknown",
    "Ungrouped",
    "UNGROUPED",
    "ValidationReport",
    "Violation",
    "Vocabulary",
    "default_vocabulary",
    "resolve_location_level",
    "validate_dataset",
    "DuplicateId",
    "FactRecord",
    "MalformedRow",
    "MissingFile",
    "StarSchema",
    "ValidationFailed",
    "build_star",
    "export_star",
    "load_star",
    "parse_source",
    "CellStats",
    "Cube",
    "CubeView",
    "DimensionSpec",
    "Member",
    "MemberFilter",
    "STANDARD_DIMENSIONS",
    "TextFilter",
    "build_cube",
    "parse",
    "plan_and_execute",
    "pretty_print",
    "GeneratorManifest",
    "default_manifest",
    "generate",
    "__version__",
]
