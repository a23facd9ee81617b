"""Unify personal data exports, query them, and lay them out as treemaps and timelines."""

from ._core import (
    CATEGORIES,
    ArchiveFormatError,
    ConflictError,
    Dataset,
    DegenerateLayoutError,
    Error,
    FormatVersionError,
    RuleError,
    SecurityError,
    Selection,
    SensitivityStore,
    UnknownElementError,
    UnknownServiceError,
    UnsupportedServiceError,
    ValidationError,
    View,
    WrapperFormatError,
    category_color,
    detect_service,
    element_id,
    fixture_preset,
    fixture_services,
    generate_fixture,
    ingest,
    ingest_file,
    repair_mojibake,
    unwrap_js_export,
)

__all__ = [name for name in dir() if not name.startswith("_")]
