"""Result aggregation, risk annotation, and emission."""

from .annotate import AnnotatedModel, ElementAnnotation, annotate
from .build import (
    COMPROMISE_STEPS,
    AssetInfo,
    PathStat,
    Report,
    VariantSummary,
    aggregate,
    element_risks,
)
from .emit import ReportFormat, emit
from .figures import render_figures

__all__ = [
    "AnnotatedModel",
    "AssetInfo",
    "COMPROMISE_STEPS",
    "ElementAnnotation",
    "PathStat",
    "Report",
    "ReportFormat",
    "VariantSummary",
    "aggregate",
    "annotate",
    "element_risks",
    "emit",
    "render_figures",
]
