"""Exception hierarchy shared across the toolkit.

Every stage raises a subclass of :class:`BpmnRiskError` so the CLI can map
failures to per-stage exit codes.
"""

from __future__ import annotations


class BpmnRiskError(Exception):
    """Base class for all toolkit errors."""


class MalParseError(BpmnRiskError):
    """Lexical or syntactic error in a threat-language source file."""

    def __init__(self, message: str, origin: str = "<mal>", line: int = 0, column: int = 0):
        self.origin = origin
        self.line = line
        self.column = column
        super().__init__(f"{origin}:{line}:{column}: {message}")


class MalResolutionError(BpmnRiskError):
    """Semantic error while resolving a parsed threat language."""


class BpmnParseError(BpmnRiskError):
    """Malformed or unsupported BPMN input."""


class MappingError(BpmnRiskError):
    """Process model cannot be translated to an instance model."""


class CatalogError(BpmnRiskError):
    """Invalid component catalog or unsatisfiable variant generation."""


class FeedError(BpmnRiskError):
    """Vulnerability feed file cannot be read at all."""


class EnrichmentError(BpmnRiskError):
    """Variant and instance model disagree during enrichment."""


class GraphError(BpmnRiskError):
    """Invalid attack-graph construction or simulation configuration."""


class ReportError(BpmnRiskError):
    """Aggregation or emission failure."""


class ConfigError(BpmnRiskError):
    """Invalid run configuration."""
