"""Vulnerability enrichment: feeds, catalogs, variants, time-to-compromise."""

from .catalog import (
    CatalogAssignment,
    CatalogEntry,
    Candidate,
    ComponentCatalog,
    ResolvedCatalog,
    resolve_catalog,
)
from .enrich import EXPLOIT_STEP, AssetEnrichment, EnrichedModel, enrich
from .matching import match_vulns
from .nvd import CpeMatch, VulnDb, VulnRecord, load_nvd, product_prefix
from .ttc import (
    SkillLevel,
    SkillParams,
    TtcParams,
    expected_compromise_days,
    ttc_mcqueen,
)
from .variants import ConfigVariant, Pruning, PruningKind, generate_variants
from .versions import Version, VersionRange

__all__ = [
    "AssetEnrichment",
    "Candidate",
    "CatalogAssignment",
    "CatalogEntry",
    "ComponentCatalog",
    "ConfigVariant",
    "CpeMatch",
    "EXPLOIT_STEP",
    "EnrichedModel",
    "Pruning",
    "PruningKind",
    "ResolvedCatalog",
    "SkillLevel",
    "SkillParams",
    "TtcParams",
    "Version",
    "VersionRange",
    "VulnDb",
    "VulnRecord",
    "enrich",
    "expected_compromise_days",
    "generate_variants",
    "load_nvd",
    "match_vulns",
    "product_prefix",
    "resolve_catalog",
    "ttc_mcqueen",
]
