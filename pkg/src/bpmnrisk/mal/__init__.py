"""Threat-modeling language: parsing, resolution, bundled vocabulary."""

from __future__ import annotations

from importlib import resources

from .ast import (
    AssetTypeDef,
    AssociationDef,
    AttackStepDef,
    DefenseDef,
    DistKind,
    Distribution,
    MalSource,
    Multiplicity,
    StepKind,
    TargetPath,
    UnresolvedLanguage,
    merge_sources,
)
from .parser import parse_mal, parse_mal_file, pretty_print
from .resolver import (
    AssetType,
    MalLanguage,
    ResolvedDefense,
    ResolvedStep,
    ResolvedTarget,
    RoleEnd,
    resolve_language,
)

BUNDLED_LANGUAGE_NAME = "corelang-subset.mal"


def bundled_language_source() -> MalSource:
    """The language file shipped with the package."""
    text = (
        resources.files("bpmnrisk.mal")
        .joinpath("data", BUNDLED_LANGUAGE_NAME)
        .read_text(encoding="utf-8")
    )
    return MalSource(text, f"bundled:{BUNDLED_LANGUAGE_NAME}")


def load_bundled_language() -> MalLanguage:
    return resolve_language(parse_mal(bundled_language_source()))


__all__ = [
    "AssetType",
    "AssetTypeDef",
    "AssociationDef",
    "AttackStepDef",
    "BUNDLED_LANGUAGE_NAME",
    "DefenseDef",
    "DistKind",
    "Distribution",
    "MalLanguage",
    "MalSource",
    "Multiplicity",
    "ResolvedDefense",
    "ResolvedStep",
    "ResolvedTarget",
    "RoleEnd",
    "StepKind",
    "TargetPath",
    "UnresolvedLanguage",
    "bundled_language_source",
    "load_bundled_language",
    "merge_sources",
    "parse_mal",
    "parse_mal_file",
    "pretty_print",
    "resolve_language",
]
