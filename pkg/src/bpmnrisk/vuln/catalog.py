"""Component catalog: which concrete software may sit behind each mapped
application, with observed usage shares.

Catalog files are YAML::

    version: 1
    entries:
      - match: "app:part-integration"        # asset id or glob pattern
        candidates:
          - product: "cpe:2.3:a:lodash:lodash"
            version: "4.17.20"
            usage_share: 0.7
          - {product: "cpe:2.3:a:acme:safelib", version: "2.0.0", usage_share: 0.3}

``match`` selects Application assets by id (``fnmatch`` globbing).  When
several entries match one asset, the first entry in file order wins.
"""

from __future__ import annotations

from dataclasses import dataclass
from fnmatch import fnmatchcase
from pathlib import Path

import yaml

from ..errors import CatalogError
from ..mapping import InstanceModel
from .matching import match_vulns  # noqa: F401  (re-exported for convenience)
from .versions import Version


@dataclass(frozen=True)
class Candidate:
    product: str  # cpe:2.3:part:vendor:product prefix
    version: str
    usage_share: float

    def parsed_version(self) -> Version:
        return Version.parse(self.version)

    @property
    def slug(self) -> str:
        return f"{self.product.split(':')[-1]}-{self.version}"

    def to_dict(self) -> dict:
        return {"product": self.product, "version": self.version, "usage_share": self.usage_share}


@dataclass(frozen=True)
class CatalogEntry:
    match: str
    candidates: tuple[Candidate, ...]


@dataclass(frozen=True)
class ComponentCatalog:
    entries: tuple[CatalogEntry, ...]

    @staticmethod
    def from_dict(doc: dict) -> "ComponentCatalog":
        if not isinstance(doc, dict) or "entries" not in doc:
            raise CatalogError("catalog document needs a top-level 'entries' list")
        entries: list[CatalogEntry] = []
        for i, raw in enumerate(doc["entries"]):
            if "match" not in raw:
                raise CatalogError(f"catalog entry #{i} has no 'match'")
            candidates: list[Candidate] = []
            for c in raw.get("candidates", []):
                try:
                    candidate = Candidate(
                        product=str(c["product"]).lower(),
                        version=str(c["version"]),
                        usage_share=float(c.get("usage_share", 1.0)),
                    )
                except (KeyError, TypeError, ValueError) as exc:
                    raise CatalogError(f"catalog entry {raw['match']!r}: bad candidate: {exc}")
                if not 0.0 <= candidate.usage_share <= 1.0:
                    raise CatalogError(
                        f"catalog entry {raw['match']!r}: usage share outside [0,1]"
                    )
                candidate.parsed_version()  # fail early on junk versions
                candidates.append(candidate)
            if not candidates:
                raise CatalogError(f"catalog entry {raw['match']!r} has no candidates")
            total = sum(c.usage_share for c in candidates)
            if total > 1.0 + 1e-9:
                raise CatalogError(
                    f"catalog entry {raw['match']!r}: usage shares sum to {total}, above 1"
                )
            entries.append(CatalogEntry(match=str(raw["match"]), candidates=tuple(candidates)))
        return ComponentCatalog(entries=tuple(entries))

    @staticmethod
    def load(path) -> "ComponentCatalog":
        path = Path(path)
        try:
            doc = yaml.safe_load(path.read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise CatalogError(f"cannot read catalog {path}: {exc}") from exc
        return ComponentCatalog.from_dict(doc or {})


@dataclass(frozen=True)
class CatalogAssignment:
    """One concrete Application matched by a catalog entry."""

    asset_id: str
    entry_match: str
    candidates: tuple[Candidate, ...]
    participant: str


@dataclass(frozen=True)
class ResolvedCatalog:
    """Catalog patterns expanded against a concrete instance model."""

    assignments: tuple[CatalogAssignment, ...]

    def asset_ids(self) -> list[str]:
        return [a.asset_id for a in self.assignments]

    def __len__(self) -> int:
        return len(self.assignments)


def resolve_catalog(catalog: ComponentCatalog, model: InstanceModel) -> ResolvedCatalog:
    """Match catalog entries against the model's Application assets.

    First matching entry wins per asset; assets matched by no entry are
    simply not assigned (they contribute no vulnerabilities).
    """
    assignments: list[CatalogAssignment] = []
    for asset in model.assets:
        if asset.type_name != "Application":
            continue
        for entry in catalog.entries:
            if asset.id == entry.match or fnmatchcase(asset.id, entry.match):
                assignments.append(
                    CatalogAssignment(
                        asset_id=asset.id,
                        entry_match=entry.match,
                        candidates=entry.candidates,
                        participant=asset.meta.get("participant", ""),
                    )
                )
                break
    return ResolvedCatalog(assignments=tuple(assignments))
