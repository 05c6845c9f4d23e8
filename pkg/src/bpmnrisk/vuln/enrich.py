"""Attach matched vulnerabilities and compromise-time estimates to a model.

For every application assigned a concrete product, matched CVEs become
``Vulnerability`` instances linked to the application (plus ``Exploit``
instances when a public exploit is known), and the application's ``exploit``
step gets its sampled time-to-compromise overridden.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import EnrichmentError
from ..mal.ast import Distribution
from ..mapping import AssetInstance, InstanceModel, Link
from .catalog import Candidate
from .matching import match_vulns
from .nvd import VulnDb
from .ttc import SkillLevel, TtcParams, ttc_mcqueen
from .variants import ConfigVariant

EXPLOIT_STEP = "exploit"


@dataclass(frozen=True)
class AssetEnrichment:
    matched_vulns: tuple[str, ...]  # CVE ids
    ttc_days: Distribution
    candidate: Candidate


@dataclass(frozen=True)
class EnrichedModel:
    base: InstanceModel
    variant_id: str
    per_asset: dict[str, AssetEnrichment]
    added_assets: tuple[AssetInstance, ...]
    added_links: tuple[Link, ...]

    @property
    def model(self) -> InstanceModel:
        """Base model plus the added vulnerability/exploit instances."""
        return InstanceModel(
            assets=tuple(
                sorted(self.base.assets + self.added_assets, key=lambda a: a.id)
            ),
            links=tuple(
                sorted(
                    self.base.links + self.added_links,
                    key=lambda l: (l.association, l.left, l.right),
                )
            ),
        )

    def ttc_override(self, asset_id: str) -> Distribution | None:
        enrichment = self.per_asset.get(asset_id)
        return enrichment.ttc_days if enrichment else None

    def to_dict(self) -> dict:
        doc = self.base.to_dict()
        doc["schema"] = "enriched-model/1"
        doc["variant"] = self.variant_id
        doc["enrichment"] = {
            asset_id: {
                "vulns": list(e.matched_vulns),
                "ttc": e.ttc_days.to_dict(),
                "candidate": e.candidate.to_dict(),
            }
            for asset_id, e in sorted(self.per_asset.items())
        }
        doc["added_assets"] = [
            {
                "id": a.id,
                "type": a.type_name,
                "name": a.display_name,
                "provenance": list(a.provenance),
            }
            for a in self.added_assets
        ]
        doc["added_links"] = [
            {"association": l.association, "left": l.left, "right": l.right}
            for l in self.added_links
        ]
        return doc

    def to_json(self) -> bytes:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True).encode()


def enrich(
    model: InstanceModel,
    variant: ConfigVariant,
    db: VulnDb,
    skill: SkillLevel = SkillLevel.INTERMEDIATE,
    params: TtcParams | None = None,
) -> EnrichedModel:
    """Build the enriched model for one configuration variant.

    The base model is never modified.  Raises :class:`EnrichmentError` when
    the variant assigns an asset the model does not contain.
    """
    params = params or TtcParams.default()
    asset_ids = model.asset_ids()
    added_assets: list[AssetInstance] = []
    added_links: list[Link] = []
    per_asset: dict[str, AssetEnrichment] = {}

    for asset_id in sorted(variant.assignment):
        if asset_id not in asset_ids:
            raise EnrichmentError(
                f"variant {variant.id!r} assigns unknown asset {asset_id!r}"
            )
        candidate = variant.assignment[asset_id]
        matched = match_vulns(candidate, db)
        provenance = model.asset(asset_id).provenance
        for record in matched:
            vuln_id = f"vuln:{asset_id}:{record.cve_id}"
            added_assets.append(
                AssetInstance(
                    id=vuln_id,
                    type_name="Vulnerability",
                    display_name=f"{record.cve_id} on {model.asset(asset_id).display_name}",
                    provenance=provenance,
                    meta={"cve": record.cve_id, "cvss": str(record.cvss_base)},
                )
            )
            added_links.append(Link("Weakness", vuln_id, asset_id))
            if record.exploit_available:
                exploit_id = f"exploit:{asset_id}:{record.cve_id}"
                added_assets.append(
                    AssetInstance(
                        id=exploit_id,
                        type_name="Exploit",
                        display_name=f"Public exploit for {record.cve_id}",
                        provenance=provenance,
                        meta={"cve": record.cve_id},
                    )
                )
                added_links.append(Link("Exploitation", exploit_id, vuln_id))
        per_asset[asset_id] = AssetEnrichment(
            matched_vulns=tuple(r.cve_id for r in matched),
            ttc_days=ttc_mcqueen(matched, skill, params),
            candidate=candidate,
        )

    return EnrichedModel(
        base=model,
        variant_id=variant.id,
        per_asset=per_asset,
        added_assets=tuple(added_assets),
        added_links=tuple(added_links),
    )
