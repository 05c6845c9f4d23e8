"""Offline NVD feed ingestion.

Reads the official JSON feed formats from disk (legacy 1.1 feeds and the
2.0 API/feed layout).  A record is kept when it has at least one platform
match and a CVSS base score; defective entries are skipped and counted.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import FeedError
from .versions import Version, VersionRange

log = logging.getLogger(__name__)


def product_prefix(cpe: str) -> str:
    """``cpe:2.3:part:vendor:product`` — the match key used everywhere."""
    return ":".join(cpe.split(":")[:5]).lower()


def cpe_version_field(cpe: str) -> str | None:
    parts = cpe.split(":")
    if len(parts) > 5 and parts[5] not in ("", "*", "-"):
        return parts[5]
    return None


@dataclass(frozen=True)
class CpeMatch:
    product: str  # cpe:2.3:part:vendor:product, lowercase
    version_range: VersionRange


@dataclass(frozen=True)
class VulnRecord:
    cve_id: str
    cpe_matches: tuple[CpeMatch, ...]
    cvss_base: float
    exploit_available: bool

    def matches(self, product: str, version: Version) -> bool:
        product = product.lower()
        return any(
            m.product == product and m.version_range.contains(version)
            for m in self.cpe_matches
        )


@dataclass(frozen=True)
class VulnDb:
    records: tuple[VulnRecord, ...]
    skipped: int = 0
    by_id: dict[str, VulnRecord] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "by_id", {r.cve_id: r for r in self.records})

    def __len__(self) -> int:
        return len(self.records)


def _range_from_match(node: dict, cpe_key: str) -> VersionRange | None:
    cpe = node.get(cpe_key, "")
    bounds = {
        "start_including": node.get("versionStartIncluding"),
        "start_excluding": node.get("versionStartExcluding"),
        "end_including": node.get("versionEndIncluding"),
        "end_excluding": node.get("versionEndExcluding"),
    }
    if any(bounds.values()):
        return VersionRange(**bounds)
    exact = cpe_version_field(cpe)
    if exact is not None:
        return VersionRange(exact=exact)
    return VersionRange(exact="*")


def _walk_nodes_11(nodes: list) -> list[CpeMatch]:
    matches: list[CpeMatch] = []
    for node in nodes:
        for m in node.get("cpe_match", []):
            if not m.get("vulnerable", True):
                continue
            cpe = m.get("cpe23Uri")
            if not cpe:
                continue
            rng = _range_from_match(m, "cpe23Uri")
            matches.append(CpeMatch(product_prefix(cpe), rng))
        matches.extend(_walk_nodes_11(node.get("children", [])))
    return matches


def _parse_item_11(item: dict) -> VulnRecord | None:
    cve = item.get("cve", {})
    cve_id = cve.get("CVE_data_meta", {}).get("ID")
    if not cve_id:
        return None
    matches = _walk_nodes_11(item.get("configurations", {}).get("nodes", []))
    impact = item.get("impact", {})
    score = None
    for key, path in (
        ("baseMetricV3", ("cvssV3", "baseScore")),
        ("baseMetricV2", ("cvssV2", "baseScore")),
    ):
        metric = impact.get(key)
        if metric:
            score = metric.get(path[0], {}).get(path[1])
            if score is not None:
                break
    refs = cve.get("references", {}).get("reference_data", [])
    exploit = any("Exploit" in (r.get("tags") or []) for r in refs)
    if not matches or score is None:
        return None
    return VulnRecord(cve_id, tuple(matches), float(score), exploit)


def _parse_item_20(item: dict) -> VulnRecord | None:
    cve = item.get("cve", {})
    cve_id = cve.get("id")
    if not cve_id:
        return None
    matches: list[CpeMatch] = []
    for config in cve.get("configurations", []):
        for node in config.get("nodes", []):
            for m in node.get("cpeMatch", []):
                if not m.get("vulnerable", True):
                    continue
                criteria = m.get("criteria")
                if not criteria:
                    continue
                rng = _range_from_match(m, "criteria")
                matches.append(CpeMatch(product_prefix(criteria), rng))
    score = None
    metrics = cve.get("metrics", {})
    for key in ("cvssMetricV31", "cvssMetricV30", "cvssMetricV2"):
        entries = metrics.get(key)
        if entries:
            score = entries[0].get("cvssData", {}).get("baseScore")
            if score is not None:
                break
    exploit = any("Exploit" in (r.get("tags") or []) for r in cve.get("references", []))
    if not matches or score is None:
        return None
    return VulnRecord(cve_id, tuple(matches), float(score), exploit)


def load_nvd(feed_files: list) -> VulnDb:
    """Load one or more NVD JSON feed files into an immutable database."""
    records: dict[str, VulnRecord] = {}
    skipped = 0
    for path in feed_files:
        path = Path(path)
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise FeedError(f"cannot read feed {path}: {exc}") from exc
        if "CVE_Items" in doc:
            items = doc["CVE_Items"]
            parse = _parse_item_11
        elif "vulnerabilities" in doc:
            items = doc["vulnerabilities"]
            parse = _parse_item_20
        else:
            raise FeedError(f"{path}: not a recognized NVD feed document")
        for item in items:
            try:
                record = parse(item)
            except (TypeError, ValueError, KeyError):
                record = None
            if record is None:
                skipped += 1
                continue
            cvss = record.cvss_base
            if not 0.0 <= cvss <= 10.0:
                skipped += 1
                continue
            records[record.cve_id] = record
    if skipped:
        log.warning("skipped %d defective feed records", skipped)
    ordered = tuple(sorted(records.values(), key=lambda r: r.cve_id))
    return VulnDb(records=ordered, skipped=skipped)
