"""Candidate-to-vulnerability matching."""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..errors import CatalogError
from .nvd import VulnDb, VulnRecord
from .versions import Version

if TYPE_CHECKING:  # pragma: no cover
    from .catalog import Candidate


def match_vulns(candidate: "Candidate", db: VulnDb) -> list[VulnRecord]:
    """All records whose product prefix and version range cover a candidate.

    Results are ordered by CVE id.  Raises :class:`CatalogError` when the
    candidate's version cannot be parsed.
    """
    try:
        version = Version.parse(candidate.version)
    except CatalogError:
        raise CatalogError(
            f"candidate {candidate.product!r}: unparseable version {candidate.version!r}"
        ) from None
    product = candidate.product.lower()
    return sorted(
        (r for r in db.records if r.matches(product, version)),
        key=lambda r: r.cve_id,
    )
