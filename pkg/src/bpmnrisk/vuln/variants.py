"""Configuration-variant generation.

Every variant assigns one concrete candidate product to each
catalog-matched application.  Exhaustive enumeration is the cartesian
product; pruning strategies bound the blow-up: forcing one product per
(participant, purpose) group, or dropping rarely-used candidates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from ..errors import CatalogError
from .catalog import Candidate, ResolvedCatalog


class PruningKind(Enum):
    EXHAUSTIVE = "exhaustive"
    ONE_PER_PARTICIPANT = "one-per-participant"
    USAGE_SHARE_FLOOR = "usage-share-floor"


@dataclass(frozen=True)
class Pruning:
    kind: PruningKind
    floor: float = 0.0

    @staticmethod
    def parse(text: str) -> "Pruning":
        text = text.strip().lower()
        if text in ("exhaustive", "none"):
            return Pruning(PruningKind.EXHAUSTIVE)
        if text == "one-per-participant":
            return Pruning(PruningKind.ONE_PER_PARTICIPANT)
        if text.startswith("usage-share-floor"):
            _, _, value = text.partition(":")
            try:
                return Pruning(PruningKind.USAGE_SHARE_FLOOR, float(value or "0"))
            except ValueError:
                raise CatalogError(f"bad usage-share floor in {text!r}") from None
        raise CatalogError(f"unknown pruning policy {text!r}")


@dataclass(frozen=True)
class ConfigVariant:
    id: str
    assignment: dict[str, Candidate]  # asset id -> chosen candidate
    weight: float

    def products(self) -> set[str]:
        return {c.product for c in self.assignment.values()}

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "weight": self.weight,
            "assignment": {
                asset: cand.to_dict() for asset, cand in sorted(self.assignment.items())
            },
        }


def _variant_id(index: int, choices: list[tuple[str, Candidate]]) -> str:
    distinct: list[str] = []
    for _, candidate in choices:
        if candidate.slug not in distinct:
            distinct.append(candidate.slug)
    return f"v{index:02d}+" + "+".join(distinct)


def generate_variants(catalog: ResolvedCatalog, pruning: Pruning) -> list[ConfigVariant]:
    """Enumerate weighted configuration variants under a pruning policy.

    Weights are the products of the chosen candidates' usage shares,
    renormalized to sum to one.  Raises :class:`CatalogError` when the
    catalog is empty or pruning leaves an application without candidates.
    """
    if not catalog.assignments:
        raise CatalogError("catalog matched no applications; nothing to vary")

    assignments = sorted(catalog.assignments, key=lambda a: a.asset_id)

    if pruning.kind is PruningKind.USAGE_SHARE_FLOOR:
        filtered = []
        for a in assignments:
            keep = tuple(c for c in a.candidates if c.usage_share >= pruning.floor)
            if not keep:
                raise CatalogError(
                    f"usage-share floor {pruning.floor} removes every candidate "
                    f"for {a.asset_id!r}"
                )
            filtered.append((a, keep))
        choice_groups = [[(a.asset_id,), keep] for a, keep in filtered]
    elif pruning.kind is PruningKind.ONE_PER_PARTICIPANT:
        # applications with the same purpose (same catalog entry) inside one
        # participant share a single product choice
        grouped: dict[tuple[str, str], list] = {}
        order: list[tuple[str, str]] = []
        for a in assignments:
            key = (a.participant, a.entry_match)
            if key not in grouped:
                grouped[key] = []
                order.append(key)
            grouped[key].append(a)
        choice_groups = []
        for key in sorted(order):
            members = grouped[key]
            ids = tuple(m.asset_id for m in members)
            choice_groups.append([ids, members[0].candidates])
    else:
        choice_groups = [[(a.asset_id,), a.candidates] for a in assignments]

    variants: list[ConfigVariant] = []
    raw_weights: list[float] = []
    combos = itertools.product(*(candidates for _, candidates in choice_groups))
    for combo in combos:
        assignment: dict[str, Candidate] = {}
        weight = 1.0
        flat_choices: list[tuple[str, Candidate]] = []
        for (asset_ids, _), candidate in zip(choice_groups, combo):
            weight *= candidate.usage_share
            for asset_id in asset_ids:
                assignment[asset_id] = candidate
                flat_choices.append((asset_id, candidate))
        variants.append(ConfigVariant(id="", assignment=assignment, weight=weight))
        raw_weights.append(weight)

    total = sum(raw_weights)
    if total <= 0:
        raise CatalogError("all variant weights are zero; check usage shares")
    out: list[ConfigVariant] = []
    for i, variant in enumerate(variants):
        choices = sorted(variant.assignment.items())
        out.append(
            ConfigVariant(
                id=_variant_id(i, choices),
                assignment=variant.assignment,
                weight=variant.weight / total,
            )
        )
    return out
