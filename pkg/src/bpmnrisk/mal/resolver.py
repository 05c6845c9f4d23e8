"""Semantic resolution of a parsed threat language.

Flattens inheritance (child steps shadow same-named parent steps), validates
association endpoints and role uniqueness, and resolves every target path to
a concrete (asset type, attack step) pair.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import MalResolutionError
from .ast import (
    AssociationDef,
    Distribution,
    StepKind,
    TargetPath,
    UnresolvedLanguage,
)


@dataclass(frozen=True)
class ResolvedTarget:
    """A target path together with the terminal asset type and step it names."""

    roles: tuple[str, ...]
    asset: str
    step: str

    def __str__(self) -> str:
        return ".".join(self.roles + (self.step,))


@dataclass(frozen=True)
class ResolvedStep:
    name: str
    kind: StepKind
    ttc: Distribution
    targets: tuple[ResolvedTarget, ...]
    declared_in: str


@dataclass(frozen=True)
class ResolvedDefense:
    name: str
    targets: tuple[ResolvedTarget, ...]
    declared_in: str


@dataclass(frozen=True)
class AssetType:
    name: str
    category: str
    extends: str | None
    steps: dict[str, ResolvedStep] = field(default_factory=dict)
    defenses: dict[str, ResolvedDefense] = field(default_factory=dict)


@dataclass(frozen=True)
class RoleEnd:
    """One navigable association end as seen from a particular asset."""

    association: AssociationDef
    # which end of the association the navigation ARRIVES at
    side: str  # "left" | "right"

    @property
    def target_asset(self) -> str:
        return self.association.left_asset if self.side == "left" else self.association.right_asset


@dataclass(frozen=True)
class MalLanguage:
    """A fully resolved language: no dangling names anywhere."""

    assets: dict[str, AssetType]
    associations: tuple[AssociationDef, ...]
    # role name -> arrival end, per asset (inheritance included)
    roles: dict[str, dict[str, RoleEnd]]

    def is_subtype(self, child: str, ancestor: str) -> bool:
        cur: str | None = child
        while cur is not None:
            if cur == ancestor:
                return True
            cur = self.assets[cur].extends
        return False

    def navigate(self, asset: str, role: str) -> RoleEnd:
        try:
            return self.roles[asset][role]
        except KeyError:
            raise MalResolutionError(f"asset {asset!r} has no role {role!r}") from None

    def step(self, asset: str, name: str) -> ResolvedStep:
        try:
            return self.assets[asset].steps[name]
        except KeyError:
            raise MalResolutionError(f"asset {asset!r} has no attack step {name!r}") from None


def _ancestry(assets: dict[str, "_RawAsset"], name: str) -> list[str]:
    """Inheritance chain from root ancestor down to (and including) name."""
    chain: list[str] = []
    seen: set[str] = set()
    cur: str | None = name
    while cur is not None:
        if cur in seen:
            raise MalResolutionError(f"inheritance cycle involving asset {cur!r}")
        seen.add(cur)
        if cur not in assets:
            raise MalResolutionError(f"unknown asset {cur!r} in extends chain of {name!r}")
        chain.append(cur)
        cur = assets[cur].extends
    chain.reverse()
    return chain


@dataclass
class _RawAsset:
    name: str
    category: str
    extends: str | None
    steps: list
    defenses: list


def resolve_language(unresolved: UnresolvedLanguage) -> MalLanguage:
    """Validate and flatten a parsed language.

    Raises :class:`MalResolutionError` for duplicate assets or steps,
    inheritance cycles, unknown associated assets, ambiguous roles, and
    unresolvable target paths.
    """
    raw: dict[str, _RawAsset] = {}
    for asset in unresolved.assets:
        if asset.name in raw:
            raise MalResolutionError(f"duplicate asset definition {asset.name!r}")
        raw[asset.name] = _RawAsset(
            asset.name, asset.category, asset.extends, list(asset.attack_steps), list(asset.defenses)
        )

    for assoc in unresolved.associations:
        for end in (assoc.left_asset, assoc.right_asset):
            if end not in raw:
                raise MalResolutionError(
                    f"association {assoc.name!r} references unknown asset {end!r}"
                )

    # navigable roles per asset, inheritance included
    roles: dict[str, dict[str, RoleEnd]] = {name: {} for name in raw}
    ancestries = {name: _ancestry(raw, name) for name in raw}
    for name in raw:
        lineage = set(ancestries[name])
        for assoc in unresolved.associations:
            ends = []
            if assoc.left_asset in lineage:
                ends.append((assoc.right_role, RoleEnd(assoc, "right")))
            if assoc.right_asset in lineage:
                ends.append((assoc.left_role, RoleEnd(assoc, "left")))
            for role, end in ends:
                existing = roles[name].get(role)
                if existing is not None and existing != end:
                    raise MalResolutionError(
                        f"role {role!r} is ambiguous on asset {name!r} "
                        f"(associations {existing.association.name!r} and {assoc.name!r})"
                    )
                roles[name][role] = end

    # flatten inheritance: walk each ancestry root-first, shadowing by name
    flat_steps: dict[str, dict] = {}
    flat_defenses: dict[str, dict] = {}
    for name in raw:
        steps: dict = {}
        defenses: dict = {}
        for ancestor in ancestries[name]:
            seen_here: set[str] = set()
            for step in raw[ancestor].steps:
                if step.name in seen_here:
                    raise MalResolutionError(
                        f"duplicate attack step {step.name!r} on asset {ancestor!r}"
                    )
                seen_here.add(step.name)
                defenses.pop(step.name, None)
                steps[step.name] = (step, ancestor)
            for defense in raw[ancestor].defenses:
                if defense.name in seen_here:
                    raise MalResolutionError(
                        f"duplicate step/defense name {defense.name!r} on asset {ancestor!r}"
                    )
                seen_here.add(defense.name)
                steps.pop(defense.name, None)
                defenses[defense.name] = (defense, ancestor)
        flat_steps[name] = steps
        flat_defenses[name] = defenses

    def resolve_path(owner: str, path: TargetPath, *, context: str) -> ResolvedTarget:
        current = owner
        for role in path.roles:
            end = roles[current].get(role)
            if end is None:
                raise MalResolutionError(
                    f"{context}: cannot navigate role {role!r} from asset {current!r} "
                    f"in target {path}"
                )
            current = end.target_asset
        if path.step not in flat_steps[current]:
            raise MalResolutionError(
                f"{context}: target {path} does not name an attack step on asset {current!r}"
            )
        return ResolvedTarget(path.roles, current, path.step)

    assets: dict[str, AssetType] = {}
    for name in sorted(raw):
        steps: dict[str, ResolvedStep] = {}
        for step_name, (step, declared_in) in flat_steps[name].items():
            context = f"asset {name!r} step {step_name!r}"
            targets = tuple(resolve_path(name, p, context=context) for p in step.targets)
            steps[step_name] = ResolvedStep(step_name, step.kind, step.ttc, targets, declared_in)
        defenses: dict[str, ResolvedDefense] = {}
        for def_name, (defense, declared_in) in flat_defenses[name].items():
            context = f"asset {name!r} defense {def_name!r}"
            targets = tuple(resolve_path(name, p, context=context) for p in defense.targets)
            defenses[def_name] = ResolvedDefense(def_name, targets, declared_in)
        assets[name] = AssetType(
            name=name,
            category=raw[name].category,
            extends=raw[name].extends,
            steps=steps,
            defenses=defenses,
        )

    return MalLanguage(assets=assets, associations=unresolved.associations, roles=roles)
