"""Syntax tree for the threat-modeling language.

The parser produces an :class:`UnresolvedLanguage`; name resolution and
inheritance flattening happen later in :mod:`bpmnrisk.mal.resolver`.
Source locations are carried for diagnostics but excluded from equality so
that pretty-print round-trips compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


@dataclass(frozen=True)
class SourceLoc:
    line: int
    column: int


@dataclass(frozen=True)
class MalSource:
    """A language source text plus an identifier used in error messages."""

    text: str
    origin: str = "<mal>"


class StepKind(Enum):
    OR = "|"
    AND = "&"


class DistKind(Enum):
    INSTANT = "instant"
    CONSTANT = "constant"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class Distribution:
    """Local time-to-compromise distribution of an attack step.

    ``instant`` has no parameter, ``constant`` stores days (may be ``inf``
    for an unreachable sentinel), ``exponential`` stores a per-day rate.
    """

    kind: DistKind
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.kind is DistKind.EXPONENTIAL and not self.value > 0:
            raise ValueError(f"exponential rate must be positive, got {self.value}")
        if self.kind is DistKind.CONSTANT and self.value < 0:
            raise ValueError(f"constant days must be nonnegative, got {self.value}")

    @staticmethod
    def instant() -> "Distribution":
        return Distribution(DistKind.INSTANT)

    @staticmethod
    def constant(days: float) -> "Distribution":
        return Distribution(DistKind.CONSTANT, days)

    @staticmethod
    def exponential(rate: float) -> "Distribution":
        return Distribution(DistKind.EXPONENTIAL, rate)

    @staticmethod
    def unreachable() -> "Distribution":
        """Sentinel for steps that can never be compromised."""
        return Distribution(DistKind.CONSTANT, math.inf)

    @property
    def is_unreachable(self) -> bool:
        return self.kind is DistKind.CONSTANT and math.isinf(self.value)

    def mean_days(self) -> float:
        if self.kind is DistKind.INSTANT:
            return 0.0
        if self.kind is DistKind.CONSTANT:
            return self.value
        return 1.0 / self.value

    def to_dict(self) -> dict:
        if self.kind is DistKind.INSTANT:
            return {"kind": "instant"}
        if self.kind is DistKind.CONSTANT:
            value = "inf" if math.isinf(self.value) else self.value
            return {"kind": "constant", "days": value}
        return {"kind": "exponential", "rate": self.value}

    @staticmethod
    def from_dict(d: dict) -> "Distribution":
        kind = d["kind"]
        if kind == "instant":
            return Distribution.instant()
        if kind == "constant":
            days = d["days"]
            return Distribution.constant(math.inf if days == "inf" else float(days))
        if kind == "exponential":
            return Distribution.exponential(float(d["rate"]))
        raise ValueError(f"unknown distribution kind {kind!r}")


@dataclass(frozen=True)
class TargetPath:
    """Navigation path of an attack-step target: role segments then a step name."""

    segments: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("target path needs at least a step name")

    @property
    def roles(self) -> tuple[str, ...]:
        return self.segments[:-1]

    @property
    def step(self) -> str:
        return self.segments[-1]

    def __str__(self) -> str:
        return ".".join(self.segments)


@dataclass(frozen=True)
class AttackStepDef:
    name: str
    kind: StepKind
    ttc: Distribution = field(default_factory=Distribution.instant)
    targets: tuple[TargetPath, ...] = ()
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class DefenseDef:
    name: str
    targets: tuple[TargetPath, ...] = ()
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AssetTypeDef:
    name: str
    category: str
    extends: str | None = None
    attack_steps: tuple[AttackStepDef, ...] = ()
    defenses: tuple[DefenseDef, ...] = ()
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)


class Multiplicity(Enum):
    ONE = "1"
    MANY = "*"


@dataclass(frozen=True)
class AssociationDef:
    """``Left [leftRole] leftMult <- Name -> rightMult [rightRole] Right``.

    The role written next to an asset names that end; the opposite asset
    navigates to this end using it.  ``left_mult`` bounds how many left
    instances may attach to one right instance (and vice versa).
    """

    left_asset: str
    left_role: str
    left_mult: Multiplicity
    name: str
    right_mult: Multiplicity
    right_role: str
    right_asset: str
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class UnresolvedLanguage:
    assets: tuple[AssetTypeDef, ...]
    associations: tuple[AssociationDef, ...]

    def asset_names(self) -> list[str]:
        return [a.name for a in self.assets]


def merge_sources(*languages: UnresolvedLanguage) -> UnresolvedLanguage:
    """Concatenate several parsed sources into one language for resolution."""
    assets: list[AssetTypeDef] = []
    assocs: list[AssociationDef] = []
    for lang in languages:
        assets.extend(lang.assets)
        assocs.extend(lang.associations)
    return UnresolvedLanguage(tuple(assets), tuple(assocs))
