"""Dotted-numeric version parsing and range matching.

Versions are compared by their numeric components; a pre-release suffix
(e.g. ``1.2.0-beta1``) sorts before the plain release of the same numbers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering
from itertools import zip_longest

from ..errors import CatalogError

_VERSION_RE = re.compile(r"^(\d+(?:\.\d+)*)([-_.+]?[0-9A-Za-z._+-]*)$")


@total_ordering
@dataclass(frozen=True)
class Version:
    numbers: tuple[int, ...]
    suffix: str = ""

    @staticmethod
    def parse(text: str) -> "Version":
        m = _VERSION_RE.match(text.strip())
        if not m or not m.group(1):
            raise CatalogError(f"unparseable version {text!r}")
        numbers = tuple(int(part) for part in m.group(1).split("."))
        return Version(numbers, m.group(2).lstrip("-_."))

    def _key(self):
        padded = tuple(
            a if a is not None else 0
            for a, _ in zip_longest(self.numbers, range(8))
        )
        # release (no suffix) sorts after a pre-release of the same numbers
        return (padded, self.suffix == "", self.suffix)

    def __lt__(self, other: "Version") -> bool:
        return self._key() < other._key()

    def __str__(self) -> str:
        base = ".".join(str(n) for n in self.numbers)
        return f"{base}-{self.suffix}" if self.suffix else base


@dataclass(frozen=True)
class VersionRange:
    """Half-open/closed version interval, or an exact version."""

    exact: str | None = None
    start_including: str | None = None
    start_excluding: str | None = None
    end_including: str | None = None
    end_excluding: str | None = None

    def contains(self, version: Version) -> bool:
        if self.exact is not None:
            if self.exact in ("*", "-"):
                return True
            return version == Version.parse(self.exact)
        if self.start_including is not None and version < Version.parse(self.start_including):
            return False
        if self.start_excluding is not None and not Version.parse(self.start_excluding) < version:
            return False
        if self.end_including is not None and Version.parse(self.end_including) < version:
            return False
        if self.end_excluding is not None and not version < Version.parse(self.end_excluding):
            return False
        return True

    def to_dict(self) -> dict:
        return {
            k: v
            for k, v in (
                ("exact", self.exact),
                ("start_including", self.start_including),
                ("start_excluding", self.start_excluding),
                ("end_including", self.end_including),
                ("end_excluding", self.end_excluding),
            )
            if v is not None
        }
