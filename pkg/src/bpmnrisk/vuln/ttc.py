"""Expected time-to-compromise from matched vulnerabilities.

Three-process closed form: with ``V`` matched vulnerabilities of which a
fraction ``m`` have a public exploit, the chance that a ready exploit
applies is ``P1 = 1 - exp(-V * m / k)``.  The expected compromise time
mixes the three attacker processes:

    T = t1 * P1  +  t2 * (1 - P1) * (1 - u)  +  t3 * u * (1 - P1)

where ``t1`` is the time to use a known exploit, ``t2`` the time to build
an exploit for a known vulnerability, ``t3`` the time to find and exploit
a new vulnerability, and ``u`` the weight of that last process.  The
constants are calibration knobs per attacker skill; the defaults below are
project defaults, not published values (override via configuration).

The result is wrapped as an exponential distribution with rate ``1/T`` so
the simulator can sample it; zero vulnerabilities yield the unreachable
sentinel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from ..errors import ConfigError
from ..mal.ast import Distribution
from .nvd import VulnRecord


class SkillLevel(Enum):
    NOVICE = "novice"
    INTERMEDIATE = "intermediate"
    EXPERT = "expert"


@dataclass(frozen=True)
class SkillParams:
    """Per-skill constants; all positive, with t1 <= min(t2, t3).

    The ordering constraint keeps expected time monotone: more
    vulnerabilities (or more public exploits) can only speed an attacker
    up, never slow one down.
    """

    t1: float  # days: apply an already-available exploit
    t2: float  # days: develop an exploit for a known vulnerability
    t3: float  # days: discover and exploit an unknown vulnerability
    k: float   # vulnerability-pool scaling in P1
    u: float   # weight of the discovery process, in [0, 1]

    def __post_init__(self) -> None:
        values = (self.t1, self.t2, self.t3, self.k)
        if not all(math.isfinite(v) and v > 0 for v in values):
            raise ConfigError(f"skill parameters must be finite and positive: {self}")
        if not 0.0 <= self.u <= 1.0:
            raise ConfigError(f"process weight u must lie in [0,1]: {self.u}")
        if self.t1 > min(self.t2, self.t3):
            raise ConfigError(
                "t1 must not exceed t2 or t3 (a ready exploit is the fastest path); "
                f"got t1={self.t1}, t2={self.t2}, t3={self.t3}"
            )


@dataclass(frozen=True)
class TtcParams:
    by_skill: dict[SkillLevel, SkillParams]

    @staticmethod
    def default() -> "TtcParams":
        return TtcParams(
            by_skill={
                SkillLevel.NOVICE: SkillParams(t1=5.8, t2=40.0, t3=120.0, k=12.0, u=0.5),
                SkillLevel.INTERMEDIATE: SkillParams(t1=2.0, t2=25.0, t3=75.0, k=6.0, u=0.35),
                SkillLevel.EXPERT: SkillParams(t1=1.0, t2=10.0, t3=30.0, k=2.0, u=0.2),
            }
        )

    def for_skill(self, skill: SkillLevel) -> SkillParams:
        return self.by_skill[skill]


def expected_compromise_days(
    vuln_count: int, exploit_fraction: float, params: SkillParams
) -> float:
    """Closed-form expected time in days; ``inf`` when nothing is exploitable."""
    if vuln_count <= 0:
        return math.inf
    p1 = 1.0 - math.exp(-vuln_count * exploit_fraction / params.k)
    return (
        params.t1 * p1
        + params.t2 * (1.0 - p1) * (1.0 - params.u)
        + params.t3 * params.u * (1.0 - p1)
    )


def ttc_mcqueen(
    vulns: list[VulnRecord], skill: SkillLevel, params: TtcParams | None = None
) -> Distribution:
    """Distribution of the time to exploit an application with these vulns."""
    params = params or TtcParams.default()
    sp = params.for_skill(skill)
    count = len(vulns)
    if count == 0:
        return Distribution.unreachable()
    fraction = sum(1 for v in vulns if v.exploit_available) / count
    expected = expected_compromise_days(count, fraction, sp)
    return Distribution.exponential(1.0 / expected)
