"""Angle reduction and the canonical CHSH setting set.

Two reductions are used.  ``wrap_diff`` has period pi/2, the symmetry of the
polarization mixture, and is applied to the tracking error.  ``wrap_report``
has period 3*pi/4 and only maps angles into [-pi/4, pi/2) for output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidArgumentError

QUARTER_PI = math.pi / 4
HALF_PI = math.pi / 2
REPORT_PERIOD = 3 * math.pi / 4


def _check_finite(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise InvalidArgumentError(f"angle must be finite, got {x!r}")
    return x


def _reduce(x: float, lower: float, period: float) -> float:
    r = (x - lower) % period
    # float modulo can round up to exactly `period` for tiny negative inputs
    if r >= period:
        r -= period
    return r + lower


def wrap_diff(x: float) -> float:
    """Reduce ``x`` modulo pi/2 into [-pi/4, pi/4)."""
    return _reduce(_check_finite(x), -QUARTER_PI, HALF_PI)


def wrap_report(x: float) -> float:
    """Reduce ``x`` modulo 3*pi/4 into [-pi/4, pi/2). Display only."""
    return _reduce(_check_finite(x), -QUARTER_PI, REPORT_PERIOD)


class SettingPair(NamedTuple):
    a: float
    b: float


@dataclass(frozen=True)
class ChshSettings:
    a0: float = 0.0
    a1: float = math.pi / 4
    b0: float = math.pi / 8
    b1: float = 3 * math.pi / 8

    def __post_init__(self):
        for name in ("a0", "a1", "b0", "b1"):
            _check_finite(getattr(self, name))

    @property
    def a_angles(self) -> tuple[float, float]:
        return (self.a0, self.a1)

    @property
    def b_angles(self) -> tuple[float, float]:
        return (self.b0, self.b1)


def chsh_pairs(settings: ChshSettings = ChshSettings()) -> list[SettingPair]:
    """The four pairs in the order (a0,b0), (a0,b1), (a1,b0), (a1,b1).

    Pair index ``2*i + j`` corresponds to (a_i, b_j).
    """
    return [
        SettingPair(settings.a0, settings.b0),
        SettingPair(settings.a0, settings.b1),
        SettingPair(settings.a1, settings.b0),
        SettingPair(settings.a1, settings.b1),
    ]
