"""Analyzer setting signals a(t), b(t).

Three measuring-time distributions are supported: four consecutive blocks
(one per setting pair), quasi-periodic alternation and random (telegraph)
switching.  All of them return a :class:`SettingSignal`, a right-continuous
piecewise-constant function of time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .angles import SettingPair
from .errors import InvalidArgumentError, OutOfDomainError


@dataclass(frozen=True)
class SettingSignal:
    """Piecewise-constant angle signal.

    ``values[k]`` holds on ``[breakpoints[k], breakpoints[k+1])``.  The first
    value also holds for every time before ``breakpoints[0]`` (the history).
    """

    breakpoints: np.ndarray
    values: np.ndarray
    domain_end: float

    def __post_init__(self):
        bp = np.array(self.breakpoints, dtype=float)
        vals = np.array(self.values, dtype=float)
        if bp.ndim != 1 or bp.shape != vals.shape or bp.size == 0:
            raise InvalidArgumentError("breakpoints and values must be equal-length 1-d arrays")
        if bp[0] > 0:
            raise InvalidArgumentError("first breakpoint must be <= 0")
        if np.any(np.diff(bp) <= 0):
            raise InvalidArgumentError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(bp)) and np.all(np.isfinite(vals))):
            raise InvalidArgumentError("signal contains non-finite entries")
        if not self.domain_end >= bp[-1]:
            raise InvalidArgumentError("domain_end precedes the last breakpoint")
        bp.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "domain_end", float(self.domain_end))

    @property
    def jump_times(self) -> np.ndarray:
        return self.breakpoints[1:]

    def rows(self) -> list[tuple[float, float]]:
        """(time, value) pairs, one per segment start, for CSV export."""
        return list(zip(self.breakpoints.tolist(), self.values.tolist()))


def constant_signal(value: float, domain_end: float) -> SettingSignal:
    return SettingSignal(np.array([min(0.0, domain_end)]), np.array([value]), domain_end)


def value_at(signal: SettingSignal, t: float) -> float:
    """Right-continuous lookup: at a jump time the new value is returned."""
    if t > signal.domain_end:
        raise OutOfDomainError(f"t={t!r} beyond signal domain end {signal.domain_end!r}")
    k = int(np.searchsorted(signal.breakpoints, t, side="right")) - 1
    return float(signal.values[max(k, 0)])


def values_at(signal: SettingSignal, times: np.ndarray) -> np.ndarray:
    """Vectorized :func:`value_at`."""
    times = np.asarray(times, dtype=float)
    if times.size and times.max() > signal.domain_end:
        raise OutOfDomainError(
            f"t={times.max()!r} beyond signal domain end {signal.domain_end!r}"
        )
    k = np.searchsorted(signal.breakpoints, times, side="right") - 1
    return signal.values[np.maximum(k, 0)]


def _alternating(start: float, jumps: np.ndarray, low: float, high: float, end: float) -> SettingSignal:
    bp = np.concatenate(([start], jumps))
    vals = np.where(np.arange(bp.size) % 2 == 0, low, high).astype(float)
    return SettingSignal(bp, vals, end)


@dataclass(frozen=True)
class TelegraphConfig:
    rate: float
    low: float
    high: float
    seed: int
    duration: float
    # jumps fall in (start, start + duration]; the signal sits at `low` before
    start: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate >= 0):
            raise InvalidArgumentError(f"telegraph rate must be >= 0, got {self.rate!r}")
        if not (math.isfinite(self.duration) and self.duration > 0):
            raise InvalidArgumentError(f"duration must be > 0, got {self.duration!r}")
        if self.start > 0:
            raise InvalidArgumentError("start must be <= 0")
        if int(self.seed) < 0:
            raise InvalidArgumentError("seed must be non-negative")


def telegraph(config: TelegraphConfig) -> SettingSignal:
    """Random telegraph signal with exponential dwell times of mean 1/rate."""
    end = config.start + config.duration
    if config.rate == 0:
        return _alternating(config.start, np.empty(0), config.low, config.high, end)

    rng = np.random.default_rng(int(config.seed))
    scale = 1.0 / config.rate
    expected = config.rate * config.duration
    chunk = int(expected + 6 * math.sqrt(expected) + 16)
    t = config.start
    jumps = []
    while True:
        times = t + np.cumsum(rng.exponential(scale, size=chunk))
        inside = times[times <= end]
        jumps.append(inside)
        if inside.size < times.size:
            break
        t = float(times[-1])
    return _alternating(config.start, np.concatenate(jumps), config.low, config.high, end)


def quasi_periodic(
    period: float,
    jitter: float,
    low: float,
    high: float,
    seed: int,
    duration: float,
    start: float = 0.0,
    offset: float = 0.0,
) -> SettingSignal:
    """Alternating signal with intervals ``period * (1 + u)``, ``u ~ U[-jitter, jitter]``.

    ``offset`` delays the whole jump train; the first jump is at
    ``start + offset + interval_0``.
    """
    if not (math.isfinite(period) and period > 0):
        raise InvalidArgumentError(f"period must be > 0, got {period!r}")
    if not (0 <= jitter < 1):
        raise InvalidArgumentError(f"jitter must lie in [0, 1), got {jitter!r}")
    if not duration > 0:
        raise InvalidArgumentError(f"duration must be > 0, got {duration!r}")
    if offset < 0:
        raise InvalidArgumentError("offset must be >= 0")
    end = start + duration
    n = int(math.ceil((duration - offset) / (period * (1 - jitter)))) + 1
    n = max(n, 0)
    if jitter > 0:
        rng = np.random.default_rng(int(seed))
        intervals = period * (1 + rng.uniform(-jitter, jitter, size=n))
    else:
        intervals = np.full(n, period)
    jumps = start + offset + np.cumsum(intervals)
    return _alternating(start, jumps[jumps <= end], low, high, end)


def block_schedule(pairs: Sequence[SettingPair], total: float) -> tuple[SettingSignal, SettingSignal]:
    """Four consecutive quarters of [0, total], quarter k carrying ``pairs[k]``."""
    if len(pairs) != 4:
        raise InvalidArgumentError("block_schedule needs exactly four setting pairs")
    if not (math.isfinite(total) and total > 0):
        raise InvalidArgumentError(f"total must be > 0, got {total!r}")
    starts = [k * total / 4 for k in range(4)]

    def build(angles):
        bp, vals = [starts[0]], [angles[0]]
        for t, v in zip(starts[1:], angles[1:]):
            if v != vals[-1]:
                bp.append(t)
                vals.append(v)
        return SettingSignal(np.array(bp), np.array(vals), total)

    return build([p.a for p in pairs]), build([p.b for p in pairs])

