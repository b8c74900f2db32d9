"""Delayed tracking of the source angle alpha(t).

The hidden angle obeys

    d alpha/dt = -(gamma / tau) * e(t),   e(t) = alpha(t - tau) - a(t)

and is integrated with fixed-step explicit Euler on the grid
``h = tau / step_per_tau``.  Because ``tau`` is a whole number of steps, the
delayed value is always an earlier grid sample; it is read back from a ring
buffer holding the last ``step_per_tau`` states.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .angles import HALF_PI, QUARTER_PI, wrap_report
from .errors import InvalidArgumentError, NumericFailureError, OutOfDomainError
from .scheduler import SettingSignal, values_at


class ErrorWrap(str, enum.Enum):
    HALF_PI = "half_pi"
    NONE = "none"


@dataclass(frozen=True)
class TrackingParams:
    gamma: float
    tau: float = 1.0
    error_wrap: ErrorWrap = ErrorWrap.HALF_PI
    step_per_tau: int = 64

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise InvalidArgumentError(f"gamma must be >= 0, got {self.gamma!r}")
        if not (math.isfinite(self.tau) and self.tau > 0):
            raise InvalidArgumentError(f"tau must be > 0, got {self.tau!r}")
        if int(self.step_per_tau) != self.step_per_tau or self.step_per_tau < 8:
            raise InvalidArgumentError(f"step_per_tau must be an integer >= 8, got {self.step_per_tau!r}")
        object.__setattr__(self, "error_wrap", ErrorWrap(self.error_wrap))
        object.__setattr__(self, "step_per_tau", int(self.step_per_tau))

    @property
    def h(self) -> float:
        return self.tau / self.step_per_tau


@dataclass(frozen=True)
class AlphaTrajectory:
    t0: float
    h: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.samples.flags.writeable = False

    @property
    def t_end(self) -> float:
        return self.t0 + self.h * (self.samples.size - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.samples.size)

    def rows(self) -> list[tuple[float, float, float]]:
        """(t_over_tau, alpha_raw, alpha_reported) with tau taken as the time unit."""
        return [(t, x, wrap_report(x)) for t, x in zip(self.times.tolist(), self.samples.tolist())]


def grid_size(t_start: float, t_end: float, h: float) -> int:
    """Number of Euler steps covering [t_start, t_end]; the last grid point may overshoot by < h."""
    return int(math.ceil((t_end - t_start) / h - 1e-9))


def integrate(
    params: TrackingParams,
    a_signal: SettingSignal,
    t_start: float,
    t_end: float,
    alpha_history: float = 0.0,
) -> AlphaTrajectory:
    """Integrate the tracking equation on [t_start, t_end].

    alpha is held at ``alpha_history`` on [t_start - tau, t_start].  The
    forcing a(t) is read right-continuously at every grid point, so jumps act
    from the first grid point at or after them.
    """
    if not t_end > t_start:
        raise InvalidArgumentError("t_end must exceed t_start")
    if not math.isfinite(alpha_history):
        raise InvalidArgumentError("alpha_history must be finite")
    h = params.h
    m = params.step_per_tau
    n = grid_size(t_start, t_end, h)
    if a_signal.domain_end < t_end:
        raise OutOfDomainError(
            f"setting signal ends at {a_signal.domain_end!r}, integration needs {t_end!r}"
        )
    forcing = values_at(a_signal, t_start + h * np.arange(n)).tolist()

    k = h * params.gamma / params.tau
    wrap = params.error_wrap is ErrorWrap.HALF_PI
    ring = [float(alpha_history)] * m
    out = [0.0] * (n + 1)
    x = out[0] = float(alpha_history)
    for i in range(n):
        slot = i % m
        delayed = ring[slot]
        ring[slot] = x
        e = delayed - forcing[i]
        if wrap:
            # inline wrap_diff; the float modulo edge case only nudges e by one ulp
            e = (e + QUARTER_PI) % HALF_PI - QUARTER_PI
        x = x - k * e
        if not math.isfinite(x):
            raise NumericFailureError("alpha became non-finite", t_start + (i + 1) * h)
        out[i + 1] = x
    return AlphaTrajectory(t_start, h, np.array(out))


def alpha_at(traj: AlphaTrajectory, t):
    """Linear interpolation between grid samples; accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    lo, hi = traj.t0, traj.t_end
    if t_arr.size and (t_arr.min() < lo - 1e-12 * max(1.0, abs(lo)) or t_arr.max() > hi + 1e-12 * max(1.0, abs(hi))):
        raise OutOfDomainError(f"t outside trajectory domain [{lo!r}, {hi!r}]")
    y = traj.samples
    pos = np.clip((t_arr - lo) / traj.h, 0, y.size - 1)
    if y.size == 1:
        out = np.full(t_arr.shape, y[0])
    else:
        i = np.minimum(np.floor(pos).astype(int), y.size - 2)
        out = y[i] + (pos - i) * (y[i + 1] - y[i])
        on_grid = pos == np.round(pos)
        out = np.where(on_grid, y[np.round(pos).astype(int)], out)
    return float(out) if np.ndim(t) == 0 else out
