"""Run configurations, single runs, Gamma sweeps and CSV output."""
from __future__ import annotations

import csv
import enum
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from .angles import ChshSettings, chsh_pairs, wrap_report
from .detection import conditional_E, p_plus_plus, sample_categories
from .dynamics import AlphaTrajectory, ErrorWrap, TrackingParams, alpha_at, grid_size, integrate
from .errors import ConfigError, InvalidArgumentError
from .ledger import METRICS_COLUMNS, CoincidenceCounts, Metrics, PairLedger, metrics_from_ledger
from .scheduler import (
    SettingSignal,
    TelegraphConfig,
    block_schedule,
    quasi_periodic,
    telegraph,
    values_at,
)

SEED_ENV_VAR = "BELLHDA_SEED"
TRACE_COLUMNS = ("t_over_tau", "alpha", "a", "b")

# independent random streams derived from the run seed
_STREAM_A, _STREAM_B, _STREAM_OUTCOMES, _STREAM_EVENTS = range(4)


class Scenario(str, enum.Enum):
    STATIC_BLOCKS = "static_blocks"
    RANDOM_TELEGRAPH = "random_telegraph"
    QUASI_PERIODIC = "quasi_periodic"


class Mode(str, enum.Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


class EventTiming(str, enum.Enum):
    UNIFORM = "uniform"
    POISSON = "poisson"


@dataclass(frozen=True)
class RunConfig:
    scenario: Scenario = Scenario.RANDOM_TELEGRAPH
    gamma: float = 1.0
    mu_tau: float = 0.25
    duration_tau: float = 2000.0
    transient_tau: float = 200.0
    rate_per_tau: float = 500.0
    step_per_tau: int = 64
    seed: int = 0
    mode: Mode = Mode.EXACT
    error_wrap: ErrorWrap = ErrorWrap.HALF_PI
    settings: ChshSettings = field(default_factory=ChshSettings)
    events: EventTiming = EventTiming.UNIFORM
    jitter: float = 0.0
    alpha_history: float = 0.0
    trace_every: int = 1

    def __post_init__(self):
        try:
            for name, kind in (("scenario", Scenario), ("mode", Mode),
                               ("error_wrap", ErrorWrap), ("events", EventTiming)):
                object.__setattr__(self, name, kind(getattr(self, name)))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for name in ("gamma", "mu_tau", "duration_tau", "transient_tau", "rate_per_tau",
                     "jitter", "alpha_history"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.gamma < 0:
            raise ConfigError("gamma must be >= 0")
        if self.mu_tau < 0:
            raise ConfigError("mu_tau must be >= 0")
        if not self.duration_tau > self.transient_tau >= 0:
            raise ConfigError("need duration_tau > transient_tau >= 0")
        if not self.rate_per_tau > 0:
            raise ConfigError("rate_per_tau must be > 0")
        if int(self.step_per_tau) != self.step_per_tau or self.step_per_tau < 8:
            raise ConfigError("step_per_tau must be an integer >= 8")
        for name in ("duration_tau", "transient_tau"):
            steps = getattr(self, name) * self.step_per_tau
            if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
                raise ConfigError(f"{name} must be a multiple of 1/step_per_tau")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if not 0 <= self.jitter < 1:
            raise ConfigError("jitter must lie in [0, 1)")
        if self.scenario is Scenario.QUASI_PERIODIC and not self.mu_tau > 0:
            raise ConfigError("quasi_periodic needs mu_tau > 0 (period = 1/mu_tau)")
        if self.trace_every < 1:
            raise ConfigError("trace_every must be >= 1")

    @property
    def tracking(self) -> TrackingParams:
        return TrackingParams(self.gamma, 1.0, self.error_wrap, self.step_per_tau)


_FLOAT_KEYS = {"gamma", "mu_tau", "duration_tau", "transient_tau", "rate_per_tau",
               "jitter", "alpha_history", "a0", "a1", "b0", "b1"}
_INT_KEYS = {"step_per_tau", "seed", "trace_every"}
_STR_KEYS = {"scenario", "mode", "error_wrap", "events"}
CONFIG_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS


def config_from_mapping(values: Mapping[str, str], environ: Mapping[str, str] | None = None) -> RunConfig:
    """Build a RunConfig from string values; ``BELLHDA_SEED`` in ``environ`` overrides the seed."""
    values = dict(values)
    unknown = sorted(set(values) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    if environ is not None and environ.get(SEED_ENV_VAR, "").strip():
        values["seed"] = environ[SEED_ENV_VAR].strip()
    kwargs: dict = {}
    angles: dict = {}
    for key, raw in values.items():
        try:
            if key in _FLOAT_KEYS:
                val = float(raw)
            elif key in _INT_KEYS:
                val = int(raw, 10)
            else:
                val = raw.strip()
        except ValueError:
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
        if key in ("a0", "a1", "b0", "b1"):
            angles[key] = val
        else:
            kwargs[key] = val
    if angles:
        try:
            kwargs["settings"] = ChshSettings(**angles)
        except InvalidArgumentError as exc:
            raise ConfigError(str(exc)) from None
    return RunConfig(**kwargs)


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return values


def load_config(path: str | os.PathLike, environ: Mapping[str, str] | None = None) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_mapping(parse_config_text(text), os.environ if environ is None else environ)


def config_text(config: RunConfig) -> str:
    """Inverse of :func:`load_config`, handy for writing sweep bases."""
    lines = []
    for f in fields(RunConfig):
        val = getattr(config, f.name)
        if f.name == "settings":
            for name in ("a0", "a1", "b0", "b1"):
                lines.append(f"{name} = {getattr(val, name)!r}")
        elif isinstance(val, enum.Enum):
            lines.append(f"{f.name} = {val.value}")
        else:
            lines.append(f"{f.name} = {val!r}")
    return "\n".join(lines) + "\n"


def stream_seed(seed: int, stream: int) -> int:
    return int(np.random.SeedSequence([int(seed), stream]).generate_state(1, np.uint64)[0])


def build_signals(config: RunConfig) -> tuple[SettingSignal, SettingSignal]:
    s = config.settings
    start, span = -config.transient_tau, config.duration_tau + config.transient_tau
    if config.scenario is Scenario.STATIC_BLOCKS:
        return block_schedule(chsh_pairs(s), config.duration_tau)
    if config.scenario is Scenario.RANDOM_TELEGRAPH:
        a = telegraph(TelegraphConfig(config.mu_tau, s.a0, s.a1, stream_seed(config.seed, _STREAM_A), span, start))
        b = telegraph(TelegraphConfig(config.mu_tau, s.b0, s.b1, stream_seed(config.seed, _STREAM_B), span, start))
        return a, b
    period = 1.0 / config.mu_tau
    a = quasi_periodic(period, config.jitter, s.a0, s.a1, stream_seed(config.seed, _STREAM_A), span, start)
    # half-period offset so that all four pairs occur
    b = quasi_periodic(period, config.jitter, s.b0, s.b1, stream_seed(config.seed, _STREAM_B), span, start,
                       offset=period / 2)
    return a, b


def pair_indices(a: np.ndarray, b: np.ndarray, settings: ChshSettings) -> np.ndarray:
    """Map instantaneous angles to pair index 2*i + j (nearest setting wins)."""
    ia = (np.abs(a - settings.a1) < np.abs(a - settings.a0)).astype(np.int8)
    ib = (np.abs(b - settings.b1) < np.abs(b - settings.b0)).astype(np.int8)
    return 2 * ia + ib


@dataclass(frozen=True)
class RunResult:
    config: RunConfig
    metrics: Metrics
    trajectory: AlphaTrajectory
    a_signal: SettingSignal
    b_signal: SettingSignal


def _accumulate_exact(ledger: PairLedger, config: RunConfig, alpha: np.ndarray, pair: np.ndarray, h: float):
    # trapezoid rule on each grid interval; the interval belongs to the pair set at its left end
    for k, (a, b) in enumerate(chsh_pairs(config.settings)):
        e = conditional_E(a, b, alpha)
        area = 0.5 * (e[1:] + e[:-1]) * h
        on = pair == k
        n_on = int(on.sum())
        ledger.accumulate_bulk(k, True, float(area[on].sum()), h * n_on)
        ledger.accumulate_bulk(k, False, float(area[~on].sum()), h * (on.size - n_on))


def event_times(config: RunConfig) -> np.ndarray:
    """Coincidence times in [0, duration): a uniform comb from t=0, or a Poisson stream."""
    rate, T = config.rate_per_tau, config.duration_tau
    if config.events is EventTiming.UNIFORM:
        return np.arange(int(round(rate * T))) / rate
    rng = np.random.default_rng(stream_seed(config.seed, _STREAM_EVENTS))
    n_guess = int(rate * T + 6 * math.sqrt(rate * T) + 16)
    times = np.cumsum(rng.exponential(1.0 / rate, size=n_guess))
    while times[-1] < T:
        more = times[-1] + np.cumsum(rng.exponential(1.0 / rate, size=n_guess))
        times = np.concatenate((times, more))
    return times[times < T]


def _accumulate_sampled(ledger: PairLedger, config: RunConfig, traj: AlphaTrajectory,
                        pair: np.ndarray, h: float):
    times = event_times(config)
    alpha = alpha_at(traj, times)
    if config.events is EventTiming.UNIFORM:
        cell = np.floor(np.arange(times.size) * config.step_per_tau / config.rate_per_tau)
    else:
        cell = np.floor(times / h)
    ev_pair = pair[np.minimum(cell.astype(np.int64), pair.size - 1)]
    rng = np.random.default_rng(stream_seed(config.seed, _STREAM_OUTCOMES))
    draws = rng.random((times.size, 4))
    for k, (a, b) in enumerate(chsh_pairs(config.settings)):
        codes = sample_categories(p_plus_plus(a, b, alpha), draws[:, k])
        on = ev_pair == k
        ledger.accumulate_counts(k, True, CoincidenceCounts.from_categories(codes[on]))
        ledger.accumulate_counts(k, False, CoincidenceCounts.from_categories(codes[~on]))


def run(config: RunConfig) -> RunResult:
    """Integrate alpha(t) over [-transient, duration] and evaluate the metrics on [0, duration]."""
    a_sig, b_sig = build_signals(config)
    params = config.tracking
    h = params.h
    t_start = -config.transient_tau
    traj = integrate(params, a_sig, t_start, config.duration_tau, config.alpha_history)

    first = grid_size(t_start, 0.0, h) if config.transient_tau > 0 else 0
    alpha = traj.samples[first:]
    left = traj.times[first:-1]
    pair = pair_indices(values_at(a_sig, left), values_at(b_sig, left), config.settings)

    ledger = PairLedger()
    if config.mode is Mode.EXACT:
        _accumulate_exact(ledger, config, alpha, pair, h)
    else:
        _accumulate_sampled(ledger, config, traj, pair, h)
    metrics = metrics_from_ledger(
        ledger,
        mode=config.mode.value,
        seed=config.seed,
        gamma=config.gamma,
        mu_tau=config.mu_tau,
        duration_tau=config.duration_tau,
    )
    return RunResult(config, metrics, traj, a_sig, b_sig)


def emit_trace(result: RunResult, every: int | None = None) -> list[tuple[float, float, float, float]]:
    """(t_over_tau, alpha reported in [-pi/4, pi/2), a, b) on every ``every``-th grid point."""
    step = result.config.trace_every if every is None else every
    if step < 1:
        raise InvalidArgumentError("decimation must be >= 1")
    traj = result.trajectory
    times = traj.times[::step]
    alpha = traj.samples[::step]
    a = values_at(result.a_signal, times)
    b = values_at(result.b_signal, times)
    return [(t, wrap_report(x), av, bv)
            for t, x, av, bv in zip(times.tolist(), alpha.tolist(), a.tolist(), b.tolist())]


def _run_metrics(config: RunConfig) -> Metrics:
    return run(config).metrics


def sweep_configs(base: RunConfig, gammas: Sequence[float], replicates: int = 1) -> list[RunConfig]:
    if not gammas:
        raise InvalidArgumentError("gamma list is empty")
    if replicates < 1:
        raise InvalidArgumentError("replicates must be >= 1")
    return [replace(base, gamma=float(g), seed=base.seed + k) for g in gammas for k in range(replicates)]


def sweep_gamma(base: RunConfig, gammas: Sequence[float], replicates: int = 1, jobs: int = 1) -> list[Metrics]:
    """One run per (gamma, replicate); replicate k uses seed ``base.seed + k``.

    Rows come back in input order whatever the worker count.
    """
    configs = sweep_configs(base, gammas, replicates)
    if jobs <= 1 or len(configs) == 1:
        return [_run_metrics(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_metrics, configs))


def write_csv(header: Sequence[str], rows: Iterable[Sequence], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else repr(float(v)) for v in row])


def metrics_csv(metrics: Iterable[Metrics]) -> str:
    buf = io.StringIO()
    write_csv(METRICS_COLUMNS, (m.row() for m in metrics), buf)
    return buf.getvalue()


def trace_csv(rows: Iterable[Sequence[float]]) -> str:
    buf = io.StringIO()
    write_csv(TRACE_COLUMNS, rows, buf)
    return buf.getvalue()
