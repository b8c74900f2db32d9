"""Factual and counterfactual bookkeeping per setting pair, and the derived metrics.

Every pair keeps two channels.  The factual channel accumulates the
observable while that pair is the one actually set; the counterfactual
channel accumulates what the same pair would have given during the rest of
the run.  Both channels store a weighted sum and a weight (time in exact
mode, coincidence count in sampled mode), so their means are dwell
normalized.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EmptyCountsError, InsufficientDwellError, InvalidArgumentError

PAIR_LABELS = ("00", "01", "10", "11")
METRICS_COLUMNS = (
    ["mode", "seed", "gamma", "mu_tau", "duration_tau"]
    + [f"E{k}" for k in PAIR_LABELS]
    + [f"Ecf{k}" for k in PAIR_LABELS]
    + ["s_chsh", "s8", "delta"]
)
# denominators below this make a delta term contribute nothing
DELTA_ZERO_GUARD = 1e-9


class AbsentCounterfactualWarning(UserWarning):
    pass


@dataclass
class CoincidenceCounts:
    cpp: int = 0
    cpm: int = 0
    cmp: int = 0
    cmm: int = 0

    def __post_init__(self):
        if min(self.cpp, self.cpm, self.cmp, self.cmm) < 0:
            raise InvalidArgumentError("coincidence counts must be non-negative")

    @property
    def total(self) -> int:
        return self.cpp + self.cpm + self.cmp + self.cmm

    @property
    def correlation_sum(self) -> int:
        return self.cpp + self.cmm - self.cpm - self.cmp

    def __iadd__(self, other: "CoincidenceCounts") -> "CoincidenceCounts":
        self.cpp += other.cpp
        self.cpm += other.cpm
        self.cmp += other.cmp
        self.cmm += other.cmm
        return self

    @classmethod
    def from_categories(cls, codes: np.ndarray) -> "CoincidenceCounts":
        """Counts from outcome codes 0..3 = (++, +-, -+, --)."""
        c = np.bincount(np.asarray(codes, dtype=np.int64), minlength=4)
        return cls(int(c[0]), int(c[1]), int(c[2]), int(c[3]))


def expectation_from_counts(c: CoincidenceCounts) -> float:
    """E = (C++ + C-- - C+- - C-+) / (C++ + C-- + C+- + C-+)."""
    total = c.total
    if total == 0:
        raise EmptyCountsError("no coincidences recorded")
    return c.correlation_sum / total


@dataclass
class PairLedger:
    factual_sum: np.ndarray = field(default_factory=lambda: np.zeros(4))
    factual_weight: np.ndarray = field(default_factory=lambda: np.zeros(4))
    cf_sum: np.ndarray = field(default_factory=lambda: np.zeros(4))
    cf_weight: np.ndarray = field(default_factory=lambda: np.zeros(4))
    factual_counts: list = field(default_factory=lambda: [CoincidenceCounts() for _ in range(4)])
    cf_counts: list = field(default_factory=lambda: [CoincidenceCounts() for _ in range(4)])

    def _channel(self, is_factual: bool):
        if is_factual:
            return self.factual_sum, self.factual_weight
        return self.cf_sum, self.cf_weight

    def accumulate(self, pair_index: int, is_factual: bool, ab_value: float, weight: float) -> None:
        if not 0 <= pair_index < 4:
            raise InvalidArgumentError(f"pair index must be 0..3, got {pair_index!r}")
        if not weight > 0:
            raise InvalidArgumentError(f"weight must be > 0, got {weight!r}")
        if not -1.0 <= ab_value <= 1.0:
            raise InvalidArgumentError(f"ab value must lie in [-1, 1], got {ab_value!r}")
        sums, weights = self._channel(is_factual)
        sums[pair_index] += weight * ab_value
        weights[pair_index] += weight

    def accumulate_bulk(self, pair_index: int, is_factual: bool, weighted_sum: float, weight: float) -> None:
        """Add a pre-summed block (sum of weight*ab and total weight)."""
        if weight == 0 and weighted_sum == 0:
            return
        if not weight > 0:
            raise InvalidArgumentError(f"weight must be > 0, got {weight!r}")
        if abs(weighted_sum) > weight * (1 + 1e-12):
            raise InvalidArgumentError("block mean outside [-1, 1]")
        sums, weights = self._channel(is_factual)
        sums[pair_index] += weighted_sum
        weights[pair_index] += weight

    def accumulate_counts(self, pair_index: int, is_factual: bool, counts: CoincidenceCounts) -> None:
        if counts.total == 0:
            return
        (self.factual_counts if is_factual else self.cf_counts)[pair_index] += counts
        self.accumulate_bulk(pair_index, is_factual, float(counts.correlation_sum), float(counts.total))


class PairMeans(NamedTuple):
    factual: np.ndarray
    counterfactual: np.ndarray  # nan where the counterfactual channel is empty
    cf_absent: tuple


def pair_means(ledger: PairLedger) -> PairMeans:
    for k in range(4):
        if not ledger.factual_weight[k] > 0:
            raise InsufficientDwellError(k)
    factual = ledger.factual_sum / ledger.factual_weight
    absent = tuple(bool(w <= 0) for w in ledger.cf_weight)
    with np.errstate(invalid="ignore", divide="ignore"):
        cf = np.where(ledger.cf_weight > 0, ledger.cf_sum / ledger.cf_weight, np.nan)
    return PairMeans(factual, cf, absent)


def s_chsh(E: Sequence[float]) -> float:
    """|E(a0,b0) - E(a0,b1)| + |E(a1,b0) + E(a1,b1)|, pairs in index order."""
    e00, e01, e10, e11 = (float(x) for x in E)
    return abs(e00 - e01) + abs(e10 + e11)


def s8(E: Sequence[float], E_cf_triple: Sequence[float]) -> float:
    """Time-ordered CHSH combination including counterfactual terms (bound 8).

    ``E_cf_triple`` holds the counterfactual sums over the three intervals in
    which a pair was not set, i.e. three times the dwell-normalized
    counterfactual mean.
    """
    e = [float(x) for x in E]
    c = [float(x) for x in E_cf_triple]
    if not all(map(math.isfinite, e + c)):
        raise InvalidArgumentError("s8 needs finite factual and counterfactual terms")
    return abs(e[0] + c[0] - e[1] - c[1]) + abs(e[3] + c[3] + e[2] + c[2])


def delta_terms(means: PairMeans) -> np.ndarray:
    terms = np.zeros(4)
    for k in range(4):
        if means.cf_absent[k]:
            continue
        f, c = float(means.factual[k]), float(means.counterfactual[k])
        denom = abs(f) + abs(c)
        if denom >= DELTA_ZERO_GUARD:
            terms[k] = abs(f - c) / denom
    return terms


def delta(means: PairMeans) -> float:
    """Sum over pairs of |m_f - m_cf| / (|m_f| + |m_cf|).

    Zero when every counterfactual mean equals its factual mean.  Pairs with
    no counterfactual data contribute nothing and raise a warning.
    """
    if any(means.cf_absent):
        missing = [PAIR_LABELS[k] for k, a in enumerate(means.cf_absent) if a]
        warnings.warn(f"no counterfactual data for pairs {missing}", AbsentCounterfactualWarning, stacklevel=2)
    return float(delta_terms(means).sum())


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


@dataclass(frozen=True)
class Metrics:
    E: tuple
    E_cf: tuple
    s_chsh: float
    s8: float
    delta: float
    mode: str
    seed: int
    gamma: float
    mu_tau: float
    duration_tau: float
    # per-pair factual weight: coincidences in sampled mode, dwell time in exact mode
    factual_weight: tuple = (0.0, 0.0, 0.0, 0.0)
    cf_absent: tuple = (False, False, False, False)

    def row(self) -> list[str]:
        values = [self.mode, self.seed, self.gamma, self.mu_tau, self.duration_tau]
        values += list(self.E) + list(self.E_cf) + [self.s_chsh, self.s8, self.delta]
        return [_fmt(v) for v in values]

    def as_dict(self) -> dict:
        return dict(zip(METRICS_COLUMNS, self.row()))


def metrics_from_ledger(ledger: PairLedger, *, mode: str, seed: int, gamma: float,
                        mu_tau: float, duration_tau: float) -> Metrics:
    means = pair_means(ledger)
    cf_for_s8 = np.where(np.isnan(means.counterfactual), 0.0, means.counterfactual)
    return Metrics(
        E=tuple(float(x) for x in means.factual),
        E_cf=tuple(float(x) for x in means.counterfactual),
        s_chsh=s_chsh(means.factual),
        s8=s8(means.factual, 3.0 * cf_for_s8),
        delta=delta(means),
        mode=mode,
        seed=int(seed),
        gamma=float(gamma),
        mu_tau=float(mu_tau),
        duration_tau=float(duration_tau),
        factual_weight=tuple(float(w) for w in ledger.factual_weight),
        cf_absent=means.cf_absent,
    )
