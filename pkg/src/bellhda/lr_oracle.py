"""Brute-force checks on local deterministic models of the CHSH scenario.

With two settings per station a local deterministic strategy is a pair of
maps {0, 1} -> {+1, -1}; there are 16 of them.  Any mixture of strategies
(a fixed distribution of the hidden variable) obeys S <= 2.  If instead the
hidden variable is allowed to change in step with the measuring schedule,
the factual-only S can reach 4, but the time-ordered combination that also
counts counterfactual intervals stays within 8.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .angles import ChshSettings, chsh_pairs
from .errors import InvalidArgumentError
from .ledger import s8, s_chsh
from .scheduler import SettingSignal, block_schedule, values_at


@dataclass(frozen=True)
class DeterministicStrategy:
    a_map: tuple[int, int]
    b_map: tuple[int, int]

    def __post_init__(self):
        if any(v not in (1, -1) for v in self.a_map + self.b_map):
            raise InvalidArgumentError("strategy outcomes must be +1 or -1")

    def products(self) -> tuple[int, int, int, int]:
        """A(a_i) B(b_j) in pair order (0,0), (0,1), (1,0), (1,1)."""
        return tuple(self.a_map[i] * self.b_map[j] for i in (0, 1) for j in (0, 1))

    def label(self) -> str:
        sign = {1: "+", -1: "-"}
        return "A" + "".join(sign[v] for v in self.a_map) + " B" + "".join(sign[v] for v in self.b_map)


def all_strategies() -> list[DeterministicStrategy]:
    vals = (1, -1)
    return [
        DeterministicStrategy((a0, a1), (b0, b1))
        for a0, a1, b0, b1 in itertools.product(vals, repeat=4)
    ]


def strategy_chsh(s: DeterministicStrategy) -> float:
    return s_chsh(s.products())


@dataclass(frozen=True)
class LambdaModel:
    strategies: tuple
    weights: tuple

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.strategies) == 0 or w.shape != (len(self.strategies),):
            raise InvalidArgumentError("need one weight per strategy")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidArgumentError("weights must be non-negative and sum to 1")
        object.__setattr__(self, "strategies", tuple(self.strategies))
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    def correlations(self) -> np.ndarray:
        prods = np.array([s.products() for s in self.strategies], dtype=float)
        return np.asarray(self.weights) @ prods


def model_chsh(m: LambdaModel) -> float:
    return s_chsh(m.correlations())


def flat_simplex_weights(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniform sample from the (n-1)-simplex via sorted uniform spacings."""
    cuts = np.sort(rng.random(n - 1))
    w = np.diff(np.concatenate(([0.0], cuts, [1.0])))
    return w / w.sum()


def random_mixture(rng: np.random.Generator) -> LambdaModel:
    strategies = all_strategies()
    return LambdaModel(tuple(strategies), tuple(flat_simplex_weights(rng, len(strategies))))


def _pair_index(a: np.ndarray, b: np.ndarray, settings: ChshSettings) -> np.ndarray:
    ia = (np.abs(a - settings.a1) < np.abs(a - settings.a0)).astype(int)
    ib = (np.abs(b - settings.b1) < np.abs(b - settings.b0)).astype(int)
    return 2 * ia + ib


def time_sliced_model_chsh(
    m: LambdaModel,
    schedule: tuple[SettingSignal, SettingSignal],
    lambda_signal: SettingSignal,
    settings: ChshSettings = ChshSettings(),
) -> tuple[float, float]:
    """(factual-only S, time-ordered S8) for a hidden variable lambda(t).

    ``lambda_signal`` takes values that index ``m.strategies``.  All
    averages are exact integrals over [0, T] of the piecewise-constant
    integrands, T being the schedule's domain end.
    """
    a_sig, b_sig = schedule
    total = min(a_sig.domain_end, b_sig.domain_end)
    if lambda_signal.domain_end < total:
        raise InvalidArgumentError("lambda signal must cover the schedule")
    cuts = np.concatenate((
        [0.0, total],
        a_sig.jump_times, b_sig.jump_times, lambda_signal.jump_times,
    ))
    cuts = np.unique(cuts[(cuts >= 0) & (cuts <= total)])
    starts, widths = cuts[:-1], np.diff(cuts)

    pair = _pair_index(values_at(a_sig, starts), values_at(b_sig, starts), settings)
    idx = values_at(lambda_signal, starts)
    if np.any(idx != np.round(idx)) or idx.min() < 0 or idx.max() >= len(m.strategies):
        raise InvalidArgumentError("lambda signal values must index the model's strategies")
    prods = np.array([s.products() for s in m.strategies], dtype=float)[idx.astype(int)]

    factual = np.empty(4)
    cf = np.zeros(4)
    for k in range(4):
        on = pair == k
        w_on, w_off = widths[on].sum(), widths[~on].sum()
        if w_on <= 0:
            raise InvalidArgumentError(f"pair {k} never set in the schedule")
        factual[k] = (prods[on, k] * widths[on]).sum() / w_on
        if w_off > 0:
            cf[k] = (prods[~on, k] * widths[~on]).sum() / w_off
    return s_chsh(factual), s8(factual, 3.0 * cf)


def enumeration_table() -> list[tuple[str, tuple[int, int, int, int], float]]:
    return [(s.label(), s.products(), strategy_chsh(s)) for s in all_strategies()]


def adversarial_witness(settings: ChshSettings = ChshSettings(), total: float = 4.0):
    """A lambda(t) that, in each quarter of the block schedule, uses the
    strategy best suited to the pair being measured.  Returns the model,
    schedule and lambda signal ready for :func:`time_sliced_model_chsh`.
    """
    strategies = all_strategies()
    target = (1, -1, 1, 1)  # sign pattern that maximizes the factual-only S
    chosen = [next(i for i, s in enumerate(strategies) if s.products()[k] == target[k])
              for k in range(4)]
    model = LambdaModel(tuple(strategies), tuple(np.full(16, 1 / 16)))
    schedule = block_schedule(chsh_pairs(settings), total)
    lam = SettingSignal(np.arange(4) * total / 4, np.array(chosen, dtype=float), total)
    return model, schedule, lam
