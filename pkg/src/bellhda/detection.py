"""Coincidence statistics of the parallel/orthogonal polarization mixture.

A source emitting pairs polarized along alpha or along alpha + pi/2 (with
equal weight) gives the joint transmission probability

    P++(a, b, alpha) = 1/2 [cos^2(a-alpha) cos^2(b-alpha) + sin^2(a-alpha) sin^2(b-alpha)]

with P-- = P++ and P+- = P-+ = 1/2 - P++.  Every function here accepts numpy
arrays as well as scalars.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


def p_plus_plus(a, b, alpha):
    ca, cb = np.cos(a - alpha), np.cos(b - alpha)
    sa, sb = np.sin(a - alpha), np.sin(b - alpha)
    return 0.5 * ((ca * cb) ** 2 + (sa * sb) ** 2)


@dataclass(frozen=True)
class OutcomeProbs:
    pp: float
    pm: float
    mp: float
    mm: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.pp, self.pm, self.mp, self.mm)


def outcome_probs(a: float, b: float, alpha: float) -> OutcomeProbs:
    pp = float(p_plus_plus(a, b, alpha))
    pm = 0.5 - pp
    return OutcomeProbs(pp, pm, pm, pp)


def conditional_E(a, b, alpha):
    """Correlation <AB> given alpha, i.e. 4 P++ - 1 = cos 2(a-alpha) cos 2(b-alpha)."""
    return 4.0 * p_plus_plus(a, b, alpha) - 1.0


class Outcome(NamedTuple):
    a_result: int
    b_result: int

    @property
    def product(self) -> int:
        return self.a_result * self.b_result


_ORDER = (Outcome(1, 1), Outcome(1, -1), Outcome(-1, 1), Outcome(-1, -1))


def sample_outcome(probs: OutcomeProbs, draw: float) -> Outcome:
    """Inverse-CDF draw over (++, +-, -+, --) in that order."""
    acc = 0.0
    for outcome, p in zip(_ORDER, probs.as_tuple()):
        acc += p
        if draw < acc:
            return outcome
    return _ORDER[-1]


def sample_categories(pp: np.ndarray, draws: np.ndarray) -> np.ndarray:
    """Vectorized :func:`sample_outcome` for symmetric probabilities.

    Returns category codes 0..3 for (++, +-, -+, --).  The cumulative
    thresholds are pp, 1/2, 1 - pp.
    """
    return (
        (draws >= pp).astype(np.int8)
        + (draws >= 0.5).astype(np.int8)
        + (draws >= 1.0 - pp).astype(np.int8)
    )
