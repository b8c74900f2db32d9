"""Simulation of a CHSH experiment whose source angle tracks analyzer A with a delay."""
from .angles import ChshSettings, SettingPair, chsh_pairs, wrap_diff, wrap_report
from .detection import conditional_E, outcome_probs, p_plus_plus, sample_outcome
from .dynamics import AlphaTrajectory, ErrorWrap, TrackingParams, alpha_at, integrate
from .ledger import Metrics, PairLedger, delta, expectation_from_counts, pair_means, s8, s_chsh
from .runner import RunConfig, RunResult, emit_trace, load_config, run, sweep_gamma

__version__ = "0.1.0"
