"""Two-player games played through EPR-type spin measurements."""

from __future__ import annotations

from .correlation import (
    CorrelationGame,
    CorrelationModel,
    bos_quantum_mixed_ne,
    ne_grid_search,
    payoff_from_correlations,
    quantum_payoff,
    quantum_pure_ne,
)
from .epr import ProtocolConfig, arbiter_report, reward, run_protocol
from .errors import (
    BranchError,
    DomainError,
    EprGamesError,
    InconsistentStatsError,
    InsufficientDataError,
    NoEquilibriumError,
    PreconditionError,
)
from .games import BimatrixGame, MixedProfile, mixed_nash, payoff, pure_nash
from .gfunctions import GFunction, big_G, parse_g, q_transform
from .lhv import FourCoinStats, GameEntries, LhvMeasure

__version__ = "0.1.0"

__all__ = [
    "BimatrixGame", "BranchError", "CorrelationGame", "CorrelationModel", "DomainError",
    "EprGamesError", "FourCoinStats", "GFunction", "GameEntries", "InconsistentStatsError",
    "InsufficientDataError", "LhvMeasure", "MixedProfile", "NoEquilibriumError",
    "PreconditionError", "ProtocolConfig", "arbiter_report", "big_G", "bos_quantum_mixed_ne",
    "mixed_nash", "ne_grid_search", "parse_g", "payoff", "payoff_from_correlations", "pure_nash",
    "q_transform", "quantum_payoff", "quantum_pure_ne", "reward", "run_protocol",
]
