"""Probabilistic side games for a weather-forecasting contest.

Players allocate 100 confidence credits against superensemble-derived
baselines and are scored in bits: information gain for over/under spread
bets and ranked information gain for ten-bin allocations, with calibration
diagnostics over their history.
"""

from .core import (
    Clamp,
    CreditAllocation,
    Observation,
    Pmf,
    VariableKind,
    VariableSpec,
    clamp_pmf,
    credits_to_pmf,
    quantize_to_resolution,
)
from .scoring import (
    BinaryEventScore,
    LegacyScore,
    RankedScore,
    brier,
    contingency_cell,
    ignorance,
    info_gain,
    legacy_error_points,
    ranked_info_gain,
    score_over_under,
)
from .baseline import (
    BaselineBin,
    BaselineSpec,
    BaselineThreshold,
    SuperensembleSample,
    build_baseline,
    build_baselines,
    build_game1_thresholds,
    build_game2_bins,
    ingest_members,
    percentile,
)
from .analytics import Decomposition, ReliabilityPoint, decompose, reliability_curve
from .engine import ContestEngine, Game, GameState, Submission, default_deadline

__all__ = [
    "BaselineBin",
    "BaselineSpec",
    "BaselineThreshold",
    "BinaryEventScore",
    "Clamp",
    "ContestEngine",
    "CreditAllocation",
    "Decomposition",
    "Game",
    "GameState",
    "LegacyScore",
    "Observation",
    "Pmf",
    "RankedScore",
    "ReliabilityPoint",
    "Submission",
    "SuperensembleSample",
    "VariableKind",
    "VariableSpec",
    "brier",
    "build_baseline",
    "build_baselines",
    "build_game1_thresholds",
    "build_game2_bins",
    "clamp_pmf",
    "contingency_cell",
    "credits_to_pmf",
    "decompose",
    "default_deadline",
    "ignorance",
    "info_gain",
    "ingest_members",
    "legacy_error_points",
    "percentile",
    "quantize_to_resolution",
    "ranked_info_gain",
    "reliability_curve",
    "score_over_under",
]

__version__ = "0.1.0"
