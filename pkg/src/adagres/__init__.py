"""Redundancy-aware, token-budgeted greedy context selection with adaptive beta."""

from ._backend import backend_name
from .analysis import (
    AnalysisReport,
    PoolTooLargeError,
    check_greedy_guarantee,
    empirical_submodularity_gap,
    epsilon_bound,
    exact_optimum,
)
from .calibration import BetaCalibration, PoolStats, adaptive_select, beta_star, calibrate, pool_stats, resolve_beta
from .core import (
    AdagresError,
    CandidatePool,
    Chunk,
    DimensionMismatchError,
    Embedding,
    EmptyPoolError,
    Query,
    ZeroNormError,
    normalize,
    sim,
)
from .evaluation import EvalRecord, GoldReference, iou, run_comparison, write_report
from .scoring import ScoreBreakdown, ScoreWeights, marginal_gain, objective, redundancy_sum, relevance_sum
from .selection import SelectionConfig, SelectionResult, greedy_select, topk_select
from .synthetic import SyntheticPoolSpec, generate_synthetic

__version__ = "0.1.0"
