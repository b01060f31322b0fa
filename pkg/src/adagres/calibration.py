"""Instance-adaptive redundancy weight.

Pool statistics over the query's top-N chunks feed a closed form for beta
that makes the expected marginal gain vanish once the budget-implied number
of chunks has been selected.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .core import CandidatePool, EmptyPoolError, Query, pairwise_sims, query_sims
from .selection import SelectionConfig, SelectionResult, greedy_select, top_n_indices


@dataclass(frozen=True)
class PoolStats:
    mean_token_length: float
    expected_set_size: float
    mean_query_sim: float
    mean_pairwise_sim: float
    pairwise_estimation: str  # "exact" or "sampled"
    n_pairs: int
    top_n: int
    token_budget: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class BetaCalibration:
    beta_star: float
    lambda_: float
    beta_zero: float
    beta_final: float
    clipped: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d


def _sampled_pair_mean(S: np.ndarray, m: int, seed: int) -> float:
    n = S.shape[0]
    rng = np.random.default_rng(seed)
    i = rng.integers(0, n, size=m)
    j = rng.integers(0, n - 1, size=m)
    j += j >= i
    return float(S[i, j].mean())


def pool_stats(
    q: Query,
    pool: CandidatePool,
    top_n: int,
    token_budget: int,
    seed: int = 0,
    exact_pairs_max: int = 256,
    sample_pairs: int = 2048,
) -> PoolStats:
    """Summary statistics of the ``top_n`` chunks most similar to ``q``.

    The pairwise mean is exact up to ``exact_pairs_max`` chunks and estimated
    from ``sample_pairs`` seeded random pairs beyond that.
    """
    if len(pool) == 0:
        raise EmptyPoolError("candidate pool is empty")
    qs = query_sims(q, pool)
    view = np.sort(top_n_indices(qs, top_n))
    sub = pool.subset(view)
    n = len(view)
    mean_len = float(sub.lengths.mean())
    if n < 2:
        pair_mean, how, pairs = 0.0, "exact", 0
    elif n <= exact_pairs_max:
        S = pairwise_sims(sub)
        pairs = n * (n - 1) // 2
        pair_mean, how = float(S[np.triu_indices(n, k=1)].mean()), "exact"
    else:
        S = pairwise_sims(sub)
        pair_mean, how, pairs = _sampled_pair_mean(S, sample_pairs, seed), "sampled", sample_pairs
    return PoolStats(
        mean_token_length=mean_len,
        expected_set_size=token_budget / mean_len,
        mean_query_sim=float(qs[view].mean()),
        mean_pairwise_sim=pair_mean,
        pairwise_estimation=how,
        n_pairs=pairs,
        top_n=n,
        token_budget=int(token_budget),
    )


def boundary_size(expected_set_size: float, convention: str = "half") -> float:
    """Redundancy multiplier of the boundary candidate: (k-1)/2 under "half", k-1 under "full"."""
    k1 = expected_set_size - 1.0
    return k1 if convention == "full" else k1 / 2.0


def beta_star(stats: PoolStats, alpha: float, stability_epsilon: float = 1e-6, convention: str = "half") -> float:
    """Closed-form beta; zero when at most one chunk fits the budget."""
    if stats.expected_set_size <= 1.0:
        return 0.0
    denom = boundary_size(stats.expected_set_size, convention) * stats.mean_pairwise_sim + stability_epsilon
    return alpha * stats.mean_query_sim / denom


def calibrate(stats: PoolStats, cfg: SelectionConfig, lambda_: float = 1.0, beta_zero: float = 0.0) -> BetaCalibration:
    bs = beta_star(stats, cfg.weights.alpha, cfg.stability_epsilon, cfg.boundary_convention)
    raw = lambda_ * bs + beta_zero
    lo, hi = cfg.clip_range
    final = float(min(max(raw, lo), hi))
    return BetaCalibration(bs, float(lambda_), float(beta_zero), final, final != raw)


def resolve_beta(q: Query, pool: CandidatePool, cfg: SelectionConfig) -> Tuple[float, Optional[PoolStats], Optional[BetaCalibration]]:
    """Beta to hand to greedy selection under ``cfg.beta_policy``."""
    if cfg.beta_policy == "fixed":
        return cfg.weights.beta * cfg.redundancy_scale, None, None
    stats = pool_stats(q, pool, cfg.top_n, cfg.token_budget, cfg.seed, cfg.exact_pairs_max, cfg.sample_pairs)
    if cfg.beta_policy == "adaptive":
        cal = calibrate(stats, cfg)
    else:
        cal = calibrate(stats, cfg, cfg.lambda_, cfg.beta_zero)
    return cal.beta_final * cfg.redundancy_scale, stats, cal


def adaptive_select(q: Query, pool: CandidatePool, cfg: SelectionConfig) -> SelectionResult:
    """Resolve beta per ``cfg`` and run greedy selection with it."""
    beta, _, _ = resolve_beta(q, pool, cfg)
    return greedy_select(q, pool, cfg, beta)
