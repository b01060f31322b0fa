"""Token-budgeted greedy selection and the similarity-only top-k baseline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import kernels
from .core import AdagresError, CandidatePool, EmptyPoolError, Query, pairwise_sims, query_sims
from .scoring import ScoreWeights, objective

BETA_POLICIES = ("fixed", "adaptive", "adaptive_scaled")
BOUNDARY_CONVENTIONS = ("full", "half")
STOP_REASONS = {
    kernels.BUDGET_EXHAUSTED: "budget_exhausted",
    kernels.NO_POSITIVE_GAIN: "no_positive_gain",
    kernels.POOL_EXHAUSTED: "pool_exhausted",
}


@dataclass(frozen=True)
class SelectionConfig:
    """Everything a selection run needs besides the query and pool.

    ``beta_clip`` defaults to ``(0, 10 * alpha)``. ``lambda_`` and
    ``beta_zero`` only apply under the ``adaptive_scaled`` policy.
    ``redundancy_scale`` multiplies whatever beta the policy resolves.
    """

    weights: ScoreWeights = field(default_factory=ScoreWeights)
    token_budget: int = 512
    beta_policy: str = "adaptive"
    top_n: int = 64
    stability_epsilon: float = 1e-6
    beta_clip: Optional[Tuple[float, float]] = None
    seed: int = 0
    lambda_: float = 1.0
    beta_zero: float = 0.0
    boundary_convention: str = "half"
    redundancy_scale: float = 1.0
    exact_pairs_max: int = 256
    sample_pairs: int = 2048

    def __post_init__(self):
        if int(self.token_budget) != self.token_budget or self.token_budget < 1:
            raise AdagresError(f"token_budget must be a positive integer, got {self.token_budget}")
        if int(self.top_n) != self.top_n or self.top_n < 1:
            raise AdagresError(f"top_n must be a positive integer, got {self.top_n}")
        if self.beta_policy not in BETA_POLICIES:
            raise AdagresError(f"beta_policy must be one of {BETA_POLICIES}, got {self.beta_policy!r}")
        if self.boundary_convention not in BOUNDARY_CONVENTIONS:
            raise AdagresError(f"boundary_convention must be one of {BOUNDARY_CONVENTIONS}")
        if not self.stability_epsilon > 0:
            raise AdagresError("stability_epsilon must be > 0")
        if self.seed < 0:
            raise AdagresError("seed must be non-negative")
        if not self.redundancy_scale >= 0:
            raise AdagresError("redundancy_scale must be >= 0")
        if self.sample_pairs < 1 or self.exact_pairs_max < 2:
            raise AdagresError("sample_pairs must be >= 1 and exact_pairs_max >= 2")
        lo, hi = self.clip_range
        if not 0 <= lo <= hi:
            raise AdagresError(f"beta_clip must satisfy 0 <= min <= max, got {self.beta_clip}")

    @property
    def clip_range(self) -> Tuple[float, float]:
        if self.beta_clip is None:
            return (0.0, 10.0 * self.weights.alpha)
        lo, hi = self.beta_clip
        return (float(lo), float(hi))


@dataclass(frozen=True)
class SelectionResult:
    """Chosen chunk ids in acceptance order, each with the gain it had when taken."""

    selected: List[Tuple[str, float]]
    total_tokens: int
    objective_value: float
    beta_used: float
    stop_reason: str
    token_budget: int = 0

    @property
    def ids(self) -> List[str]:
        return [cid for cid, _ in self.selected]

    @property
    def gains(self) -> List[float]:
        return [g for _, g in self.selected]

    def to_dict(self) -> dict:
        return {
            "selected": self.ids,
            "gains": self.gains,
            "total_tokens": self.total_tokens,
            "token_budget": self.token_budget,
            "objective_value": self.objective_value,
            "beta_used": self.beta_used,
            "stop_reason": self.stop_reason,
        }


def top_n_indices(sims: np.ndarray, n: int) -> np.ndarray:
    """Indices of the ``n`` largest similarities; ties keep pool order."""
    order = np.argsort(-sims, kind="stable")
    return order[:n]


def _check(q: Query, pool: CandidatePool) -> None:
    if len(pool) == 0:
        raise EmptyPoolError("candidate pool is empty")
    pool.check_query(q)


def greedy_select(q: Query, pool: CandidatePool, cfg: SelectionConfig, beta: float, raw: bool = False) -> SelectionResult:
    """Grow the context one chunk at a time by largest positive marginal gain.

    Chunks that no longer fit the remaining budget are left out of the argmax
    instead of stalling the loop. Ties go to the higher query similarity, then
    the earlier pool position. Only the ``cfg.top_n`` most query-similar
    chunks are considered.
    """
    _check(q, pool)
    if not beta >= 0:
        raise AdagresError(f"beta must be >= 0, got {beta}")
    alpha = cfg.weights.alpha
    qs_all = query_sims(q, pool, raw)
    view = np.sort(top_n_indices(qs_all, cfg.top_n)) if cfg.top_n < len(pool) else np.arange(len(pool))
    sub = pool if len(view) == len(pool) else pool.subset(view)
    qs = np.ascontiguousarray(qs_all[view])
    S = pairwise_sims(sub, raw)
    order, gains, count, total, stop = kernels.greedy(qs, S, sub.lengths, float(alpha), float(beta), int(cfg.token_budget))
    picked = view[order[:count]]
    ids = [pool.ids[i] for i in picked]
    value = objective(q, pool, picked, ScoreWeights(alpha, beta), raw).objective
    return SelectionResult(
        selected=list(zip(ids, (float(g) for g in gains[:count]))),
        total_tokens=int(total),
        objective_value=value,
        beta_used=float(beta),
        stop_reason=STOP_REASONS[int(stop)],
        token_budget=int(cfg.token_budget),
    )


def topk_select(q: Query, pool: CandidatePool, k: int, token_budget: int) -> SelectionResult:
    """The ``k`` most query-similar chunks, in descending similarity.

    The budget is only reported; the baseline is controlled by ``k``. Each
    recorded gain is the chunk's query similarity and ``objective_value`` is
    their sum (the beta = 0 objective with alpha = 1).
    """
    _check(q, pool)
    if int(k) != k or k < 1:
        raise AdagresError(f"k must be a positive integer, got {k}")
    qs = query_sims(q, pool)
    picked = top_n_indices(qs, int(k))
    return SelectionResult(
        selected=[(pool.ids[i], float(qs[i])) for i in picked],
        total_tokens=int(pool.lengths[picked].sum()),
        objective_value=float(qs[picked].sum()),
        beta_used=0.0,
        stop_reason="pool_exhausted" if k >= len(pool) else "budget_exhausted",
        token_budget=int(token_budget),
    )
