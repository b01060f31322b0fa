"""Brute-force checks of greedy selection against the exact optimum.

Covers exhaustive search under the token budget, the measured worst-case
violation of diminishing returns, the additive ``beta * k * delta`` bound on
it, and the ``(1 - 1/e) OPT - k eps / e`` inequality for greedy.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import FrozenSet, Tuple

import numpy as np

from . import kernels
from .core import AdagresError, CandidatePool, EmptyPoolError, Query, pairwise_sims, query_sims
from .scoring import ScoreWeights
from .selection import SelectionConfig, greedy_select

MAX_EXACT = 20
EXHAUSTIVE_GAP_MAX = 10
TOL = 1e-9


class PoolTooLargeError(AdagresError):
    pass


@dataclass(frozen=True)
class AnalysisReport:
    opt_value: float
    opt_subset: FrozenSet[str]
    greedy_value: float
    greedy_subset: Tuple[str, ...]
    epsilon_empirical: float
    epsilon_bound: float
    delta_max: float
    k_max: int
    guarantee_rhs: float
    guarantee_satisfied: bool
    beta: float
    raw_sim: bool = False
    notes: Tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["opt_subset"] = sorted(self.opt_subset)
        d["greedy_subset"] = list(self.greedy_subset)
        d["notes"] = list(self.notes)
        return d


def _arrays(q: Query, pool: CandidatePool, raw: bool):
    if len(pool) == 0:
        raise EmptyPoolError("candidate pool is empty")
    return np.ascontiguousarray(query_sims(q, pool, raw)), pairwise_sims(pool, raw)


def exact_optimum(q: Query, pool: CandidatePool, w: ScoreWeights, token_budget: int, raw: bool = False) -> Tuple[float, FrozenSet[str]]:
    """Best budget-feasible subset by full enumeration, the empty set included.

    Exact ties go to the lexicographically smallest sorted id tuple.
    """
    n = len(pool)
    if n > MAX_EXACT:
        raise PoolTooLargeError(
            f"exact optimum needs a pool of at most {MAX_EXACT} chunks, got {n}; "
            "use empirical_submodularity_gap sampling or a smaller synthetic pool"
        )
    qs, S = _arrays(q, pool, raw)
    vals = kernels.subset_values(qs, S, pool.lengths, float(w.alpha), float(w.beta), int(token_budget))
    best = float(vals.max())
    ties = np.flatnonzero(vals == best)
    ids = pool.ids
    subsets = [tuple(sorted(ids[i] for i in range(n) if (m >> i) & 1)) for m in ties.tolist()]
    return best, frozenset(min(subsets))


def _sampled_gap(qs, S, alpha, beta, trials, seed) -> float:
    n = qs.shape[0]
    rng = np.random.default_rng(seed)
    x = rng.integers(0, n, size=trials)
    inB = rng.random((trials, n)) < rng.random((trials, 1))
    inA = inB & (rng.random((trials, n)) < rng.random((trials, 1)))
    rows = np.arange(trials)
    inB[rows, x] = False
    inA[rows, x] = False
    sx = S[x]
    gB = alpha * qs[x] - beta * (sx * inB).sum(axis=1)
    gA = alpha * qs[x] - beta * (sx * inA).sum(axis=1)
    return float(max(0.0, (gB - gA).max()))


def empirical_submodularity_gap(
    q: Query, pool: CandidatePool, w: ScoreWeights, trials: int = 20000, seed: int = 0, raw: bool = False
) -> float:
    """Largest observed ``gain(x | B) - gain(x | A)`` over ``A <= B``, ``x`` not in ``B``.

    Pools of up to 10 chunks are searched exhaustively; larger pools use
    ``trials`` random triples.
    """
    if len(pool) < 3:
        raise AdagresError(f"gap search needs at least 3 chunks, got {len(pool)}")
    qs, S = _arrays(q, pool, raw)
    if len(pool) <= EXHAUSTIVE_GAP_MAX:
        return float(kernels.gap_exhaustive(qs, S, float(w.alpha), float(w.beta)))
    return _sampled_gap(qs, S, float(w.alpha), float(w.beta), int(trials), seed)


def max_cardinality(lengths, token_budget: int) -> int:
    """Most chunks that fit the budget, packing the shortest first."""
    cum = np.cumsum(np.sort(np.asarray(lengths, dtype=np.int64)))
    return int(np.searchsorted(cum, token_budget, side="right"))


def epsilon_bound(pool: CandidatePool, beta: float, token_budget: int, raw: bool = False) -> Tuple[float, float, int]:
    """``(beta * k * delta, delta, k)`` for the pool and budget."""
    if len(pool) == 0:
        raise EmptyPoolError("candidate pool is empty")
    k = max_cardinality(pool.lengths, token_budget)
    if len(pool) < 2:
        delta = 0.0
    else:
        S = pairwise_sims(pool, raw)
        delta = max(0.0, float(S[np.triu_indices(len(pool), k=1)].max()))
    return beta * k * delta, delta, k


def check_greedy_guarantee(
    q: Query,
    pool: CandidatePool,
    w: ScoreWeights,
    token_budget: int,
    raw: bool = False,
    trials: int = 20000,
    seed: int = 0,
) -> AnalysisReport:
    opt_value, opt_subset = exact_optimum(q, pool, w, token_budget, raw)
    cfg = SelectionConfig(weights=w, token_budget=int(token_budget), beta_policy="fixed", top_n=len(pool))
    res = greedy_select(q, pool, cfg, w.beta, raw=raw)
    eps, delta, k = epsilon_bound(pool, w.beta, token_budget, raw)
    gap = empirical_submodularity_gap(q, pool, w, trials, seed, raw) if len(pool) >= 3 else 0.0
    rhs = (1.0 - 1.0 / math.e) * opt_value - k * eps / math.e
    notes = []
    if res.objective_value > opt_value + TOL:
        notes.append("greedy exceeds enumerated optimum")
    if gap > eps + TOL:
        notes.append("empirical gap exceeds beta*k*delta")
    return AnalysisReport(
        opt_value=opt_value,
        opt_subset=opt_subset,
        greedy_value=res.objective_value,
        greedy_subset=tuple(res.ids),
        epsilon_empirical=gap,
        epsilon_bound=eps,
        delta_max=delta,
        k_max=k,
        guarantee_rhs=rhs,
        guarantee_satisfied=res.objective_value >= rhs - TOL,
        beta=float(w.beta),
        raw_sim=raw,
        notes=tuple(notes),
    )
