"""Set objective F(q, C) = alpha * relevance - beta * redundancy, and its marginal gain.

Subsets are given as chunk ids, pool indices or Chunk objects; they are
resolved against the pool and never copied.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .core import AdagresError, CandidatePool, Chunk, ChunkRef, Query, query_sims


@dataclass(frozen=True)
class ScoreWeights:
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise AdagresError(f"alpha must be > 0, got {self.alpha}")
        if not self.beta >= 0:
            raise AdagresError(f"beta must be >= 0, got {self.beta}")


@dataclass(frozen=True)
class ScoreBreakdown:
    relevance_sum: float
    redundancy_sum: float
    objective: float


def _resolve(pool: CandidatePool, C: Iterable[ChunkRef]) -> np.ndarray:
    idx = pool.indices(C)
    if len(np.unique(idx)) != len(idx):
        raise AdagresError("subset contains a chunk more than once")
    return idx


def _pair_sums(pool: CandidatePool, idx: np.ndarray, raw: bool) -> float:
    if len(idx) < 2:
        return 0.0
    m = pool.matrix[idx]
    s = m @ m.T
    iu = np.triu_indices(len(idx), k=1)
    vals = s[iu]
    if not raw:
        vals = np.maximum(vals, 0.0)
    return float(vals.sum())


def relevance_sum(q: Query, pool: CandidatePool, C: Iterable[ChunkRef], raw: bool = False) -> float:
    idx = _resolve(pool, C)
    if len(idx) == 0:
        pool.check_query(q)
        return 0.0
    return float(query_sims(q, pool, raw)[idx].sum())


def redundancy_sum(pool: CandidatePool, C: Iterable[ChunkRef], raw: bool = False) -> float:
    """Sum of similarities over unordered pairs in ``C``."""
    return _pair_sums(pool, _resolve(pool, C), raw)


def objective(q: Query, pool: CandidatePool, C: Iterable[ChunkRef], w: ScoreWeights, raw: bool = False) -> ScoreBreakdown:
    idx = _resolve(pool, C)
    rel = relevance_sum(q, pool, idx, raw)
    red = _pair_sums(pool, idx, raw)
    return ScoreBreakdown(rel, red, w.alpha * rel - w.beta * red)


def marginal_gain(q: Query, pool: CandidatePool, x: ChunkRef, C: Iterable[ChunkRef], w: ScoreWeights, raw: bool = False) -> float:
    """Change in the objective from adding ``x`` to ``C``."""
    xi = pool.index_of(x)
    idx = _resolve(pool, C)
    if xi in set(idx.tolist()):
        label = x.id if isinstance(x, Chunk) else x
        raise AdagresError(f"chunk {label!r} is already in the subset")
    pool.check_query(q)
    vx = pool.matrix[xi]
    rel = float(vx @ q.embedding.values)
    overlaps = pool.matrix[idx] @ vx if len(idx) else np.zeros(0)
    if not raw:
        rel = max(0.0, rel)
        overlaps = np.maximum(overlaps, 0.0)
    return w.alpha * rel - w.beta * float(overlaps.sum())
