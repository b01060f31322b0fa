"""Seeded synthetic pools with controllable near-duplicate clusters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import AdagresError, CandidatePool, Chunk, Query, normalize, pairwise_sims
from .evaluation import GoldReference

REALIZED_TOL = 0.05


@dataclass(frozen=True)
class SyntheticPoolSpec:
    """Recipe for one query, its candidate pool and its gold set.

    Chunks fall into ``n_clusters`` groups whose members have expected
    pairwise similarity ``intra_cluster_sim_target``. The query leans toward
    ``n_relevant`` of the clusters; the gold set holds the most query-similar
    member of each of them.
    """

    n_chunks: int = 40
    dimension: int = 64
    n_clusters: int = 5
    intra_cluster_sim_target: float = 0.9
    token_length_range: Tuple[int, int] = (50, 150)
    seed: int = 0
    n_relevant: Optional[int] = None
    query_id: str = "q0"
    id_prefix: str = ""

    def __post_init__(self):
        if self.n_chunks < 1 or self.dimension < 2:
            raise AdagresError("need n_chunks >= 1 and dimension >= 2")
        if not 1 <= self.n_clusters <= self.n_chunks:
            raise AdagresError(f"n_clusters must be in [1, n_chunks], got {self.n_clusters}")
        if not 0.0 <= self.intra_cluster_sim_target <= 1.0:
            raise AdagresError("intra_cluster_sim_target must be in [0, 1]")
        lo, hi = self.token_length_range
        if not 1 <= lo <= hi:
            raise AdagresError(f"token_length_range must satisfy 1 <= min <= max, got {self.token_length_range}")
        if self.n_relevant is not None and not 1 <= self.n_relevant <= self.n_clusters:
            raise AdagresError("n_relevant must be in [1, n_clusters]")

    @property
    def relevant_count(self) -> int:
        return self.n_relevant if self.n_relevant is not None else min(3, self.n_clusters)


def _unit_rows(rng, n, d):
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _spread(target: float) -> float:
    # members are u + s*v with unit v orthogonal to u, so E[cos] = 1 / (1 + s^2)
    if not 0.0 < target < 1.0:
        raise AdagresError(
            f"intra-cluster similarity target {target} is infeasible: "
            "noisy cluster members need a target strictly between 0 and 1"
        )
    return float(np.sqrt(1.0 / target - 1.0))


def generate_synthetic(spec: SyntheticPoolSpec) -> Tuple[CandidatePool, Query, GoldReference]:
    rng = np.random.default_rng(spec.seed)
    n, d = spec.n_chunks, spec.dimension
    structured = spec.n_clusters < n
    s = _spread(spec.intra_cluster_sim_target) if structured else 0.0

    centers = _unit_rows(rng, spec.n_clusters, d)
    labels = rng.permutation(np.arange(n) % spec.n_clusters)
    u = centers[labels]
    v = rng.standard_normal((n, d))
    v -= np.sum(v * u, axis=1, keepdims=True) * u
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    emb = u + s * v if structured else u

    relevant = np.sort(rng.choice(spec.n_clusters, size=spec.relevant_count, replace=False))
    weights = rng.uniform(0.5, 1.0, size=len(relevant))
    qv = weights @ centers[relevant]
    noise = rng.standard_normal(d)
    qv = qv / np.linalg.norm(qv) + 0.2 * noise / np.linalg.norm(noise)

    lo, hi = spec.token_length_range
    lengths = rng.integers(lo, hi + 1, size=n)
    ids = [f"{spec.id_prefix}c{i:03d}" for i in range(n)]
    chunks = tuple(
        Chunk(ids[i], normalize(emb[i], name=ids[i]), int(lengths[i]), f"synthetic chunk {i} of cluster {labels[i]}")
        for i in range(n)
    )
    pool = CandidatePool(chunks, d)
    query = Query(spec.query_id, normalize(qv, name=spec.query_id))

    if structured:
        realized = realized_intra_cluster_sim(pool, labels)
        if realized is not None and abs(realized - spec.intra_cluster_sim_target) > REALIZED_TOL:
            raise AdagresError(
                f"realized intra-cluster similarity {realized:.3f} misses target "
                f"{spec.intra_cluster_sim_target} by more than {REALIZED_TOL}; increase dimension"
            )

    qs = pool.matrix @ query.embedding.values
    gold = set()
    for c in relevant:
        members = np.flatnonzero(labels == c)
        gold.add(ids[members[np.argmax(qs[members])]])
    return pool, query, GoldReference(spec.query_id, frozenset(gold))


def realized_intra_cluster_sim(pool: CandidatePool, labels) -> Optional[float]:
    """Mean similarity over same-cluster pairs, or None if no cluster has two members."""
    labels = np.asarray(labels)
    S = pairwise_sims(pool)
    same = labels[:, None] == labels[None, :]
    iu = np.triu_indices(len(labels), k=1)
    mask = same[iu]
    if not mask.any():
        return None
    return float(S[iu][mask].mean())

