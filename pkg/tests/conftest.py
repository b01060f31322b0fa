import itertools

import numpy as np
import pytest

from adagres import CandidatePool, Query, normalize
from adagres.kernels import numba_kernels, numpy_kernels

BACKENDS = [pytest.param(numpy_kernels, id="numpy")]
if numba_kernels is not None:
    BACKENDS.append(pytest.param(numba_kernels, id="numba"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def random_pool(rng, n, d=8, lengths=None, prefix="c"):
    emb = rng.standard_normal((n, d))
    if lengths is None:
        lengths = np.ones(n, dtype=int)
    return CandidatePool.from_arrays(emb, lengths, ids=[f"{prefix}{i:02d}" for i in range(n)])


def random_query(rng, d=8, qid="q"):
    return Query(qid, normalize(rng.standard_normal(d)))


def realizable_trio():
    """Near-duplicate pair c1/c2 plus a distinct c3, with the query between c1 and c3.

    Exact values (d = 3):
      q.c1 = 0.8, q.c2 = 0.8*0.96 = 0.768, q.c3 = 0.6
      c1.c2 = 0.96, c1.c3 = 0, c2.c3 = 0
    """
    e = np.eye(3)
    c1 = e[0]
    c2 = 0.96 * e[0] + 0.28 * e[1]
    c3 = e[2]
    q = 0.8 * e[0] + 0.6 * e[2]
    pool = CandidatePool.from_arrays(np.stack([c1, c2, c3]), [1, 1, 1], ids=["c1", "c2", "c3"])
    return pool, Query("q", normalize(q))


# Independent oracles: plain Python over explicit similarity tables.


def brute_objective(qs, S, subset, alpha, beta):
    rel = sum(qs[i] for i in subset)
    red = sum(S[i][j] for i, j in itertools.combinations(sorted(subset), 2))
    return alpha * rel - beta * red


def brute_optimum(qs, S, lengths, alpha, beta, budget):
    n = len(qs)
    best, best_set = 0.0, ()
    for r in range(1, n + 1):
        for sub in itertools.combinations(range(n), r):
            if sum(lengths[i] for i in sub) > budget:
                continue
            v = brute_objective(qs, S, sub, alpha, beta)
            if v > best:
                best, best_set = v, sub
    return best, best_set


def reference_greedy(qs, S, lengths, alpha, beta, budget):
    """Skip-and-continue greedy written from the definition, O(n^2) per step."""
    n = len(qs)
    chosen, total = [], 0
    while True:
        cands = []
        for x in range(n):
            if x in chosen or total + lengths[x] > budget:
                continue
            gain = alpha * qs[x] - beta * sum(S[x][c] for c in chosen)
            cands.append((gain, qs[x], -x))
        if not cands:
            return chosen, total
        gain, _, negx = max(cands)
        if gain <= 0:
            return chosen, total
        chosen.append(-negx)
        total += lengths[-negx]
