"""Pure-numpy kernels. Same signatures and results as the numba versions."""

import numpy as np

BUDGET_EXHAUSTED = 0
NO_POSITIVE_GAIN = 1
POOL_EXHAUSTED = 2

_BLOCK = 1 << 15


def greedy(qs, S, lengths, alpha, beta, budget):
    n = qs.shape[0]
    order = np.full(n, -1, dtype=np.int64)
    gains = np.zeros(n, dtype=np.float64)
    red = np.zeros(n, dtype=np.float64)
    taken = np.zeros(n, dtype=np.bool_)
    total = 0
    count = 0
    stop = POOL_EXHAUSTED
    while True:
        if count == n:
            stop = POOL_EXHAUSTED
            break
        if total >= budget:
            stop = BUDGET_EXHAUSTED
            break
        fits = ~taken & (total + lengths <= budget)
        if not fits.any():
            stop = BUDGET_EXHAUSTED
            break
        g = alpha * qs - beta * red
        cand = np.flatnonzero(fits)
        best = g[cand].max()
        if not best > 0.0:
            stop = NO_POSITIVE_GAIN
            break
        cand = cand[g[cand] == best]
        # ties: higher query similarity, then earlier position
        cand = cand[qs[cand] == qs[cand].max()]
        x = cand[0]
        taken[x] = True
        order[count] = x
        gains[count] = best
        count += 1
        total += lengths[x]
        red += S[:, x]
    return order, gains, count, total, stop


def _bits(start, stop, n):
    masks = np.arange(start, stop, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(np.float64)


def subset_values(qs, S, lengths, alpha, beta, budget):
    n = qs.shape[0]
    total = 1 << n
    out = np.empty(total, dtype=np.float64)
    lf = lengths.astype(np.float64)
    for start in range(0, total, _BLOCK):
        stop = min(total, start + _BLOCK)
        B = _bits(start, stop, n)
        rel = B @ qs
        red = 0.5 * np.einsum("ij,ij->i", B @ S, B)
        vals = alpha * rel - beta * red
        vals[B @ lf > budget] = -np.inf
        out[start:stop] = vals
    return out


def gap_exhaustive(qs, S, alpha, beta):
    n = qs.shape[0]
    m = n - 1
    masks = np.arange(1 << m, dtype=np.int64)
    best = 0.0
    for x in range(n):
        others = np.array([j for j in range(n) if j != x], dtype=np.int64)
        sums = _bits(0, 1 << m, m) @ S[x, others]
        g = alpha * qs[x] - beta * sums
        # rows index A, columns index B; keep A subset of B
        nested = (masks[:, None] & ~masks[None, :]) == 0
        diff = np.where(nested, g[None, :] - g[:, None], -np.inf)
        best = max(best, float(diff.max()))
    return best
