"""numba-compiled kernels. Importing this module requires numba."""

import numpy as np
from numba import njit

BUDGET_EXHAUSTED = 0
NO_POSITIVE_GAIN = 1
POOL_EXHAUSTED = 2


@njit(cache=True)
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
        x = -1
        best = 0.0
        for i in range(n):
            if taken[i] or total + lengths[i] > budget:
                continue
            g = alpha * qs[i] - beta * red[i]
            if x < 0 or g > best or (g == best and qs[i] > qs[x]):
                x = i
                best = g
        if x < 0:
            stop = BUDGET_EXHAUSTED
            break
        if not best > 0.0:
            stop = NO_POSITIVE_GAIN
            break
        taken[x] = True
        order[count] = x
        gains[count] = best
        count += 1
        total += lengths[x]
        for i in range(n):
            red[i] += S[i, x]
    return order, gains, count, total, stop


@njit(cache=True)
def subset_values(qs, S, lengths, alpha, beta, budget):
    n = qs.shape[0]
    total = 1 << n
    rel = np.zeros(total, dtype=np.float64)
    red = np.zeros(total, dtype=np.float64)
    tok = np.zeros(total, dtype=np.int64)
    out = np.empty(total, dtype=np.float64)
    out[0] = 0.0
    for mask in range(1, total):
        low = mask & -mask
        i = 0
        while (low >> i) != 1:
            i += 1
        rest = mask ^ low
        acc = 0.0
        # every other bit of mask sits above i
        for j in range(i + 1, n):
            if (rest >> j) & 1:
                acc += S[i, j]
        rel[mask] = rel[rest] + qs[i]
        red[mask] = red[rest] + acc
        tok[mask] = tok[rest] + lengths[i]
        if tok[mask] > budget:
            out[mask] = -np.inf
        else:
            out[mask] = alpha * rel[mask] - beta * red[mask]
    return out


@njit(cache=True)
def gap_exhaustive(qs, S, alpha, beta):
    n = qs.shape[0]
    m = n - 1
    size = 1 << m
    others = np.empty(m, dtype=np.int64)
    sums = np.zeros(size, dtype=np.float64)
    best = 0.0
    for x in range(n):
        k = 0
        for j in range(n):
            if j != x:
                others[k] = j
                k += 1
        for mask in range(1, size):
            low = mask & -mask
            b = 0
            while (low >> b) != 1:
                b += 1
            sums[mask] = sums[mask ^ low] + S[x, others[b]]
        for B in range(size):
            gB = alpha * qs[x] - beta * sums[B]
            # walk every submask A of B, including the empty set
            A = B
            while True:
                gA = alpha * qs[x] - beta * sums[A]
                d = gB - gA
                if d > best:
                    best = d
                if A == 0:
                    break
                A = (A - 1) & B
    return best
