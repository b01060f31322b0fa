"""Acceptance suite. Run with ``pytest tests/test_acceptance.py -s`` to see one
PASS/FAIL line per criterion.
"""

import json
import math
import time

import numpy as np
import pytest

from adagres import CandidatePool, Query, ScoreWeights, SelectionConfig, normalize
from adagres.analysis import check_greedy_guarantee, empirical_submodularity_gap, epsilon_bound
from adagres.calibration import PoolStats, adaptive_select, beta_star, boundary_size
from adagres.cli import main
from adagres.core import pairwise_sims, query_sims
from adagres.evaluation import run_comparison
from adagres.io import chunk_record, query_record
from adagres.scoring import objective, redundancy_sum, relevance_sum
from adagres.selection import greedy_select, topk_select
from adagres.synthetic import SyntheticPoolSpec, generate_synthetic


def verdict(n, ok, detail):
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def enumerate_optimum(qs, S, lengths, alpha, beta, budget):
    """Vectorized brute force over every subset mask, written independently of the kernels."""
    n = len(qs)
    masks = ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(float)
    rel = masks @ qs
    red = 0.5 * np.einsum("mi,ij,mj->m", masks, S, masks)
    vals = alpha * rel - beta * red
    vals[masks @ lengths > budget] = -np.inf
    return float(vals.max())


def _guarantee_instances():
    out = []
    for seed in range(500):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 13))
        lengths = rng.integers(1, 6, size=n)
        cum = np.cumsum(np.sort(lengths))
        # at most 6 chunks ever fit
        budget = int(rng.integers(cum[0], cum[min(6, n) - 1] + 1))
        pool = CandidatePool.from_arrays(rng.standard_normal((n, 8)), lengths, ids=[f"c{i:02d}" for i in range(n)])
        q = Query(f"q{seed}", normalize(rng.standard_normal(8)))
        for beta in (0.25, 0.5, 1.0):
            out.append((pool, q, beta, budget))
    return out


@pytest.fixture(scope="module")
def guarantee_instances():
    return _guarantee_instances()


def test_criterion_1_beta_zero_is_topk():
    t0 = time.perf_counter()
    mismatches = 0
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 51))
        # positive-orthant vectors keep every query similarity above zero
        pool = CandidatePool.from_arrays(np.abs(rng.standard_normal((n, 16))), 1)
        q = Query("q", normalize(np.abs(rng.standard_normal(16))))
        k = int(rng.integers(1, n + 1))
        cfg = SelectionConfig(weights=ScoreWeights(1.0, 0.0), token_budget=k, beta_policy="fixed", top_n=n)
        greedy = set(greedy_select(q, pool, cfg, beta=0.0).ids)
        mismatches += greedy != set(topk_select(q, pool, k, k).ids)
    elapsed = time.perf_counter() - t0
    verdict(1, mismatches == 0 and elapsed < 10, f"{mismatches} mismatches over 1000 pools, {elapsed:.2f}s (< 10s)")


def test_criterion_2_greedy_guarantee(guarantee_instances):
    t0 = time.perf_counter()
    violations = disagreements = 0
    for pool, q, beta, budget in guarantee_instances:
        w = ScoreWeights(1.0, beta)
        rep = check_greedy_guarantee(q, pool, w, budget)
        opt = enumerate_optimum(query_sims(q, pool), pairwise_sims(pool), pool.lengths, 1.0, beta, budget)
        eps, _, k = epsilon_bound(pool, beta, budget)
        rhs = (1 - 1 / math.e) * opt - k * eps / math.e
        disagreements += abs(opt - rep.opt_value) > 1e-9
        violations += rep.greedy_value < rhs - 1e-12 or not rep.guarantee_satisfied
    elapsed = time.perf_counter() - t0
    n = len(guarantee_instances)
    verdict(
        2,
        violations == 0 and disagreements == 0 and elapsed < 60,
        f"{violations} violations, {disagreements} OPT disagreements over {n} instances, {elapsed:.2f}s (< 60s)",
    )


def test_criterion_3_bound_chain(guarantee_instances):
    over = nonzero = 0
    for pool, q, beta, budget in guarantee_instances:
        w = ScoreWeights(1.0, beta)
        gap = empirical_submodularity_gap(q, pool, w)
        eps, _, _ = epsilon_bound(pool, beta, budget)
        over += gap > eps + 1e-9
        nonzero += abs(gap) > 1e-12
    verdict(3, over == 0 and nonzero == 0, f"{over} gaps above beta*k*delta, {nonzero} nonzero clamped gaps")


def test_criterion_4_modularity_and_supermodularity():
    rng = np.random.default_rng(2024)
    pools = []
    for _ in range(100):
        n = int(rng.integers(3, 16))
        pools.append((CandidatePool.from_arrays(rng.standard_normal((n, 8)), 1), Query("q", normalize(rng.standard_normal(8)))))
    triples = []
    for i in range(10_000):
        pool, q = pools[i % 100]
        n = len(pool)
        perm = rng.permutation(n)
        x, rest = int(perm[0]), perm[1:]
        b = int(rng.integers(0, n))
        a = int(rng.integers(0, b + 1))
        triples.append((pool, q, x, rest[:a].tolist(), rest[:b].tolist()))

    t0 = time.perf_counter()
    mod_bad = sup_bad = 0
    for pool, q, x, A, B in triples:
        ga = relevance_sum(q, pool, A + [x]) - relevance_sum(q, pool, A)
        gb = relevance_sum(q, pool, B + [x]) - relevance_sum(q, pool, B)
        mod_bad += abs(ga - gb) > 1e-9
        ra = redundancy_sum(pool, A + [x]) - redundancy_sum(pool, A)
        rb = redundancy_sum(pool, B + [x]) - redundancy_sum(pool, B)
        sup_bad += rb < ra - 1e-9
    elapsed = time.perf_counter() - t0
    verdict(
        4,
        mod_bad == 0 and sup_bad == 0 and elapsed < 5,
        f"{mod_bad} modularity and {sup_bad} supermodularity violations over 10000 triples each, {elapsed:.2f}s (< 5s)",
    )


def test_criterion_5_adaptive_beta_arithmetic():
    fixture = PoolStats(100.0, 4.0, 0.6, 0.3, "exact", 0, 10, 400)
    b = beta_star(fixture, 1.0, stability_epsilon=1e-15)
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(1000):
        mq, mp = rng.uniform(0, 1), rng.uniform(0.01, 1)
        k, alpha = rng.uniform(1.01, 50), rng.uniform(0.1, 5)
        s = PoolStats(100.0, k, mq, mp, "exact", 0, 10, 400)
        bs = beta_star(s, alpha, stability_epsilon=1e-15)
        worst = max(worst, abs(alpha * mq - bs * boundary_size(k) * mp))
    ok = abs(b - 4 / 3) <= 1e-9 and worst <= 1e-6
    verdict(5, ok, f"beta_star={b!r} (4/3 within 1e-9), worst boundary imbalance {worst:.2e} (<= 1e-6)")


def test_criterion_6_redundancy_control_on_synthetic():
    t0 = time.perf_counter()
    cfg = SelectionConfig(token_budget=400, top_n=40, beta_policy="adaptive")
    wins = 0
    ious = {"adagres": [], "topk_same_k": []}
    for seed in range(200):
        pool, q, gold = generate_synthetic(SyntheticPoolSpec(n_chunks=40, n_clusters=5, intra_cluster_sim_target=0.92, seed=seed))
        ada, top = run_comparison([q], pool, [gold], cfg)
        wins += ada.redundancy_sum < top.redundancy_sum
        ious[ada.method].append(ada.iou)
        ious[top.method].append(top.iou)
    elapsed = time.perf_counter() - t0
    ma, mt = np.mean(ious["adagres"]), np.mean(ious["topk_same_k"])
    ok = wins >= 180 and ma >= mt and elapsed < 120
    verdict(6, ok, f"strictly lower redundancy in {wins}/200 seeds (>= 180), mean IOU {ma:.3f} vs {mt:.3f}, {elapsed:.2f}s (< 120s)")


def _cli_run(capsys, argv):
    code = main(argv)
    out, _ = capsys.readouterr()
    return code, out


def test_criterion_7_budget_safety_and_determinism(tmp_path, capsys):
    rng = np.random.default_rng(77)
    breaches = 0
    policies = ("fixed", "adaptive", "adaptive_scaled")
    for i in range(10_000):
        n = int(rng.integers(1, 40))
        lengths = rng.integers(1, 200, size=n)
        pool = CandidatePool.from_arrays(rng.standard_normal((n, 6)), lengths)
        q = Query("q", normalize(rng.standard_normal(6)))
        cfg = SelectionConfig(
            weights=ScoreWeights(float(rng.uniform(0.1, 3)), float(rng.uniform(0, 3))),
            token_budget=int(rng.integers(1, 1500)),
            beta_policy=policies[i % 3],
            top_n=int(rng.integers(1, 50)),
            lambda_=float(rng.uniform(0, 2)),
            beta_zero=float(rng.uniform(0, 1)),
            seed=i,
        )
        res = adaptive_select(q, pool, cfg)
        breaches += res.total_tokens > cfg.token_budget

    outputs = []
    for run in ("a", "b"):
        d = tmp_path / run
        blob = []
        _cli_run(capsys, ["synth", "--out", str(d), "--n-chunks", "300", "--clusters", "6", "--n-queries", "3", "--seed", "13"])
        files = ["--chunks", str(d / "chunks.jsonl"), "--queries", str(d / "queries.jsonl")]
        for cmd in (["select", "--top-n", "300"], ["calibrate"]):
            blob.append(_cli_run(capsys, cmd + files + ["--budget", "600", "--seed", "13"])[1])
        _cli_run(capsys, ["evaluate", *files, "--gold", str(d / "gold.jsonl"), "--budget", "600", "--seed", "13", "--out", str(d / "r.csv")])
        for name in ("chunks.jsonl", "queries.jsonl", "gold.jsonl", "r.csv", "r.summary.csv"):
            blob.append((d / name).read_text())
        outputs.append(blob)
    identical = outputs[0] == outputs[1]
    verdict(7, breaches == 0 and identical, f"{breaches} budget breaches over 10000 configs, CLI outputs identical: {identical}")


def test_criterion_8_telescoping_and_round_trip(guarantee_instances, tmp_path, capsys):
    worst_tel = 0.0
    for pool, q, beta, budget in guarantee_instances:
        cfg = SelectionConfig(weights=ScoreWeights(1.0, beta), token_budget=budget, beta_policy="fixed", top_n=len(pool))
        res = greedy_select(q, pool, cfg, beta=beta)
        F = objective(q, pool, res.ids, ScoreWeights(1.0, beta)).objective
        worst_tel = max(worst_tel, abs(F - sum(res.gains)), abs(F - res.objective_value))

    worst_rt = 0.0
    for pool, q, beta, budget in guarantee_instances[::15]:
        chunks, queries = tmp_path / "c.jsonl", tmp_path / "q.jsonl"
        chunks.write_text("".join(json.dumps(chunk_record(c)) + "\n" for c in pool))
        queries.write_text(json.dumps(query_record(q)) + "\n")
        _, out = _cli_run(
            capsys, ["select", "--chunks", str(chunks), "--queries", str(queries), "--beta", str(beta), "--budget", str(budget)]
        )
        got = json.loads(out)
        # re-score from the original vectors, not the re-read file
        idx = [pool.index_of(c) for c in got["selected"]]
        qs, S = query_sims(q, pool), pairwise_sims(pool)
        F = qs[idx].sum() - beta * S[np.ix_(idx, idx)].sum() / 2
        worst_rt = max(worst_rt, abs(F - got["objective_value"]), abs(F - sum(got["gains"])))
    ok = worst_tel <= 1e-9 and worst_rt <= 1e-9
    verdict(8, ok, f"worst telescoping error {worst_tel:.2e}, worst CLI round-trip error {worst_rt:.2e} (<= 1e-9)")
