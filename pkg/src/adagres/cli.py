"""``adagres`` command line: select, calibrate, evaluate, analyze, synth.

Results go to stdout as JSON (one object per query), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import analysis, calibration, evaluation, io
from .core import AdagresError
from .scoring import ScoreWeights
from .selection import SelectionConfig, greedy_select
from .synthetic import SyntheticPoolSpec, generate_synthetic

log = logging.getLogger("adagres")

EXIT_OK = 0
EXIT_GUARANTEE = 1
EXIT_INPUT = 2


class CliError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("ADAGRES_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"ADAGRES_SEED must be an integer, got {raw!r}") from None


def _pair(text: str):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN,MAX, got {text!r}") from None
    return lo, hi


def _grid(text: str):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _selection_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--chunks", required=True, help="chunk file (JSON lines)")
    p.add_argument("--queries", required=True, help="query file (JSON lines)")
    p.add_argument("--query-id", help="only process this query")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, help="fixed redundancy weight (implies --beta-policy fixed)")
    p.add_argument("--beta-policy", choices=["fixed", "adaptive", "adaptive-scaled"])
    p.add_argument("--budget", type=int, default=512, help="token budget")
    p.add_argument("--top-n", type=int, default=64)
    p.add_argument("--lambda", dest="lambda_", type=float, default=1.0, help="scale on the calibrated beta")
    p.add_argument("--beta0", type=float, default=0.0, help="bias added to the scaled beta")
    p.add_argument("--beta-clip", type=_pair, help="MIN,MAX clip range for calibrated beta (default 0,10*alpha)")
    p.add_argument("--stability-epsilon", type=float, default=1e-6)
    p.add_argument("--boundary-convention", choices=["full", "half"], default="half")
    p.add_argument("--redundancy-scale", type=float, default=1.0, help="multiplier on the resolved beta")
    p.add_argument("--seed", type=int, default=None, help="defaults to $ADAGRES_SEED or 0")
    p.add_argument("--out", help="write results here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adagres", description="Redundancy-aware token-budgeted context selection.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="greedy selection per query")
    _selection_flags(p)

    p = sub.add_parser("calibrate", help="pool statistics and adaptive beta per query")
    _selection_flags(p)

    p = sub.add_parser("evaluate", help="same-k comparison against top-k, CSV report")
    _selection_flags(p)
    p.add_argument("--gold", required=True, help="gold file (JSON lines)")
    p.add_argument("--beta-grid", type=_grid, help="comma-separated fixed betas to sweep")

    p = sub.add_parser("analyze", help="exact optimum and greedy guarantee check (pool <= 20)")
    _selection_flags(p)
    p.add_argument("--raw-sim", action="store_true", help="use signed cosine similarity")
    p.add_argument("--trials", type=int, default=20000, help="sampled triples for pools over 10 chunks")

    p = sub.add_parser("synth", help="write a synthetic clustered corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n-chunks", type=int, default=40)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--clusters", type=int, default=5)
    p.add_argument("--target-sim", type=float, default=0.9)
    p.add_argument("--token-min", type=int, default=50)
    p.add_argument("--token-max", type=int, default=150)
    p.add_argument("--n-relevant", type=int)
    p.add_argument("--n-queries", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)
    return parser


def _config(args, beta_override=None) -> SelectionConfig:
    policy = args.beta_policy
    beta = args.beta if beta_override is None else beta_override
    if policy is None:
        policy = "fixed" if beta is not None else "adaptive"
    policy = policy.replace("-", "_")
    if policy == "fixed" and beta is None:
        raise CliError("--beta-policy fixed needs --beta")
    if policy != "fixed" and beta is not None:
        raise CliError("--beta cannot be combined with an adaptive --beta-policy")
    if policy == "adaptive" and (args.lambda_ != 1.0 or args.beta0 != 0.0):
        log.warning("--lambda/--beta0 only apply to --beta-policy adaptive-scaled; ignoring them")
    return SelectionConfig(
        weights=ScoreWeights(args.alpha, beta or 0.0),
        token_budget=args.budget,
        beta_policy=policy,
        top_n=args.top_n,
        stability_epsilon=args.stability_epsilon,
        beta_clip=args.beta_clip,
        seed=args.seed,
        lambda_=args.lambda_,
        beta_zero=args.beta0,
        boundary_convention=args.boundary_convention,
        redundancy_scale=args.redundancy_scale,
    )


def _load(args):
    pools = io.build_pools(io.read_chunks(args.chunks))
    queries = io.read_queries(args.queries)
    if args.query_id is not None:
        queries = [q for q in queries if q.id == args.query_id]
        if not queries:
            raise CliError(f"query {args.query_id!r} not found in {args.queries}")
    return pools, queries


def _emit(args, objs) -> None:
    lines = [json.dumps(o, sort_keys=True) for o in objs]
    text = "".join(line + "\n" for line in lines)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_select(args) -> int:
    cfg = _config(args)
    pools, queries = _load(args)
    out = []
    for q in queries:
        pool = io.pool_for(pools, q.id)
        beta, _, _ = calibration.resolve_beta(q, pool, cfg)
        res = greedy_select(q, pool, cfg, beta)
        out.append({"query_id": q.id, "beta_policy": cfg.beta_policy, **res.to_dict()})
    _emit(args, out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = _config(args)
    pools, queries = _load(args)
    out = []
    for q in queries:
        pool = io.pool_for(pools, q.id)
        stats = calibration.pool_stats(q, pool, cfg.top_n, cfg.token_budget, cfg.seed, cfg.exact_pairs_max, cfg.sample_pairs)
        cal = calibration.calibrate(stats, cfg, args.lambda_, args.beta0)
        out.append({"query_id": q.id, "stats": stats.to_dict(), "calibration": cal.to_dict()})
    _emit(args, out)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if not args.out:
        raise CliError("evaluate needs --out PATH for the CSV report")
    if args.beta_grid and (args.beta is not None or args.beta_policy not in (None, "fixed")):
        raise CliError("--beta-grid sweeps fixed betas; drop --beta/--beta-policy")
    queries = io.read_queries(args.queries)
    if args.query_id is not None:
        queries = [q for q in queries if q.id == args.query_id]
    if not queries:
        log.warning("no queries in %s; writing header-only report", args.queries)
        evaluation.write_report([], args.out)
        return EXIT_OK
    pools = io.build_pools(io.read_chunks(args.chunks))
    golds = io.read_golds(args.gold)
    if isinstance(pools, dict):
        pools = {q.id: pools[q.id] for q in queries if q.id in pools}
    records = []
    if args.beta_grid:
        for b in args.beta_grid:
            records += evaluation.run_comparison(queries, pools, golds, _config(args, beta_override=b))
    else:
        records = evaluation.run_comparison(queries, pools, golds, _config(args))
    failed = [r for r in records if r.error]
    summary = evaluation.write_report(records, args.out)
    for row in summary:
        log.info("beta=%s %s mean_iou=%.4f n=%d", row["beta"], row["method"], row["mean_iou"], row["n"])
    if failed:
        log.warning("%d queries failed; see messages above", len(failed))
    return EXIT_OK


def cmd_analyze(args) -> int:
    cfg = _config(args)
    pools, queries = _load(args)
    out = []
    status = EXIT_OK
    for q in queries:
        pool = io.pool_for(pools, q.id)
        beta, _, _ = calibration.resolve_beta(q, pool, cfg)
        w = ScoreWeights(cfg.weights.alpha, beta)
        try:
            rep = analysis.check_greedy_guarantee(q, pool, w, cfg.token_budget, raw=args.raw_sim, trials=args.trials, seed=cfg.seed)
        except analysis.PoolTooLargeError as exc:
            raise CliError(f"{exc}; try `adagres synth --n-chunks 12`") from None
        if not rep.guarantee_satisfied and not args.raw_sim:
            log.error("query %s: greedy value %.6g below guarantee %.6g", q.id, rep.greedy_value, rep.guarantee_rhs)
            status = EXIT_GUARANTEE
        out.append({"query_id": q.id, **rep.to_dict()})
    _emit(args, out)
    return status


def cmd_synth(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    chunks, queries, golds = [], [], []
    multi = args.n_queries > 1
    for i in range(args.n_queries):
        qid = f"q{i}"
        spec = SyntheticPoolSpec(
            n_chunks=args.n_chunks,
            dimension=args.dim,
            n_clusters=args.clusters,
            intra_cluster_sim_target=args.target_sim,
            token_length_range=(args.token_min, args.token_max),
            seed=args.seed + i,
            n_relevant=args.n_relevant,
            query_id=qid,
            id_prefix=f"{qid}-" if multi else "",
        )
        pool, q, gold = generate_synthetic(spec)
        chunks += [io.chunk_record(c, qid if multi else None) for c in pool]
        queries.append(io.query_record(q))
        golds.append(io.gold_record(gold))
    io.write_jsonl(outdir / "chunks.jsonl", chunks)
    io.write_jsonl(outdir / "queries.jsonl", queries)
    io.write_jsonl(outdir / "gold.jsonl", golds)
    log.info("wrote %d chunks, %d queries to %s", len(chunks), len(queries), outdir)
    return EXIT_OK


COMMANDS = {
    "select": cmd_select,
    "calibrate": cmd_calibrate,
    "evaluate": cmd_evaluate,
    "analyze": cmd_analyze,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="adagres: %(levelname)s: %(message)s")
    try:
        if args.seed is None:
            args.seed = _default_seed()
        return COMMANDS[args.command](args)
    except (CliError, AdagresError) as exc:
        print(f"adagres: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
