"""Same-k comparison of adaptive greedy selection against similarity top-k.

For each query the greedy run fixes k, the baseline then takes the top k by
query similarity, and both are scored by IOU against the gold chunk ids.
"""

from __future__ import annotations

import csv
import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Union

import numpy as np

from .calibration import resolve_beta
from .core import AdagresError, CandidatePool, Query
from .scoring import objective, ScoreWeights
from .selection import SelectionConfig, SelectionResult, greedy_select, topk_select

log = logging.getLogger(__name__)

REPORT_HEADER = ["query_id", "method", "beta", "k", "iou", "relevance_sum", "redundancy_sum", "total_tokens"]
SUMMARY_HEADER = [
    "beta",
    "method",
    "n",
    "mean_iou",
    "mean_relevance_sum",
    "mean_redundancy_sum",
    "mean_k",
    "mean_total_tokens",
    # not part of the reference protocol, reported for spread
    "extra_p25_iou",
    "extra_median_iou",
    "extra_p75_iou",
]
METHODS = ("adagres", "topk_same_k")


@dataclass(frozen=True)
class GoldReference:
    query_id: str
    gold_chunk_ids: FrozenSet[str]

    def __post_init__(self):
        object.__setattr__(self, "gold_chunk_ids", frozenset(self.gold_chunk_ids))
        if not self.gold_chunk_ids:
            raise AdagresError(f"gold set for query {self.query_id!r} is empty")


@dataclass(frozen=True)
class EvalRecord:
    query_id: str
    method: str
    k_used: int
    beta_used: float
    iou: float
    redundancy_sum: float
    relevance_sum: float
    total_tokens: int
    skipped: bool = False
    error: Optional[str] = None

    def row(self) -> list:
        return [
            self.query_id,
            self.method,
            repr(self.beta_used),
            self.k_used,
            repr(self.iou),
            repr(self.relevance_sum),
            repr(self.redundancy_sum),
            self.total_tokens,
        ]


def iou(selected: Iterable[str], gold: Iterable[str]) -> float:
    """Intersection over union of two id sets; ``gold`` must be non-empty."""
    a, b = set(selected), set(gold)
    if not b:
        raise AdagresError("gold set is empty")
    return len(a & b) / len(a | b)


def _record(q, pool, res: SelectionResult, method, gold, beta, skipped=False) -> EvalRecord:
    sb = objective(q, pool, res.ids, ScoreWeights(1.0, 0.0))
    return EvalRecord(
        query_id=q.id,
        method=method,
        k_used=len(res.selected),
        beta_used=float(beta),
        iou=0.0 if skipped else iou(res.ids, gold.gold_chunk_ids),
        redundancy_sum=sb.redundancy_sum,
        relevance_sum=sb.relevance_sum,
        total_tokens=res.total_tokens,
        skipped=skipped,
    )


def compare_query(q: Query, pool: CandidatePool, gold: GoldReference, cfg: SelectionConfig) -> List[EvalRecord]:
    """Paired adagres / same-k top-k records for one query."""
    beta, _, _ = resolve_beta(q, pool, cfg)
    res = greedy_select(q, pool, cfg, beta)
    k = len(res.selected)
    if k == 0:
        empty = SelectionResult([], 0, 0.0, 0.0, res.stop_reason, cfg.token_budget)
        return [
            _record(q, pool, res, "adagres", gold, beta, skipped=True),
            _record(q, pool, empty, "topk_same_k", gold, beta, skipped=True),
        ]
    base = topk_select(q, pool, k, cfg.token_budget)
    return [_record(q, pool, res, "adagres", gold, beta), _record(q, pool, base, "topk_same_k", gold, beta)]


def run_comparison(
    queries: Iterable[Query],
    pools: Union[CandidatePool, Mapping[str, CandidatePool]],
    golds: Union[Mapping[str, GoldReference], Iterable[GoldReference]],
    cfg: SelectionConfig,
) -> List[EvalRecord]:
    """Evaluate every query; failures become error records and the run continues.

    ``pools`` is either one pool shared by all queries or a mapping from
    query id to that query's pool. Output is sorted by query id.
    """
    if not isinstance(golds, Mapping):
        golds = {g.query_id: g for g in golds}
    records: List[EvalRecord] = []
    for q in sorted(queries, key=lambda q: q.id):
        pool = pools if isinstance(pools, CandidatePool) else pools.get(q.id)
        gold = golds.get(q.id)
        try:
            if pool is None:
                raise AdagresError(f"no candidate pool for query {q.id!r}")
            if gold is None:
                raise AdagresError(f"no gold reference for query {q.id!r}")
            records.extend(compare_query(q, pool, gold, cfg))
        except AdagresError as exc:
            log.warning("query %s: %s", q.id, exc)
            records.append(EvalRecord(q.id, "adagres", 0, float("nan"), 0.0, 0.0, 0.0, 0, skipped=True, error=str(exc)))
    return records


def _mean(xs):
    return float(np.mean(xs)) if len(xs) else float("nan")


def summarize(records: Iterable[EvalRecord]) -> List[Dict]:
    """Mean metrics per (beta, method), ordered by beta then method."""
    groups = defaultdict(list)
    for r in records:
        if r.error is None:
            groups[(r.beta_used, r.method)].append(r)
    out = []
    for (beta, method), rs in sorted(groups.items(), key=lambda kv: (kv[0][0], METHODS.index(kv[0][1]))):
        ious = [r.iou for r in rs]
        p25, p50, p75 = np.percentile(ious, [25, 50, 75])
        out.append(
            {
                "beta": beta,
                "method": method,
                "n": len(rs),
                "mean_iou": _mean(ious),
                "mean_relevance_sum": _mean([r.relevance_sum for r in rs]),
                "mean_redundancy_sum": _mean([r.redundancy_sum for r in rs]),
                "mean_k": _mean([r.k_used for r in rs]),
                "mean_total_tokens": _mean([r.total_tokens for r in rs]),
                "extra_p25_iou": float(p25),
                "extra_median_iou": float(p50),
                "extra_p75_iou": float(p75),
            }
        )
    return out


def summary_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".summary.csv")


def write_report(records: Iterable[EvalRecord], path: Union[str, Path]) -> List[Dict]:
    """Write one CSV row per record plus a ``<stem>.summary.csv`` aggregate table.

    Error records are left out of both files. Returns the aggregate rows.
    """
    records = [r for r in records if r.error is None]
    path = Path(path)
    try:
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(REPORT_HEADER)
            for r in records:
                w.writerow(r.row())
        summary = summarize(records)
        with summary_path(path).open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=SUMMARY_HEADER)
            w.writeheader()
            for row in summary:
                w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    except OSError as exc:
        raise AdagresError(f"cannot write report to {path}: {exc}") from exc
    return summary
