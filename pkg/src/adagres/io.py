"""Line-delimited JSON readers and writers for chunks, queries and gold sets.

Chunk lines: ``{"id", "embedding", "tokens", "text"?}``; an optional
``query_id`` scopes the chunk to that query's pool. Query lines:
``{"id", "embedding", "text"?}``. Gold lines: ``{"query_id", "gold_ids"}``.
"""

from __future__ import annotations

import json
import logging
from collections import OrderedDict
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from .core import AdagresError, CandidatePool, Chunk, Query
from .evaluation import GoldReference

log = logging.getLogger(__name__)


class InputFormatError(AdagresError):
    pass


def _lines(path) -> Iterator[Tuple[int, dict]]:
    path = Path(path)
    try:
        fh = path.open()
    except OSError as exc:
        raise InputFormatError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputFormatError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise InputFormatError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, obj


def _field(obj, key, path, lineno):
    if key not in obj:
        raise InputFormatError(f"{path}:{lineno}: missing field {key!r}")
    return obj[key]


def read_chunks(path) -> List[Tuple[Optional[str], Chunk]]:
    """``(query_id or None, chunk)`` per line, in file order.

    A line without ``tokens`` falls back to a whitespace word count of its
    text; this is logged once per file.
    """
    out = []
    warned = False
    for lineno, obj in _lines(path):
        cid = str(_field(obj, "id", path, lineno))
        text = obj.get("text")
        tokens = obj.get("tokens")
        if tokens is None:
            if not text:
                raise InputFormatError(f"{path}:{lineno}: chunk {cid!r} has neither 'tokens' nor 'text'")
            if not warned:
                log.warning("%s: chunks without 'tokens'; counting whitespace-separated words", path)
                warned = True
            tokens = max(1, len(str(text).split()))
        try:
            chunk = Chunk(cid, _field(obj, "embedding", path, lineno), tokens, text)
        except AdagresError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from None
        out.append((obj.get("query_id"), chunk))
    return out


def read_queries(path) -> List[Query]:
    out = []
    for lineno, obj in _lines(path):
        qid = str(_field(obj, "id", path, lineno))
        try:
            out.append(Query(qid, _field(obj, "embedding", path, lineno), obj.get("text")))
        except AdagresError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from None
    return out


def read_golds(path) -> Dict[str, GoldReference]:
    out = {}
    for lineno, obj in _lines(path):
        qid = str(_field(obj, "query_id", path, lineno))
        ids = _field(obj, "gold_ids", path, lineno)
        if not isinstance(ids, list):
            raise InputFormatError(f"{path}:{lineno}: 'gold_ids' must be a list")
        try:
            out[qid] = GoldReference(qid, frozenset(str(i) for i in ids))
        except AdagresError as exc:
            raise InputFormatError(f"{path}:{lineno}: {exc}") from None
    return out


def build_pools(entries: List[Tuple[Optional[str], Chunk]]):
    """One shared pool if no chunk carries a query id, else a pool per query id."""
    if not entries:
        raise InputFormatError("chunk file is empty")
    scoped = [qid for qid, _ in entries if qid is not None]
    try:
        if not scoped:
            return CandidatePool(tuple(c for _, c in entries))
        if len(scoped) != len(entries):
            raise InputFormatError("either every chunk line carries 'query_id' or none does")
        groups: Dict[str, list] = OrderedDict()
        for qid, c in entries:
            groups.setdefault(str(qid), []).append(c)
        return {qid: CandidatePool(tuple(cs)) for qid, cs in groups.items()}
    except InputFormatError:
        raise
    except AdagresError as exc:
        raise InputFormatError(str(exc)) from None


def pool_for(pools, query_id: str) -> CandidatePool:
    if isinstance(pools, CandidatePool):
        return pools
    try:
        return pools[query_id]
    except KeyError:
        raise InputFormatError(f"no chunks for query {query_id!r}") from None


def chunk_record(chunk: Chunk, query_id: Optional[str] = None) -> dict:
    rec = {"id": chunk.id, "embedding": chunk.embedding.values.tolist(), "tokens": chunk.token_length}
    if chunk.text is not None:
        rec["text"] = chunk.text
    if query_id is not None:
        rec["query_id"] = query_id
    return rec


def query_record(q: Query) -> dict:
    rec = {"id": q.id, "embedding": q.embedding.values.tolist()}
    if q.text is not None:
        rec["text"] = q.text
    return rec


def gold_record(g: GoldReference) -> dict:
    return {"query_id": g.query_id, "gold_ids": sorted(g.gold_chunk_ids)}


def write_jsonl(path, records) -> None:
    with Path(path).open("w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
