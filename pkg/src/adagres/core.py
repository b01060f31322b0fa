"""Domain types, vector validation and the similarity primitive.

All similarity math runs in float64. Embeddings are normalized once at
construction and stored read-only, so downstream code can assume unit norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence, Union

import numpy as np

ZERO_NORM_TOL = 1e-12
UNIT_NORM_TOL = 1e-6


class AdagresError(ValueError):
    """Base class for invalid inputs to selection, calibration or analysis."""


class ZeroNormError(AdagresError):
    pass


class DimensionMismatchError(AdagresError):
    pass


class EmptyPoolError(AdagresError):
    pass


def _as_vector(raw) -> np.ndarray:
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 1:
        raise AdagresError(f"embedding must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise AdagresError("embedding must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise AdagresError("embedding contains non-finite values")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Embedding:
    """Unit-norm dense vector. Use :func:`normalize` to build one from raw data."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_vector(self.values)
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise AdagresError(f"embedding norm is {norm:.9g}, expected 1 (use normalize())")
        object.__setattr__(self, "values", _frozen(arr))

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])

    def __len__(self) -> int:
        return self.dimension

    def __eq__(self, other):
        if not isinstance(other, Embedding):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def normalize(raw, name: Optional[str] = None) -> Embedding:
    """Scale ``raw`` to unit Euclidean norm.

    ``name`` identifies the vector in the error raised for zero-norm input.
    """
    arr = _as_vector(raw)
    norm = float(np.linalg.norm(arr))
    if norm < ZERO_NORM_TOL:
        label = f" for {name!r}" if name is not None else ""
        raise ZeroNormError(f"zero-norm vector{label}: cannot normalize")
    return Embedding(arr / norm)


def _embedding(value, name: str) -> Embedding:
    if isinstance(value, Embedding):
        return value
    return normalize(value, name=name)


def _check_dims(a: int, b: int) -> None:
    if a != b:
        raise DimensionMismatchError(f"dimension mismatch: {a} vs {b}")


def sim(a: Embedding, b: Embedding, raw: bool = False) -> float:
    """Non-negative cosine similarity ``max(0, a.b)`` of two unit vectors.

    With ``raw=True`` the signed dot product is returned instead.
    """
    _check_dims(a.dimension, b.dimension)
    dot = float(np.dot(a.values, b.values))
    return dot if raw else max(0.0, dot)


@dataclass(frozen=True)
class Chunk:
    id: str
    embedding: Embedding
    token_length: int
    text: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "embedding", _embedding(self.embedding, self.id))
        tokens = self.token_length
        if isinstance(tokens, bool) or int(tokens) != tokens or tokens < 1:
            raise AdagresError(f"chunk {self.id!r}: token_length must be a positive integer, got {tokens!r}")
        object.__setattr__(self, "token_length", int(tokens))


@dataclass(frozen=True)
class Query:
    id: str
    embedding: Embedding
    text: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "embedding", _embedding(self.embedding, self.id))


ChunkRef = Union[str, int, Chunk]


@dataclass(frozen=True, eq=False)
class CandidatePool:
    """Ordered, id-unique collection of chunks sharing one dimension."""

    chunks: tuple
    dimension: int = field(default=0)

    def __post_init__(self):
        chunks = tuple(self.chunks)
        object.__setattr__(self, "chunks", chunks)
        if not chunks:
            if self.dimension < 1:
                raise EmptyPoolError("candidate pool is empty")
            return
        dim = chunks[0].embedding.dimension
        if self.dimension and self.dimension != dim:
            raise DimensionMismatchError(f"dimension mismatch: pool declares {self.dimension}, chunk {chunks[0].id!r} has {dim}")
        seen = set()
        for c in chunks:
            if c.embedding.dimension != dim:
                raise DimensionMismatchError(f"dimension mismatch: chunk {c.id!r} has {c.embedding.dimension}, pool has {dim}")
            if c.id in seen:
                raise AdagresError(f"duplicate chunk id {c.id!r}")
            seen.add(c.id)
        object.__setattr__(self, "dimension", dim)

    def __len__(self) -> int:
        return len(self.chunks)

    def __iter__(self):
        return iter(self.chunks)

    def __getitem__(self, i) -> Chunk:
        return self.chunks[i]

    @cached_property
    def ids(self) -> list:
        return [c.id for c in self.chunks]

    @cached_property
    def _index(self) -> dict:
        return {c.id: i for i, c in enumerate(self.chunks)}

    @cached_property
    def matrix(self) -> np.ndarray:
        """(n, d) float64 embedding matrix, read-only."""
        if not self.chunks:
            return np.zeros((0, self.dimension))
        m = np.stack([c.embedding.values for c in self.chunks])
        m.flags.writeable = False
        return m

    @cached_property
    def lengths(self) -> np.ndarray:
        arr = np.array([c.token_length for c in self.chunks], dtype=np.int64)
        arr.flags.writeable = False
        return arr

    def index_of(self, ref: ChunkRef) -> int:
        if isinstance(ref, Chunk):
            ref = ref.id
        if isinstance(ref, (int, np.integer)) and not isinstance(ref, bool):
            if not 0 <= ref < len(self.chunks):
                raise AdagresError(f"chunk index {ref} out of range for pool of {len(self.chunks)}")
            return int(ref)
        try:
            return self._index[ref]
        except KeyError:
            raise AdagresError(f"chunk {ref!r} is not in the pool") from None

    def indices(self, refs: Iterable[ChunkRef]) -> np.ndarray:
        return np.array([self.index_of(r) for r in refs], dtype=np.int64)

    def subset(self, indices: Sequence[int]) -> "CandidatePool":
        return CandidatePool(tuple(self.chunks[i] for i in indices), self.dimension)

    def check_query(self, q: Query) -> None:
        _check_dims(q.embedding.dimension, self.dimension)

    @classmethod
    def from_arrays(cls, embeddings, token_lengths, ids=None, texts=None) -> "CandidatePool":
        """Build a pool from an (n, d) array; rows are normalized on the way in."""
        emb = np.asarray(embeddings, dtype=np.float64)
        if emb.ndim != 2:
            raise AdagresError(f"embeddings must be 2-D, got shape {emb.shape}")
        n = emb.shape[0]
        if ids is None:
            ids = [f"c{i}" for i in range(n)]
        lengths = np.broadcast_to(np.asarray(token_lengths), (n,))
        chunks = tuple(
            Chunk(str(ids[i]), normalize(emb[i], name=str(ids[i])), int(lengths[i]), None if texts is None else texts[i])
            for i in range(n)
        )
        return cls(chunks, emb.shape[1])


def query_sims(q: Query, pool: CandidatePool, raw: bool = False) -> np.ndarray:
    """Similarity of ``q`` to every chunk in pool order."""
    pool.check_query(q)
    s = pool.matrix @ q.embedding.values
    return s if raw else np.maximum(s, 0.0)


def pairwise_sims(pool: CandidatePool, raw: bool = False) -> np.ndarray:
    """Symmetric (n, n) chunk similarity matrix with a zero diagonal."""
    m = pool.matrix
    s = m @ m.T
    s = 0.5 * (s + s.T)
    if not raw:
        np.maximum(s, 0.0, out=s)
    np.fill_diagonal(s, 0.0)
    return s
