"""Chunk-embedding file format (EMB1).

Little-endian binary: magic "EMB1", u32 count, u32 dim, then count*dim
float32 values row-major. A sidecar JSONL index carries one
{"doc_id": str, "chunk_index": int} object per row, in row order; by
convention it lives at <path>.idx.jsonl.
"""

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"
_HEADER = struct.Struct("<4sII")


class EmbeddingFormatError(ValueError):
    """Malformed embedding file or index."""


@dataclass(frozen=True)
class ChunkEmbeddingSet:
    """Fixed-dimension vectors for document chunks plus the chunk -> document index."""

    dim: int
    vectors: np.ndarray  # count x dim, float32
    index: tuple[tuple[str, int], ...]  # (doc_id, chunk_index) per row

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[1] != self.dim:
            raise EmbeddingFormatError("vectors must be a count x dim matrix")
        if len(self.index) != self.vectors.shape[0]:
            raise EmbeddingFormatError("index length must equal vector count")
        if len(set(self.index)) != len(self.index):
            raise EmbeddingFormatError("index entries must be unique")

    def __len__(self):
        return self.vectors.shape[0]


def default_index_path(path) -> Path:
    return Path(str(path) + ".idx.jsonl")


def write_embeddings(path, vectors: np.ndarray, index, index_path=None) -> None:
    """Write an EMB1 file and its sidecar index."""
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    if vectors.ndim != 2:
        raise EmbeddingFormatError("vectors must be a count x dim matrix")
    # route through the dataclass so writes get the same validation as reads
    emb = ChunkEmbeddingSet(
        dim=vectors.shape[1],
        vectors=vectors,
        index=tuple((str(d), int(c)) for d, c in index),
    )
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, len(emb), emb.dim))
        fh.write(vectors.tobytes(order="C"))
    index_path = Path(index_path) if index_path else default_index_path(path)
    with index_path.open("w", encoding="utf-8") as fh:
        for doc_id, chunk_index in emb.index:
            fh.write(json.dumps({"doc_id": doc_id, "chunk_index": chunk_index}) + "\n")


def read_embeddings(path, index_path=None) -> ChunkEmbeddingSet:
    """Read an EMB1 file and its sidecar index, validating both."""
    path = Path(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise EmbeddingFormatError(f"{path}: truncated header")
    magic, count, dim = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise EmbeddingFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    expected = _HEADER.size + 4 * count * dim
    if len(raw) != expected:
        raise EmbeddingFormatError(f"{path}: size {len(raw)} != expected {expected} for {count}x{dim}")
    vectors = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size).reshape(count, dim)

    index_path = Path(index_path) if index_path else default_index_path(path)
    entries = []
    with index_path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                entries.append((str(record["doc_id"]), int(record["chunk_index"])))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise EmbeddingFormatError(f"{index_path}:{lineno}: bad index entry ({exc})") from exc
    if len(entries) != count:
        raise EmbeddingFormatError(
            f"{index_path}: {len(entries)} index entries for {count} embedding rows"
        )
    return ChunkEmbeddingSet(dim=dim, vectors=vectors, index=tuple(entries))
