import json
import struct

import numpy as np
import pytest

from legaltopics.embio import (
    ChunkEmbeddingSet,
    EmbeddingFormatError,
    default_index_path,
    read_embeddings,
    write_embeddings,
)


def sample_vectors(rng, count=6, dim=4):
    vectors = rng.random((count, dim)).astype(np.float32)
    index = [(f"doc{i // 2}", i % 2) for i in range(count)]
    return vectors, index


class TestRoundTrip:
    def test_bitwise_round_trip(self, tmp_path, rng):
        vectors, index = sample_vectors(rng)
        path = tmp_path / "chunks.emb1"
        write_embeddings(path, vectors, index)
        loaded = read_embeddings(path)
        np.testing.assert_array_equal(loaded.vectors, vectors)
        assert loaded.index == tuple(index)
        assert loaded.dim == 4
        assert len(loaded) == 6

    def test_float64_input_written_as_float32(self, tmp_path):
        vectors = np.array([[0.1, 0.2], [0.3, 0.4]])
        path = tmp_path / "v.emb1"
        write_embeddings(path, vectors, [("a", 0), ("a", 1)])
        loaded = read_embeddings(path)
        assert loaded.vectors.dtype == np.float32
        np.testing.assert_array_equal(loaded.vectors, vectors.astype(np.float32))

    def test_header_layout(self, tmp_path, rng):
        vectors, index = sample_vectors(rng, count=3, dim=5)
        path = tmp_path / "v.emb1"
        write_embeddings(path, vectors, index)
        raw = path.read_bytes()
        magic, count, dim = struct.unpack("<4sII", raw[:12])
        assert magic == b"EMB1"
        assert (count, dim) == (3, 5)
        assert len(raw) == 12 + 3 * 5 * 4

    def test_empty_set(self, tmp_path):
        path = tmp_path / "empty.emb1"
        write_embeddings(path, np.empty((0, 8), dtype=np.float32), [])
        loaded = read_embeddings(path)
        assert len(loaded) == 0
        assert loaded.dim == 8

    def test_index_sidecar_content(self, tmp_path, rng):
        vectors, index = sample_vectors(rng, count=2)
        path = tmp_path / "v.emb1"
        write_embeddings(path, vectors, index)
        idx_path = default_index_path(path)
        assert idx_path.name == "v.emb1.idx.jsonl"
        lines = idx_path.read_text().splitlines()
        assert json.loads(lines[0]) == {"doc_id": "doc0", "chunk_index": 0}
        assert json.loads(lines[1]) == {"doc_id": "doc0", "chunk_index": 1}

    def test_custom_index_path(self, tmp_path, rng):
        vectors, index = sample_vectors(rng, count=2)
        path = tmp_path / "v.emb1"
        other = tmp_path / "elsewhere.jsonl"
        write_embeddings(path, vectors, index, index_path=other)
        loaded = read_embeddings(path, index_path=other)
        assert loaded.index == tuple(index)


class TestValidation:
    def test_bad_magic(self, tmp_path, rng):
        vectors, index = sample_vectors(rng, count=2)
        path = tmp_path / "v.emb1"
        write_embeddings(path, vectors, index)
        raw = bytearray(path.read_bytes())
        raw[:4] = b"NOPE"
        path.write_bytes(bytes(raw))
        with pytest.raises(EmbeddingFormatError, match="magic"):
            read_embeddings(path)

    def test_truncated_payload(self, tmp_path, rng):
        vectors, index = sample_vectors(rng, count=2)
        path = tmp_path / "v.emb1"
        write_embeddings(path, vectors, index)
        raw = path.read_bytes()
        path.write_bytes(raw[:-4])
        with pytest.raises(EmbeddingFormatError, match="size"):
            read_embeddings(path)

    def test_index_count_mismatch(self, tmp_path, rng):
        vectors, index = sample_vectors(rng, count=3)
        path = tmp_path / "v.emb1"
        write_embeddings(path, vectors, index)
        idx_path = default_index_path(path)
        lines = idx_path.read_text().splitlines()
        idx_path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(EmbeddingFormatError, match="count"):
            read_embeddings(path)

    def test_malformed_index_line_names_lineno(self, tmp_path, rng):
        vectors, index = sample_vectors(rng, count=2)
        path = tmp_path / "v.emb1"
        write_embeddings(path, vectors, index)
        idx_path = default_index_path(path)
        lines = idx_path.read_text().splitlines()
        lines[1] = "{broken"
        idx_path.write_text("\n".join(lines) + "\n")
        with pytest.raises(EmbeddingFormatError, match=":2:"):
            read_embeddings(path)

    def test_duplicate_index_entry_rejected(self, tmp_path):
        vectors = np.ones((2, 3), dtype=np.float32)
        with pytest.raises(EmbeddingFormatError, match="unique"):
            write_embeddings(tmp_path / "v.emb1", vectors, [("a", 0), ("a", 0)])

    def test_wrong_vector_shape_rejected(self, tmp_path):
        with pytest.raises(EmbeddingFormatError):
            write_embeddings(tmp_path / "v.emb1", np.ones(3, dtype=np.float32), [("a", 0)])

    def test_index_length_mismatch_rejected(self, tmp_path):
        vectors = np.ones((2, 3), dtype=np.float32)
        with pytest.raises(EmbeddingFormatError):
            write_embeddings(tmp_path / "v.emb1", vectors, [("a", 0)])

    def test_set_validation(self):
        with pytest.raises(EmbeddingFormatError):
            ChunkEmbeddingSet(
                dim=3,
                vectors=np.ones((2, 2), dtype=np.float32),
                index=(("a", 0), ("a", 1)),
            )


class TestFixture:
    def test_checked_in_fixture_loads(self, fixtures_dir):
        loaded = read_embeddings(fixtures_dir / "chunks_100.emb1")
        assert loaded.dim == 16
        assert len(loaded) == len(loaded.index)
        doc_ids = {doc_id for doc_id, _ in loaded.index}
        assert len(doc_ids) == 100
