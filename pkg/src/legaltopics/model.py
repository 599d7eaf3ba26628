"""Uniform topic-model container shared by all three algorithms, plus
deterministic JSON persistence.

The artifact is plain JSON with sorted keys; floats round-trip exactly
through repr, so save/load is lossless and re-saving an unchanged model is
byte-identical.
"""

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .corpus import Vocabulary

ROW_SUM_TOL = 1e-9
ARTIFACT_FORMAT = "legaltopics-model/1"


class Algorithm(Enum):
    LDA = "LDA"
    NMF = "NMF"
    CLUSTER = "CLUSTER"


@dataclass(frozen=True)
class TopicModel:
    """k topic-word distributions plus one topic distribution per document."""

    topic_word: np.ndarray  # k x vocab
    doc_topic: np.ndarray  # docs x k
    algorithm: Algorithm
    vocab: Vocabulary
    doc_ids: tuple[str, ...] = ()
    config: dict = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        tw, dt = self.topic_word, self.doc_topic
        if tw.ndim != 2 or dt.ndim != 2 or tw.shape[0] != dt.shape[1]:
            raise ValueError("topic_word is k x V and doc_topic is docs x k")
        if tw.shape[1] != len(self.vocab):
            raise ValueError("topic_word column count must equal vocabulary size")
        if np.any(tw < 0) or np.any(dt < 0):
            raise ValueError("distributions must be non-negative")
        for name, mat in (("topic_word", tw), ("doc_topic", dt)):
            sums = mat.sum(axis=1)
            if mat.shape[0] and np.max(np.abs(sums - 1.0)) > ROW_SUM_TOL:
                raise ValueError(f"{name} rows must sum to 1 within {ROW_SUM_TOL}")
        if self.doc_ids and len(self.doc_ids) != dt.shape[0]:
            raise ValueError("doc_ids length must equal doc_topic row count")

    @property
    def k(self) -> int:
        return self.topic_word.shape[0]


def top_words(model: TopicModel, topic: int, n: int = 10) -> list[str]:
    """The n highest-probability terms of a topic, descending; ties break
    lexicographically. n beyond the vocabulary returns the whole vocabulary."""
    if not 0 <= topic < model.k:
        raise IndexError(f"topic {topic} out of range 0..{model.k - 1}")
    if n < 1:
        raise ValueError("n must be >= 1")
    row = model.topic_word[topic]
    order = sorted(range(len(row)), key=lambda i: (-row[i], model.vocab.terms[i]))
    return [model.vocab.terms[i] for i in order[:n]]


def save_model(model: TopicModel, path) -> None:
    """Write the model as a self-describing JSON artifact."""
    payload = {
        "format": ARTIFACT_FORMAT,
        "algorithm": model.algorithm.value,
        "config": model.config,
        "vocab_sha256": model.vocab.sha256(),
        "terms": list(model.vocab.terms),
        "doc_freq": list(model.vocab.doc_freq),
        "total_docs": model.vocab.total_docs,
        "doc_ids": list(model.doc_ids),
        "topic_word": [[float(x) for x in row] for row in model.topic_word],
        "doc_topic": [[float(x) for x in row] for row in model.doc_topic],
        "notes": list(model.notes),
    }
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text + "\n", encoding="utf-8")


def load_model(path) -> TopicModel:
    """Load a model artifact written by save_model."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != ARTIFACT_FORMAT:
        raise ValueError(f"{path}: not a {ARTIFACT_FORMAT} artifact")
    vocab = Vocabulary(
        terms=tuple(payload["terms"]),
        doc_freq=tuple(payload["doc_freq"]),
        total_docs=payload["total_docs"],
    )
    stored_hash = payload.get("vocab_sha256")
    if stored_hash and stored_hash != vocab.sha256():
        raise ValueError(f"{path}: vocabulary hash mismatch (artifact corrupted)")
    return TopicModel(
        topic_word=np.array(payload["topic_word"], dtype=np.float64).reshape(-1, len(vocab)),
        doc_topic=np.array(payload["doc_topic"], dtype=np.float64),
        algorithm=Algorithm(payload["algorithm"]),
        vocab=vocab,
        doc_ids=tuple(payload.get("doc_ids", ())),
        config=payload.get("config", {}),
        notes=tuple(payload.get("notes", ())),
    )
