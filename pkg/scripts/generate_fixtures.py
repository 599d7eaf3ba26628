#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures under tests/fixtures/.

Deterministic: rerunning produces byte-identical files. The synthetic corpus
has three planted topic groups with distinct vocabularies, years
concentrated between 1950 and 1990, a few undated documents, and a mix of
countries. The EMB1 fixture embeds the corpus chunks (max_chunk_tokens=64,
dim=16) as noisy group centers so the cluster path has real structure to
find.
"""

import json
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from legaltopics.corpus import (  # noqa: E402
    chunk_corpus,
    default_stopwords,
    load_corpus,
    preprocess_corpus,
)
from legaltopics.embio import write_embeddings  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
N_DOCS = 100
N_GROUPS = 3
WORDS_PER_GROUP = 40
SHARED_WORDS = 25
CHUNK_TOKENS = 64
EMB_DIM = 16
SEED = 97


def _pseudo_words(rng, count, length=6, taken=frozenset()):
    letters = "bcdfghjklmnpqrstvwz"
    vowels = "aeiou"
    words = []
    seen = set(taken)
    while len(words) < count:
        chars = []
        for i in range(length):
            pool = vowels if i % 2 else letters
            chars.append(pool[rng.integers(0, len(pool))])
        word = "".join(chars)
        if word not in seen:
            seen.add(word)
            words.append(word)
    return words


def build_corpus(rng):
    stop = default_stopwords()
    shared = _pseudo_words(rng, SHARED_WORDS, taken=stop)
    groups = []
    taken = set(shared) | stop
    for _ in range(N_GROUPS):
        words = _pseudo_words(rng, WORDS_PER_GROUP, taken=frozenset(taken))
        taken.update(words)
        groups.append(words)

    lines = []
    for d in range(N_DOCS):
        group = d % N_GROUPS
        length = int(rng.integers(40, 120))
        tokens = []
        for _ in range(length):
            if rng.random() < 0.25:
                tokens.append(shared[rng.integers(0, SHARED_WORDS)])
            else:
                tokens.append(groups[group][rng.integers(0, WORDS_PER_GROUP)])
        record = {"id": f"case-{d:03d}", "text": " ".join(tokens)}
        # most docs dated 1950-1990, tails to 1945/2020, a few undated
        if d % 17 == 0:
            pass  # undated
        elif rng.random() < 0.88:
            record["year"] = int(rng.integers(1950, 1991))
        else:
            record["year"] = int(rng.choice([1945, 1946, 2005, 2019, 2020]))
        record["country"] = "IN" if d % 2 == 0 else "UK"
        lines.append(json.dumps(record) + "\n")
    return lines


def build_embeddings(rng):
    corp = load_corpus(FIXTURES / "corpus_100.jsonl")
    tokens = preprocess_corpus(corp, stopwords=default_stopwords())
    chunks = chunk_corpus(tokens, corp.doc_ids, max_chunk_tokens=CHUNK_TOKENS)
    centers = rng.normal(scale=4.0, size=(N_GROUPS, EMB_DIM))
    vectors = np.empty((len(chunks), EMB_DIM), dtype=np.float32)
    index = []
    for row, chunk in enumerate(chunks):
        group = int(chunk.doc_id.split("-")[1]) % N_GROUPS
        vectors[row] = centers[group] + rng.normal(scale=0.5, size=EMB_DIM)
        index.append((chunk.doc_id, chunk.chunk_index))
    write_embeddings(FIXTURES / "chunks_100.emb1", vectors, index)
    return len(chunks)


def write_reference_scores():
    # reported coherence scores kept as documentation only; no test asserts
    # model output against them (desk-scale fixtures cannot reproduce them)
    scores = {
        "india": {
            "lda": {"c_v": 0.596, "u_mass": -1.03},
            "nmf": {"c_v": 0.763, "u_mass": -1.915},
            "bertopic": {"c_v": 0.781, "u_mass": -1.846},
        },
        "uk": {
            "lda": {"c_v": 0.526, "u_mass": -0.91},
            "nmf": {"c_v": 0.732, "u_mass": -0.915},
            "bertopic": {"c_v": 0.769, "u_mass": -1.554},
        },
        "optima": {
            "india": {"alpha": 0.46, "beta": 0.91, "k": 7},
            "uk": {"alpha": "asymmetric", "beta": 0.01, "k": 6},
        },
    }
    path = FIXTURES / "reference_scores.json"
    path.write_text(json.dumps(scores, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(SEED)
    lines = build_corpus(rng)
    (FIXTURES / "corpus_100.jsonl").write_text("".join(lines), encoding="utf-8")
    n_chunks = build_embeddings(rng)
    write_reference_scores()
    print(f"wrote corpus_100.jsonl ({N_DOCS} docs), chunks_100.emb1 ({n_chunks} chunks)")


if __name__ == "__main__":
    main()
