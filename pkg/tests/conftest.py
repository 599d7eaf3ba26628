from pathlib import Path

import numpy as np
import pytest

from legaltopics.corpus import DocTermMatrix, MatrixKind, Vocabulary

FIXTURES = Path(__file__).parent / "fixtures"


def make_vocab(n_terms: int, total_docs: int = 2) -> Vocabulary:
    terms = tuple(f"t{i:03d}" for i in range(n_terms))
    return Vocabulary(terms=terms, doc_freq=tuple([1] * n_terms), total_docs=total_docs)


def tfidf_matrix(values: np.ndarray) -> DocTermMatrix:
    """Wrap raw non-negative values as a TFIDF-kind matrix for factorization tests."""
    return DocTermMatrix(
        values=np.asarray(values, dtype=float),
        kind=MatrixKind.TFIDF,
        vocab=make_vocab(values.shape[1]),
    )


def count_matrix(values: np.ndarray) -> DocTermMatrix:
    return DocTermMatrix(
        values=np.asarray(values, dtype=float),
        kind=MatrixKind.COUNT,
        vocab=make_vocab(values.shape[1]),
    )


def planted_corpus(n_docs, n_topics, terms_per_topic, doc_len, seed):
    """Token lists where document d draws only from topic-group d % n_topics.

    Group vocabularies are disjoint, so a topic model that recovers the
    groups should give each document a dominant topic matching its group.
    Returns (corpus_tokens, labels).
    """
    gen = np.random.default_rng(seed)
    docs, labels = [], []
    for d in range(n_docs):
        g = d % n_topics
        docs.append([f"g{g}w{gen.integers(0, terms_per_topic):02d}" for _ in range(doc_len)])
        labels.append(g)
    return docs, labels


def purity(assignments, labels):
    """Fraction of items whose cluster's majority label matches their own."""
    assignments = np.asarray(assignments)
    labels = np.asarray(labels)
    correct = 0
    for c in np.unique(assignments):
        members = labels[assignments == c]
        counts = np.bincount(members)
        correct += counts.max()
    return correct / len(labels)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
