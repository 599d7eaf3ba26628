"""Non-negative matrix factorization with multiplicative updates.

V (docs x terms, TF-IDF) is factored as W @ H under the squared Frobenius
objective. The update pair

    H <- H * (W'V) / (W'WH + eps)
    W <- W * (VH') / (WHH' + eps)

keeps both factors non-negative and never increases the objective. Factors
are initialized from seeded uniforms scaled by sqrt(mean(V)/k), so runs are
deterministic given the seed.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .corpus import DocTermMatrix, MatrixKind
from .model import Algorithm, TopicModel

EPS = 1e-12
DEFAULT_MAX_ITERATIONS = 500
DEFAULT_TOLERANCE = 1e-5


@dataclass(frozen=True)
class NmfConfig:
    k: int
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    tolerance: float = DEFAULT_TOLERANCE
    seed: int = 42

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Factorization:
    W: np.ndarray  # docs x k
    H: np.ndarray  # k x terms
    objective_trace: np.ndarray  # squared Frobenius error, index 0 = initialization


@dataclass(frozen=True)
class DocTopicRows:
    rows: np.ndarray
    uniform_rows: tuple[int, ...]  # all-zero W rows mapped to uniform


def _objective(v: np.ndarray, w: np.ndarray, h: np.ndarray) -> float:
    diff = v - w @ h
    return float((diff * diff).sum())


def fit_nmf(
    matrix: DocTermMatrix, config: NmfConfig, doc_ids=None, w_init=None, h_init=None
) -> tuple[TopicModel, Factorization]:
    """Factor a TFIDF matrix; stops at max_iterations or when the relative
    objective change drops below the tolerance (tolerance 0 runs the full
    budget). Explicit w_init/h_init replace the seeded uniform draw."""
    if matrix.kind != MatrixKind.TFIDF:
        raise ValueError("fit_nmf requires a TFIDF matrix")
    v = matrix.values
    if v.shape[0] == 0 or not np.any(v > 0):
        raise ValueError("cannot factor an all-zero matrix")
    n_docs, n_terms = v.shape
    if config.k > min(n_docs, n_terms):
        warnings.warn(
            f"k={config.k} exceeds min(docs, terms)={min(n_docs, n_terms)}", stacklevel=2
        )
    if doc_ids is None:
        doc_ids = tuple(str(i) for i in range(n_docs))

    rng = np.random.default_rng(config.seed)
    scale = np.sqrt(v.mean() / config.k)
    w = np.array(w_init, dtype=float) if w_init is not None else rng.random((n_docs, config.k)) * scale
    h = np.array(h_init, dtype=float) if h_init is not None else rng.random((config.k, n_terms)) * scale
    if w.shape != (n_docs, config.k) or h.shape != (config.k, n_terms):
        raise ValueError("w_init/h_init shapes must match (docs, k) and (k, terms)")
    if w.min() < 0 or h.min() < 0:
        raise ValueError("w_init/h_init must be non-negative")

    trace = [_objective(v, w, h)]
    for _ in range(config.max_iterations):
        h *= (w.T @ v) / (w.T @ w @ h + EPS)
        w *= (v @ h.T) / (w @ (h @ h.T) + EPS)
        trace.append(_objective(v, w, h))
        if abs(trace[-2] - trace[-1]) < config.tolerance * max(trace[-2], EPS):
            break

    factorization = Factorization(W=w, H=h, objective_trace=np.array(trace))
    doc_topic = nmf_doc_topics(factorization)
    h_sums = h.sum(axis=1)
    topic_word = np.where(
        h_sums[:, None] > 0, h / np.where(h_sums == 0, 1.0, h_sums)[:, None], 1.0 / n_terms
    )
    notes = tuple(f"doc {doc_ids[i]}: zero weight row, uniform fallback" for i in doc_topic.uniform_rows)
    model = TopicModel(
        topic_word=topic_word,
        doc_topic=doc_topic.rows,
        algorithm=Algorithm.NMF,
        vocab=matrix.vocab,
        doc_ids=tuple(doc_ids),
        config=config.as_dict(),
        notes=notes,
    )
    return model, factorization


def nmf_doc_topics(factorization: Factorization) -> DocTopicRows:
    """L1-normalize W rows into topic distributions; all-zero rows become
    uniform and are flagged."""
    w = factorization.W
    k = w.shape[1]
    sums = w.sum(axis=1)
    zero = np.flatnonzero(sums == 0)
    rows = np.where(sums[:, None] > 0, w / np.where(sums == 0, 1.0, sums)[:, None], 1.0 / k)
    return DocTopicRows(rows=rows, uniform_rows=tuple(int(i) for i in zero))
