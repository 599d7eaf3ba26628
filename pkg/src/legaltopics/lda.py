"""Latent Dirichlet Allocation fit by collapsed Gibbs sampling.

Each sweep resamples every token against a snapshot of the global topic
counts taken at the sweep barrier, folding per-document deltas back in at
the end of the sweep. Every document draws from its own random stream
derived from (seed, doc id). Consequences: fits are deterministic given the
seed, independent of document order, and identical whether documents are
processed serially or in parallel on the same schedule.

Topic estimates are averaged over post-burn-in sweeps:
doc_topic[d] = (n_dt + alpha) / (N_d + sum(alpha)),
topic_word[t] = (n_tw + beta) / (n_t + V*beta).
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._rng import MASK64, derive_stream, splitmix64_next
from .corpus import DocTermMatrix, MatrixKind
from .model import Algorithm, TopicModel, top_words  # noqa: F401  (top_words re-exported)

DEFAULT_ITERATIONS = 1000
DEFAULT_BURN_IN = 200
DEFAULT_SAMPLE_EVERY = 10
ASYMMETRIC_ALPHA_MEAN = 0.1


def asymmetric_alpha(k: int, mean: float = ASYMMETRIC_ALPHA_MEAN) -> tuple[float, ...]:
    """Decreasing-rank prior alpha_t = 1/(t + sqrt(k)), rescaled to the given mean."""
    base = 1.0 / (np.arange(k, dtype=np.float64) + np.sqrt(k))
    return tuple(base * (mean / base.mean()))


@dataclass(frozen=True)
class LdaConfig:
    k: int
    alpha: float | tuple[float, ...] = 0.1
    beta: float = 0.01
    iterations: int = DEFAULT_ITERATIONS
    burn_in: int = DEFAULT_BURN_IN
    sample_every: int = DEFAULT_SAMPLE_EVERY
    seed: int = 42

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.iterations > self.burn_in >= 0:
            raise ValueError("need iterations > burn_in >= 0")
        if self.sample_every < 1:
            raise ValueError("sample_every must be >= 1")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must be in (0, 1]")
        if isinstance(self.alpha, (int, float)):
            if not 0 < self.alpha <= 1:
                raise ValueError("scalar alpha must be in (0, 1]")
        else:
            object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
            if len(self.alpha) != self.k:
                raise ValueError("asymmetric alpha must have k components")
            if any(a <= 0 for a in self.alpha):
                raise ValueError("all alpha components must be > 0")

    def alpha_vector(self) -> np.ndarray:
        if isinstance(self.alpha, tuple):
            return np.array(self.alpha, dtype=np.float64)
        return np.full(self.k, float(self.alpha), dtype=np.float64)

    def as_dict(self) -> dict:
        alpha = list(self.alpha) if isinstance(self.alpha, tuple) else self.alpha
        return {
            "k": self.k,
            "alpha": alpha,
            "beta": self.beta,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "sample_every": self.sample_every,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class _TokenLayout:
    """Flattened per-token views of a COUNT matrix.

    Tokens of document d are its nonzero terms in ascending column order,
    each repeated by its count; tokens_flat holds indices into the
    document's own unique-word list uw_flat[uw_off[d]:uw_off[d+1]].
    """

    tokens_flat: np.ndarray
    tok_off: np.ndarray
    uw_flat: np.ndarray
    uw_off: np.ndarray
    doc_lengths: np.ndarray

    @classmethod
    def from_matrix(cls, counts: np.ndarray) -> "_TokenLayout":
        tokens, uw, tok_off, uw_off = [], [], [0], [0]
        for row in counts.astype(np.int64):
            cols = np.flatnonzero(row)
            uw.extend(cols)
            for local_j, col in enumerate(cols):
                tokens.extend([local_j] * row[col])
            tok_off.append(len(tokens))
            uw_off.append(len(uw))
        return cls(
            tokens_flat=np.array(tokens, dtype=np.int32),
            tok_off=np.array(tok_off, dtype=np.int64),
            uw_flat=np.array(uw, dtype=np.int32),
            uw_off=np.array(uw_off, dtype=np.int64),
            doc_lengths=np.diff(np.array(tok_off, dtype=np.int64)).astype(np.float64),
        )


def _doc_streams(seed: int, doc_ids) -> np.ndarray:
    return np.array([derive_stream(seed, f"doc:{doc_id}") for doc_id in doc_ids], dtype=np.uint64)


def _init_assignments(layout: _TokenLayout, k: int, rng_states: np.ndarray):
    """Seed initial topics from each document's stream; returns (z, n_dt, n_tw_adds)."""
    n_docs = len(layout.tok_off) - 1
    z = np.empty(len(layout.tokens_flat), dtype=np.int32)
    n_dt = np.zeros((n_docs, k), dtype=np.float64)
    for d in range(n_docs):
        state = int(rng_states[d])
        for i in range(layout.tok_off[d], layout.tok_off[d + 1]):
            state, u = splitmix64_next(state)
            t = int(u * k)
            if t >= k:
                t = k - 1
            z[i] = t
            n_dt[d, t] += 1.0
        rng_states[d] = state & MASK64
    return z, n_dt


def _count_topic_word(layout: _TokenLayout, z: np.ndarray, k: int, n_terms: int):
    n_tw = np.zeros((k, n_terms), dtype=np.float64)
    n_docs = len(layout.tok_off) - 1
    for d in range(n_docs):
        uw = layout.uw_flat[layout.uw_off[d] : layout.uw_off[d + 1]]
        for i in range(layout.tok_off[d], layout.tok_off[d + 1]):
            n_tw[z[i], uw[layout.tokens_flat[i]]] += 1.0
    return n_tw, n_tw.sum(axis=1)


def fit_lda(matrix: DocTermMatrix, config: LdaConfig, doc_ids=None, kernel=None) -> TopicModel:
    """Fit LDA on a COUNT matrix; deterministic given (matrix, config, doc_ids)."""
    if matrix.kind != MatrixKind.COUNT:
        raise ValueError("fit_lda requires a COUNT matrix")
    counts = matrix.values
    if counts.shape[0] == 0 or counts.sum() == 0:
        raise ValueError("cannot fit LDA on an empty matrix")
    if not np.array_equal(counts, np.floor(counts)):
        raise ValueError("COUNT matrix must hold integers")
    n_docs, n_terms = counts.shape
    if doc_ids is None:
        doc_ids = tuple(str(i) for i in range(n_docs))
    if len(doc_ids) != n_docs:
        raise ValueError("doc_ids length must match matrix rows")
    distinct_terms = int(np.count_nonzero(counts.sum(axis=0)))
    if config.k > distinct_terms:
        warnings.warn(
            f"k={config.k} exceeds the {distinct_terms} distinct terms in the corpus",
            stacklevel=2,
        )
    sampler = _kernels.get_kernel(kernel)

    alpha = config.alpha_vector()
    alpha_sum = float(alpha.sum())
    beta = float(config.beta)
    vbeta = beta * n_terms
    k = config.k

    layout = _TokenLayout.from_matrix(counts)
    rng_states = _doc_streams(config.seed, doc_ids)
    z, n_dt = _init_assignments(layout, k, rng_states)
    n_tw, n_t = _count_topic_word(layout, z, k, n_terms)

    doc_topic_acc = np.zeros((n_docs, k), dtype=np.float64)
    topic_word_acc = np.zeros((k, n_terms), dtype=np.float64)
    n_samples = 0
    for it in range(1, config.iterations + 1):
        new_tw = n_tw.copy()
        new_t = n_t.copy()
        sampler.sample_pass(
            n_tw,
            n_t,
            new_tw,
            new_t,
            n_dt,
            alpha,
            beta,
            vbeta,
            layout.tokens_flat,
            z,
            layout.tok_off,
            layout.uw_flat,
            layout.uw_off,
            rng_states,
        )
        n_tw, n_t = new_tw, new_t
        if it > config.burn_in and (it - config.burn_in - 1) % config.sample_every == 0:
            doc_topic_acc += (n_dt + alpha) / (layout.doc_lengths + alpha_sum)[:, None]
            topic_word_acc += (n_tw + beta) / (n_t + vbeta)[:, None]
            n_samples += 1

    return TopicModel(
        topic_word=topic_word_acc / n_samples,
        doc_topic=doc_topic_acc / n_samples,
        algorithm=Algorithm.LDA,
        vocab=matrix.vocab,
        doc_ids=tuple(doc_ids),
        config=config.as_dict(),
    )


@dataclass(frozen=True)
class InferredTopics:
    distribution: np.ndarray
    fallback: bool = False  # True when the document had no in-vocabulary tokens


def infer_doc(
    model: TopicModel,
    tokens,
    seed: int | None = None,
    iterations: int = 100,
    burn_in: int = 50,
    sample_every: int = 5,
) -> InferredTopics:
    """Fold a new document into a fitted model, holding topic_word fixed.

    Returns a probability vector over the model's topics; a document with no
    in-vocabulary tokens yields the uniform distribution with fallback=True.
    """
    k = model.k
    widx = [model.vocab.index[t] for t in tokens if t in model.vocab.index]
    if not widx:
        return InferredTopics(np.full(k, 1.0 / k), fallback=True)
    raw_alpha = model.config.get("alpha", 0.1)
    alpha = (
        np.array(raw_alpha, dtype=np.float64)
        if isinstance(raw_alpha, (list, tuple))
        else np.full(k, float(raw_alpha))
    )
    alpha_sum = float(alpha.sum())
    phi = model.topic_word
    state = derive_stream(seed if seed is not None else int(model.config.get("seed", 0)), "infer")

    n_t = np.zeros(k, dtype=np.float64)
    z = np.empty(len(widx), dtype=np.int64)
    for i in range(len(widx)):
        state, u = splitmix64_next(state)
        t = min(int(u * k), k - 1)
        z[i] = t
        n_t[t] += 1.0

    acc = np.zeros(k, dtype=np.float64)
    n_samples = 0
    for it in range(1, iterations + 1):
        for i, w in enumerate(widx):
            n_t[z[i]] -= 1.0
            p = (n_t + alpha) * phi[:, w]
            c = np.cumsum(p)
            state, u = splitmix64_next(state)
            t_new = int(np.searchsorted(c, u * c[-1], side="right"))
            if t_new >= k:
                t_new = k - 1
            z[i] = t_new
            n_t[t_new] += 1.0
        if it > burn_in and (it - burn_in - 1) % sample_every == 0:
            acc += (n_t + alpha) / (len(widx) + alpha_sum)
            n_samples += 1
    return InferredTopics(acc / n_samples, fallback=False)
