"""Clustering path: reduce chunk embeddings, cluster them, extract keywords.

Pipeline: PCA reduction -> mini-batch k-means (k-means++ seeded) ->
class-based TF-IDF with BM25 weighting -> document-level topic rows
aggregated from chunk assignments.
"""

from dataclasses import dataclass

import numpy as np

from .corpus import Vocabulary
from .model import Algorithm, TopicModel

DEFAULT_CLUSTERS = 50
DEFAULT_TARGET_DIM = 5
DEFAULT_BATCH_SIZE = 256
DEFAULT_EPOCHS = 10


@dataclass(frozen=True)
class Reducer:
    """Stored linear projection: mean vector plus r orthonormal basis rows."""

    mean: np.ndarray
    components: np.ndarray  # r x dim

    def transform(self, vectors: np.ndarray) -> np.ndarray:
        return (np.asarray(vectors, dtype=float) - self.mean) @ self.components.T

    def inverse_transform(self, reduced: np.ndarray) -> np.ndarray:
        return np.asarray(reduced, dtype=float) @ self.components + self.mean


@dataclass(frozen=True)
class ClusterModel:
    centroids: np.ndarray  # c x r
    assignments: np.ndarray  # cluster id per chunk
    reducer: Reducer | None = None
    initial_objective: float = 0.0
    final_objective: float = 0.0

    def __post_init__(self):
        c = self.centroids.shape[0]
        if self.assignments.size and (
            self.assignments.min() < 0 or self.assignments.max() >= c
        ):
            raise ValueError("assignments must lie in [0, cluster count)")

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]


@dataclass(frozen=True)
class ClassTfidfTable:
    """Per-cluster, per-term scores and the extracted keyword lists."""

    terms: tuple[str, ...]
    scores: np.ndarray  # c x V, non-negative
    keywords: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if self.scores.shape != (len(self.keywords), len(self.terms)):
            raise ValueError("scores shape must be (clusters, terms)")
        if self.scores.size and self.scores.min() < 0:
            raise ValueError("scores must be non-negative")

    @property
    def n_clusters(self) -> int:
        return len(self.keywords)


def reduce(embeddings, target_dim: int = DEFAULT_TARGET_DIM, seed=None):
    """Project vectors onto the top principal directions.

    Returns (reduced vectors, Reducer). The reducer interface is pluggable;
    this default is PCA, which is deterministic, so ``seed`` is accepted but
    unused. Sign convention: the largest-magnitude component of each basis
    vector is positive.
    """
    vectors = getattr(embeddings, "vectors", embeddings)
    x = np.asarray(vectors, dtype=float)
    if x.ndim != 2:
        raise ValueError("embeddings must be a 2-D array")
    n, dim = x.shape
    if not 1 <= target_dim <= dim:
        raise ValueError(f"target_dim must be in [1, {dim}], got {target_dim}")
    if n < target_dim + 1:
        raise ValueError(f"need at least {target_dim + 1} vectors, got {n}")
    mean = x.mean(axis=0)
    centered = x - mean
    cov = (centered.T @ centered) / (n - 1)
    if not np.any(np.abs(cov) > 1e-15):
        raise ValueError("degenerate covariance: all points identical")
    _, eigvecs = np.linalg.eigh(cov)  # ascending eigenvalue order
    components = eigvecs[:, ::-1][:, :target_dim].T.copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    reducer = Reducer(mean=mean, components=components)
    return centered @ components.T, reducer


def _block_sum(rows: np.ndarray) -> np.ndarray:
    # Recursive sum split at the largest power of two below n. The split
    # point doubles exactly when every row is duplicated in place, which
    # keeps batch sums exactly 2x under dataset duplication (scaling by a
    # power of two commutes with float rounding).
    n = rows.shape[0]
    if n == 1:
        return rows[0].copy()
    if n == 2:
        return rows[0] + rows[1]
    split = 1 << ((n - 1).bit_length() - 1)
    return _block_sum(rows[:split]) + _block_sum(rows[split:])


def _sq_dists(points: np.ndarray, centroids: np.ndarray, block: int = 1024) -> np.ndarray:
    out = np.empty((points.shape[0], centroids.shape[0]))
    for start in range(0, points.shape[0], block):
        diff = points[start : start + block, None, :] - centroids[None, :, :]
        out[start : start + block] = np.einsum("ijk,ijk->ij", diff, diff)
    return out


def _kmeanspp_init(x: np.ndarray, clusters: int, rng) -> np.ndarray:
    # One uniform draw per center, selected by a cumulative-weight scan.
    n = x.shape[0]
    centroids = np.empty((clusters, x.shape[1]))
    centroids[0] = x[min(int(rng.random() * n), n - 1)]
    d2 = _sq_dists(x, centroids[:1])[:, 0]
    for c in range(1, clusters):
        u = rng.random()
        total = float(_block_sum(d2[:, None])[0])
        if total <= 0.0:
            idx = min(int(u * n), n - 1)
        else:
            idx = int(np.searchsorted(np.cumsum(d2), u * total, side="right"))
            idx = min(idx, n - 1)
        centroids[c] = x[idx]
        d2 = np.minimum(d2, _sq_dists(x, centroids[c : c + 1])[:, 0])
    return centroids


def minibatch_kmeans(
    vectors: np.ndarray,
    clusters: int = DEFAULT_CLUSTERS,
    batch_size: int = DEFAULT_BATCH_SIZE,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = 42,
    reducer: Reducer | None = None,
) -> ClusterModel:
    """Mini-batch k-means with k-means++ seeding.

    Batches are consecutive data-order slices, so results depend only on the
    seed. Each batch updates centroids with per-centroid learning rate
    1/count (a running mean of every point ever assigned); a final full pass
    fixes the assignments.
    """
    x = np.ascontiguousarray(vectors, dtype=float)
    if x.ndim != 2:
        raise ValueError("vectors must be a 2-D array")
    n = x.shape[0]
    if clusters < 1:
        raise ValueError("clusters must be >= 1")
    if n < clusters:
        raise ValueError(f"need at least {clusters} points, got {n}")
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")

    rng = np.random.default_rng(seed)
    centroids = _kmeanspp_init(x, clusters, rng)
    initial_objective = float(_sq_dists(x, centroids).min(axis=1).sum())

    counts = np.zeros(clusters)
    for _ in range(epochs):
        for start in range(0, n, batch_size):
            batch = x[start : start + batch_size]
            labels = np.argmin(_sq_dists(batch, centroids), axis=1)
            for c in np.unique(labels):
                members = batch[labels == c]
                m = members.shape[0]
                counts[c] += m
                # running mean over all points ever assigned to c
                centroids[c] += (_block_sum(members) - m * centroids[c]) / counts[c]

    dists = _sq_dists(x, centroids)
    assignments = np.argmin(dists, axis=1)
    final_objective = float(dists[np.arange(n), assignments].sum())
    return ClusterModel(
        centroids=centroids,
        assignments=assignments,
        reducer=reducer,
        initial_objective=initial_objective,
        final_objective=final_objective,
    )


def class_tfidf_bm25(
    chunk_tokens,
    assignments,
    n_clusters: int | None = None,
    top_n: int = 10,
) -> ClassTfidfTable:
    """Score terms per cluster: score(t,c) = tf(t,c) * ln(1 + (A - f_t + 0.5)/(f_t + 0.5)).

    tf(t,c) counts t in the concatenation of cluster c's chunks, f_t is the
    number of clusters containing t, and A is the average token count over
    non-empty clusters. Scores are floored at zero; keyword lists keep the
    top_n positive-score terms, ties broken lexicographically.
    """
    assignments = np.asarray(assignments, dtype=int)
    if len(chunk_tokens) != assignments.size:
        raise ValueError("one assignment per chunk required")
    if n_clusters is None:
        n_clusters = int(assignments.max()) + 1 if assignments.size else 0
    if assignments.size and (assignments.min() < 0 or assignments.max() >= n_clusters):
        raise ValueError("assignments must lie in [0, n_clusters)")

    terms = tuple(sorted({tok for tokens in chunk_tokens for tok in tokens}))
    index = {t: i for i, t in enumerate(terms)}
    tf = np.zeros((n_clusters, len(terms)))
    for tokens, cluster in zip(chunk_tokens, assignments):
        for tok in tokens:
            tf[cluster, index[tok]] += 1.0

    cluster_sizes = tf.sum(axis=1)
    nonempty = int((cluster_sizes > 0).sum())
    avg_tokens = float(cluster_sizes.sum() / nonempty) if nonempty else 0.0
    df = (tf > 0).sum(axis=0).astype(float)
    idf = np.log1p((avg_tokens - df + 0.5) / (df + 0.5))
    scores = np.maximum(tf * idf, 0.0)

    keywords = []
    for c in range(n_clusters):
        ranked = sorted(
            (t for i, t in enumerate(terms) if scores[c, i] > 0),
            key=lambda t: (-scores[c, index[t]], t),
        )
        keywords.append(tuple(ranked[:top_n]))
    return ClassTfidfTable(terms=terms, scores=scores, keywords=tuple(keywords))


def aggregate_doc_topics(
    assignments,
    index,
    doc_ids,
    table: ClassTfidfTable,
    vocab: Vocabulary,
    config: dict | None = None,
) -> TopicModel:
    """Roll chunk-level cluster assignments up to document-level topic rows.

    Row d is the normalized histogram of document d's chunk cluster ids;
    documents with no chunks get a uniform row and a note. topic_word rows
    are the L1-normalized class-TF-IDF rows (uniform for empty clusters).
    """
    assignments = np.asarray(assignments, dtype=int)
    if assignments.size != len(index):
        raise ValueError("index length must equal assignment count")
    if table.terms != vocab.terms:
        raise ValueError("class-TF-IDF terms do not match the vocabulary")
    c = table.n_clusters
    doc_pos = {doc_id: i for i, doc_id in enumerate(doc_ids)}

    doc_topic = np.zeros((len(doc_ids), c))
    for (doc_id, _), cluster in zip(index, assignments):
        if doc_id not in doc_pos:
            raise ValueError(f"chunk references unknown document {doc_id!r}")
        doc_topic[doc_pos[doc_id], cluster] += 1.0
    notes = []
    row_sums = doc_topic.sum(axis=1)
    for i, total in enumerate(row_sums):
        if total == 0.0:
            doc_topic[i] = 1.0 / c
            notes.append(f"document {doc_ids[i]!r} has no chunks; uniform topic row")
        else:
            doc_topic[i] /= total

    topic_word = np.array(table.scores, dtype=float)
    for t in range(c):
        total = topic_word[t].sum()
        if total == 0.0:
            topic_word[t] = 1.0 / len(vocab.terms)
            notes.append(f"cluster {t} is empty; uniform topic_word row")
        else:
            topic_word[t] /= total

    return TopicModel(
        topic_word=topic_word,
        doc_topic=doc_topic,
        algorithm=Algorithm.CLUSTER,
        vocab=vocab,
        doc_ids=tuple(doc_ids),
        config=dict(config or {}),
        notes=tuple(notes),
    )
