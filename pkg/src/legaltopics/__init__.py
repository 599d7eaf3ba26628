"""Topic-modeling toolkit for long legal documents.

Three modeling paths over one corpus pipeline: LDA via collapsed Gibbs
sampling (compiled kernel with a pure-Python fallback), NMF via
multiplicative updates, and an embedding-clustering path (PCA + mini-batch
k-means + class-based TF-IDF). Coherence scoring (U_MASS, C_V), grid
search, and analysis exports ride on top. Everything is seeded and
deterministic; artifacts are byte-stable across reruns.
"""

from ._kernels import BACKEND, available_backends
from .analytics import (
    GridCell,
    Histogram,
    SimilarityMatrix,
    SweepResult,
    Timeline,
    dominant_topic,
    grid_search,
    similarity_matrix,
    timeline,
    topic_histogram,
)
from .cluster import (
    ClassTfidfTable,
    ClusterModel,
    Reducer,
    aggregate_doc_topics,
    class_tfidf_bm25,
    minibatch_kmeans,
    reduce,
)
from .coherence import (
    CoherenceReport,
    CoOccurrenceCounts,
    c_v,
    count_cooccurrence,
    evaluate_model,
    u_mass,
)
from .corpus import (
    Chunk,
    Corpus,
    CorpusError,
    Country,
    Document,
    DocTermMatrix,
    MatrixKind,
    Vocabulary,
    build_vocabulary,
    chunk_corpus,
    chunk_document,
    default_stopwords,
    load_corpus,
    load_lemmas,
    load_stopwords,
    preprocess,
    preprocess_corpus,
    to_matrix,
)
from .embio import ChunkEmbeddingSet, read_embeddings, write_embeddings
from .lda import InferredTopics, LdaConfig, asymmetric_alpha, fit_lda, infer_doc
from .model import Algorithm, TopicModel, load_model, save_model, top_words
from .nmf import Factorization, NmfConfig, fit_nmf, nmf_doc_topics

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "BACKEND",
    "Chunk",
    "ChunkEmbeddingSet",
    "ClassTfidfTable",
    "ClusterModel",
    "CoherenceReport",
    "CoOccurrenceCounts",
    "Corpus",
    "CorpusError",
    "Country",
    "DocTermMatrix",
    "Document",
    "Factorization",
    "GridCell",
    "Histogram",
    "InferredTopics",
    "LdaConfig",
    "MatrixKind",
    "NmfConfig",
    "Reducer",
    "SimilarityMatrix",
    "SweepResult",
    "Timeline",
    "TopicModel",
    "Vocabulary",
    "aggregate_doc_topics",
    "asymmetric_alpha",
    "available_backends",
    "build_vocabulary",
    "c_v",
    "chunk_corpus",
    "chunk_document",
    "class_tfidf_bm25",
    "count_cooccurrence",
    "default_stopwords",
    "dominant_topic",
    "evaluate_model",
    "fit_lda",
    "fit_nmf",
    "grid_search",
    "infer_doc",
    "load_corpus",
    "load_lemmas",
    "load_model",
    "load_stopwords",
    "minibatch_kmeans",
    "nmf_doc_topics",
    "preprocess",
    "preprocess_corpus",
    "read_embeddings",
    "reduce",
    "save_model",
    "similarity_matrix",
    "timeline",
    "to_matrix",
    "top_words",
    "topic_histogram",
    "u_mass",
    "write_embeddings",
]
