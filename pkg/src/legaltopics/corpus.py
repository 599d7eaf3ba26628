"""Corpus ingestion and text normalization.

Raw JSONL documents are turned into token lists (lowercase, alphabetic runs,
short tokens and stopwords removed, table-driven lemmatization), a pruned
vocabulary, count/TF-IDF matrices, and fixed-length chunks. Document order
in a corpus is stable and defines row order of every derived matrix.
"""

import json
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

_TOKEN_RE = re.compile(r"[^\W\d_]+")  # runs of letters, any script

DEFAULT_MAX_DF_RATIO = 0.5
DEFAULT_CHUNK_TOKENS = 512


class CorpusError(ValueError):
    """Malformed corpus input (bad line, duplicate id, empty vocabulary)."""


class Country(Enum):
    IN = "IN"
    UK = "UK"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    country: Country = Country.OTHER
    year: int | None = None

    def __post_init__(self):
        if self.year is not None and not 1000 <= self.year <= 9999:
            raise CorpusError(f"document {self.id!r}: year {self.year} outside 1000..9999")


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...]
    provenance: str = ""

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.id in seen:
                raise CorpusError(f"duplicate document id {doc.id!r}")
            seen.add(doc.id)

    def __len__(self):
        return len(self.documents)

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(d.id for d in self.documents)


@dataclass(frozen=True)
class Vocabulary:
    """Lexicographically sorted term list with document-frequency stats."""

    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    total_docs: int
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if list(self.terms) != sorted(set(self.terms)):
            raise ValueError("vocabulary terms must be sorted and unique")
        for term, df in zip(self.terms, self.doc_freq):
            if not 1 <= df <= self.total_docs:
                raise ValueError(f"term {term!r}: doc_freq {df} outside 1..{self.total_docs}")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index

    def sha256(self) -> str:
        import hashlib

        return hashlib.sha256("\n".join(self.terms).encode("utf-8")).hexdigest()


class MatrixKind(Enum):
    COUNT = "COUNT"
    TFIDF = "TFIDF"


@dataclass(frozen=True)
class DocTermMatrix:
    values: np.ndarray  # docs x terms, non-negative
    kind: MatrixKind
    vocab: Vocabulary

    def __post_init__(self):
        if self.values.ndim != 2:
            raise ValueError("document-term matrix must be 2-D")
        if self.values.shape[1] != len(self.vocab):
            raise ValueError("column count must equal vocabulary size")
        if np.any(self.values < 0):
            raise ValueError("document-term matrix has negative entries")

    @property
    def n_docs(self):
        return self.values.shape[0]

    @property
    def n_terms(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    chunk_index: int
    tokens: tuple[str, ...]


def load_corpus(path, format: str = "jsonl") -> Corpus:
    """Load a JSONL corpus: one object per line with at least "id" and "text".

    Unknown country strings map to OTHER; a missing year stays absent.
    Malformed lines and duplicate ids raise CorpusError naming the line.
    """
    if format.lower() != "jsonl":
        raise CorpusError(f"unsupported corpus format {format!r}")
    path = Path(path)
    documents = []
    seen_ids = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"{path}:{lineno}: expected a JSON object")
            for key in ("id", "text"):
                if key not in record:
                    raise CorpusError(f"{path}:{lineno}: missing required field {key!r}")
            doc_id = str(record["id"])
            if doc_id in seen_ids:
                raise CorpusError(
                    f"{path}:{lineno}: duplicate id {doc_id!r} (first seen on line {seen_ids[doc_id]})"
                )
            seen_ids[doc_id] = lineno
            text = record["text"]
            if not isinstance(text, str):
                raise CorpusError(f"{path}:{lineno}: field 'text' must be a string")
            raw_country = record.get("country")
            try:
                country = Country(raw_country) if raw_country is not None else Country.OTHER
            except ValueError:
                country = Country.OTHER
            year = record.get("year")
            if year is not None:
                if not isinstance(year, int) or isinstance(year, bool):
                    raise CorpusError(f"{path}:{lineno}: field 'year' must be an integer")
            try:
                documents.append(Document(id=doc_id, text=text, country=country, year=year))
            except CorpusError as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from exc
    return Corpus(documents=tuple(documents), provenance=str(path))


def load_stopwords(path) -> frozenset[str]:
    """Read a stopword file: one term per line, blank lines ignored."""
    words = set()
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            term = line.strip()
            if term:
                words.add(term.lower())
    return frozenset(words)


def default_stopwords() -> frozenset[str]:
    """Stopword list shipped with the package (data/stopwords_en.txt)."""
    text = resources.files("legaltopics.data").joinpath("stopwords_en.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


def load_lemmas(path) -> dict[str, str]:
    """Read a lemma table: tab-separated "surface<TAB>lemma" per line."""
    table = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise CorpusError(f"{path}:{lineno}: expected 'surface<TAB>lemma'")
            table[parts[0].lower()] = parts[1].lower()
    return table


def preprocess(doc, stopwords=frozenset(), lemma_table=None) -> list[str]:
    """Normalize one document (or raw string) into a token list.

    Lowercase, split on non-alphabetic runs, drop tokens shorter than 2
    characters, drop stopwords, then map surviving tokens through the lemma
    table (identity fallback). An empty result is legal.
    """
    text = doc.text if isinstance(doc, Document) else doc
    lemma_table = lemma_table or {}
    tokens = []
    for token in _TOKEN_RE.findall(text.lower()):
        if len(token) < 2 or token in stopwords:
            continue
        tokens.append(lemma_table.get(token, token))
    return tokens


def preprocess_corpus(corpus: Corpus, stopwords=frozenset(), lemma_table=None) -> list[list[str]]:
    """Preprocess every document, preserving corpus order."""
    return [preprocess(doc, stopwords, lemma_table) for doc in corpus.documents]


def build_vocabulary(corpus_tokens, min_df: int = 1, max_df_ratio: float = DEFAULT_MAX_DF_RATIO) -> Vocabulary:
    """Build a pruned vocabulary from per-document token lists.

    A term survives iff min_df <= doc_freq and doc_freq/total_docs <=
    max_df_ratio; the 0.5 default drops terms present in more than half of
    all documents. Raises CorpusError when nothing survives.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if not 0 < max_df_ratio <= 1:
        raise ValueError("max_df_ratio must be in (0, 1]")
    total_docs = len(corpus_tokens)
    if total_docs == 0:
        raise CorpusError("cannot build a vocabulary from an empty corpus")
    df: dict[str, int] = {}
    for tokens in corpus_tokens:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    kept = sorted(t for t, n in df.items() if n >= min_df and n / total_docs <= max_df_ratio)
    if not kept:
        raise CorpusError("vocabulary is empty: no term survives document-frequency pruning")
    return Vocabulary(terms=tuple(kept), doc_freq=tuple(df[t] for t in kept), total_docs=total_docs)


def to_matrix(corpus_tokens, vocab: Vocabulary, kind: MatrixKind = MatrixKind.COUNT) -> DocTermMatrix:
    """Build the document-term matrix; out-of-vocabulary tokens are ignored.

    COUNT cells are raw in-document counts. TFIDF cells are
    tf(t,d) * (ln((1+N)/(1+df_t)) + 1) with rows L2-normalized (all-zero
    rows stay zero).
    """
    n_docs, n_terms = len(corpus_tokens), len(vocab)
    counts = np.zeros((n_docs, n_terms), dtype=np.float64)
    index = vocab.index
    for row, tokens in enumerate(corpus_tokens):
        for token in tokens:
            col = index.get(token)
            if col is not None:
                counts[row, col] += 1.0
    if kind == MatrixKind.COUNT:
        return DocTermMatrix(values=counts, kind=kind, vocab=vocab)
    idf = np.array(
        [math.log((1 + vocab.total_docs) / (1 + df)) + 1.0 for df in vocab.doc_freq],
        dtype=np.float64,
    )
    weighted = counts * idf
    norms = np.sqrt((weighted * weighted).sum(axis=1))
    nonzero = norms > 0
    weighted[nonzero] /= norms[nonzero, None]
    return DocTermMatrix(values=weighted, kind=MatrixKind.TFIDF, vocab=vocab)


def chunk_document(doc_id: str, tokens, max_chunk_tokens: int = DEFAULT_CHUNK_TOKENS) -> list[Chunk]:
    """Greedily split a token sequence into chunks of at most max_chunk_tokens.

    All chunks except possibly the last are full; concatenating them in
    chunk_index order reproduces the input exactly. An empty document yields
    zero chunks.
    """
    if max_chunk_tokens < 1:
        raise ValueError("max_chunk_tokens must be >= 1")
    tokens = list(tokens)
    return [
        Chunk(doc_id=doc_id, chunk_index=i, tokens=tuple(tokens[start : start + max_chunk_tokens]))
        for i, start in enumerate(range(0, len(tokens), max_chunk_tokens))
    ]


def chunk_corpus(corpus_tokens, doc_ids, max_chunk_tokens: int = DEFAULT_CHUNK_TOKENS) -> list[Chunk]:
    """Chunk every document, preserving corpus order."""
    chunks = []
    for doc_id, tokens in zip(doc_ids, corpus_tokens):
        chunks.extend(chunk_document(doc_id, tokens, max_chunk_tokens))
    return chunks
