"""Analysis products over trained models.

Dominant-topic histograms, topic-similarity matrices between two models,
yearly timelines, and the LDA hyperparameter grid search. Figures are
emitted as data (CSV/JSON); rendering is out of scope.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from . import coherence
from ._rng import derive_stream
from .corpus import Corpus, DocTermMatrix
from .lda import LdaConfig, asymmetric_alpha, fit_lda
from .model import TopicModel, top_words

DEFAULT_GRID_ALPHAS = (0.01, 0.1, 0.31, 0.46, 0.61, 0.91, 0.99)
DEFAULT_GRID_BETAS = (0.01, 0.1, 0.31, 0.46, 0.61, 0.91, 0.99)
DEFAULT_GRID_KS = tuple(range(4, 12))
DEFAULT_SWEEP_ITERATIONS = 200
ASYMMETRIC = "asymmetric"


def dominant_topic(row) -> int:
    """Index of the largest entry; ties go to the lowest index."""
    row = np.asarray(row, dtype=float)
    if row.ndim != 1 or row.size == 0:
        raise ValueError("expected a non-empty 1-D probability row")
    return int(np.argmax(row))


@dataclass(frozen=True)
class Histogram:
    counts: tuple[int, ...]  # per topic id
    total: int

    def __post_init__(self):
        if sum(self.counts) != self.total:
            raise ValueError("histogram counts must sum to total")

    def to_csv(self) -> str:
        lines = ["topic_id,count"]
        lines += [f"{t},{c}" for t, c in enumerate(self.counts)]
        return "\n".join(lines) + "\n"


def topic_histogram(model: TopicModel) -> Histogram:
    """Count each document's dominant topic."""
    counts = [0] * model.k
    for row in model.doc_topic:
        counts[dominant_topic(row)] += 1
    return Histogram(counts=tuple(counts), total=model.doc_topic.shape[0])


@dataclass(frozen=True)
class SimilarityMatrix:
    values: np.ndarray  # rows: model A topics, cols: model B topics
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    metric: str = "cosine"
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.values.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError("values shape must match label counts")

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.col_labels)]
        for label, row in zip(self.row_labels, self.values):
            lines.append(label + "," + ",".join(repr(float(v)) for v in row))
        return "\n".join(lines) + "\n"

    def mean_off_diagonal(self) -> float:
        mask = ~np.eye(*self.values.shape, dtype=bool)
        if not mask.any():
            return float("nan")
        return float(self.values[mask].mean())


def _embed_union(model: TopicModel, union_index: dict[str, int]) -> np.ndarray:
    out = np.zeros((model.k, len(union_index)))
    cols = [union_index[t] for t in model.vocab.terms]
    out[:, cols] = model.topic_word
    return out


def similarity_matrix(
    model_a: TopicModel,
    model_b: TopicModel,
    metric: str = "cosine",
    top_n: int = 10,
) -> SimilarityMatrix:
    """Topic-by-topic similarity between two models.

    cosine: topic_word rows embedded into the union vocabulary, terms a model
    lacks weighted 0. jaccard: overlap of top_n keyword lists. Disjoint
    vocabularies produce an all-zero matrix and a warning.
    """
    warnings = []
    if not set(model_a.vocab.terms) & set(model_b.vocab.terms):
        warnings.append("models share no vocabulary terms; similarities are all zero")

    if metric == "cosine":
        union = sorted(set(model_a.vocab.terms) | set(model_b.vocab.terms))
        union_index = {t: i for i, t in enumerate(union)}
        rows_a = _embed_union(model_a, union_index)
        rows_b = _embed_union(model_b, union_index)
        norm_a = np.linalg.norm(rows_a, axis=1, keepdims=True)
        norm_b = np.linalg.norm(rows_b, axis=1, keepdims=True)
        norm_a[norm_a == 0.0] = 1.0
        norm_b[norm_b == 0.0] = 1.0
        values = (rows_a / norm_a) @ (rows_b / norm_b).T
    elif metric == "jaccard":
        sets_a = [set(top_words(model_a, t, top_n)) for t in range(model_a.k)]
        sets_b = [set(top_words(model_b, t, top_n)) for t in range(model_b.k)]
        values = np.zeros((model_a.k, model_b.k))
        for i, sa in enumerate(sets_a):
            for j, sb in enumerate(sets_b):
                union_size = len(sa | sb)
                values[i, j] = len(sa & sb) / union_size if union_size else 0.0
    else:
        raise ValueError(f"unknown metric {metric!r}")

    return SimilarityMatrix(
        values=values,
        row_labels=tuple(str(t) for t in range(model_a.k)),
        col_labels=tuple(str(t) for t in range(model_b.k)),
        metric=metric,
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class Timeline:
    entries: tuple[tuple[int, int, int], ...]  # (year, topic_id, count), sorted
    remainder: int  # documents without a usable year

    def year_totals(self) -> dict[int, int]:
        totals: dict[int, int] = {}
        for year, _, count in self.entries:
            totals[year] = totals.get(year, 0) + count
        return totals

    def to_csv(self) -> str:
        lines = ["year,topic_id,count"]
        lines += [f"{y},{t},{c}" for y, t, c in self.entries]
        return "\n".join(lines) + "\n"


def timeline(model: TopicModel, corpus: Corpus, year_range=None) -> Timeline:
    """Per-year dominant-topic counts; undated or out-of-range docs go to the remainder."""
    if len(corpus) != model.doc_topic.shape[0]:
        raise ValueError("model and corpus sizes differ")
    if year_range is not None:
        lo, hi = year_range
        if lo > hi:
            raise ValueError("year_range start must not exceed end")

    cells: dict[tuple[int, int], int] = {}
    remainder = 0
    for doc, row in zip(corpus.documents, model.doc_topic):
        year = doc.year
        if year is None or (year_range is not None and not year_range[0] <= year <= year_range[1]):
            remainder += 1
            continue
        key = (year, dominant_topic(row))
        cells[key] = cells.get(key, 0) + 1
    if year_range is not None and not cells:
        raise ValueError("year_range excludes every dated document")
    entries = tuple((y, t, c) for (y, t), c in sorted(cells.items()))
    return Timeline(entries=entries, remainder=remainder)


@dataclass(frozen=True)
class GridCell:
    alpha: float | str  # scalar, or "asymmetric"
    beta: float
    k: int
    mean_u_mass: float = float("nan")
    mean_c_v: float = float("nan")
    error: str | None = None

    def score(self, objective: str) -> float:
        return self.mean_u_mass if objective == "u_mass" else self.mean_c_v

    def as_dict(self) -> dict:
        def scalar(x: float):
            return None if math.isnan(x) else x

        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "k": self.k,
            "mean_u_mass": scalar(self.mean_u_mass),
            "mean_c_v": scalar(self.mean_c_v),
            "error": self.error,
        }


@dataclass(frozen=True)
class SweepResult:
    objective: str
    cells: tuple[GridCell, ...]
    best: GridCell

    def to_json(self) -> str:
        payload = {
            "objective": self.objective,
            "cells": [c.as_dict() for c in sorted(self.cells, key=_cell_sort_key)],
            "best": self.best.as_dict(),
        }
        return json.dumps(payload, indent=2) + "\n"


def _alpha_label(alpha) -> str:
    return ASYMMETRIC if alpha == ASYMMETRIC else repr(float(alpha))


def _cell_sort_key(cell: GridCell):
    sym = cell.alpha != ASYMMETRIC
    return (cell.k, cell.beta, 0 if sym else 1, float(cell.alpha) if sym else 0.0)


def _best_key(cell: GridCell, objective: str):
    sym = cell.alpha != ASYMMETRIC
    return (
        cell.score(objective),
        -cell.k,
        -cell.beta,
        1 if sym else 0,
        -float(cell.alpha) if sym else 0.0,
    )


def grid_search(
    matrix: DocTermMatrix,
    corpus_tokens,
    alphas=DEFAULT_GRID_ALPHAS,
    betas=DEFAULT_GRID_BETAS,
    ks=DEFAULT_GRID_KS,
    objective: str = "u_mass",
    seed: int = 42,
    iterations: int = DEFAULT_SWEEP_ITERATIONS,
    burn_in: int = 50,
    sample_every: int = 10,
    top_n: int = 10,
    window: int = coherence.DEFAULT_WINDOW,
) -> SweepResult:
    """Fit LDA over the (alpha, beta, k) grid and pick the best cell.

    Each cell draws its RNG stream from the seed and its own coordinates, so
    results do not depend on enumeration order and cells can run in
    parallel. Ties on the objective break toward smaller k, then smaller
    beta, then symmetric alpha. Cell failures are recorded, not raised.
    """
    if objective not in ("u_mass", "c_v"):
        raise ValueError(f"objective must be u_mass or c_v, got {objective!r}")
    alphas = tuple(alphas)
    betas = tuple(betas)
    ks = tuple(ks)
    if not alphas or not betas or not ks:
        raise ValueError("grid must be non-empty")

    cells = []
    for alpha in alphas:
        for beta in betas:
            for k in ks:
                label = f"cell:{_alpha_label(alpha)}:{beta!r}:{k}"
                cell_seed = derive_stream(seed, label)
                try:
                    alpha_value = (
                        tuple(asymmetric_alpha(k)) if alpha == ASYMMETRIC else float(alpha)
                    )
                    config = LdaConfig(
                        k=k,
                        alpha=alpha_value,
                        beta=float(beta),
                        iterations=iterations,
                        burn_in=burn_in,
                        sample_every=sample_every,
                        seed=cell_seed,
                    )
                    model = fit_lda(matrix, config)
                    report = coherence.evaluate_model(
                        model, corpus_tokens, top_n=top_n, window=window
                    )
                    cells.append(
                        GridCell(
                            alpha=alpha if alpha == ASYMMETRIC else float(alpha),
                            beta=float(beta),
                            k=k,
                            mean_u_mass=report.mean_u_mass,
                            mean_c_v=report.mean_c_v,
                        )
                    )
                except Exception as exc:  # noqa: BLE001 - flagged, not fatal
                    cells.append(
                        GridCell(
                            alpha=alpha if alpha == ASYMMETRIC else float(alpha),
                            beta=float(beta),
                            k=k,
                            error=f"{type(exc).__name__}: {exc}",
                        )
                    )

    scored = [c for c in cells if c.error is None and not math.isnan(c.score(objective))]
    if not scored:
        raise RuntimeError("every grid cell failed or scored undefined")
    best = max(scored, key=lambda c: _best_key(c, objective))
    return SweepResult(objective=objective, cells=tuple(cells), best=best)
