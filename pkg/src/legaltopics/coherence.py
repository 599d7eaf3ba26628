"""Topic coherence scoring.

U_MASS: mean over ordered top-word pairs (i, j), i < j, of
ln((D(wi, wj) + smoothing) / D(wi)), where D counts documents. The measure
is not symmetric; later words are conditioned on earlier (higher-ranked)
ones.

C_V: each top word gets a context vector of NPMI values against the topic's
top words, computed from boolean sliding-window counts (window size
configurable, default 110). The per-topic score is the mean cosine
similarity over adjacent keyword pairs in rank order.

A document of length L contributes max(L - window + 1, 1) windows; a window
counts each word and pair at most once. Only windows containing at least one
tracked word enter total_windows, which leaves both measures unchanged when
documents without any topic word are added to the corpus.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .model import TopicModel, top_words

DEFAULT_WINDOW = 110
DEFAULT_TOP_N = 10
_EPS = 1e-12


@dataclass(frozen=True)
class CoOccurrenceCounts:
    """Document- and window-level co-occurrence counts for a tracked word set."""

    words: tuple[str, ...]
    doc_freq: np.ndarray  # D(w)
    joint_docs: np.ndarray  # symmetric, diagonal equals doc_freq
    window: int | None = None
    window_freq: np.ndarray | None = None
    joint_windows: np.ndarray | None = None
    total_windows: int = 0

    def __post_init__(self):
        w = len(self.words)
        if self.doc_freq.shape != (w,) or self.joint_docs.shape != (w, w):
            raise ValueError("count shapes inconsistent with word list")

    def word_index(self, word: str) -> int:
        i = self._index.get(word)
        if i is None:
            raise KeyError(f"{word!r} is not a tracked word")
        return i

    @property
    def _index(self):
        # built lazily; frozen dataclass, so stash on the instance dict
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {word: i for i, word in enumerate(self.words)}
            self.__dict__["_index_cache"] = cached
        return cached


def _merge_position_intervals(positions, window: int, n_starts: int):
    """Window-start intervals covering each position, merged while scanning."""
    merged = []
    for p in positions:
        lo = max(0, p - window + 1)
        hi = min(p, n_starts - 1)
        if merged and lo <= merged[-1][1] + 1:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return merged


def _interval_total(intervals) -> int:
    return sum(hi - lo + 1 for lo, hi in intervals)


def _intersect_intervals(a, b) -> int:
    total = 0
    i = j = 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo <= hi:
            total += hi - lo + 1
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return total


def _union_total(interval_lists) -> int:
    spans = sorted(
        (tuple(span) for intervals in interval_lists for span in intervals)
    )
    total = 0
    cur_lo, cur_hi = None, None
    for lo, hi in spans:
        if cur_hi is None or lo > cur_hi + 1:
            if cur_hi is not None:
                total += cur_hi - cur_lo + 1
            cur_lo, cur_hi = lo, hi
        elif hi > cur_hi:
            cur_hi = hi
    if cur_hi is not None:
        total += cur_hi - cur_lo + 1
    return total


def count_cooccurrence(corpus_tokens, words, window: int | None = None) -> CoOccurrenceCounts:
    """Count document (and optionally boolean sliding-window) co-occurrences."""
    tracked = tuple(sorted(set(words)))
    if not tracked:
        raise ValueError("words must be non-empty")
    index = {word: i for i, word in enumerate(tracked)}
    w = len(tracked)

    doc_freq = np.zeros(w)
    joint_docs = np.zeros((w, w))
    window_freq = np.zeros(w) if window else None
    joint_windows = np.zeros((w, w)) if window else None
    total_windows = 0

    for tokens in corpus_tokens:
        positions: dict[int, list[int]] = {}
        for pos, tok in enumerate(tokens):
            i = index.get(tok)
            if i is not None:
                positions.setdefault(i, []).append(pos)
        if not positions:
            continue
        present = sorted(positions)
        doc_freq[present] += 1.0
        joint_docs[np.ix_(present, present)] += 1.0

        if not window:
            continue
        length = len(tokens)
        if length <= window:
            # whole document is a single window
            total_windows += 1
            window_freq[present] += 1.0
            joint_windows[np.ix_(present, present)] += 1.0
        else:
            n_starts = length - window + 1
            intervals = {
                i: _merge_position_intervals(positions[i], window, n_starts)
                for i in present
            }
            for a_pos, i in enumerate(present):
                count_i = _interval_total(intervals[i])
                window_freq[i] += count_i
                joint_windows[i, i] += count_i
                for j in present[a_pos + 1 :]:
                    joint = _intersect_intervals(intervals[i], intervals[j])
                    joint_windows[i, j] += joint
                    joint_windows[j, i] += joint
            total_windows += _union_total(intervals.values())

    return CoOccurrenceCounts(
        words=tracked,
        doc_freq=doc_freq,
        joint_docs=joint_docs,
        window=window,
        window_freq=window_freq,
        joint_windows=joint_windows,
        total_windows=total_windows,
    )


def u_mass(topic_words, counts: CoOccurrenceCounts, smoothing: float = 1.0):
    """Per-topic U_MASS score and any warnings raised while scoring.

    smoothing=0 is exactly invariant under corpus duplication; pairs whose
    numerator is non-positive are then skipped instead of taking ln(0).
    """
    warnings = []
    absent = set()
    ids = []
    for word in topic_words:
        i = counts.word_index(word)
        if counts.doc_freq[i] == 0:
            if word not in absent:
                absent.add(word)
                warnings.append(f"word {word!r} absent from corpus; pairs skipped")
            ids.append(None)
        else:
            ids.append(i)

    scores = []
    for a in range(len(ids)):
        for b in range(a + 1, len(ids)):
            if ids[a] is None or ids[b] is None:
                continue
            numerator = counts.joint_docs[ids[a], ids[b]] + smoothing
            if numerator <= 0.0:
                warnings.append(
                    f"pair ({topic_words[a]!r}, {topic_words[b]!r}) never co-occurs; "
                    "skipped under zero smoothing"
                )
                continue
            scores.append(math.log(numerator / counts.doc_freq[ids[a]]))
    if not scores:
        warnings.append("u_mass undefined: every pair skipped")
        return float("nan"), warnings
    return float(np.mean(scores)), warnings


def _npmi(counts: CoOccurrenceCounts, i: int, j: int) -> float:
    joint = counts.joint_windows[i, j]
    if joint == 0.0 or counts.total_windows == 0:
        return 0.0
    total = float(counts.total_windows)
    p_ij = joint / total
    denom = -math.log(p_ij)
    if denom <= _EPS:
        return 1.0
    p_i = counts.window_freq[i] / total
    p_j = counts.window_freq[j] / total
    return math.log(p_ij / (p_i * p_j)) / denom


def c_v(topic_words, counts: CoOccurrenceCounts):
    """Per-topic C_V score (mean adjacent-pair cosine of NPMI vectors) and warnings."""
    if counts.window is None:
        raise ValueError("c_v requires window-level counts")
    ids = [counts.word_index(word) for word in topic_words]
    n = len(ids)
    vectors = np.empty((n, n))
    for a in range(n):
        for b in range(n):
            vectors[a, b] = _npmi(counts, ids[a], ids[b])

    warnings = []
    norms = np.linalg.norm(vectors, axis=1)
    sims = []
    for a in range(n - 1):
        if norms[a] == 0.0 or norms[a + 1] == 0.0:
            warnings.append(
                f"pair ({topic_words[a]!r}, {topic_words[a + 1]!r}) skipped: "
                "zero-norm context vector"
            )
            continue
        sims.append(float(vectors[a] @ vectors[a + 1] / (norms[a] * norms[a + 1])))
    if not sims:
        warnings.append("c_v undefined: every adjacent pair skipped")
        return float("nan"), warnings
    return float(np.mean(sims)), warnings


@dataclass(frozen=True)
class TopicCoherence:
    topic: int
    u_mass: float
    c_v: float


@dataclass(frozen=True)
class CoherenceReport:
    model: str
    top_n: int
    per_topic: tuple[TopicCoherence, ...]
    mean_u_mass: float
    mean_c_v: float
    warnings: tuple[str, ...]

    def to_json(self) -> str:
        def scalar(x: float):
            return None if math.isnan(x) else x

        payload = {
            "model": self.model,
            "top_n": self.top_n,
            "per_topic": [
                {"topic": t.topic, "u_mass": scalar(t.u_mass), "c_v": scalar(t.c_v)}
                for t in self.per_topic
            ],
            "mean_u_mass": scalar(self.mean_u_mass),
            "mean_c_v": scalar(self.mean_c_v),
            "warnings": list(self.warnings),
        }
        return json.dumps(payload, indent=2) + "\n"


def _defined_mean(values) -> float:
    defined = [v for v in values if not math.isnan(v)]
    return float(np.mean(defined)) if defined else float("nan")


def evaluate_model(
    model: TopicModel,
    corpus_tokens,
    top_n: int = DEFAULT_TOP_N,
    window: int = DEFAULT_WINDOW,
    smoothing: float = 1.0,
) -> CoherenceReport:
    """Score every topic of a model with both measures over one counting pass."""
    topic_lists = [top_words(model, t, top_n) for t in range(model.k)]
    union = sorted({word for words in topic_lists for word in words})
    counts = count_cooccurrence(corpus_tokens, union, window=window)

    per_topic = []
    warnings = []
    for t, words in enumerate(topic_lists):
        um, um_warn = u_mass(words, counts, smoothing=smoothing)
        cv, cv_warn = c_v(words, counts)
        per_topic.append(TopicCoherence(topic=t, u_mass=um, c_v=cv))
        warnings.extend(f"topic {t}: {msg}" for msg in um_warn + cv_warn)

    return CoherenceReport(
        model=model.algorithm.value,
        top_n=top_n,
        per_topic=tuple(per_topic),
        mean_u_mass=_defined_mean([t.u_mass for t in per_topic]),
        mean_c_v=_defined_mean([t.c_v for t in per_topic]),
        warnings=tuple(warnings),
    )
