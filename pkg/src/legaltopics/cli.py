"""Command-line pipeline driver.

Subcommands: preprocess, train {lda|nmf|cluster}, evaluate, sweep, compare,
histogram, timeline. Every run is driven by a flat ``key = value`` config
file plus flag overrides (flags > file > defaults) and writes its outputs
into a fresh timestamped directory under the output root, together with a
resolved-config snapshot (config.txt) that reproduces the run bit-for-bit.
Artifact contents carry no timestamps.

Exit codes: 0 success, 1 config fault, 2 runtime fault. Faults print a
single line ``error: <message>`` to stderr.
"""

import argparse
import json
import sys
import time
from pathlib import Path

from . import analytics, coherence, corpus as corpus_mod, embio
from ._rng import derive_stream
from .cluster import aggregate_doc_topics, class_tfidf_bm25, minibatch_kmeans, reduce
from .corpus import CorpusError, MatrixKind
from .lda import LdaConfig, asymmetric_alpha, fit_lda
from .model import load_model, save_model
from .nmf import NmfConfig, fit_nmf

DEFAULT_SEED = 42
DEFAULT_TOP_N = 10
DEFAULT_OUT = "runs"


class ConfigError(Exception):
    """Invalid configuration or command line; exit code 1."""


class RuntimeFault(Exception):
    """Failure while executing a validated run; exit code 2."""


def _parse_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


class RunConfig:
    """Raw key/value settings plus a record of every resolved value.

    The resolved record includes defaults that were actually used, so the
    snapshot written to a run directory replays the run exactly.
    """

    def __init__(self, values: dict[str, str]):
        self._values = dict(values)
        self._resolved: dict[str, str] = {}

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        values: dict[str, str] = {}
        if args.config:
            values.update(_parse_config_file(Path(args.config)))
        overrides = {
            "seed": args.seed,
            "out": args.out,
            "top_n": args.top_n,
            "corpus": getattr(args, "corpus", None),
            "model": getattr(args, "model", None),
        }
        for key, value in overrides.items():
            if value is not None:
                values[key] = str(value)
        return cls(values)

    def _record(self, key: str, value) -> None:
        self._resolved[key] = str(value)

    def get_str(self, key: str, default: str | None = None) -> str | None:
        value = self._values.get(key, default)
        if value is not None:
            self._record(key, value)
        return value

    def require_str(self, key: str) -> str:
        value = self.get_str(key)
        if value is None:
            raise ConfigError(f"required config key {key!r} is not set")
        return value

    def get_int(self, key: str, default: int) -> int:
        raw = self._values.get(key)
        if raw is None:
            self._record(key, default)
            return default
        try:
            value = int(raw)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} must be an integer, got {raw!r}") from exc
        self._record(key, value)
        return value

    def get_float(self, key: str, default: float) -> float:
        raw = self._values.get(key)
        if raw is None:
            self._record(key, repr(default))
            return default
        try:
            value = float(raw)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} must be a number, got {raw!r}") from exc
        self._record(key, repr(value))
        return value

    def require_path(self, key: str) -> Path:
        path = Path(self.require_str(key))
        if not path.exists():
            raise ConfigError(f"config key {key!r}: path does not exist: {path}")
        return path

    def get_path(self, key: str) -> Path | None:
        value = self.get_str(key)
        if value is None:
            return None
        path = Path(value)
        if not path.exists():
            raise ConfigError(f"config key {key!r}: path does not exist: {path}")
        return path

    def get_list(self, key: str, default: str) -> list[str]:
        raw = self._values.get(key, default)
        self._record(key, raw)
        return [item.strip() for item in raw.split(",") if item.strip()]

    def snapshot(self) -> str:
        lines = [f"{key} = {self._resolved[key]}" for key in sorted(self._resolved)]
        return "\n".join(lines) + "\n"


def _make_run_dir(cfg: RunConfig) -> Path:
    root = Path(cfg.get_str("out", DEFAULT_OUT))
    stamp = time.strftime("%Y%m%d-%H%M%S")
    candidate = root / f"run-{stamp}"
    counter = 1
    while candidate.exists():
        candidate = root / f"run-{stamp}-{counter}"
        counter += 1
    candidate.mkdir(parents=True)
    return candidate


def _load_inputs(cfg: RunConfig):
    """Corpus, preprocessed per-document tokens, and shared knobs."""
    corpus_path = cfg.require_path("corpus")
    try:
        corp = corpus_mod.load_corpus(corpus_path)
    except CorpusError as exc:
        raise RuntimeFault(str(exc)) from exc

    stop_setting = cfg.get_str("stopwords", "default")
    if stop_setting == "default":
        stopwords = corpus_mod.default_stopwords()
    elif stop_setting == "none":
        stopwords = frozenset()
    else:
        stop_path = Path(stop_setting)
        if not stop_path.exists():
            raise ConfigError(f"config key 'stopwords': path does not exist: {stop_path}")
        stopwords = corpus_mod.load_stopwords(stop_path)

    lemma_path = cfg.get_path("lemmas")
    lemmas = corpus_mod.load_lemmas(lemma_path) if lemma_path else None

    tokens = corpus_mod.preprocess_corpus(corp, stopwords=stopwords, lemma_table=lemmas)
    return corp, tokens


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def _finish_run(cfg: RunConfig, run_dir: Path) -> None:
    _write(run_dir / "config.txt", cfg.snapshot())
    print(f"run directory: {run_dir}")


def _parse_alpha(raw: str, k: int):
    if raw == analytics.ASYMMETRIC:
        return tuple(asymmetric_alpha(k))
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"alpha must be a number or 'asymmetric', got {raw!r}") from exc


def _parse_ks(items: list[str]) -> list[int]:
    ks: list[int] = []
    for item in items:
        if ":" in item:
            lo_s, _, hi_s = item.partition(":")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError as exc:
                raise ConfigError(f"bad k range {item!r}, expected lo:hi") from exc
            ks.extend(range(lo, hi + 1))
        else:
            try:
                ks.append(int(item))
            except ValueError as exc:
                raise ConfigError(f"bad k value {item!r}") from exc
    if not ks:
        raise ConfigError("sweep_ks resolved to an empty list")
    return ks


def cmd_preprocess(cfg: RunConfig, args) -> int:
    corp, tokens = _load_inputs(cfg)
    max_chunk = cfg.get_int("max_chunk_tokens", corpus_mod.DEFAULT_CHUNK_TOKENS)
    chunks = corpus_mod.chunk_corpus(tokens, corp.doc_ids, max_chunk_tokens=max_chunk)
    run_dir = _make_run_dir(cfg)

    token_lines = [
        json.dumps({"id": doc_id, "tokens": toks}) + "\n"
        for doc_id, toks in zip(corp.doc_ids, tokens)
    ]
    _write(run_dir / "tokens.jsonl", "".join(token_lines))
    chunk_lines = [
        json.dumps({"doc_id": c.doc_id, "chunk_index": c.chunk_index, "tokens": list(c.tokens)})
        + "\n"
        for c in chunks
    ]
    _write(run_dir / "chunks.jsonl", "".join(chunk_lines))
    _finish_run(cfg, run_dir)
    print(f"documents: {len(corp)}")
    print(f"chunks: {len(chunks)}")
    return 0


def _train_lda(cfg: RunConfig, corp, tokens, seed: int):
    k = cfg.get_int("k", 0)
    if k < 1:
        raise ConfigError("config key 'k' must be set to a positive integer")
    alpha = _parse_alpha(cfg.get_str("alpha", "0.1"), k)
    config = LdaConfig(
        k=k,
        alpha=alpha,
        beta=cfg.get_float("beta", 0.01),
        iterations=cfg.get_int("iterations", 1000),
        burn_in=cfg.get_int("burn_in", 200),
        sample_every=cfg.get_int("sample_every", 10),
        seed=seed,
    )
    vocab = corpus_mod.build_vocabulary(
        tokens,
        min_df=cfg.get_int("min_df", 1),
        max_df_ratio=cfg.get_float("max_df_ratio", 0.5),
    )
    matrix = corpus_mod.to_matrix(tokens, vocab, MatrixKind.COUNT)
    return fit_lda(matrix, config, doc_ids=corp.doc_ids)


def _train_nmf(cfg: RunConfig, corp, tokens, seed: int):
    k = cfg.get_int("k", 0)
    if k < 1:
        raise ConfigError("config key 'k' must be set to a positive integer")
    config = NmfConfig(
        k=k,
        max_iterations=cfg.get_int("nmf_max_iterations", 500),
        tolerance=cfg.get_float("nmf_tolerance", 1e-5),
        seed=seed,
    )
    vocab = corpus_mod.build_vocabulary(
        tokens,
        min_df=cfg.get_int("min_df", 1),
        max_df_ratio=cfg.get_float("max_df_ratio", 0.5),
    )
    matrix = corpus_mod.to_matrix(tokens, vocab, MatrixKind.TFIDF)
    model, _ = fit_nmf(matrix, config, doc_ids=corp.doc_ids)
    return model


def _train_cluster(cfg: RunConfig, corp, tokens, seed: int, top_n: int):
    emb_path = cfg.require_path("embeddings")
    index_path = embio.default_index_path(emb_path)
    if not index_path.exists():
        raise ConfigError(f"embedding index does not exist: {index_path}")
    try:
        embeddings = embio.read_embeddings(emb_path, index_path)
    except embio.EmbeddingFormatError as exc:
        raise RuntimeFault(str(exc)) from exc

    max_chunk = cfg.get_int("max_chunk_tokens", corpus_mod.DEFAULT_CHUNK_TOKENS)
    chunks = corpus_mod.chunk_corpus(tokens, corp.doc_ids, max_chunk_tokens=max_chunk)
    by_key = {(c.doc_id, c.chunk_index): list(c.tokens) for c in chunks}
    if len(embeddings.index) != len(by_key):
        raise RuntimeFault(
            f"embedding rows ({len(embeddings.index)}) do not match corpus chunks ({len(by_key)})"
        )
    chunk_tokens = []
    for entry in embeddings.index:
        if entry not in by_key:
            raise RuntimeFault(f"embedding row {entry!r} has no matching corpus chunk")
        chunk_tokens.append(by_key[entry])

    clusters = cfg.get_int("clusters", 50)
    target_dim = cfg.get_int("target_dim", 5)
    if target_dim > embeddings.dim:
        raise ConfigError(
            f"target_dim {target_dim} exceeds embedding dimension {embeddings.dim}"
        )
    try:
        reduced, reducer = reduce(embeddings, target_dim=target_dim)
        cluster_model = minibatch_kmeans(
            reduced,
            clusters=clusters,
            batch_size=cfg.get_int("batch_size", 256),
            epochs=cfg.get_int("epochs", 10),
            seed=seed,
            reducer=reducer,
        )
    except ValueError as exc:
        raise RuntimeFault(str(exc)) from exc

    table = class_tfidf_bm25(
        chunk_tokens, cluster_model.assignments, n_clusters=clusters, top_n=top_n
    )
    # the cluster path never prunes the vocabulary
    vocab = corpus_mod.build_vocabulary(tokens, min_df=1, max_df_ratio=1.0)
    train_config = {
        "clusters": clusters,
        "target_dim": target_dim,
        "seed": seed,
        "max_chunk_tokens": max_chunk,
    }
    return aggregate_doc_topics(
        cluster_model.assignments,
        embeddings.index,
        corp.doc_ids,
        table,
        vocab,
        config=train_config,
    )


def cmd_train(cfg: RunConfig, args) -> int:
    corp, tokens = _load_inputs(cfg)
    seed = cfg.get_int("seed", DEFAULT_SEED)
    top_n = cfg.get_int("top_n", DEFAULT_TOP_N)
    window = cfg.get_int("coherence_window", coherence.DEFAULT_WINDOW)

    if args.algorithm == "lda":
        model = _train_lda(cfg, corp, tokens, seed)
    elif args.algorithm == "nmf":
        model = _train_nmf(cfg, corp, tokens, seed)
    else:
        model = _train_cluster(cfg, corp, tokens, seed, top_n)

    report = coherence.evaluate_model(model, tokens, top_n=top_n, window=window)
    run_dir = _make_run_dir(cfg)
    save_model(model, run_dir / "model.json")
    _write(run_dir / "report.json", report.to_json())
    _finish_run(cfg, run_dir)
    print(f"topics: {model.k}")
    print(f"mean u_mass: {report.mean_u_mass}")
    print(f"mean c_v: {report.mean_c_v}")
    return 0


def cmd_evaluate(cfg: RunConfig, args) -> int:
    model_path = cfg.require_path("model")
    _, tokens = _load_inputs(cfg)
    try:
        model = load_model(model_path)
    except ValueError as exc:
        raise RuntimeFault(f"{model_path}: {exc}") from exc
    report = coherence.evaluate_model(
        model,
        tokens,
        top_n=cfg.get_int("top_n", DEFAULT_TOP_N),
        window=cfg.get_int("coherence_window", coherence.DEFAULT_WINDOW),
    )
    run_dir = _make_run_dir(cfg)
    _write(run_dir / "report.json", report.to_json())
    _finish_run(cfg, run_dir)
    print(f"mean u_mass: {report.mean_u_mass}")
    print(f"mean c_v: {report.mean_c_v}")
    return 0


def cmd_sweep(cfg: RunConfig, args) -> int:
    corp, tokens = _load_inputs(cfg)
    seed = cfg.get_int("seed", DEFAULT_SEED)
    top_n = cfg.get_int("top_n", DEFAULT_TOP_N)
    window = cfg.get_int("coherence_window", coherence.DEFAULT_WINDOW)

    alphas_raw = cfg.get_list("sweep_alphas", ",".join(map(repr, analytics.DEFAULT_GRID_ALPHAS)))
    betas_raw = cfg.get_list("sweep_betas", ",".join(map(repr, analytics.DEFAULT_GRID_BETAS)))
    ks = _parse_ks(cfg.get_list("sweep_ks", "4:11"))
    alphas: list = []
    for raw in alphas_raw:
        if raw == analytics.ASYMMETRIC:
            alphas.append(raw)
        else:
            try:
                alphas.append(float(raw))
            except ValueError as exc:
                raise ConfigError(f"bad sweep alpha {raw!r}") from exc
    try:
        betas = [float(raw) for raw in betas_raw]
    except ValueError as exc:
        raise ConfigError("sweep_betas must be numbers") from exc

    objective = cfg.get_str("objective", "u_mass")
    if objective not in ("u_mass", "c_v"):
        raise ConfigError(f"objective must be u_mass or c_v, got {objective!r}")
    sweep_iterations = cfg.get_int("sweep_iterations", analytics.DEFAULT_SWEEP_ITERATIONS)
    sweep_burn_in = cfg.get_int("sweep_burn_in", 50)
    sweep_sample_every = cfg.get_int("sweep_sample_every", 10)

    vocab = corpus_mod.build_vocabulary(
        tokens,
        min_df=cfg.get_int("min_df", 1),
        max_df_ratio=cfg.get_float("max_df_ratio", 0.5),
    )
    matrix = corpus_mod.to_matrix(tokens, vocab, MatrixKind.COUNT)

    try:
        result = analytics.grid_search(
            matrix,
            tokens,
            alphas=alphas,
            betas=betas,
            ks=ks,
            objective=objective,
            seed=seed,
            iterations=sweep_iterations,
            burn_in=sweep_burn_in,
            sample_every=sweep_sample_every,
            top_n=top_n,
            window=window,
        )
    except (ValueError, RuntimeError) as exc:
        raise RuntimeFault(str(exc)) from exc

    # refit the winning cell at full budget
    best = result.best
    refit_label = f"refit:{best.alpha}:{best.beta!r}:{best.k}"
    refit_config = LdaConfig(
        k=best.k,
        alpha=tuple(asymmetric_alpha(best.k)) if best.alpha == analytics.ASYMMETRIC else best.alpha,
        beta=best.beta,
        iterations=cfg.get_int("iterations", 1000),
        burn_in=cfg.get_int("burn_in", 200),
        sample_every=cfg.get_int("sample_every", 10),
        seed=derive_stream(seed, refit_label),
    )
    model = fit_lda(matrix, refit_config, doc_ids=corp.doc_ids)
    report = coherence.evaluate_model(model, tokens, top_n=top_n, window=window)

    run_dir = _make_run_dir(cfg)
    _write(run_dir / "sweep.json", result.to_json())
    save_model(model, run_dir / "model.json")
    _write(run_dir / "report.json", report.to_json())
    _finish_run(cfg, run_dir)
    print(
        f"best cell: alpha={best.alpha} beta={best.beta} k={best.k} "
        f"{result.objective}={best.score(result.objective)}"
    )
    return 0


def cmd_compare(cfg: RunConfig, args) -> int:
    models = []
    for raw in (args.model_a, args.model_b):
        path = Path(raw)
        if not path.exists():
            raise ConfigError(f"model artifact does not exist: {path}")
        try:
            models.append(load_model(path))
        except ValueError as exc:
            raise RuntimeFault(f"{path}: {exc}") from exc
    model_a, model_b = models
    if model_a.vocab.sha256() != model_b.vocab.sha256():
        print("warning: models were trained on different vocabularies", file=sys.stderr)
    similarity = analytics.similarity_matrix(
        model_a,
        model_b,
        metric=cfg.get_str("metric", "cosine"),
        top_n=cfg.get_int("top_n", DEFAULT_TOP_N),
    )
    for message in similarity.warnings:
        print(f"warning: {message}", file=sys.stderr)
    run_dir = _make_run_dir(cfg)
    _write(run_dir / "similarity.csv", similarity.to_csv())
    _finish_run(cfg, run_dir)
    print(f"mean off-diagonal similarity: {similarity.mean_off_diagonal()}")
    return 0


def _load_model_arg(cfg: RunConfig):
    model_path = cfg.require_path("model")
    try:
        return load_model(model_path)
    except ValueError as exc:
        raise RuntimeFault(f"{model_path}: {exc}") from exc


def cmd_histogram(cfg: RunConfig, args) -> int:
    model = _load_model_arg(cfg)
    hist = analytics.topic_histogram(model)
    run_dir = _make_run_dir(cfg)
    _write(run_dir / "histogram.csv", hist.to_csv())
    _finish_run(cfg, run_dir)
    print(f"documents: {hist.total}")
    return 0


def cmd_timeline(cfg: RunConfig, args) -> int:
    model = _load_model_arg(cfg)
    corp, _ = _load_inputs(cfg)
    year_start = cfg.get_str("year_start")
    year_end = cfg.get_str("year_end")
    year_range = None
    if (year_start is None) != (year_end is None):
        raise ConfigError("year_start and year_end must be set together")
    if year_start is not None:
        try:
            year_range = (int(year_start), int(year_end))
        except ValueError as exc:
            raise ConfigError("year_start and year_end must be integers") from exc
    try:
        result = analytics.timeline(model, corp, year_range=year_range)
    except ValueError as exc:
        raise RuntimeFault(str(exc)) from exc
    run_dir = _make_run_dir(cfg)
    _write(run_dir / "timeline.csv", result.to_csv())
    _finish_run(cfg, run_dir)
    print(f"remainder: {result.remainder}", file=sys.stderr)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; config faults exit 1
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="legaltopics", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--seed", type=int, help="RNG seed (default 42)")
    parser.add_argument("--out", help="output root directory (default runs)")
    parser.add_argument("--top-n", type=int, dest="top_n", help="keywords per topic")
    sub = parser.add_subparsers(dest="command", required=True)

    p_pre = sub.add_parser("preprocess", help="tokenize, filter, and chunk a corpus")
    p_pre.add_argument("--corpus", help="corpus JSONL path")
    p_pre.set_defaults(func=cmd_preprocess)

    p_train = sub.add_parser("train", help="train a topic model")
    p_train.add_argument("algorithm", choices=("lda", "nmf", "cluster"))
    p_train.add_argument("--corpus", help="corpus JSONL path")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("evaluate", help="score a saved model against a corpus")
    p_eval.add_argument("--corpus", help="corpus JSONL path")
    p_eval.add_argument("--model", help="model artifact path")
    p_eval.set_defaults(func=cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="hyperparameter grid search for LDA")
    p_sweep.add_argument("--corpus", help="corpus JSONL path")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare", help="topic similarity between two models")
    p_cmp.add_argument("model_a")
    p_cmp.add_argument("model_b")
    p_cmp.set_defaults(func=cmd_compare)

    p_hist = sub.add_parser("histogram", help="dominant-topic histogram CSV")
    p_hist.add_argument("--model", help="model artifact path")
    p_hist.set_defaults(func=cmd_histogram)

    p_time = sub.add_parser("timeline", help="per-year dominant-topic CSV")
    p_time.add_argument("--corpus", help="corpus JSONL path")
    p_time.add_argument("--model", help="model artifact path")
    p_time.set_defaults(func=cmd_timeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = RunConfig.from_args(args)
        return args.func(cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (RuntimeFault, CorpusError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
