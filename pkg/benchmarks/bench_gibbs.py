#!/usr/bin/env python3
"""Throughput comparison of the Gibbs sampler backends.

Fits the same synthetic corpus once per available backend, reports tokens
sampled per second, and checks the resulting models are bitwise identical.

    python3 benchmarks/bench_gibbs.py --docs 400 --terms 800 --k 20
"""

import argparse
import time

import numpy as np

from legaltopics import _kernels
from legaltopics.corpus import MatrixKind, build_vocabulary, to_matrix
from legaltopics.lda import LdaConfig, fit_lda


def synthetic_corpus(n_docs, n_terms, mean_len, seed):
    gen = np.random.default_rng(seed)
    terms = [f"t{i:04d}" for i in range(n_terms)]
    docs = []
    for _ in range(n_docs):
        length = max(int(gen.poisson(mean_len)), 1)
        docs.append([terms[i] for i in gen.integers(0, n_terms, size=length)])
    return docs


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=400)
    parser.add_argument("--terms", type=int, default=800)
    parser.add_argument("--mean-doc-len", type=int, default=150)
    parser.add_argument("--k", type=int, default=20)
    parser.add_argument("--iterations", type=int, default=60)
    parser.add_argument("--burn-in", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    docs = synthetic_corpus(args.docs, args.terms, args.mean_doc_len, args.seed)
    vocab = build_vocabulary(docs, max_df_ratio=1.0)
    matrix = to_matrix(docs, vocab, MatrixKind.COUNT)
    total_tokens = int(matrix.values.sum())
    config = LdaConfig(k=args.k, iterations=args.iterations, burn_in=args.burn_in, seed=args.seed)
    print(
        f"corpus: {matrix.n_docs} docs, {matrix.n_terms} terms, "
        f"{total_tokens} tokens, k={args.k}, {args.iterations} sweeps"
    )

    results = {}
    for backend in _kernels.available_backends():
        start = time.perf_counter()
        model = fit_lda(matrix, config, kernel=backend)
        elapsed = time.perf_counter() - start
        rate = total_tokens * args.iterations / elapsed
        results[backend] = (elapsed, model)
        print(f"{backend:>8}: {elapsed:8.3f} s  ({rate / 1e6:.2f}M token-samples/s)")

    if len(results) == 2:
        cy, py = results["cython"][1], results["python"][1]
        identical = np.array_equal(cy.doc_topic, py.doc_topic) and np.array_equal(
            cy.topic_word, py.topic_word
        )
        print(f"backends bitwise identical: {identical}")
        print(f"speedup: {results['python'][0] / results['cython'][0]:.1f}x")
        if not identical:
            raise SystemExit(1)
    else:
        print("compiled backend unavailable; nothing to compare")


if __name__ == "__main__":
    main()
