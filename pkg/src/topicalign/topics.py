"""LDA topic model: collapsed Gibbs training, posterior inference for token
sequences, and soft partitioning of a corpus into topic sub-corpora.

A topic posterior is a plain length-K numpy vector (non-negative, sums
to 1). Sentences join every sub-corpus whose posterior exceeds the
threshold; a sentence below threshold everywhere falls back to its argmax
topic so no sentence is silently dropped.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import _kernels
from .corpus import Corpus, Vocabulary


class TopicModel:
    """K topic-word distributions with symmetric Dirichlet priors.

    phi is a (K, |V|) row-stochastic matrix estimated from the final Gibbs
    sample: phi[k, w] = (n_kw + beta) / (n_k + |V| * beta).
    """

    def __init__(self, phi: np.ndarray, alpha: float, beta: float,
                 vocab: Vocabulary, seed: int = 0):
        phi = np.asarray(phi, dtype=np.float64)
        if phi.ndim != 2 or phi.shape[0] < 1:
            raise ValueError("phi must be a (K, |V|) matrix with K >= 1")
        if phi.shape[1] != len(vocab):
            raise ValueError("phi column count must match vocabulary size")
        if alpha <= 0 or beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if np.any(phi < 0) or np.max(np.abs(phi.sum(axis=1) - 1.0)) > 1e-9:
            raise ValueError("each phi row must be a probability distribution")
        self.phi = phi
        self.alpha = float(alpha)
        self.beta = float(beta)
        self.vocab = vocab
        self.seed = int(seed)

    @property
    def n_topics(self) -> int:
        return self.phi.shape[0]

    def top_words(self, k: int, n: int = 10) -> list[tuple[str, float]]:
        """The n most probable words of topic k."""
        order = np.argsort(-self.phi[k], kind="stable")[:n]
        return [(self.vocab.word(int(i)), float(self.phi[k, i])) for i in order]

    def save(self, path: str | Path) -> None:
        """JSON metadata line, then one topic per line of |V| decimals."""
        header = {
            "topics": self.n_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "vocab_size": len(self.vocab),
            "seed": self.seed,
        }
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for row in self.phi:
                fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")

    @classmethod
    def load(cls, path: str | Path, vocab: Vocabulary) -> "TopicModel":
        with open(path, encoding="utf-8") as fh:
            header = json.loads(fh.readline())
            if header["vocab_size"] != len(vocab):
                raise ValueError(
                    f"model expects vocabulary of size {header['vocab_size']}, "
                    f"got {len(vocab)}")
            phi = np.empty((header["topics"], header["vocab_size"]))
            for k in range(header["topics"]):
                row = np.array(fh.readline().split(), dtype=np.float64)
                if row.shape[0] != header["vocab_size"]:
                    raise ValueError(f"phi row {k} has {row.shape[0]} entries")
                phi[k] = row
        return cls(phi, header["alpha"], header["beta"], vocab, header["seed"])


def train_lda(corpus: Corpus, n_topics: int, alpha: float | None = None,
              beta: float = 0.01, iterations: int = 1000, seed: int = 1) -> TopicModel:
    """Train by collapsed Gibbs sampling; deterministic for a given seed.

    alpha defaults to 50 / K. phi comes from the final sample's count
    tables.
    """
    if n_topics < 1:
        raise ValueError("n_topics must be >= 1")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if len(corpus) == 0 or corpus.num_tokens() == 0:
        raise ValueError("cannot train on an empty corpus")
    if alpha is None:
        alpha = 50.0 / n_topics

    tokens = np.empty(corpus.num_tokens(), dtype=np.int64)
    doc_ids = np.empty_like(tokens)
    i = 0
    for d, doc in enumerate(corpus.documents):
        for sent in doc:
            for w in sent:
                tokens[i] = w
                doc_ids[i] = d
                i += 1

    n_kw, n_k = _kernels.lda_gibbs_train(
        tokens, doc_ids, len(corpus), len(corpus.vocab),
        n_topics, float(alpha), float(beta), iterations, seed)
    phi = (n_kw + beta) / (n_k[:, None] + len(corpus.vocab) * beta)
    return TopicModel(phi, alpha, beta, corpus.vocab, seed)


def infer_posterior(model: TopicModel, tokens: Sequence[int],
                    iterations: int = 50, seed: int = 0) -> np.ndarray:
    """Topic posterior for one token sequence, phi held fixed.

    Empty input gives the uniform distribution.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    arr = np.asarray(tokens, dtype=np.int64)
    if arr.size and (arr.min() < 0 or arr.max() >= len(model.vocab)):
        raise ValueError("token id out of vocabulary range")
    return _kernels.lda_gibbs_infer(arr, model.phi, model.alpha, iterations, seed)


def assign_topics(posterior: np.ndarray, threshold: float) -> list[int]:
    """Topics whose posterior exceeds threshold; argmax fallback if none.

    Ties in the fallback break toward the lowest topic index.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    hits = np.flatnonzero(np.asarray(posterior) > threshold)
    if hits.size == 0:
        return [int(np.argmax(posterior))]
    return [int(k) for k in hits]


def partition_corpus(model: TopicModel, corpus: Corpus, threshold: float,
                     iterations: int = 50, seed: int = 0) -> list[list[list[int]]]:
    """Soft-partition sentences into K sub-corpora of token-id sentences.

    A sentence may appear in several sub-corpora. Per-sentence inference
    seeds are seed + sentence index, so the result is deterministic.
    """
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    subs: list[list[list[int]]] = [[] for _ in range(model.n_topics)]
    for idx, sent in enumerate(corpus.sentences()):
        posterior = infer_posterior(model, sent, iterations=iterations, seed=seed + idx)
        for k in assign_topics(posterior, threshold):
            subs[k].append(list(sent))
    return subs
