"""Semantic anchor selection.

A word's similarity distribution in a space is its vector of cosines to
every vocabulary word (row i of X X^T for row-normalized X). Words whose
mean topic-space similarity distribution stays closest to their global
similarity distribution are the most stable across topics and serve as
anchors for fitting the orthogonal maps.

Scores are invariant under orthogonal right-factors of any input matrix
(X_k -> X_k R leaves X_k X_k^T unchanged), which is what makes comparing
unaligned spaces legitimate in the first place.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .embeddings import EmbeddingMatrix


class AnchorSet:
    """Ordered (word id, score) anchors, ascending score, id tie-break."""

    def __init__(self, ids: Sequence[int], scores: Sequence[float], vocab: Vocabulary):
        self.ids = [int(i) for i in ids]
        self.scores = [float(s) for s in scores]
        self.vocab = vocab
        if len(self.ids) != len(self.scores):
            raise ValueError("ids and scores must have equal length")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate anchor ids")
        if any(i < 0 or i >= len(vocab) for i in self.ids):
            raise ValueError("anchor id out of vocabulary range")
        pairs = list(zip(self.scores, self.ids))
        if pairs != sorted(pairs):
            raise ValueError("anchors must be sorted by ascending score, then id")

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def words(self) -> list[str]:
        return [self.vocab.word(i) for i in self.ids]

    def save(self, path: str | Path) -> None:
        """One ``word<TAB>score`` per line, ascending score."""
        with open(path, "w", encoding="utf-8") as fh:
            for i, s in zip(self.ids, self.scores):
                fh.write(f"{self.vocab.word(i)}\t{s:.17g}\n")

    @classmethod
    def load(cls, path: str | Path, vocab: Vocabulary) -> "AnchorSet":
        ids, scores = [], []
        with open(path, encoding="utf-8") as fh:
            for ln, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    word, score = line.split("\t")
                    ids.append(vocab.id(word))
                    scores.append(float(score))
                except (ValueError, KeyError) as exc:
                    raise ValueError(f"{path}:{ln}: malformed anchor line") from exc
        return cls(ids, scores, vocab)


def _require_normalized(emb: EmbeddingMatrix, what: str) -> None:
    if not emb.normalized:
        raise ValueError(f"{what} must be row-normalized")


def similarity_row(emb: EmbeddingMatrix, word_id: int) -> np.ndarray:
    """Cosine of word_id against every vocabulary word (length |V|).

    Entry word_id is 1 up to rounding. The full |V| x |V| similarity
    matrix is never materialized.
    """
    _require_normalized(emb, "embedding matrix")
    if not 0 <= word_id < len(emb.vocab):
        raise ValueError("word id out of range")
    return emb.matrix @ emb.matrix[word_id]


def anchor_scores(topic_matrices: Sequence[EmbeddingMatrix],
                  global_matrix: EmbeddingMatrix,
                  block_rows: int = 256) -> np.ndarray:
    """Per-word distance between mean topic similarity rows and global rows.

    score[i] = || mean_k(s_k^i) - s_g^i ||_2 where s^i is word i's
    similarity distribution. Rows are processed in blocks of block_rows so
    peak memory stays O(block_rows * |V|); block results are combined in
    index order, so the output is independent of the block size.
    """
    if not topic_matrices:
        raise ValueError("need at least one topic matrix")
    _require_normalized(global_matrix, "global matrix")
    words = global_matrix.vocab.words
    dim = global_matrix.dim
    for k, emb in enumerate(topic_matrices):
        _require_normalized(emb, f"topic matrix {k}")
        if emb.vocab.words != words:
            raise ValueError(f"topic matrix {k} vocabulary differs from the global one")
        if emb.dim != dim:
            raise ValueError(f"topic matrix {k} dimension {emb.dim} != {dim}")

    n = len(words)
    n_topics = len(topic_matrices)
    scores = np.empty(n)
    for lo in range(0, n, block_rows):
        hi = min(lo + block_rows, n)
        mean_rows = np.zeros((hi - lo, n))
        for emb in topic_matrices:
            mean_rows += emb.matrix[lo:hi] @ emb.matrix.T
        mean_rows /= n_topics
        mean_rows -= global_matrix.matrix[lo:hi] @ global_matrix.matrix.T
        scores[lo:hi] = np.linalg.norm(mean_rows, axis=1)
    return scores


def select_anchors(scores: np.ndarray, count: int,
                   vocab: Vocabulary) -> AnchorSet:
    """The ``count`` lowest-score words, ascending score, id tie-break."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 1 or scores.shape[0] != len(vocab):
        raise ValueError("scores must be a length-|V| vector")
    if not 1 <= count <= scores.shape[0]:
        raise ValueError(f"count must be in [1, {scores.shape[0]}]")
    order = np.lexsort((np.arange(scores.shape[0]), scores))[:count]
    return AnchorSet(order.tolist(), scores[order].tolist(), vocab)
