"""Dense word embeddings: CBOW negative-sampling trainer and the word2vec
text format.

Training is single-threaded SGD over one corpus (or topic sub-corpus) and
is bit-reproducible for a fixed seed. Pretrained vectors in word2vec text
format can be loaded in place of training, so alignment can run on
externally produced spaces.
"""

from __future__ import annotations

from collections.abc import Sequence
from pathlib import Path

import numpy as np

from . import _kernels
from .corpus import Corpus, Vocabulary


class EmbeddingMatrix:
    """One d-dimensional row per vocabulary word.

    ``normalized`` records whether every row has unit Euclidean norm; after
    normalization, dot products of rows are cosine similarities.
    """

    def __init__(self, vocab: Vocabulary, matrix: np.ndarray,
                 normalized: bool = False, meta: dict | None = None):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(vocab):
            raise ValueError("matrix must have one row per vocabulary word")
        if matrix.shape[1] < 2:
            raise ValueError("embedding dimension must be >= 2")
        if normalized:
            norms = np.linalg.norm(matrix, axis=1)
            if np.max(np.abs(norms - 1.0)) > 1e-9:
                raise ValueError("normalized flag set but rows are not unit length")
        self.vocab = vocab
        self.matrix = matrix
        self.normalized = bool(normalized)
        self.meta = meta or {}

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.vocab)

    def vector(self, word: str) -> np.ndarray:
        return self.matrix[self.vocab.id(word)]


def train_cbow(corpus: Corpus, vocab: Vocabulary | None = None, dim: int = 300,
               window: int = 5, negative: int = 5, epochs: int = 5,
               learning_rate: float = 0.025, seed: int = 1) -> EmbeddingMatrix:
    """Train CBOW with negative sampling on an encoded corpus.

    Per position: the context vectors inside the (fixed) window are
    averaged and updated against the center word plus ``negative`` noise
    words drawn from the unigram^0.75 distribution. The learning rate
    decays linearly to learning_rate * 1e-4 over all positions. Returns
    the input-vector matrix, not normalized; per-epoch running-average
    loss is kept in ``meta["epoch_losses"]``.
    """
    vocab = vocab or corpus.vocab
    if vocab is not corpus.vocab and vocab != corpus.vocab:
        raise ValueError("corpus must be encoded against the given vocabulary")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    if corpus.num_tokens() < 2:
        raise ValueError("corpus must contain at least 2 tokens")

    n_tokens = corpus.num_tokens()
    tokens = np.empty(n_tokens, dtype=np.int64)
    starts = [0]
    i = 0
    for sent in corpus.sentences():
        for w in sent:
            tokens[i] = w
            i += 1
        starts.append(i)
    sent_starts = np.asarray(starts, dtype=np.int64)

    rng = np.random.default_rng(seed)
    w_in = (rng.random((len(vocab), dim)) - 0.5) / dim
    w_out = np.zeros((len(vocab), dim))

    noise = np.asarray(vocab.counts, dtype=np.float64) ** 0.75
    if noise.sum() == 0:  # vocab loaded without counts: fall back to uniform noise
        noise[:] = 1.0
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0

    losses = np.zeros(0)
    if epochs > 0:
        losses = _kernels.cbow_train(
            tokens, sent_starts, w_in, w_out, noise_cdf,
            window, negative, float(learning_rate),
            float(learning_rate) * 1e-4, epochs, seed)
    return EmbeddingMatrix(vocab, w_in, meta={"epoch_losses": losses.tolist()})


def normalize_rows(emb: EmbeddingMatrix) -> EmbeddingMatrix:
    """Divide every row by its Euclidean norm; error on zero rows."""
    norms = np.linalg.norm(emb.matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        names = ", ".join(emb.vocab.word(int(i)) for i in zero[:10])
        raise ValueError(f"cannot normalize zero rows for words: {names}")
    return EmbeddingMatrix(emb.vocab, emb.matrix / norms[:, None],
                           normalized=True, meta=dict(emb.meta))


def restrict(emb: EmbeddingMatrix, target_vocab: Vocabulary) -> EmbeddingMatrix:
    """Select and reorder rows to the target vocabulary's id order."""
    missing = [w for w in target_vocab.words if w not in emb.vocab]
    if missing:
        raise ValueError("words missing from embedding: " + ", ".join(missing[:10]))
    rows = np.array([emb.vocab.id(w) for w in target_vocab.words])
    return EmbeddingMatrix(target_vocab, emb.matrix[rows],
                           normalized=emb.normalized, meta=dict(emb.meta))


def save_text(emb: EmbeddingMatrix, path: str | Path) -> None:
    """word2vec text format: header ``|V| d``, then ``word v1 ... vd`` rows.

    Values carry 17 significant digits so a round-trip is bit-exact.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{len(emb.vocab)} {emb.dim}\n")
        for w, row in zip(emb.vocab.words, emb.matrix):
            fh.write(w + " " + " ".join(f"{v:.17g}" for v in row) + "\n")


def load_text(path: str | Path) -> EmbeddingMatrix:
    """Read word2vec text format; vocabulary order follows the file.

    Counts are unknown to this format and set to zero.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: malformed header line")
        try:
            n_words, dim = int(header[0]), int(header[1])
        except ValueError as exc:
            raise ValueError(f"{path}: non-numeric header") from exc
        words: list[str] = []
        matrix = np.empty((n_words, dim))
        for i in range(n_words):
            parts = fh.readline().split()
            if len(parts) != dim + 1:
                raise ValueError(
                    f"{path}: row {i} has {max(len(parts) - 1, 0)} values, expected {dim}")
            words.append(parts[0])
            try:
                matrix[i] = [float(x) for x in parts[1:]]
            except ValueError as exc:
                raise ValueError(f"{path}: non-numeric value in row {i}") from exc
        if len(set(words)) != n_words:
            seen, dup = set(), ""
            for w in words:
                if w in seen:
                    dup = w
                    break
                seen.add(w)
            raise ValueError(f"{path}: duplicate word {dup!r}")
    vocab = Vocabulary(words, [0] * n_words)
    return EmbeddingMatrix(vocab, matrix)
