"""Orthogonal Procrustes alignment of topic spaces into the global space.

Each topic space is mapped onto the global space by the orthogonal matrix
that best superimposes the anchor vectors of the two spaces (closed form
via SVD of the anchor cross-covariance). Because the maps are orthogonal
they preserve norms and inner products, so cosine geometry inside each
topic space survives the projection. The assembled model gives every word
up to K aligned topic vectors plus an availability mask, and supports
cross-domain analysis: per-topic nearest neighbors, cross-topic cosine of
one word, and a 2-component PCA export.
"""

from __future__ import annotations

import json
import warnings
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Vocabulary
from .embeddings import EmbeddingMatrix, normalize_rows


class OrthogonalMap:
    """A d x d orthogonal matrix mapping one topic space into the global one."""

    def __init__(self, matrix: np.ndarray, topic: int = -1):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError("map must be a square matrix")
        gram_err = np.max(np.abs(matrix @ matrix.T - np.eye(matrix.shape[0])))
        if gram_err > 1e-8:
            raise ValueError(f"matrix is not orthogonal (max |MM^T - I| = {gram_err:.3g})")
        self.matrix = matrix
        self.topic = int(topic)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def procrustes(source: np.ndarray, target: np.ndarray, topic: int = -1) -> OrthogonalMap:
    """Orthogonal matrix M minimizing sum_j ||M source_j - target_j||^2.

    Rows of source and target are corresponding anchor vectors. The closed
    form is M = U V^T with U S V^T the SVD of target^T @ source. Any
    orthogonal matrix is admissible; reflections are not suppressed.
    """
    source = np.asarray(source, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if source.shape != target.shape or source.ndim != 2:
        raise ValueError("source and target must be equal-shape 2d arrays")
    n, dim = source.shape
    if n < dim:
        warnings.warn(f"only {n} anchor pairs for dimension {dim}; "
                      "the fitted map may be underdetermined", stacklevel=2)
    u, _, vt = np.linalg.svd(target.T @ source)
    return OrthogonalMap(u @ vt, topic)


def project(omap: OrthogonalMap, x: np.ndarray) -> np.ndarray:
    """Image M @ x of a topic vector in the unified space."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != omap.dim:
        raise ValueError(f"vector dimension {x.shape[-1]} != map dimension {omap.dim}")
    return omap.matrix @ x


def map_objective(matrix: np.ndarray, source: np.ndarray, target: np.ndarray) -> float:
    """Procrustes objective sum_j ||M source_j - target_j||^2 for any M."""
    return float(np.sum((source @ np.asarray(matrix).T - target) ** 2))


@dataclass
class SmoothedWord:
    """Component means (unit rows) and the topic -> component assignment."""
    means: np.ndarray
    assignment: dict[int, int]

    @property
    def n_components(self) -> int:
        return self.means.shape[0]


class UnifiedModel:
    """Per word: up to K aligned topic vectors with an availability mask.

    vectors has shape (n_words, K, d) with zero rows where mask is False.
    All stored vectors are unit length (projections of unit TDSM vectors
    under orthogonal maps). ``smoothed`` optionally holds per-word mixture
    component means replacing the raw topic vectors.
    """

    def __init__(self, vocab: Vocabulary, vectors: np.ndarray, mask: np.ndarray,
                 meta: dict | None = None,
                 smoothed: dict[int, SmoothedWord] | None = None):
        vectors = np.asarray(vectors, dtype=np.float64)
        mask = np.asarray(mask, dtype=bool)
        if vectors.ndim != 3 or mask.shape != vectors.shape[:2]:
            raise ValueError("vectors must be (n, K, d) with a matching (n, K) mask")
        if len(vocab) != vectors.shape[0]:
            raise ValueError("one vector set per vocabulary word required")
        if not mask.any(axis=1).all():
            raise ValueError("every stored word needs at least one topic vector")
        self.vocab = vocab
        self.vectors = vectors
        self.mask = mask
        self.meta = meta or {}
        self.smoothed = smoothed

    @property
    def n_topics(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.vectors.shape[2]

    def __contains__(self, word: str) -> bool:
        return word in self.vocab.ids

    def available_topics(self, word: str) -> list[int]:
        return [int(k) for k in np.flatnonzero(self.mask[self.vocab.id(word)])]

    def vector(self, word: str, topic: int) -> np.ndarray:
        i = self.vocab.id(word)
        if not self.mask[i, topic]:
            raise KeyError(f"word {word!r} has no vector for topic {topic}")
        return self.vectors[i, topic]

    def topic_vectors(self, word: str) -> tuple[list[int], np.ndarray]:
        """Available topic indices and the corresponding stacked vectors."""
        i = self.vocab.id(word)
        ks = np.flatnonzero(self.mask[i])
        return [int(k) for k in ks], self.vectors[i, ks]


def build_unified(topic_matrices: Sequence[EmbeddingMatrix],
                  global_matrix: EmbeddingMatrix,
                  anchor_set, meta: dict | None = None) -> UnifiedModel:
    """Fit one orthogonal map per topic on the anchor rows and project.

    Inputs are row-normalized first if they are not already. Every anchor
    word must exist in the global space and in every topic space. The
    unified vocabulary is the union of the topic vocabularies, ordered by
    global-space id with any remaining words appended lexicographically.
    """
    if not topic_matrices:
        raise ValueError("need at least one topic matrix")
    gl = global_matrix if global_matrix.normalized else normalize_rows(global_matrix)
    tms = [m if m.normalized else normalize_rows(m) for m in topic_matrices]

    anchor_words = anchor_set.words
    for w in anchor_words:
        if w not in gl.vocab:
            raise ValueError(f"anchor {w!r} missing from the global space")
    for k, tm in enumerate(tms):
        for w in anchor_words:
            if w not in tm.vocab:
                raise ValueError(f"anchor {w!r} missing from topic space {k}")

    target = np.stack([gl.vector(w) for w in anchor_words])
    maps = []
    for k, tm in enumerate(tms):
        source = np.stack([tm.vector(w) for w in anchor_words])
        maps.append(procrustes(source, target, topic=k))

    union = set()
    for tm in tms:
        union.update(tm.vocab.words)
    in_global = sorted((w for w in union if w in gl.vocab), key=gl.vocab.id)
    extra = sorted(w for w in union if w not in gl.vocab)
    words = in_global + extra
    vocab = Vocabulary(words, [0] * len(words))

    n_topics = len(tms)
    dim = gl.dim
    vectors = np.zeros((len(words), n_topics, dim))
    mask = np.zeros((len(words), n_topics), dtype=bool)
    for k, tm in enumerate(tms):
        projected = tm.matrix @ maps[k].matrix.T
        for i, w in enumerate(tm.vocab.words):
            j = vocab.id(w)
            vectors[j, k] = projected[i]
            mask[j, k] = True

    meta = dict(meta or {})
    meta.setdefault("anchor_count", len(anchor_set))
    return UnifiedModel(vocab, vectors, mask, meta=meta)


def topic_neighbors(model: UnifiedModel, word: str, topic: int,
                    n: int) -> list[tuple[str, float]]:
    """Top-n words by cosine to ``word`` inside one topic domain.

    Only words with a vector for that topic compete; the query word is
    excluded; ties break toward the lower word id.
    """
    if word not in model:
        raise KeyError(f"unknown word {word!r}")
    wid = model.vocab.id(word)
    if not model.mask[wid, topic]:
        raise KeyError(f"word {word!r} has no vector for topic {topic}")
    if n <= 0:
        return []
    cand = np.flatnonzero(model.mask[:, topic])
    cand = cand[cand != wid]
    sims = model.vectors[cand, topic] @ model.vectors[wid, topic]
    order = np.lexsort((cand, -sims))[:n]
    return [(model.vocab.word(int(cand[i])), float(sims[i])) for i in order]


def cross_topic_similarity(model: UnifiedModel, word: str, topic_a: int,
                           topic_b: int) -> float:
    """Cosine between one word's vectors in two topic domains."""
    va = model.vector(word, topic_a)
    vb = model.vector(word, topic_b)
    cos = va @ vb / (np.linalg.norm(va) * np.linalg.norm(vb))
    return float(np.clip(cos, -1.0, 1.0))


def pca_export(model: UnifiedModel, words: Sequence[str]) -> list[tuple[str, int, float, float]]:
    """2-component PCA of the selected words' topic vectors.

    Rows are mean-centered; components are covariance eigenvectors in
    descending eigenvalue order, each sign-fixed so its largest-magnitude
    loading is positive. One output row per available (word, topic) pair,
    in the order words were given with topics ascending.
    """
    keys: list[tuple[str, int]] = []
    rows = []
    for w in words:
        if w not in model:
            raise KeyError(f"unknown word {w!r}")
        ks, vecs = model.topic_vectors(w)
        for k, v in zip(ks, vecs):
            keys.append((w, k))
            rows.append(v)
    if len(rows) < 2:
        raise ValueError("need at least 2 stored vectors for PCA")
    x = np.stack(rows)
    xc = x - x.mean(axis=0)
    cov = xc.T @ xc / (x.shape[0] - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    comps = eigvecs[:, np.argsort(-eigvals, kind="stable")[:2]]
    for j in range(comps.shape[1]):
        if comps[np.argmax(np.abs(comps[:, j])), j] < 0:
            comps[:, j] = -comps[:, j]
    coords = xc @ comps
    return [(w, k, float(c[0]), float(c[1])) for (w, k), c in zip(keys, coords)]


def save_model(model: UnifiedModel, path: str | Path) -> None:
    """JSON metadata line, then one ``word topic_id v1...vd`` line per
    available pair; smoothed models append component and assignment
    records prefixed with ``#component`` / ``#assign``."""
    header = {
        "kind": "smoothed" if model.smoothed is not None else "unified",
        "topics": model.n_topics,
        "dim": model.dim,
        "vocab_size": len(model.vocab),
    }
    header.update(model.meta)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for i, w in enumerate(model.vocab.words):
            for k in np.flatnonzero(model.mask[i]):
                vec = " ".join(f"{v:.17g}" for v in model.vectors[i, k])
                fh.write(f"{w} {k} {vec}\n")
        if model.smoothed is not None:
            for i, w in enumerate(model.vocab.words):
                sw = model.smoothed[i]
                for n in range(sw.n_components):
                    vec = " ".join(f"{v:.17g}" for v in sw.means[n])
                    fh.write(f"#component {w} {n} {vec}\n")
                for k in sorted(sw.assignment):
                    fh.write(f"#assign {w} {k} {sw.assignment[k]}\n")


def load_model(path: str | Path) -> UnifiedModel:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        n_topics, dim = header["topics"], header["dim"]
        words: list[str] = []
        ids: dict[str, int] = {}
        vec_rows: list[tuple[int, int, np.ndarray]] = []
        comp_rows: dict[int, list[np.ndarray]] = {}
        assigns: dict[int, dict[int, int]] = {}
        for ln, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            try:
                if parts[0] == "#component":
                    i = ids[parts[1]]
                    comp_rows.setdefault(i, []).append(
                        np.array(parts[3:], dtype=np.float64))
                elif parts[0] == "#assign":
                    i = ids[parts[1]]
                    assigns.setdefault(i, {})[int(parts[2])] = int(parts[3])
                else:
                    w, k = parts[0], int(parts[1])
                    if w not in ids:
                        ids[w] = len(words)
                        words.append(w)
                    vec = np.array(parts[2:], dtype=np.float64)
                    if vec.shape[0] != dim:
                        raise ValueError(f"expected {dim} values, got {vec.shape[0]}")
                    vec_rows.append((ids[w], k, vec))
            except (ValueError, KeyError, IndexError) as exc:
                raise ValueError(f"{path}:{ln}: malformed model line") from exc
    if len(words) != header["vocab_size"]:
        raise ValueError(f"{path}: header claims {header['vocab_size']} words, "
                         f"file has {len(words)}")
    vocab = Vocabulary(words, [0] * len(words))
    vectors = np.zeros((len(words), n_topics, dim))
    mask = np.zeros((len(words), n_topics), dtype=bool)
    for i, k, vec in vec_rows:
        vectors[i, k] = vec
        mask[i, k] = True
    smoothed = None
    if header.get("kind") == "smoothed":
        smoothed = {}
        for i in range(len(words)):
            smoothed[i] = SmoothedWord(np.stack(comp_rows[i]), assigns.get(i, {}))
    meta = {k: v for k, v in header.items()
            if k not in ("kind", "topics", "dim", "vocab_size")}
    return UnifiedModel(vocab, vectors, mask, meta=meta, smoothed=smoothed)
