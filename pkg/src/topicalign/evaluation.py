"""Evaluation: contextual word-pair similarity and document features.

AvgSimC weights every topic-vector pair by the two contexts' topic
posteriors; MaxSimC compares only the two maximum-posterior vectors.
Predictions are scored against gold ratings with Spearman correlation.
Document features aggregate per-word topic vectors three ways (posterior
weighted, plain average, dominant topic) and feed a small one-vs-rest
logistic classifier used for end-to-end smoke checks.
"""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alignment import UnifiedModel
from .corpus import tokenize
from .embeddings import EmbeddingMatrix
from .smoothing import component_posterior
from .topics import TopicModel, infer_posterior


@dataclass
class ContextualPair:
    """One rated word pair with sentential contexts.

    target1/target2 index the rated word inside each tokenized context.
    POS tags are parsed but unused.
    """
    pair_id: str
    word1: str
    pos1: str
    word2: str
    pos2: str
    context1: list[str]
    target1: int
    context2: list[str]
    target2: int
    gold: float
    ratings: list[float] = field(default_factory=list)


def _parse_context(text: str, where: str) -> tuple[list[str], int]:
    """Tokenize a context with a single <b>...</b> target marker."""
    open_at = text.find("<b>")
    close_at = text.find("</b>")
    if open_at < 0 or close_at < open_at:
        raise ValueError(f"{where}: missing or malformed <b>...</b> marker")
    before = tokenize(text[:open_at])
    inside = tokenize(text[open_at + 3:close_at])
    after = tokenize(text[close_at + 4:])
    if not inside:
        raise ValueError(f"{where}: marked target tokenizes to nothing")
    return before + inside + after, len(before)


def parse_scws(path: str | Path) -> list[ContextualPair]:
    """Read SCWS-format TSV; malformed rows raise with their line number.

    Per line: id, word1, pos1, word2, pos2, context1, context2,
    avg_rating, then individual ratings; the target word is wrapped in
    ``<b> </b>`` inside each context.
    """
    path = Path(path)
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) < 8:
                raise ValueError(f"{path}:{ln}: expected >= 8 tab-separated fields, "
                                 f"got {len(fields)}")
            try:
                ctx1, t1 = _parse_context(fields[5], f"{path}:{ln}")
                ctx2, t2 = _parse_context(fields[6], f"{path}:{ln}")
                pairs.append(ContextualPair(
                    pair_id=fields[0], word1=fields[1], pos1=fields[2],
                    word2=fields[3], pos2=fields[4],
                    context1=ctx1, target1=t1, context2=ctx2, target2=t2,
                    gold=float(fields[7]),
                    ratings=[float(x) for x in fields[8:]]))
            except ValueError as exc:
                if str(exc).startswith(str(path)):
                    raise
                raise ValueError(f"{path}:{ln}: {exc}") from exc
    return pairs


def _context_posterior(topic_model: TopicModel, context: Sequence[str],
                       target: int | None, exclude_target: bool,
                       iterations: int, seed: int) -> np.ndarray:
    toks = list(context)
    if exclude_target:
        if target is None:
            raise ValueError("exclude_target requires the target index")
        toks.pop(target)
    ids = [topic_model.vocab.ids[t] for t in toks if t in topic_model.vocab.ids]
    return infer_posterior(topic_model, ids, iterations=iterations, seed=seed)


def _side_vectors(model: UnifiedModel, word: str, posterior: np.ndarray,
                  smoothed: bool, backoff: EmbeddingMatrix | None
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Unit vectors and the renormalized posterior over them for one side."""
    if word not in model:
        if backoff is not None and word in backoff.vocab:
            v = backoff.vector(word)
            norm = np.linalg.norm(v)
            if norm == 0:
                raise KeyError(f"backoff vector for {word!r} is zero")
            return v[None, :] / norm, np.ones(1)
        raise KeyError(f"word {word!r} absent from every topic space")
    if smoothed:
        if model.smoothed is None:
            raise ValueError("model has no smoothed vectors")
        sw = model.smoothed[model.vocab.id(word)]
        weights = component_posterior(sw, posterior)
        vecs = sw.means
    else:
        ks, vecs = model.topic_vectors(word)
        weights = posterior[ks]
        total = weights.sum()
        weights = weights / total if total > 0 else np.full(len(ks), 1.0 / len(ks))
    norms = np.linalg.norm(vecs, axis=1)
    return vecs / norms[:, None], weights


def _canonical_order(word1, context1, target1, word2, context2, target2):
    key1 = (word1, tuple(context1), -1 if target1 is None else target1)
    key2 = (word2, tuple(context2), -1 if target2 is None else target2)
    if key2 < key1:
        return (word2, context2, target2, word1, context1, target1)
    return (word1, context1, target1, word2, context2, target2)


def avg_sim_c(word1: str, context1: Sequence[str], word2: str,
              context2: Sequence[str], model: UnifiedModel,
              topic_model: TopicModel, *, target1: int | None = None,
              target2: int | None = None, smoothed: bool = False,
              exclude_target: bool = False, iterations: int = 50,
              seed: int = 0, backoff: EmbeddingMatrix | None = None) -> float:
    """Posterior-weighted average cosine over all topic-vector pairs.

    score = (1/K^2) * sum_j sum_k p(j|w,c) p(k|w',c') cos(x_j(w), x_k(w'))
    with each posterior renormalized over that word's available topics.
    The 1/K^2 factor is a uniform rescale kept for fidelity; it cannot
    change rank orderings. Arguments are canonicalized so the score is
    exactly symmetric in the two (word, context) sides.
    """
    word1, context1, target1, word2, context2, target2 = _canonical_order(
        word1, context1, target1, word2, context2, target2)
    p1 = _context_posterior(topic_model, context1, target1, exclude_target,
                            iterations, seed)
    p2 = _context_posterior(topic_model, context2, target2, exclude_target,
                            iterations, seed)
    v1, q1 = _side_vectors(model, word1, p1, smoothed, backoff)
    v2, q2 = _side_vectors(model, word2, p2, smoothed, backoff)
    cosines = np.clip(v1 @ v2.T, -1.0, 1.0)
    k = topic_model.n_topics
    return float(q1 @ cosines @ q2 / (k * k))


def max_sim_c(word1: str, context1: Sequence[str], word2: str,
              context2: Sequence[str], model: UnifiedModel,
              topic_model: TopicModel, *, target1: int | None = None,
              target2: int | None = None, smoothed: bool = False,
              exclude_target: bool = False, iterations: int = 50,
              seed: int = 0, backoff: EmbeddingMatrix | None = None) -> float:
    """Cosine of the two maximum-posterior vectors (lowest index on ties)."""
    word1, context1, target1, word2, context2, target2 = _canonical_order(
        word1, context1, target1, word2, context2, target2)
    p1 = _context_posterior(topic_model, context1, target1, exclude_target,
                            iterations, seed)
    p2 = _context_posterior(topic_model, context2, target2, exclude_target,
                            iterations, seed)
    v1, q1 = _side_vectors(model, word1, p1, smoothed, backoff)
    v2, q2 = _side_vectors(model, word2, p2, smoothed, backoff)
    dot = v1[int(np.argmax(q1))] @ v2[int(np.argmax(q2))]
    return float(np.clip(dot, -1.0, 1.0))


def _fractional_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0])
    sorted_vals = values[order]
    i = 0
    while i < values.shape[0]:
        j = i
        while j + 1 < values.shape[0] and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(pred: Sequence[float], gold: Sequence[float]) -> float:
    """Pearson correlation of fractional ranks (average ranks on ties)."""
    pred = np.asarray(pred, dtype=np.float64)
    gold = np.asarray(gold, dtype=np.float64)
    if pred.shape != gold.shape or pred.ndim != 1:
        raise ValueError("pred and gold must be equal-length vectors")
    if pred.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    rp = _fractional_ranks(pred)
    rg = _fractional_ranks(gold)
    dp = rp - rp.mean()
    dg = rg - rg.mean()
    denom = np.sqrt((dp ** 2).sum() * (dg ** 2).sum())
    if denom == 0.0:
        raise ValueError("zero variance in ranks")
    return float((dp * dg).sum() / denom)


@dataclass
class ScwsResult:
    rho: float
    n_pairs: int
    n_scored: int
    diagnostics: list[str] = field(default_factory=list)

    @property
    def coverage(self) -> float:
        return self.n_scored / self.n_pairs if self.n_pairs else 0.0


def run_scws(path: str | Path, model: UnifiedModel, topic_model: TopicModel,
             metric: str = "avgsimc", *, smoothed: bool = False,
             exclude_target: bool = False, iterations: int = 50,
             seed: int = 0, backoff: EmbeddingMatrix | None = None) -> ScwsResult:
    """Score an SCWS-format file and report Spearman rho plus coverage.

    Pairs with a word absent from the model are skipped and counted;
    degenerate predictions (zero rank variance) yield rho = nan with a
    diagnostic instead of an error.
    """
    if metric not in ("avgsimc", "maxsimc"):
        raise ValueError(f"unknown metric {metric!r}")
    score = avg_sim_c if metric == "avgsimc" else max_sim_c
    pairs = parse_scws(path)
    preds, golds = [], []
    skipped = 0
    for i, pair in enumerate(pairs):
        try:
            value = score(pair.word1, pair.context1, pair.word2, pair.context2,
                          model, topic_model, target1=pair.target1,
                          target2=pair.target2, smoothed=smoothed,
                          exclude_target=exclude_target, iterations=iterations,
                          seed=seed + i, backoff=backoff)
        except KeyError:
            skipped += 1
            continue
        preds.append(value)
        golds.append(pair.gold)
    diagnostics = []
    if skipped:
        diagnostics.append(f"skipped {skipped} pairs with out-of-vocabulary words")
    rho = float("nan")
    if len(preds) < 2:
        diagnostics.append("fewer than 2 scored pairs; rho undefined")
    else:
        try:
            rho = spearman(preds, golds)
        except ValueError as exc:
            diagnostics.append(f"rho undefined: {exc}")
    return ScwsResult(rho=rho, n_pairs=len(pairs), n_scored=len(preds),
                      diagnostics=diagnostics)


def doc_features(tokens: Sequence[str], model: UnifiedModel,
                 topic_model: TopicModel, mode: str, *,
                 iterations: int = 50, seed: int = 0) -> np.ndarray:
    """Aggregate a document's word vectors into one feature vector.

    avgc: per word, available-topic posterior-weighted sum of vectors;
    avg: per word, plain mean over available topic vectors;
    maxc: per word, the vector of its maximum-posterior available topic;
    all three averaged over the document's in-vocabulary words. An
    all-out-of-vocabulary document yields a zero vector and a warning.
    """
    if mode not in ("avgc", "avg", "maxc"):
        raise ValueError(f"unknown mode {mode!r}")
    ids = [topic_model.vocab.ids[t] for t in tokens if t in topic_model.vocab.ids]
    posterior = infer_posterior(topic_model, ids, iterations=iterations, seed=seed)
    acc = np.zeros(model.dim)
    contributing = 0
    for tok in tokens:
        if tok not in model:
            continue
        ks, vecs = model.topic_vectors(tok)
        p = posterior[ks]
        if mode == "avgc":
            total = p.sum()
            weights = p / total if total > 0 else np.full(len(ks), 1.0 / len(ks))
            acc += weights @ vecs
        elif mode == "avg":
            acc += vecs.mean(axis=0)
        else:
            acc += vecs[int(np.argmax(p))]
        contributing += 1
    if contributing == 0:
        warnings.warn("document has no in-vocabulary words; returning zeros",
                      stacklevel=2)
        return acc
    return acc / contributing


@dataclass
class FeatureRecord:
    label: int
    vector: np.ndarray


def save_features(records: Sequence[FeatureRecord], path: str | Path) -> None:
    """CSV export: ``label,v1,...,vd`` per record."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(str(rec.label) + "," +
                     ",".join(f"{v:.17g}" for v in rec.vector) + "\n")


def load_features(path: str | Path) -> list[FeatureRecord]:
    path = Path(path)
    records = []
    dim = -1
    with open(path, encoding="utf-8") as fh:
        for ln, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                rec = FeatureRecord(int(parts[0]),
                                    np.array(parts[1:], dtype=np.float64))
            except ValueError as exc:
                raise ValueError(f"{path}:{ln}: malformed feature row") from exc
            if dim < 0:
                dim = rec.vector.shape[0]
            elif rec.vector.shape[0] != dim:
                raise ValueError(f"{path}:{ln}: inconsistent feature dimension")
            records.append(rec)
    return records


class LinearClassifier:
    """One-vs-rest logistic regression; weights include a bias column."""

    def __init__(self, classes: list[int], weights: np.ndarray):
        self.classes = classes
        self.weights = weights

    def scores(self, vector: np.ndarray) -> np.ndarray:
        x = np.append(np.asarray(vector, dtype=np.float64), 1.0)
        return self.weights @ x

    def classify(self, vector: np.ndarray) -> int:
        return self.classes[int(np.argmax(self.scores(vector)))]


def train_linear_classifier(records: Sequence[FeatureRecord], *,
                            epochs: int = 100, learning_rate: float = 0.1,
                            seed: int = 0) -> LinearClassifier:
    """SGD training, deterministic under the seed."""
    if not records:
        raise ValueError("no training records")
    classes = sorted({r.label for r in records})
    if len(classes) < 2:
        raise ValueError("need at least 2 classes")
    index = {c: i for i, c in enumerate(classes)}
    x = np.stack([r.vector for r in records])
    x = np.hstack([x, np.ones((x.shape[0], 1))])
    y = np.array([index[r.label] for r in records])
    weights = np.zeros((len(classes), x.shape[1]))
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        for i in rng.permutation(x.shape[0]):
            logits = weights @ x[i]
            probs = 1.0 / (1.0 + np.exp(-np.clip(logits, -30, 30)))
            labels = np.zeros(len(classes))
            labels[y[i]] = 1.0
            weights += learning_rate * np.outer(labels - probs, x[i])
    return LinearClassifier(classes, weights)


@dataclass
class ClassificationReport:
    """Weighted-average precision/recall/F1 plus accuracy, in percent."""
    precision: float
    recall: float
    f1: float
    accuracy: float

    def as_row(self, name: str) -> str:
        return (f"{name:<12} {self.precision:>9.1f} {self.recall:>7.1f} "
                f"{self.f1:>9.1f} {self.accuracy:>9.1f}")

    @staticmethod
    def header() -> str:
        return f"{'Method':<12} {'Precision':>9} {'Recall':>7} {'F1-score':>9} {'Accuracy':>9}"


def evaluate_classifier(clf: LinearClassifier,
                        records: Sequence[FeatureRecord]) -> ClassificationReport:
    """Support-weighted precision, recall, F1 and accuracy (percent)."""
    if not records:
        raise ValueError("no evaluation records")
    gold = np.array([r.label for r in records])
    pred = np.array([clf.classify(r.vector) for r in records])
    classes = sorted(set(gold.tolist()))
    precision = recall = f1 = 0.0
    for c in classes:
        support = int((gold == c).sum())
        tp = int(((pred == c) & (gold == c)).sum())
        fp = int(((pred == c) & (gold != c)).sum())
        fn = int(((pred != c) & (gold == c)).sum())
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        precision += support * p
        recall += support * r
        f1 += support * f
    n = gold.shape[0]
    return ClassificationReport(
        precision=100.0 * precision / n, recall=100.0 * recall / n,
        f1=100.0 * f1 / n, accuracy=100.0 * float((pred == gold).mean()))
