"""Per-word Gaussian mixture smoothing of aligned topic vectors.

Each word's available topic vectors are clustered into N diagonal-covariance
Gaussian components; the unit-normalized component means become the word's
smoothed vectors. Means are initialized by k-means (k-means++ seeding,
Lloyd iterations) and refined by EM. Full covariance is deliberately not
offered: with at most K points in several hundred dimensions it is always
singular, so covariances are diagonal with a per-dimension floor.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .alignment import SmoothedWord, UnifiedModel

VARIANCE_FLOOR = 1e-6


@dataclass
class WordGMM:
    """Fitted mixture for one word's topic vectors."""
    weights: np.ndarray          # (N,) simplex
    means: np.ndarray            # (N, d)
    variances: np.ndarray        # (N, d) diagonal covariances, floored
    assignment: dict[int, int]   # topic -> component (argmax responsibility)
    log_likelihood: float
    ll_history: list[float] = field(default_factory=list)
    requested_components: int = 0

    @property
    def n_components(self) -> int:
        return self.means.shape[0]


def _kmeans(points: np.ndarray, k: int, rng: np.random.Generator,
            max_iters: int = 50) -> np.ndarray:
    """Lloyd's algorithm with k-means++ seeding; returns (k, d) centers."""
    distinct = np.unique(points, axis=0)
    centers = np.empty((k, points.shape[1]))
    centers[0] = distinct[rng.integers(len(distinct))]
    for j in range(1, k):
        d2 = np.min(((distinct[:, None, :] - centers[None, :j, :]) ** 2).sum(-1), axis=1)
        total = d2.sum()
        if total == 0:
            centers[j:] = centers[0]
            break
        centers[j] = distinct[np.searchsorted(np.cumsum(d2 / total), rng.random())]
    for _ in range(max_iters):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
        labels = np.argmin(d2, axis=1)
        new_centers = centers.copy()
        for j in range(k):
            member = points[labels == j]
            if len(member):
                new_centers[j] = member.mean(axis=0)
        if np.array_equal(new_centers, centers):
            break
        centers = new_centers
    return centers


def _log_gaussian(points: np.ndarray, means: np.ndarray,
                  variances: np.ndarray) -> np.ndarray:
    """(m, N) log densities of diagonal Gaussians."""
    diff2 = (points[:, None, :] - means[None, :, :]) ** 2
    return -0.5 * (np.log(2.0 * np.pi * variances)[None, :, :]
                   + diff2 / variances[None, :, :]).sum(-1)


def fit_gmm(points: np.ndarray, n_components: int, seed: int = 0,
            max_iters: int = 200, tol: float = 1e-6,
            topics: Sequence[int] | None = None) -> WordGMM:
    """Fit a diagonal-covariance GMM to one word's topic vectors.

    If the requested component count exceeds the number of distinct
    points, it is reduced to that number (recorded via
    ``requested_components``). EM stops when the log-likelihood improves
    by less than tol or after max_iters; a decrease beyond 1e-9 raises,
    since EM with the floor as a constrained M-step is provably monotone.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    m, dim = points.shape
    if m == 0:
        raise ValueError("cannot fit a mixture to zero points")
    if n_components < 1:
        raise ValueError("n_components must be >= 1")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    topics = list(range(m)) if topics is None else [int(t) for t in topics]
    if len(topics) != m:
        raise ValueError("topics must label every point")

    requested = n_components
    n_distinct = len(np.unique(points, axis=0))
    n_components = min(n_components, n_distinct)

    rng = np.random.default_rng(seed)
    means = _kmeans(points, n_components, rng)
    d2 = ((points[:, None, :] - means[None, :, :]) ** 2).sum(-1)
    labels = np.argmin(d2, axis=1)
    sizes = np.bincount(labels, minlength=n_components).astype(np.float64)
    weights = np.maximum(sizes, 1e-12)
    weights /= weights.sum()
    variances = np.empty_like(means)
    global_var = np.maximum(points.var(axis=0), VARIANCE_FLOOR)
    for j in range(n_components):
        member = points[labels == j]
        variances[j] = np.maximum(member.var(axis=0), VARIANCE_FLOOR) if len(member) \
            else global_var

    ll_history: list[float] = []
    prev_ll = -np.inf
    resp = np.ones((m, n_components)) / n_components
    for _ in range(max_iters):
        log_joint = np.log(weights)[None, :] + _log_gaussian(points, means, variances)
        peak = log_joint.max(axis=1, keepdims=True)
        log_norm = peak[:, 0] + np.log(np.exp(log_joint - peak).sum(axis=1))
        ll = float(log_norm.sum())
        if ll < prev_ll - 1e-9:
            raise RuntimeError(f"EM log-likelihood decreased: {prev_ll} -> {ll}")
        ll_history.append(ll)
        resp = np.exp(log_joint - log_norm[:, None])
        if ll - prev_ll < tol:
            break
        prev_ll = ll
        mass = resp.sum(axis=0)
        weights = mass / m
        means = (resp.T @ points) / mass[:, None]
        second = (resp.T @ (points ** 2)) / mass[:, None]
        variances = np.maximum(second - means ** 2, VARIANCE_FLOOR)

    comp = np.argmax(resp, axis=1)
    return WordGMM(
        weights=weights, means=means, variances=variances,
        assignment={t: int(comp[i]) for i, t in enumerate(topics)},
        log_likelihood=ll_history[-1], ll_history=ll_history,
        requested_components=requested)


def smoothed_vectors(gmm: WordGMM) -> np.ndarray:
    """Unit-normalized component means, consistent with unified vectors."""
    norms = np.linalg.norm(gmm.means, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("cannot normalize a zero component mean")
    return gmm.means / norms[:, None]


def component_posterior(gmm: WordGMM | SmoothedWord,
                        topic_posterior: np.ndarray) -> np.ndarray:
    """Fold a topic posterior onto mixture components.

    p(n) sums p(k) over topics assigned to component n, renormalized over
    the word's available topics; if no posterior mass lands on available
    topics, the result is uniform.
    """
    if not gmm.assignment:
        raise ValueError("empty topic assignment")
    p = np.asarray(topic_posterior, dtype=np.float64)
    out = np.zeros(gmm.n_components)
    for k, n in gmm.assignment.items():
        out[n] += p[k]
    total = out.sum()
    if total <= 0.0:
        return np.full(gmm.n_components, 1.0 / gmm.n_components)
    return out / total


def smooth_model(model: UnifiedModel, n_components: int,
                 seed: int = 1) -> UnifiedModel:
    """Fit one GMM per word and attach the smoothed vectors to the model.

    Per-word fits use seed + word id, so the result is deterministic and
    independent of any fitting order. Returns a new model; the input is
    untouched.
    """
    if n_components < 1:
        raise ValueError("n_components must be >= 1")
    smoothed: dict[int, SmoothedWord] = {}
    for i, word in enumerate(model.vocab.words):
        ks, vecs = model.topic_vectors(word)
        gmm = fit_gmm(vecs, n_components, seed=seed + i, topics=ks)
        smoothed[i] = SmoothedWord(smoothed_vectors(gmm), gmm.assignment)
    meta = dict(model.meta)
    meta["components"] = n_components
    meta["smooth_seed"] = seed
    return UnifiedModel(model.vocab, model.vectors, model.mask,
                        meta=meta, smoothed=smoothed)
