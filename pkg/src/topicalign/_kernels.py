"""Jitted inner loops for Gibbs sampling and CBOW training.

Randomness comes from an explicit xorshift64* stream seeded per call, so
every kernel is bit-reproducible for a given seed and independent of
numba's global RNG state. All kernels are single-threaded.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U64 = np.uint64
_MIX = _U64(0x2545F4914F6CDD1D)
_SPLIT_GAMMA = _U64(0x9E3779B97F4A7C15)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53


@njit(cache=True)
def _seed_state(seed):
    # splitmix64 of the seed; never returns zero (xorshift fixed point)
    z = _U64(seed) + _SPLIT_GAMMA
    z = (z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)
    z = z ^ (z >> _U64(31))
    if z == _U64(0):
        z = _SPLIT_GAMMA
    return z


@njit(cache=True)
def _next_uniform(state):
    # xorshift64*: returns (new_state, double in [0, 1))
    state ^= state >> _U64(12)
    state ^= state << _U64(25)
    state ^= state >> _U64(27)
    bits = (state * _MIX) >> _U64(11)
    return state, np.float64(bits) * _INV53


@njit(cache=True)
def lda_gibbs_train(tokens, doc_ids, n_docs, vocab_size, n_topics, alpha, beta, iterations, seed):
    """Collapsed Gibbs sweeps over all token-topic assignments.

    Returns the final-sample count tables (n_kw, n_k) from which the
    topic-word distributions are estimated.
    """
    state = _seed_state(seed)
    n = tokens.shape[0]
    z = np.zeros(n, dtype=np.int64)
    n_kw = np.zeros((n_topics, vocab_size), dtype=np.int64)
    n_k = np.zeros(n_topics, dtype=np.int64)
    n_dk = np.zeros((n_docs, n_topics), dtype=np.int64)

    for i in range(n):
        state, u = _next_uniform(state)
        k = int(u * n_topics)
        if k >= n_topics:
            k = n_topics - 1
        z[i] = k
        n_kw[k, tokens[i]] += 1
        n_k[k] += 1
        n_dk[doc_ids[i], k] += 1

    probs = np.empty(n_topics, dtype=np.float64)
    vbeta = vocab_size * beta
    for _ in range(iterations):
        for i in range(n):
            w = tokens[i]
            d = doc_ids[i]
            k = z[i]
            n_kw[k, w] -= 1
            n_k[k] -= 1
            n_dk[d, k] -= 1
            # full conditional; the document-length denominator is constant
            # across topics and is dropped
            total = 0.0
            for kk in range(n_topics):
                p = (n_kw[kk, w] + beta) / (n_k[kk] + vbeta) * (n_dk[d, kk] + alpha)
                probs[kk] = p
                total += p
            state, u = _next_uniform(state)
            r = u * total
            acc = 0.0
            k = n_topics - 1
            for kk in range(n_topics):
                acc += probs[kk]
                if r < acc:
                    k = kk
                    break
            z[i] = k
            n_kw[k, w] += 1
            n_k[k] += 1
            n_dk[d, k] += 1
    return n_kw, n_k


@njit(cache=True)
def lda_gibbs_infer(tokens, phi, alpha, iterations, seed):
    """Gibbs folding-in with phi held fixed; one token sequence.

    The returned posterior is (m_k + alpha) / (len + K * alpha) averaged
    over the last half of the iterations.
    """
    n_topics = phi.shape[0]
    n = tokens.shape[0]
    posterior = np.zeros(n_topics, dtype=np.float64)
    if n == 0:
        posterior[:] = 1.0 / n_topics
        return posterior

    state = _seed_state(seed)
    z = np.zeros(n, dtype=np.int64)
    m_k = np.zeros(n_topics, dtype=np.int64)
    for i in range(n):
        state, u = _next_uniform(state)
        k = int(u * n_topics)
        if k >= n_topics:
            k = n_topics - 1
        z[i] = k
        m_k[k] += 1

    probs = np.empty(n_topics, dtype=np.float64)
    start = iterations // 2
    samples = 0
    denom = n + n_topics * alpha
    for it in range(iterations):
        for i in range(n):
            w = tokens[i]
            k = z[i]
            m_k[k] -= 1
            total = 0.0
            for kk in range(n_topics):
                p = phi[kk, w] * (m_k[kk] + alpha)
                probs[kk] = p
                total += p
            state, u = _next_uniform(state)
            r = u * total
            acc = 0.0
            k = n_topics - 1
            for kk in range(n_topics):
                acc += probs[kk]
                if r < acc:
                    k = kk
                    break
            z[i] = k
            m_k[k] += 1
        if it >= start:
            for kk in range(n_topics):
                posterior[kk] += (m_k[kk] + alpha) / denom
            samples += 1
    return posterior / samples


@njit(cache=True)
def _sample_cdf(cdf, u):
    # first index whose cumulative mass exceeds u
    lo = 0
    hi = cdf.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf[mid] <= u:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True)
def cbow_train(tokens, sent_starts, w_in, w_out, noise_cdf, window, negative,
               lr0, lr_floor, epochs, seed):
    """CBOW negative-sampling SGD, updating w_in / w_out in place.

    The learning rate decays linearly over all processed positions down to
    lr_floor. Negative samples are drawn from noise_cdf (unigram^0.75
    cumulative distribution); a draw equal to the center word is retried a
    bounded number of times and skipped if it keeps colliding. Returns the
    running-average negative-sampling loss per epoch.
    """
    state = _seed_state(seed)
    dim = w_in.shape[1]
    n_sent = sent_starts.shape[0] - 1
    total_positions = epochs * tokens.shape[0]
    processed = 0
    losses = np.zeros(epochs, dtype=np.float64)
    h = np.empty(dim, dtype=np.float64)
    grad_h = np.empty(dim, dtype=np.float64)

    for ep in range(epochs):
        ep_loss = 0.0
        n_updates = 0
        for s in range(n_sent):
            lo = sent_starts[s]
            hi = sent_starts[s + 1]
            for pos in range(lo, hi):
                lr = lr0 * (1.0 - processed / total_positions)
                if lr < lr_floor:
                    lr = lr_floor
                processed += 1

                center = tokens[pos]
                c0 = pos - window
                if c0 < lo:
                    c0 = lo
                c1 = pos + window + 1
                if c1 > hi:
                    c1 = hi
                n_ctx = (c1 - c0) - 1
                if n_ctx <= 0:
                    continue

                for j in range(dim):
                    h[j] = 0.0
                for c in range(c0, c1):
                    if c == pos:
                        continue
                    row = tokens[c]
                    for j in range(dim):
                        h[j] += w_in[row, j]
                inv_ctx = 1.0 / n_ctx
                for j in range(dim):
                    h[j] *= inv_ctx
                    grad_h[j] = 0.0

                loss = 0.0
                for t in range(negative + 1):
                    if t == 0:
                        target = center
                        label = 1.0
                    else:
                        target = -1
                        for _retry in range(8):
                            state, u = _next_uniform(state)
                            cand = _sample_cdf(noise_cdf, u)
                            if cand != center:
                                target = cand
                                break
                        if target < 0:
                            continue
                        label = 0.0

                    sdot = 0.0
                    for j in range(dim):
                        sdot += h[j] * w_out[target, j]
                    if sdot > 30.0:
                        f = 1.0
                    elif sdot < -30.0:
                        f = 0.0
                    else:
                        f = 1.0 / (1.0 + np.exp(-sdot))

                    fl = f
                    if fl < 1e-10:
                        fl = 1e-10
                    elif fl > 1.0 - 1e-10:
                        fl = 1.0 - 1e-10
                    if label > 0.5:
                        loss -= np.log(fl)
                    else:
                        loss -= np.log(1.0 - fl)

                    g = (label - f) * lr
                    for j in range(dim):
                        grad_h[j] += g * w_out[target, j]
                        w_out[target, j] += g * h[j]

                # mean combine: each context row receives grad_h / n_ctx
                for c in range(c0, c1):
                    if c == pos:
                        continue
                    row = tokens[c]
                    for j in range(dim):
                        w_in[row, j] += grad_h[j] * inv_ctx

                ep_loss += loss
                n_updates += 1
        if n_updates > 0:
            losses[ep] = ep_loss / n_updates
    return losses
