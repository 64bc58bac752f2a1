"""Pure-numpy kernel implementations.

Same contracts as the numba twins in ``_numba``; used when the
RECONSUME_NO_NUMBA flag is set or numba is unavailable.  The repeat
scans work on a presence matrix with prefix sums over days, so windowed
day counts come out of two slice subtractions.
"""

from __future__ import annotations

import numpy as np


def _presence_prefix(day_ptr, codes, n_codes):
    n_days = day_ptr.shape[0] - 1
    presence = np.zeros((n_days, n_codes), dtype=np.int32)
    if codes.shape[0]:
        day_of = np.repeat(np.arange(n_days), np.diff(day_ptr))
        presence[day_of, codes] = 1
    prefix = np.zeros((n_days + 1, n_codes), dtype=np.int32)
    np.cumsum(presence, axis=0, out=prefix[1:])
    return presence, prefix


def day_repeat_fractions(day_ptr, codes, n_codes, k, forward):
    """Per-anchor fraction of the anchor day's items repeated in the window.

    ``day_ptr``/``codes`` pack per-day sorted item codes (CSR layout over
    days).  Anchors run over every position whose k-day window fits; the
    window covers days [a, a+k) and the anchor day is its first day when
    ``forward`` else its last.  Empty anchor days yield NaN.
    """
    n_days = day_ptr.shape[0] - 1
    n_anchors = n_days - k + 1
    if n_anchors <= 0:
        return np.empty(0, dtype=np.float64)
    presence, prefix = _presence_prefix(day_ptr, codes, n_codes)
    starts = np.arange(n_anchors)
    win_counts = prefix[starts + k] - prefix[starts]
    anchor_days = starts if forward else starts + k - 1
    anchor_presence = presence[anchor_days].astype(bool)
    repeated = np.logical_and(anchor_presence, win_counts >= 2).sum(axis=1)
    sizes = anchor_presence.sum(axis=1)
    out = np.full(n_anchors, np.nan)
    nz = sizes > 0
    out[nz] = repeated[nz] / sizes[nz]
    return out


def across_repeat_fractions(day_ptr_a, codes_a, day_ptr_b, codes_b, n_codes, k, forward):
    """Fraction of stream-a anchor-day items seen at least once in stream b's window.

    Both streams must cover the same day span.  Windows and anchors are
    positioned exactly as in :func:`day_repeat_fractions`; the window is
    evaluated on stream b (threshold: one occurrence suffices).
    """
    n_days = day_ptr_a.shape[0] - 1
    if day_ptr_b.shape[0] - 1 != n_days:
        raise ValueError("streams cover different day spans")
    n_anchors = n_days - k + 1
    if n_anchors <= 0:
        return np.empty(0, dtype=np.float64)
    presence_a, _ = _presence_prefix(day_ptr_a, codes_a, n_codes)
    _, prefix_b = _presence_prefix(day_ptr_b, codes_b, n_codes)
    starts = np.arange(n_anchors)
    win_b = prefix_b[starts + k] - prefix_b[starts]
    anchor_days = starts if forward else starts + k - 1
    anchor_presence = presence_a[anchor_days].astype(bool)
    hit = np.logical_and(anchor_presence, win_b >= 1).sum(axis=1)
    sizes = anchor_presence.sum(axis=1)
    out = np.full(n_anchors, np.nan)
    nz = sizes > 0
    out[nz] = hit[nz] / sizes[nz]
    return out


def em_fit_batch(ptr, theta_ind, theta_pop, weights, init_pi, tol, max_iter, eps):
    """Fit per-user mixture weights by EM on held-out item probabilities.

    ``ptr`` delimits each user's slice of the flat ``theta_ind`` /
    ``theta_pop`` / ``weights`` arrays.  Returns (pi, iterations,
    converged, ll) where ``ll[u, i]`` is user u's held-out log-likelihood
    after i update steps (row padded with NaN past the last step).
    """
    n_users = ptr.shape[0] - 1
    pi = np.empty(n_users, dtype=np.float64)
    iters = np.zeros(n_users, dtype=np.int64)
    converged = np.zeros(n_users, dtype=np.bool_)
    ll = np.full((n_users, max_iter + 1), np.nan)
    lo, hi = eps, 1.0 - eps
    for u in range(n_users):
        ti = theta_ind[ptr[u]:ptr[u + 1]]
        tp = theta_pop[ptr[u]:ptr[u + 1]]
        w = weights[ptr[u]:ptr[u + 1]]
        p = min(max(init_pi, lo), hi)
        if ti.shape[0] == 0:
            pi[u] = p
            continue
        total = w.sum()
        mix = p * ti + (1.0 - p) * tp
        ll[u, 0] = np.sum(w * np.log(mix))
        for it in range(1, max_iter + 1):
            resp = p * ti / mix
            p_new = min(max(np.sum(w * resp) / total, lo), hi)
            mix = p_new * ti + (1.0 - p_new) * tp
            ll[u, it] = np.sum(w * np.log(mix))
            delta = abs(p_new - p)
            p = p_new
            iters[u] = it
            if delta < tol:
                converged[u] = True
                break
        pi[u] = p
    return pi, iters, converged, ll
