"""Numba-jitted kernel implementations.

Contracts match ``_numpy`` exactly; see that module for the parameter
conventions.  Compiled lazily on first call, cached on disk.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _count_in_window(day_ptr, codes, code, w_start, w_end, stop_at):
    # days containing `code` within [w_start, w_end), early exit at stop_at
    cnt = 0
    for d in range(w_start, w_end):
        for j in range(day_ptr[d], day_ptr[d + 1]):
            if codes[j] == code:
                cnt += 1
                break
        if cnt >= stop_at:
            break
    return cnt


@njit(cache=True)
def day_repeat_fractions(day_ptr, codes, n_codes, k, forward):
    n_days = day_ptr.shape[0] - 1
    n_anchors = n_days - k + 1
    if n_anchors <= 0:
        return np.empty(0, dtype=np.float64)
    out = np.full(n_anchors, np.nan)
    for a in range(n_anchors):
        anchor = a if forward else a + k - 1
        n_day = day_ptr[anchor + 1] - day_ptr[anchor]
        if n_day == 0:
            continue
        repeated = 0
        for j in range(day_ptr[anchor], day_ptr[anchor + 1]):
            if _count_in_window(day_ptr, codes, codes[j], a, a + k, 2) >= 2:
                repeated += 1
        out[a] = repeated / n_day
    return out


@njit(cache=True)
def across_repeat_fractions(day_ptr_a, codes_a, day_ptr_b, codes_b, n_codes, k, forward):
    n_days = day_ptr_a.shape[0] - 1
    if day_ptr_b.shape[0] - 1 != n_days:
        raise ValueError("streams cover different day spans")
    n_anchors = n_days - k + 1
    if n_anchors <= 0:
        return np.empty(0, dtype=np.float64)
    out = np.full(n_anchors, np.nan)
    for a in range(n_anchors):
        anchor = a if forward else a + k - 1
        n_day = day_ptr_a[anchor + 1] - day_ptr_a[anchor]
        if n_day == 0:
            continue
        hit = 0
        for j in range(day_ptr_a[anchor], day_ptr_a[anchor + 1]):
            if _count_in_window(day_ptr_b, codes_b, codes_a[j], a, a + k, 1) >= 1:
                hit += 1
        out[a] = hit / n_day
    return out


@njit(cache=True)
def em_fit_batch(ptr, theta_ind, theta_pop, weights, init_pi, tol, max_iter, eps):
    n_users = ptr.shape[0] - 1
    pi = np.empty(n_users, dtype=np.float64)
    iters = np.zeros(n_users, dtype=np.int64)
    converged = np.zeros(n_users, dtype=np.bool_)
    ll = np.full((n_users, max_iter + 1), np.nan)
    lo = eps
    hi = 1.0 - eps
    for u in range(n_users):
        start = ptr[u]
        end = ptr[u + 1]
        p = init_pi
        if p < lo:
            p = lo
        elif p > hi:
            p = hi
        if end == start:
            pi[u] = p
            continue
        total = 0.0
        for j in range(start, end):
            total += weights[j]
        cur = 0.0
        for j in range(start, end):
            cur += weights[j] * np.log(p * theta_ind[j] + (1.0 - p) * theta_pop[j])
        ll[u, 0] = cur
        for it in range(1, max_iter + 1):
            num = 0.0
            for j in range(start, end):
                m = p * theta_ind[j] + (1.0 - p) * theta_pop[j]
                num += weights[j] * (p * theta_ind[j] / m)
            p_new = num / total
            if p_new < lo:
                p_new = lo
            elif p_new > hi:
                p_new = hi
            cur = 0.0
            for j in range(start, end):
                cur += weights[j] * np.log(p_new * theta_ind[j] + (1.0 - p_new) * theta_pop[j])
            ll[u, it] = cur
            delta = abs(p_new - p)
            p = p_new
            iters[u] = it
            if delta < tol:
                converged[u] = True
                break
        pi[u] = p
    return pi, iters, converged, ll
