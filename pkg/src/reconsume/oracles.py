"""Slow reference implementations for cross-checking the fast paths.

Everything here recomputes a result from first principles with no
shared code: repeat fractions by literal window scans over item sets,
ranking metrics by direct definition (the ideal ranking is found by
trying every ordering), and test p-values by permutation.  These back
the built-in self-test and the verification suite; they are not meant
to be fast.
"""

from __future__ import annotations

import math
from itertools import combinations, permutations
from typing import Mapping, Sequence

import numpy as np


def window_positions(t: int, k: int, direction: str, n_days: int) -> list[int]:
    if direction == "forward":
        lo, hi = t, t + k - 1
    else:
        lo, hi = t - k + 1, t
    if lo < 1 or hi > n_days:
        raise ValueError("window out of range")
    return list(range(lo, hi + 1))


def window_count(days: Sequence[frozenset[str]], t: int, k: int, item: str,
                 direction: str = "forward") -> int:
    return sum(1 for d in window_positions(t, k, direction, len(days))
               if item in days[d - 1])


def day_repeat_fraction(days: Sequence[frozenset[str]], t: int, k: int,
                        direction: str = "forward") -> float | None:
    todays = days[t - 1]
    if not todays:
        return None
    repeated = sum(1 for item in todays
                   if window_count(days, t, k, item, direction) >= 2)
    return repeated / len(todays)


def user_repeat_fraction(days: Sequence[frozenset[str]], k: int,
                         direction: str = "forward") -> float | None:
    n = len(days)
    anchors = range(1, n - k + 2) if direction == "forward" else range(k, n + 1)
    vals = [day_repeat_fraction(days, t, k, direction) for t in anchors]
    vals = [v for v in vals if v is not None]
    return sum(vals) / len(vals) if vals else None


def across_fraction(days_a: Sequence[frozenset[str]],
                    days_b: Sequence[frozenset[str]], t: int, k: int,
                    direction: str = "forward") -> float | None:
    todays = days_a[t - 1]
    if not todays:
        return None
    hits = sum(1 for item in todays
               if any(item in days_b[d - 1]
                      for d in window_positions(t, k, direction, len(days_a))))
    return hits / len(todays)


def recall(test_counts: Mapping[str, int], ranked: Sequence[str], n: int) -> float:
    hit = 0
    total = 0
    for item, c in test_counts.items():
        total += c
        if item in list(ranked)[:n]:
            hit += c
    return hit / total


def precision(test_counts: Mapping[str, int], ranked: Sequence[str], n: int) -> float:
    return len([x for x in list(ranked)[:n] if x in test_counts]) / n


def _dcg(gains: Sequence[float]) -> float:
    return sum(g / math.log2(r + 1) for r, g in enumerate(gains, start=1))


def ndcg(test_counts: Mapping[str, int], ranked: Sequence[str], n: int,
         gain: str = "linear") -> float:
    """nDCG with the ideal found by brute force over orderings.

    Feasible for small test sets only (the ideal search is factorial in
    the number of distinct test items).
    """
    def g(c):
        return float(c) if gain == "linear" else float(2 ** c - 1)

    got = _dcg([g(test_counts.get(item, 0)) for item in list(ranked)[:n]])
    best = 0.0
    for perm in permutations(test_counts):
        cand = _dcg([g(test_counts[item]) for item in perm[:n]])
        best = max(best, cand)
    return got / best if best > 0 else 0.0


def _rank(pooled: list[float]) -> list[float]:
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        for idx in order[i:j + 1]:
            ranks[idx] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def _h_statistic(ranks: np.ndarray, sizes: Sequence[int]) -> float:
    n = len(ranks)
    ties = 0.0
    _, counts = np.unique(ranks, return_counts=True)
    for c in counts:
        ties += c ** 3 - c
    correction = 1.0 - ties / (n ** 3 - n)
    if correction <= 0:
        return 0.0
    h = 0.0
    offset = 0
    for size in sizes:
        rbar = float(ranks[offset:offset + size].mean())
        h += size * (rbar - (n + 1) / 2) ** 2
        offset += size
    return h * 12.0 / (n * (n + 1)) / correction


def _assignments(indices: list[int], sizes: list[int]):
    # all ways to partition indices into ordered groups of the given sizes
    if len(sizes) == 1:
        yield (tuple(indices),)
        return
    for head in combinations(indices, sizes[0]):
        head_set = set(head)
        rest = [i for i in indices if i not in head_set]
        for tail in _assignments(rest, sizes[1:]):
            yield (head,) + tail


def _tail_share(above: float, at: float, total: float, mid: bool) -> float:
    if mid:
        return (above + 0.5 * at) / total
    return (above + at) / total


def kruskal_permutation_p(groups: Mapping[str, Sequence[float]],
                          max_exact: int = 100000,
                          n_samples: int = 200000,
                          seed: int = 0,
                          mid: bool = False) -> float:
    """Permutation p-value for the H statistic.

    Exhaustive when the number of group assignments is small enough,
    vectorized Monte-Carlo otherwise.  P(H_perm >= H_obs) by default;
    ``mid`` counts permutations tied with the observed statistic at
    half weight, the usual convention when a discrete permutation
    distribution is compared against a continuous approximation.
    """
    sizes = [len(v) for v in groups.values()]
    pooled = [float(x) for vs in groups.values() for x in vs]
    ranks = np.asarray(_rank(pooled))
    h_obs = _h_statistic(ranks, sizes)
    n = len(pooled)

    n_exact = 1
    remaining = n
    for s in sizes:
        n_exact *= math.comb(remaining, s)
        remaining -= s
    if n_exact <= max_exact:
        above = at = 0
        for assign in _assignments(list(range(n)), sizes):
            perm_ranks = np.asarray([ranks[i] for grp in assign for i in grp])
            h = _h_statistic(perm_ranks, sizes)
            if h > h_obs + 1e-12:
                above += 1
            elif h >= h_obs - 1e-12:
                at += 1
        return _tail_share(above, at, n_exact, mid)

    rng = np.random.default_rng(seed)
    mat = rng.permuted(np.tile(ranks, (n_samples, 1)), axis=1)
    # H depends on a permutation only through its group rank means
    hs = np.zeros(n_samples)
    offset = 0
    for size in sizes:
        rbar = mat[:, offset:offset + size].mean(axis=1)
        hs += size * (rbar - (n + 1) / 2) ** 2
        offset += size
    counts = np.unique(ranks, return_counts=True)[1].astype(float)
    correction = 1.0 - float(np.sum(counts ** 3 - counts)) / (n ** 3 - n)
    if correction <= 0:
        return 1.0
    hs = hs * 12.0 / (n * (n + 1)) / correction
    above = float(np.sum(hs > h_obs + 1e-9))
    at = float(np.sum(np.abs(hs - h_obs) <= 1e-9))
    return _tail_share(above, at, n_samples, mid)


def dunn_permutation_p(groups: Mapping[str, Sequence[float]],
                       pair: tuple[str, str],
                       n_samples: int = 200000, seed: int = 0,
                       mid: bool = False) -> float:
    """Monte-Carlo two-sided permutation p for one pair's mean-rank gap."""
    labels = list(groups)
    sizes = {k: len(groups[k]) for k in labels}
    pooled = [float(x) for k in labels for x in groups[k]]
    ranks = np.asarray(_rank(pooled))
    bounds = {}
    offset = 0
    for k in labels:
        bounds[k] = (offset, offset + sizes[k])
        offset += sizes[k]
    a, b = pair
    (a0, a1), (b0, b1) = bounds[a], bounds[b]
    obs = abs(ranks[a0:a1].mean() - ranks[b0:b1].mean())
    rng = np.random.default_rng(seed)
    mat = np.tile(ranks, (n_samples, 1))
    mat = rng.permuted(mat, axis=1)
    gaps = np.abs(mat[:, a0:a1].mean(axis=1) - mat[:, b0:b1].mean(axis=1))
    above = float(np.sum(gaps > obs + 1e-9))
    at = float(np.sum(np.abs(gaps - obs) <= 1e-9))
    return _tail_share(above, at, n_samples, mid)


def chi_square_sf_quadrature(x: float, dof: int, n_steps: int = 20000) -> float:
    """Upper tail by Simpson integration of the chi-square density.

    Substituting u = v*v removes the density's endpoint singularity at
    dof = 1, so the integrand is smooth and Simpson converges fast.
    """
    if x <= 0:
        return 1.0
    a = dof / 2.0
    log_norm = -a * math.log(2.0) - math.lgamma(a)
    if n_steps % 2:
        n_steps += 1

    v = np.linspace(0.0, math.sqrt(x), n_steps + 1)
    vals = np.zeros_like(v)
    pos = v > 0
    vals[pos] = 2.0 * np.exp(log_norm + (2 * a - 1) * np.log(v[pos])
                             - v[pos] ** 2 / 2.0)
    if dof == 1:
        vals[0] = 2.0 * math.exp(log_norm)
    h = v[1] - v[0]
    lower = (h / 3.0) * (vals[0] + vals[-1] + 4.0 * vals[1:-1:2].sum()
                         + 2.0 * vals[2:-1:2].sum())
    return max(0.0, 1.0 - float(lower))
