"""Top-N ranking metrics against a day's consumption multiset.

Test data is a mapping item -> times consumed; recall and the nDCG gain
weight by those multiplicities while precision is set-based.  All
functions look only at the first n entries of the ranked list.
"""

from __future__ import annotations

import math
from typing import Mapping, Sequence


def _check(test_counts: Mapping[str, int], n: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    if not test_counts:
        raise ValueError("empty test set")


def recall_at_n(test_counts: Mapping[str, int], ranked: Sequence[str], n: int) -> float:
    """Consumption-weighted hit fraction: recommended units / total units."""
    _check(test_counts, n)
    top = set(ranked[:n])
    total = sum(test_counts.values())
    hit = sum(c for item, c in test_counts.items() if item in top)
    return hit / total


def precision_at_n(test_counts: Mapping[str, int], ranked: Sequence[str], n: int) -> float:
    """Fraction of the n recommendations that were consumed at all."""
    _check(test_counts, n)
    top = ranked[:n]
    return sum(1 for item in top if item in test_counts) / n


def _gain(count: int, kind: str) -> float:
    if kind == "linear":
        return float(count)
    if kind == "exp":
        return float(2 ** count - 1)
    raise ValueError(f"unknown gain {kind!r}")


def dcg_at_n(test_counts: Mapping[str, int], ranked: Sequence[str], n: int,
             gain: str = "linear") -> float:
    total = 0.0
    for r, item in enumerate(ranked[:n], start=1):
        g = _gain(test_counts.get(item, 0), gain)
        if g:
            total += g / math.log2(r + 1)
    return total


def ndcg_at_n(test_counts: Mapping[str, int], ranked: Sequence[str], n: int,
              gain: str = "linear") -> float:
    """DCG normalized by the best ordering of the test items.

    The ideal list sorts test items by count descending (ties by item id
    ascending) and truncates at n, so a perfect prefix scores 1.
    """
    _check(test_counts, n)
    ideal = sorted(test_counts, key=lambda item: (-test_counts[item], item))[:n]
    idcg = 0.0
    for r, item in enumerate(ideal, start=1):
        idcg += _gain(test_counts[item], gain) / math.log2(r + 1)
    if idcg == 0.0:
        return 0.0
    return dcg_at_n(test_counts, ranked, n, gain) / idcg


def novel_only_view(ranked: Sequence[str], history: frozenset[str] | set[str],
                    test_counts: Mapping[str, int], n: int,
                    ) -> tuple[tuple[str, ...], dict[str, int]]:
    """Restrict an evaluation to items absent from the user's history.

    Drops history items from the ranked list before truncating to n, and
    drops them from the test multiset.  The returned test mapping may be
    empty, in which case the caller should skip the user rather than
    score a zero.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    novel_ranked = tuple(item for item in ranked if item not in history)[:n]
    novel_test = {item: c for item, c in test_counts.items() if item not in history}
    return novel_ranked, novel_test
