import math

import numpy as np
import pytest

from reconsume import oracles
from reconsume.metrics import (dcg_at_n, ndcg_at_n, novel_only_view,
                               precision_at_n, recall_at_n)


def test_weighted_recall():
    # item a consumed twice, b once; a is retrieved, b is not: 2 of 3
    assert recall_at_n({"a": 2, "b": 1}, ["a", "c"], 2) == pytest.approx(2 / 3)
    assert recall_at_n({"a": 2, "b": 1}, ["b", "a"], 2) == 1.0
    assert recall_at_n({"a": 1}, ["x", "y"], 2) == 0.0


def test_recall_truncates_before_matching():
    assert recall_at_n({"a": 1}, ["x", "a"], 1) == 0.0
    assert recall_at_n({"a": 1}, ["x", "a"], 2) == 1.0


def test_set_precision():
    assert precision_at_n({"a": 3, "b": 1}, ["a", "c"], 2) == 0.5
    # denominator is the list length, so one test item caps precision@5
    assert precision_at_n({"a": 1}, ["a", "b", "c", "d", "e"], 5) == 0.2
    assert precision_at_n({"a": 1}, ["a"], 5) == 0.2


def test_ndcg_linear_gain():
    # DCG = 2/log2(2); IDCG = 2/log2(2) + 1/log2(3)
    want = 2.0 / (2.0 + 1.0 / math.log2(3))
    assert ndcg_at_n({"a": 2, "b": 1}, ["a", "c"], 2) == pytest.approx(
        want, abs=1e-12)
    assert round(want, 4) == 0.7602


def test_ndcg_rank_discount():
    assert ndcg_at_n({"a": 1}, ["x", "a"], 2) == pytest.approx(
        1.0 / math.log2(3), abs=1e-12)
    assert round(1.0 / math.log2(3), 4) == 0.6309


def test_ndcg_perfect_and_empty_list():
    assert ndcg_at_n({"a": 2, "b": 1}, ["a", "b"], 2) == 1.0
    assert ndcg_at_n({"a": 1}, [], 3) == 0.0


def test_ndcg_exponential_gain():
    # gains 2^c - 1 reward the heavy item more
    lin = ndcg_at_n({"a": 3, "b": 1}, ["b", "a"], 2, "linear")
    exp = ndcg_at_n({"a": 3, "b": 1}, ["b", "a"], 2, "exp")
    want = (1.0 + 7.0 / math.log2(3)) / (7.0 + 1.0 / math.log2(3))
    assert exp == pytest.approx(want, abs=1e-12)
    assert exp < lin
    with pytest.raises(ValueError):
        ndcg_at_n({"a": 1}, ["a"], 1, "cubic")


def test_idcg_truncates_at_n():
    # the ideal list is cut to length n before discounting
    full = dcg_at_n({"a": 3, "b": 2, "c": 1}, ["a", "b", "c"], 3)
    got = ndcg_at_n({"a": 3, "b": 2, "c": 1}, ["a", "b"], 2)
    ideal2 = dcg_at_n({"a": 3, "b": 2, "c": 1}, ["a", "b"], 2)
    assert got == pytest.approx(ideal2 / ideal2)
    assert full > ideal2


def test_metric_input_validation():
    for fn in (recall_at_n, precision_at_n, ndcg_at_n):
        with pytest.raises(ValueError):
            fn({"a": 1}, ["a"], 0)
        with pytest.raises(ValueError):
            fn({}, ["a"], 1)


def test_novel_only_view():
    ranked, test = novel_only_view(["a", "b", "c"], {"a"}, {"b": 1}, 2)
    assert ranked == ("b", "c")
    assert test == {"b": 1}
    # filtering happens before truncation, never after
    ranked, _ = novel_only_view(["a", "b", "c", "d"], {"a", "b"}, {"c": 1}, 2)
    assert ranked == ("c", "d")
    # a fully-seen test day leaves nothing to score
    ranked, test = novel_only_view(["a", "b"], {"a", "b"}, {"a": 2}, 2)
    assert ranked == () and test == {}


def test_matches_oracle_on_random_instances():
    rng = np.random.default_rng(3)
    items = [f"x{i}" for i in range(6)]
    for _ in range(120):
        ranked = [items[i] for i in rng.permutation(len(items))]
        chosen = rng.choice(len(items), size=int(rng.integers(1, 5)),
                            replace=False)
        test = {items[i]: int(rng.integers(1, 4)) for i in chosen}
        n = int(rng.integers(1, 4))
        assert recall_at_n(test, ranked, n) == pytest.approx(
            oracles.recall(test, ranked, n), abs=1e-12)
        assert precision_at_n(test, ranked, n) == pytest.approx(
            oracles.precision(test, ranked, n), abs=1e-12)
        for gain in ("linear", "exp"):
            assert ndcg_at_n(test, ranked, n, gain) == pytest.approx(
                oracles.ndcg(test, ranked, n, gain), abs=1e-12)
