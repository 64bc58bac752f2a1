import math

import numpy as np
import pytest

from conftest import build_log, merge_logs
from reconsume import models
from reconsume.models import (CountStats, MixtureParams, build_counts,
                              dump_model, em_fit, global_score, load_model,
                              mixture_score, personal_score, rank_items,
                              theta_individual, theta_population, top_n,
                              tune_lambda)


def counts_from_rows(rows, items, lam=1.0, t_anchor=0, normalization="raw"):
    """Hand-assemble a CountStats from {user: {item: weight}} rows."""
    users = tuple(sorted(rows))
    items = tuple(sorted(items))
    icode = {x: i for i, x in enumerate(items)}
    indptr = [0]
    codes: list[int] = []
    weights: list[float] = []
    for u in users:
        for it in sorted(rows[u], key=lambda x: icode[x]):
            codes.append(icode[it])
            weights.append(float(rows[u][it]))
        indptr.append(len(codes))
    weights_arr = np.array(weights, dtype=np.float64)
    item_totals = np.zeros(len(items))
    np.add.at(item_totals, codes, weights_arr)
    user_totals = np.array([sum(rows[u].values()) for u in users], dtype=np.float64)
    return CountStats(users=users, items=items,
                      indptr=np.array(indptr, dtype=np.int64),
                      item_codes=np.array(codes, dtype=np.int64),
                      weights=weights_arr, user_totals=user_totals,
                      item_totals=item_totals,
                      grand_total=float(item_totals.sum()), lam=lam,
                      t_anchor=t_anchor, normalization=normalization)


def test_build_counts_plain():
    log = merge_logs(build_log({1: {"a", "b"}, 2: {"a"}}, user="u1"),
                     build_log({1: {"b"}}, user="u2"))
    counts = build_counts(log)
    assert counts.users == ("u1", "u2")
    assert counts.items == ("a", "b")
    codes, w = counts.row("u1")
    assert list(codes) == [0, 1] and list(w) == [2.0, 1.0]
    assert counts.grand_total == 4.0
    assert counts.t_anchor == 1


def test_build_counts_decay():
    # one unit on day 1, two on day 3, decayed to anchor day 3 at 0.5/day
    events = build_log({1: {"a"}}, user="u1").events + \
        build_log({3: {"a"}}, user="u1").events * 2
    counts = build_counts(events, lam=0.5, t_anchor=2)
    _, w = counts.row("u1")
    assert w[0] == pytest.approx(1 * 0.5 ** 2 + 2 * 1.0, abs=1e-15)
    assert w[0] == 2.25


def test_build_counts_decay_anchor_defaults_to_last_day():
    events = build_log({1: {"a"}, 3: {"a"}}, user="u1").events
    counts = build_counts(events, lam=0.5)
    assert counts.t_anchor == 2
    _, w = counts.row("u1")
    assert w[0] == pytest.approx(1.25)


def test_build_counts_l1_normalization():
    rows = build_log({1: {"a"}, 2: {"a"}, 3: {"a", "b"}}, user="u1").events
    counts = build_counts(rows, normalization="l1_per_user")
    _, w = counts.row("u1")
    assert list(w) == [0.75, 0.25]
    assert counts.user_totals[0] == 1.0
    assert counts.grand_total == pytest.approx(1.0)


def test_build_counts_validation():
    events = build_log({1: {"a"}}, user="u1").events
    with pytest.raises(ValueError):
        build_counts(events, lam=0.0)
    with pytest.raises(ValueError):
        build_counts(events, lam=1.2)
    with pytest.raises(ValueError):
        build_counts(events, normalization="l2")
    with pytest.raises(ValueError):
        build_counts(events, day_range=(5, 9))


def test_theta_individual():
    counts = counts_from_rows({"u1": {"a": 3, "b": 2}}, ["a", "b"])
    assert list(theta_individual(counts, "u1")) == [0.6, 0.4]


def test_theta_individual_empty_history_is_uniform():
    counts = counts_from_rows({"u0": {"a": 1}, "u1": {}}, ["a", "b"])
    assert list(theta_individual(counts, "u1")) == [0.5, 0.5]
    with pytest.raises(KeyError):
        theta_individual(counts, "nobody")


def test_theta_population_smoothing():
    counts = counts_from_rows({"u1": {"a": 3, "b": 1}}, ["a", "b"])
    assert list(theta_population(counts)) == [4 / 6, 2 / 6]


def test_theta_population_no_consumption():
    counts = counts_from_rows({"u1": {}}, ["a", "b", "c", "d"])
    assert list(theta_population(counts)) == [0.25] * 4


def test_mixture_score_blend():
    counts = counts_from_rows({"u1": {"a": 1}, "u2": {"b": 1}}, ["a", "b"])
    assert list(theta_population(counts)) == [0.5, 0.5]
    params = MixtureParams(pi={"u1": 0.5}, em_iterations={}, converged={})
    assert list(mixture_score(counts, params, "u1")) == [0.75, 0.25]
    with pytest.raises(KeyError):
        mixture_score(counts, params, "u2")


def test_personal_and_global_score():
    counts = counts_from_rows({"u1": {"a": 3, "b": 1}, "u2": {"b": 1}},
                              ["a", "b"])
    assert list(personal_score(counts, "u1")) == [3.0, 1.0]
    assert list(personal_score(counts, "u2")) == [0.0, 1.0]
    assert list(global_score(counts)) == [3.0, 2.0]
    # smoothing shifts every item equally, so the ranking agrees
    assert rank_items(global_score(counts), counts.items) == \
        rank_items(theta_population(counts), counts.items)


EM_ITEMS = ["a", "b"] + [f"pad{i:02d}" for i in range(13)]


def test_em_single_step():
    # theta_I(a) = 0.6 and theta_P(a) = (3+1)/(5+15) = 0.2: starting from
    # one half, the responsibility is 0.6/0.8 and the new weight 0.75
    counts = counts_from_rows({"u1": {"a": 3, "b": 2}}, EM_ITEMS)
    assert theta_population(counts)[0] == pytest.approx(0.2)
    params = em_fit(counts, {"u1": {"a": 1}}, max_iter=1)
    assert params.pi["u1"] == pytest.approx(0.75, abs=1e-12)
    assert params.em_iterations["u1"] == 1
    assert not params.converged["u1"]


def test_em_converges_to_exploit_corner():
    counts = counts_from_rows({"u1": {"a": 3, "b": 2}}, EM_ITEMS)
    params = em_fit(counts, {"u1": {"a": 1}})
    assert params.converged["u1"]
    assert params.pi["u1"] > 0.999


def test_em_all_novel_goes_to_explore_corner():
    counts = counts_from_rows({"u1": {"a": 3}, "u2": {"b": 1}}, ["a", "b"])
    params = em_fit(counts, {"u1": {"b": 2}})
    assert params.pi["u1"] == pytest.approx(models.EM_EPS)


def test_em_trace_non_decreasing():
    counts = counts_from_rows({"u1": {"a": 5, "b": 1}, "u2": {"b": 4}},
                              ["a", "b", "c"])
    params = em_fit(counts, {"u1": {"a": 2, "c": 1}, "u2": {"b": 1}},
                    keep_trace=True)
    for user, trace in params.ll_trace.items():
        diffs = np.diff(trace)
        assert np.all(diffs >= -1e-9), user


def test_em_skips_users_without_usable_heldout():
    counts = counts_from_rows({"u1": {"a": 1}}, ["a"])
    params = em_fit(counts, {"u1": {"zzz": 1}, "ghost": {"a": 1}},
                    init_pi=0.4)
    assert params.pi["u1"] == pytest.approx(0.4)
    assert params.pi["ghost"] == pytest.approx(0.4)
    assert params.em_iterations["u1"] == 0
    assert not params.converged["ghost"]


def test_em_validation():
    counts = counts_from_rows({"u1": {"a": 1}}, ["a"])
    with pytest.raises(ValueError):
        em_fit(counts, {}, init_pi=0.0)
    with pytest.raises(ValueError):
        em_fit(counts, {}, max_iter=0)


def test_rank_items_breaks_ties_by_id():
    # items arrive id-sorted, so position doubles as the tiebreak
    order = rank_items(np.array([0.5, 0.2, 0.5]), ["a", "b", "c"])
    assert [("a", "b", "c")[i] for i in order] == ["a", "c", "b"]
    with pytest.raises(ValueError):
        rank_items(np.array([0.5]), ["a", "b"])


def test_top_n():
    scored = top_n(np.array([0.1, 0.9, 0.5]), ["a", "b", "c"], 2, user="u1")
    assert scored.item_ids == ("b", "c")
    assert scored.ranked_items[0] == ("b", 0.9)
    assert scored.user == "u1"
    assert scored.n == 2
    # n beyond the universe just returns everything
    assert top_n(np.array([0.1]), ["a"], 5).item_ids == ("a",)
    with pytest.raises(ValueError):
        top_n(np.array([0.1]), ["a"], 0)


def test_tune_lambda_trivial_grid():
    log = build_log({t: {"a"} for t in range(1, 6)}, user="u1")
    lam, trace = tune_lambda(log.events, {"u1": {"a": 1}}, grid=[1.0])
    assert lam == 1.0
    assert len(trace) == 1 and trace[0][0] == 1.0


def test_tune_lambda_flat_objective_prefers_no_decay():
    # a stationary one-item diet makes every decay equally good
    log = build_log({t: {"a"} for t in range(1, 8)}, user="u1")
    lam, trace = tune_lambda(log.events, {"u1": {"a": 1}},
                             grid=[0.2, 0.5, 1.0])
    assert lam == 1.0
    vals = [v for _, v in trace]
    assert max(vals) - min(vals) < 1e-12


def test_tune_lambda_validation():
    log = build_log({1: {"a"}}, user="u1")
    with pytest.raises(ValueError):
        tune_lambda(log.events, {"u1": {"a": 1}}, grid=[])
    with pytest.raises(ValueError):
        tune_lambda(log.events, {"u1": {"a": 1}}, objective="accuracy")


def test_dump_load_round_trip(tmp_path):
    params = MixtureParams(pi={"u1": 0.123456789, "u2": 1 - 1e-6},
                           em_iterations={"u1": 7, "u2": 100},
                           converged={"u1": True, "u2": False},
                           lam=0.85)
    path = tmp_path / "model.txt"
    dump_model(path, params)
    loaded, meta = load_model(path)
    assert loaded.lam == 0.85
    assert loaded.pi["u1"] == pytest.approx(0.123456789, abs=1e-9)
    assert loaded.pi["u2"] == pytest.approx(1 - 1e-6, abs=1e-12)
    assert loaded.em_iterations == params.em_iterations
    assert loaded.converged == params.converged


def test_load_model_rejects_other_formats(tmp_path):
    path = tmp_path / "model.txt"
    path.write_text("format = something-else\n")
    with pytest.raises(ValueError):
        load_model(path)
