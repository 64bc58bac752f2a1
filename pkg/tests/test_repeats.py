import datetime as dt

import numpy as np
import pytest

from conftest import MONDAY, build_log, merge_logs
from reconsume import oracles, repeats
from reconsume.repeats import (ConsumptionSequence, WindowSpec,
                               across_meal_fraction, calendar_weekdays,
                               compute_repeat_stats, day_repeat_fraction,
                               day_repeat_fractions, empirical_cdf,
                               group_fractions, population_fraction,
                               sequence_from_log, user_repeat_fraction,
                               weekday_partition, weekday_weekend_partition,
                               window_count)
from reconsume.ingest import UserProfile

K2 = WindowSpec(k=2, direction="forward")


@pytest.fixture
def toy_seq(toy_log):
    return sequence_from_log(toy_log, "u1")


def test_window_spec_validation():
    with pytest.raises(ValueError):
        WindowSpec(k=1)
    with pytest.raises(ValueError):
        WindowSpec(k=2, direction="sideways")


def test_window_count_toy(toy_seq):
    # item a on days 1 and 2; window [1, 3) covers both
    assert window_count(toy_seq, 1, "a", K2) == 2
    assert window_count(toy_seq, 1, "b", K2) == 1
    assert window_count(toy_seq, 2, "c", K2) == 2


def test_window_count_needs_full_window(toy_seq):
    with pytest.raises(ValueError):
        window_count(toy_seq, 3, "b", K2)
    back = WindowSpec(k=2, direction="backward")
    with pytest.raises(ValueError):
        window_count(toy_seq, 1, "b", back)
    assert window_count(toy_seq, 3, "b", back) == 1


def test_day_fractions_toy(toy_seq):
    assert day_repeat_fraction(toy_seq, 1, K2) == 0.5
    assert day_repeat_fraction(toy_seq, 2, K2) == 0.5
    assert day_repeat_fractions(toy_seq, K2) == {1: 0.5, 2: 0.5}
    assert user_repeat_fraction(toy_seq, K2) == 0.5


def test_backward_direction_mirrors():
    seq = ConsumptionSequence("u", (frozenset("ab"), frozenset("a")))
    back = WindowSpec(k=2, direction="backward")
    # anchor day 2: a seen on both window days {1, 2}
    assert day_repeat_fractions(seq, back) == {2: 1.0}
    fwd = day_repeat_fractions(seq, K2)
    assert fwd == {1: 0.5}


def test_empty_day_not_measurable():
    seq = ConsumptionSequence("u", (frozenset("a"), frozenset(), frozenset("a")))
    spec = WindowSpec(k=3)
    assert day_repeat_fraction(seq, 1, spec) == 1.0
    fractions = day_repeat_fractions(seq, WindowSpec(k=2))
    assert fractions == {1: 0.0}
    with pytest.raises(ValueError):
        user_repeat_fraction(ConsumptionSequence("u", (frozenset(),) * 3),
                             WindowSpec(k=2))


def test_compute_repeat_stats(toy_seq):
    st = compute_repeat_stats(toy_seq, K2, keep_window_counts=True)
    assert st.overall == 0.5
    assert st.n_measurable == 2
    assert st.window_counts[(1, "a")] == 2
    assert st.window_counts[(2, "c")] == 2
    assert (3, "b") not in st.window_counts
    assert compute_repeat_stats(toy_seq, K2).window_counts is None


def test_sequence_from_log_alignment():
    log = merge_logs(build_log({1: {"a"}}, user="u1"),
                     build_log({3: {"b"}}, user="u2"))
    seq = sequence_from_log(log, "u1")
    # spans the whole log, so u1 gets trailing empty days
    assert seq.n_days == 3
    assert seq.day_set(1) == frozenset("a")
    assert seq.day_set(3) == frozenset()
    narrowed = sequence_from_log(log, "u1", day_range=(0, 0))
    assert narrowed.n_days == 1


def test_across_meal_fraction():
    lunch = build_log({1: {"a"}, 2: set()}, meal="lunch")
    dinner = build_log({1: {"a"}, 2: {"a"}}, meal="dinner")
    log = merge_logs(lunch, dinner)
    seq_l = sequence_from_log(log, "u1", meal="lunch")
    seq_d = sequence_from_log(log, "u1", meal="dinner")
    assert across_meal_fraction(seq_l, seq_d, K2) == 1.0
    # asymmetric: dinner-anchored checks lunch's window instead
    assert across_meal_fraction(seq_d, seq_l, K2) == 1.0
    assert seq_d.day_set(2) == frozenset("a")


def test_across_meal_validation(toy_log):
    seq = sequence_from_log(toy_log, "u1")
    scoped = sequence_from_log(toy_log, "u1", meal="lunch")
    with pytest.raises(ValueError):
        across_meal_fraction(seq, scoped, K2)
    with pytest.raises(ValueError):
        across_meal_fraction(scoped, scoped, K2)


def test_population_fraction():
    assert population_fraction([0.2, 0.4]) == pytest.approx(0.3)
    with pytest.raises(ValueError):
        population_fraction([])


def test_group_fractions():
    per_user = {"u1": 0.2, "u2": 0.4, "u3": 0.8, "u4": 0.9, "u5": 0.1}
    profiles = {"u1": UserProfile("u1", gender="female"),
                "u2": UserProfile("u2", gender="female"),
                "u3": UserProfile("u3", gender="male"),
                "u4": UserProfile("u4")}
    out = group_fractions(per_user, profiles, "gender")
    assert out["female"].mean == pytest.approx(0.3)
    assert out["female"].values == (0.2, 0.4)
    assert out["male"] == (0.8, (0.8,))
    # u4 is unknown, u5 unprofiled: both excluded
    assert set(out) == {"female", "male"}
    with pytest.raises(ValueError):
        group_fractions(per_user, profiles, "height")


def test_empirical_cdf():
    assert empirical_cdf([0.4, 0.2, 1.0, 0.4]) == (
        (0.2, 0.25), (0.4, 0.75), (1.0, 1.0))
    assert empirical_cdf([0.5]) == ((0.5, 1.0),)
    with pytest.raises(ValueError):
        empirical_cdf([])


def test_weekday_partition_one_week():
    daily = {d: float(d) for d in range(7)}
    calendar = calendar_weekdays(MONDAY, daily)
    out = weekday_partition(daily, calendar)
    assert set(out) == set(repeats.WEEKDAYS)
    assert all(len(v) == 1 for v in out.values())
    assert out["monday"] == (0.0,)
    assert out["sunday"] == (6.0,)


def test_weekday_partition_two_weeks():
    daily = {d: float(d) for d in range(14)}
    calendar = calendar_weekdays(MONDAY, daily)
    out = weekday_partition(daily, calendar)
    assert all(len(v) == 2 for v in out.values())
    assert out["tuesday"] == (1.0, 8.0)
    two_way = weekday_weekend_partition(daily, calendar)
    assert sorted(two_way["weekend"]) == [5.0, 6.0, 12.0, 13.0]
    assert len(two_way["weekday"]) == 10


def test_weekday_partition_missing_day():
    daily = {0: 0.1, 9: 0.2}
    calendar = calendar_weekdays(MONDAY, [0])
    with pytest.raises(ValueError, match="day 9"):
        weekday_partition(daily, calendar)
    with pytest.raises(ValueError, match="day 9"):
        weekday_weekend_partition(daily, calendar)


def test_calendar_weekdays():
    assert calendar_weekdays(dt.date(2014, 10, 12), [0, 1]) == {
        0: "sunday", 1: "monday"}


def test_population_helpers(toy_log):
    fractions = repeats.population_user_fractions(toy_log, K2)
    assert fractions == {"u1": 0.5}
    daily = repeats.population_daily_series(toy_log, K2)
    assert daily == {0: 0.5, 1: 0.5}


def test_across_meal_matrix():
    log = merge_logs(build_log({1: {"a"}, 2: {"b"}}, meal="lunch"),
                     build_log({1: {"a"}, 2: {"a"}}, meal="dinner"))
    matrix = repeats.across_meal_matrix(log, K2)
    assert matrix[("lunch", "dinner")] == 1.0
    assert ("lunch", "lunch") not in matrix


def test_matches_oracle_on_random_sequences():
    rng = np.random.default_rng(11)
    items = [f"x{i}" for i in range(8)]
    for trial in range(60):
        n_days = int(rng.integers(3, 10))
        days = tuple(frozenset(rng.choice(items,
                                          size=rng.integers(0, 5),
                                          replace=False))
                     for _ in range(n_days))
        seq = ConsumptionSequence("u", days)
        for k in (2, 3):
            if k > n_days:
                continue
            for direction in ("forward", "backward"):
                spec = WindowSpec(k=k, direction=direction)
                got = day_repeat_fractions(seq, spec)
                want = {}
                for t in spec.anchors(n_days):
                    v = oracles.day_repeat_fraction(days, t, k, direction)
                    if v is not None:
                        want[t] = v
                assert got == want, (trial, k, direction)
