"""Repeat-consumption fractions over per-day item sets.

The core quantity: for a user's day-indexed sequence of item sets, a
day's repeat fraction is the share of that day's items that occur on at
least two distinct days of a k-day window containing the day.  Windows
either start at the day (forward) or end at it (backward).  Day-level
fractions average into per-user values, then into population and group
values; empty days are skipped rather than counted as zero.

Anchor positions ``t`` are 1-based over the sequence.  A sequence built
from a log slice records ``start_day`` so anchors map back to absolute
day indices via ``day_index = start_day + t - 1``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import kernels
from .ingest import MEALS, EventLog, UserProfile

WEEKDAYS = ("monday", "tuesday", "wednesday", "thursday", "friday",
            "saturday", "sunday")
_WEEKEND = frozenset(("saturday", "sunday"))


@dataclass(frozen=True)
class WindowSpec:
    """Window length and orientation for repeat scans.

    ``k`` counts days including the anchor day; ``direction`` is
    ``forward`` (window [t, t+k)) or ``backward`` (window [t-k+1, t]).
    """

    k: int = 7
    direction: str = "forward"

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("window length k must be >= 2")
        if self.direction not in ("forward", "backward"):
            raise ValueError(f"direction must be forward or backward, got {self.direction!r}")

    @property
    def forward(self) -> bool:
        return self.direction == "forward"

    def anchors(self, n_days: int) -> range:
        """Valid 1-based anchor positions for a sequence of n_days days."""
        if self.forward:
            return range(1, n_days - self.k + 2)
        return range(self.k, n_days + 1)


@dataclass(frozen=True)
class ConsumptionSequence:
    """One user's day-by-day item sets over a contiguous day span.

    ``days[i]`` holds the items logged on position i+1 (possibly empty);
    the span covers every day between the first and last, so calendar
    gaps appear as empty sets.
    """

    user_id: str
    days: tuple[frozenset[str], ...]
    meal_scope: str = "all"
    start_day: int = 0

    @property
    def n_days(self) -> int:
        return len(self.days)

    def day_set(self, t: int) -> frozenset[str]:
        if not 1 <= t <= len(self.days):
            raise ValueError(f"day position {t} outside 1..{len(self.days)}")
        return self.days[t - 1]


def sequence_from_log(log: EventLog, user: str, meal: str | None = None,
                      day_range: tuple[int, int] | None = None) -> ConsumptionSequence:
    """Build a user's sequence from a log, optionally meal-scoped.

    The day span defaults to the log's full range so every user's
    sequence is aligned; pass ``day_range`` to narrow it.
    """
    if meal is not None and meal not in MEALS:
        raise ValueError(f"unknown meal {meal!r}")
    rng = day_range if day_range is not None else log.day_range
    if rng is None:
        return ConsumptionSequence(user, (), meal or "all", 0)
    lo, hi = rng
    sets = log.day_item_sets(user, meal=meal, day_range=(lo, hi))
    days = tuple(sets.get(d, frozenset()) for d in range(lo, hi + 1))
    return ConsumptionSequence(user, days, meal or "all", lo)


def _pack_days(day_sets: Sequence[frozenset[str]], vocab: dict[str, int]):
    ptr = np.zeros(len(day_sets) + 1, dtype=np.int64)
    flat: list[int] = []
    for i, s in enumerate(day_sets):
        flat.extend(sorted(vocab[x] for x in s))
        ptr[i + 1] = len(flat)
    return ptr, np.asarray(flat, dtype=np.int64)


def _vocab_of(*sequences: ConsumptionSequence) -> dict[str, int]:
    items: set[str] = set()
    for seq in sequences:
        for s in seq.days:
            items |= s
    return {x: i for i, x in enumerate(sorted(items))}


def _fractions_array(seq: ConsumptionSequence, spec: WindowSpec) -> np.ndarray:
    vocab = _vocab_of(seq)
    ptr, codes = _pack_days(seq.days, vocab)
    return kernels.day_repeat_fractions(ptr, codes, len(vocab), spec.k, spec.forward)


def _anchor_index(t: int, spec: WindowSpec) -> int:
    return t - 1 if spec.forward else t - spec.k


def window_days(t: int, spec: WindowSpec, n_days: int) -> range:
    """1-based day positions covered by the window anchored at t."""
    if t not in spec.anchors(n_days):
        raise ValueError(f"anchor {t} has no full {spec.k}-day {spec.direction} window "
                         f"in a {n_days}-day sequence")
    return range(t, t + spec.k) if spec.forward else range(t - spec.k + 1, t + 1)


def window_count(seq: ConsumptionSequence, t: int, item: str, spec: WindowSpec) -> int:
    """Number of window days on which the item appears."""
    days = window_days(t, spec, seq.n_days)
    return sum(1 for d in days if item in seq.days[d - 1])


def day_repeat_fraction(seq: ConsumptionSequence, t: int,
                        spec: WindowSpec) -> float | None:
    """Share of day-t items occurring on >= 2 window days; None if day t is empty."""
    window_days(t, spec, seq.n_days)  # bounds check
    vals = _fractions_array(seq, spec)
    v = vals[_anchor_index(t, spec)]
    return None if math.isnan(v) else float(v)


def day_repeat_fractions(seq: ConsumptionSequence, spec: WindowSpec) -> dict[int, float]:
    """All measurable anchors: map t -> fraction, empty days omitted."""
    vals = _fractions_array(seq, spec)
    anchors = spec.anchors(seq.n_days)
    return {t: float(v) for t, v in zip(anchors, vals) if not math.isnan(v)}


def user_repeat_fraction(seq: ConsumptionSequence, spec: WindowSpec) -> float:
    """Mean of the user's day fractions over measurable anchors."""
    vals = _fractions_array(seq, spec)
    # plain sequential sum, so the result is bit-identical to averaging
    # the day fractions one by one
    good = [float(v) for v in vals if not math.isnan(v)]
    if not good:
        raise ValueError(f"user {seq.user_id}: no measurable days")
    return sum(good) / len(good)


@dataclass(frozen=True)
class RepeatStats:
    """Day-level and user-level repeat fractions for one sequence."""

    user_id: str
    meal_scope: str
    spec: WindowSpec
    per_day: Mapping[int, float]
    overall: float | None
    start_day: int = 0
    window_counts: Mapping[tuple[int, str], int] | None = None

    @property
    def n_measurable(self) -> int:
        return len(self.per_day)


def compute_repeat_stats(seq: ConsumptionSequence, spec: WindowSpec,
                         keep_window_counts: bool = False) -> RepeatStats:
    per_day = day_repeat_fractions(seq, spec)
    overall = (sum(per_day.values()) / len(per_day)) if per_day else None
    counts = None
    if keep_window_counts:
        counts = {(t, item): window_count(seq, t, item, spec)
                  for t in spec.anchors(seq.n_days)
                  for item in sorted(seq.day_set(t))}
    return RepeatStats(seq.user_id, seq.meal_scope, spec, per_day, overall,
                       seq.start_day, counts)


def across_meal_daily(seq_a: ConsumptionSequence, seq_b: ConsumptionSequence,
                      spec: WindowSpec) -> dict[int, float]:
    """Per-anchor fraction of meal-a items reappearing in meal b's window.

    Anchor-day items come from ``seq_a``; an item counts as reappearing
    when meal b logs it on any window day (the anchor day included).
    Both sequences must be meal-scoped, distinct, and span-aligned.
    """
    if seq_a.meal_scope == "all" or seq_b.meal_scope == "all":
        raise ValueError("across-meal fractions need meal-scoped sequences")
    if seq_a.meal_scope == seq_b.meal_scope:
        raise ValueError("across-meal fractions need two distinct meals")
    if seq_a.n_days != seq_b.n_days or seq_a.start_day != seq_b.start_day:
        raise ValueError("sequences are not aligned on the same day span")
    vocab = _vocab_of(seq_a, seq_b)
    ptr_a, codes_a = _pack_days(seq_a.days, vocab)
    ptr_b, codes_b = _pack_days(seq_b.days, vocab)
    vals = kernels.across_repeat_fractions(ptr_a, codes_a, ptr_b, codes_b,
                                           len(vocab), spec.k, spec.forward)
    anchors = spec.anchors(seq_a.n_days)
    return {t: float(v) for t, v in zip(anchors, vals) if not math.isnan(v)}


def across_meal_fraction(seq_a: ConsumptionSequence, seq_b: ConsumptionSequence,
                         spec: WindowSpec) -> float:
    per_day = across_meal_daily(seq_a, seq_b, spec)
    if not per_day:
        raise ValueError(f"user {seq_a.user_id}: no measurable days")
    return sum(per_day.values()) / len(per_day)


def population_fraction(values: Iterable[float]) -> float:
    """Unweighted mean of per-user fractions."""
    vals = list(values)
    if not vals:
        raise ValueError("no users with measurable days")
    return sum(vals) / len(vals)


class GroupFraction(NamedTuple):
    mean: float
    values: tuple[float, ...]


def group_fractions(per_user: Mapping[str, float],
                    profiles: Mapping[str, UserProfile],
                    attribute: str) -> dict[str, GroupFraction]:
    """Per-group mean fraction plus the raw per-user values behind it.

    Users without a profile, or whose attribute is ``unknown``, are left
    out of every group rather than pooled into one; the raw vectors feed
    the rank tests downstream.
    """
    if attribute not in ("gender", "age_group", "region"):
        raise ValueError(f"unknown profile attribute {attribute!r}")
    buckets: dict[str, list[float]] = defaultdict(list)
    for user in sorted(per_user):
        prof = profiles.get(user)
        if prof is None:
            continue
        label = getattr(prof, attribute)
        if label == "unknown":
            continue
        buckets[label].append(per_user[user])
    return {g: GroupFraction(sum(vs) / len(vs), tuple(vs))
            for g, vs in sorted(buckets.items())}


def empirical_cdf(values: Iterable[float]) -> tuple[tuple[float, float], ...]:
    """(value, cumulative fraction) at each distinct sorted value."""
    vals = sorted(values)
    if not vals:
        raise ValueError("empirical_cdf of an empty sample")
    n = len(vals)
    out = []
    for i, v in enumerate(vals, start=1):
        if i == n or vals[i] != v:
            out.append((float(v), i / n))
    return tuple(out)


def calendar_weekdays(epoch: date, day_indices: Iterable[int]) -> dict[int, str]:
    """Map absolute day indices to lowercase weekday names, given day 0's date."""
    return {d: WEEKDAYS[(epoch + timedelta(days=d)).weekday()] for d in day_indices}


def weekday_partition(daily: Mapping[int, float],
                      calendar: Mapping[int, str]) -> dict[str, tuple[float, ...]]:
    """Partition a daily series into per-weekday value lists.

    Every day in the series must be covered by the calendar map; a
    missing day raises with the offending index in the message.  Values
    within a weekday keep day order.
    """
    buckets: dict[str, list[float]] = defaultdict(list)
    for d in sorted(daily):
        if d not in calendar:
            raise ValueError(f"day {d} missing from calendar map")
        buckets[calendar[d]].append(daily[d])
    return {w: tuple(vs) for w, vs in buckets.items()}


def weekday_weekend_partition(daily: Mapping[int, float],
                              calendar: Mapping[int, str]) -> dict[str, tuple[float, ...]]:
    """Two-way split of a daily series: weekday vs weekend value lists."""
    buckets: dict[str, list[float]] = defaultdict(list)
    for d in sorted(daily):
        if d not in calendar:
            raise ValueError(f"day {d} missing from calendar map")
        buckets["weekend" if calendar[d] in _WEEKEND else "weekday"].append(daily[d])
    return {k: tuple(vs) for k, vs in buckets.items()}


def population_user_fractions(log: EventLog, spec: WindowSpec,
                              meal: str | None = None) -> dict[str, float]:
    """Per-user overall fractions for every user with measurable days."""
    out: dict[str, float] = {}
    for user in log.users:
        stats = compute_repeat_stats(sequence_from_log(log, user, meal=meal), spec)
        if stats.overall is not None:
            out[user] = stats.overall
    return out


def population_daily_series(log: EventLog, spec: WindowSpec,
                            meal: str | None = None) -> dict[int, float]:
    """Population mean fraction per absolute day index.

    Averages each anchor's day fractions over the users measurable on
    that anchor; anchors with no measurable user are omitted.
    """
    buckets: dict[int, list[float]] = defaultdict(list)
    for user in log.users:
        seq = sequence_from_log(log, user, meal=meal)
        for t, v in day_repeat_fractions(seq, spec).items():
            buckets[seq.start_day + t - 1].append(v)
    return {d: sum(vs) / len(vs) for d, vs in sorted(buckets.items())}


def across_meal_matrix(log: EventLog, spec: WindowSpec,
                       meals: Sequence[str] = ("breakfast", "lunch", "dinner", "snack"),
                       ) -> dict[tuple[str, str], float]:
    """Population mean across-meal fraction for every ordered meal pair."""
    seqs: dict[tuple[str, str], ConsumptionSequence] = {}
    for user in log.users:
        for m in meals:
            seqs[user, m] = sequence_from_log(log, user, meal=m)
    out: dict[tuple[str, str], float] = {}
    for m_a in meals:
        for m_b in meals:
            if m_a == m_b:
                continue
            vals = []
            for user in log.users:
                try:
                    vals.append(across_meal_fraction(seqs[user, m_a], seqs[user, m_b], spec))
                except ValueError:
                    continue
            if vals:
                out[m_a, m_b] = sum(vals) / len(vals)
    return out
