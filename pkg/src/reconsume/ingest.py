"""Event-log parsing, cleaning, and degree-based filtering.

The on-disk format is delimited text (comma or tab, auto-detected from the
header) with one consumption event per row:

    user_id,date,meal,item_id[,description,calories,portion]

Dates are ISO ``YYYY-MM-DD``.  Day indices are assigned relative to the
earliest date present, so a log spanning 2014-10-12 .. 2015-03-14 yields
day indices 0 .. 153 with gaps preserved.
"""

from __future__ import annotations

import io
import os
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import date, timedelta
from functools import cached_property
from typing import Iterable, Mapping

MEALS = ("breakfast", "lunch", "dinner", "snack", "other")
PREDICTION_MEALS = frozenset(("breakfast", "lunch", "dinner", "snack"))

GENDERS = ("female", "male", "unknown")
AGE_GROUPS = ("18-44", "45+", "unknown")
REGIONS = ("NE", "MW", "S", "W", "other", "unknown")

_EVENT_COLUMNS = ("user_id", "date", "meal", "item_id")
_OPTIONAL_COLUMNS = ("description", "calories", "portion")


class ParseError(ValueError):
    """Malformed input row; carries the 1-based row number."""

    def __init__(self, row_number: int, message: str):
        super().__init__(f"row {row_number}: {message}")
        self.row_number = row_number


@dataclass(frozen=True, slots=True)
class ConsumptionEvent:
    """One diary row: a user consumed one item at one meal on one day."""

    user_id: str
    day_index: int
    calendar_date: date
    meal: str
    item_id: str
    description: str | None = None
    calories: float | None = None
    portion: float | None = None


@dataclass(frozen=True, slots=True)
class UserProfile:
    user_id: str
    gender: str = "unknown"
    age_group: str = "unknown"
    region: str = "unknown"


class EventLog:
    """Immutable collection of events with lazily built indexes.

    Events are stored in input order.  All derived views (per-user
    sequences, item universe, day range) are computed once and cached;
    the restriction helpers return new ``EventLog`` instances and never
    mutate the receiver.
    """

    def __init__(self, events: Iterable[ConsumptionEvent]):
        self.events: tuple[ConsumptionEvent, ...] = tuple(events)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    @cached_property
    def users(self) -> tuple[str, ...]:
        return tuple(sorted({e.user_id for e in self.events}))

    @cached_property
    def item_universe(self) -> frozenset[str]:
        return frozenset(e.item_id for e in self.events)

    @cached_property
    def day_range(self) -> tuple[int, int] | None:
        """(min_day, max_day) over all events, or None when empty."""
        if not self.events:
            return None
        days = [e.day_index for e in self.events]
        return min(days), max(days)

    @cached_property
    def epoch_date(self) -> date | None:
        """Calendar date corresponding to day index 0, or None when empty."""
        if not self.events:
            return None
        e = min(self.events, key=lambda ev: ev.day_index)
        return e.calendar_date - timedelta(days=e.day_index)

    @cached_property
    def by_day(self) -> Mapping[int, tuple[ConsumptionEvent, ...]]:
        acc: dict[int, list[ConsumptionEvent]] = defaultdict(list)
        for e in self.events:
            acc[e.day_index].append(e)
        return {d: tuple(evs) for d, evs in acc.items()}

    @cached_property
    def by_user(self) -> Mapping[str, tuple[ConsumptionEvent, ...]]:
        acc: dict[str, list[ConsumptionEvent]] = defaultdict(list)
        for e in self.events:
            acc[e.user_id].append(e)
        return {u: tuple(sorted(evs, key=lambda ev: ev.day_index)) for u, evs in acc.items()}

    def restrict(self, predicate) -> "EventLog":
        return EventLog(e for e in self.events if predicate(e))

    def restrict_days(self, lo: int, hi: int) -> "EventLog":
        """Events with lo <= day_index <= hi (inclusive bounds)."""
        return self.restrict(lambda e: lo <= e.day_index <= hi)

    def restrict_meal(self, meal: str) -> "EventLog":
        if meal not in MEALS:
            raise ValueError(f"unknown meal {meal!r}")
        return self.restrict(lambda e: e.meal == meal)

    def restrict_users(self, users) -> "EventLog":
        users = frozenset(users)
        return self.restrict(lambda e: e.user_id in users)

    def restrict_items(self, items) -> "EventLog":
        items = frozenset(items)
        return self.restrict(lambda e: e.item_id in items)

    def day_item_sets(self, user: str, meal: str | None = None,
                      day_range: tuple[int, int] | None = None) -> dict[int, frozenset[str]]:
        """Map day_index -> set of distinct items the user logged that day."""
        acc: dict[int, set[str]] = defaultdict(set)
        for e in self.by_user.get(user, ()):
            if meal is not None and e.meal != meal:
                continue
            if day_range is not None and not (day_range[0] <= e.day_index <= day_range[1]):
                continue
            acc[e.day_index].add(e.item_id)
        return {d: frozenset(s) for d, s in acc.items()}


def _normalize_meal(raw: str) -> str:
    m = raw.strip().lower()
    if m == "snacks":
        m = "snack"
    return m if m in MEALS else "other"


def _split_header(line: str) -> tuple[str, list[str]]:
    # tab wins when present; real descriptions may contain commas
    delim = "\t" if "\t" in line else ","
    return delim, [c.strip().lower() for c in line.split(delim)]


def _open_text(source):
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    return open(os.fspath(source), "r", encoding="utf-8")


def parse_events(source) -> EventLog:
    """Parse an event file (path or file object) into an EventLog.

    The delimiter is auto-detected from the header row.  Rows with an
    unparseable date, a wrong column count, or a non-numeric calories or
    portion field raise :class:`ParseError` with the offending 1-based
    row number.  Meal labels are lowercased; anything outside the known
    set maps to ``other``.  Empty input yields an empty log.
    """
    fh = _open_text(source)
    try:
        header_line = fh.readline()
        if not header_line.strip():
            return EventLog(())
        delim, cols = _split_header(header_line.rstrip("\n\r"))
        if tuple(cols[:4]) != _EVENT_COLUMNS:
            raise ParseError(1, f"unrecognized header {cols!r}")
        for extra in cols[4:]:
            if extra not in _OPTIONAL_COLUMNS:
                raise ParseError(1, f"unrecognized column {extra!r}")
        n_cols = len(cols)

        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n\r")
            if not line:
                continue
            parts = line.split(delim)
            if len(parts) != n_cols:
                raise ParseError(lineno, f"expected {n_cols} fields, got {len(parts)}")
            rec = dict(zip(cols, parts))
            try:
                d = date.fromisoformat(rec["date"].strip())
            except ValueError:
                raise ParseError(lineno, f"bad date {rec['date']!r}") from None
            desc = rec.get("description", "").strip() or None
            cal = _parse_optional_float(rec.get("calories", ""), lineno, "calories")
            por = _parse_optional_float(rec.get("portion", ""), lineno, "portion")
            rows.append((rec["user_id"].strip(), d, _normalize_meal(rec["meal"]),
                         rec["item_id"].strip(), desc, cal, por))
    finally:
        fh.close()

    if not rows:
        return EventLog(())
    origin = min(r[1] for r in rows)
    events = [
        ConsumptionEvent(
            user_id=u, day_index=(d - origin).days, calendar_date=d, meal=m,
            item_id=i, description=desc, calories=cal, portion=por,
        )
        for (u, d, m, i, desc, cal, por) in rows
    ]
    return EventLog(events)


def _parse_optional_float(raw: str, lineno: int, name: str) -> float | None:
    raw = raw.strip()
    if not raw:
        return None
    try:
        return float(raw)
    except ValueError:
        raise ParseError(lineno, f"bad {name} {raw!r}") from None


def write_events(log: EventLog, target, delimiter: str = ",") -> None:
    """Serialize a log in the same format :func:`parse_events` consumes."""
    own = not hasattr(target, "write")
    fh = open(os.fspath(target), "w", encoding="utf-8") if own else target
    try:
        cols = _EVENT_COLUMNS + _OPTIONAL_COLUMNS
        fh.write(delimiter.join(cols) + "\n")
        for e in log.events:
            fields = (
                e.user_id, e.calendar_date.isoformat(), e.meal, e.item_id,
                e.description or "",
                "" if e.calories is None else f"{e.calories:.10g}",
                "" if e.portion is None else f"{e.portion:.10g}",
            )
            fh.write(delimiter.join(fields) + "\n")
    finally:
        if own:
            fh.close()


def parse_profiles(source) -> dict[str, UserProfile]:
    """Parse a profile file: ``user_id,gender,age_group,region``.

    Unknown or empty attribute values normalize to ``unknown``.  A
    duplicated user_id raises :class:`ParseError`.
    """
    fh = _open_text(source)
    try:
        header_line = fh.readline()
        if not header_line.strip():
            return {}
        delim, cols = _split_header(header_line.rstrip("\n\r"))
        if cols != ["user_id", "gender", "age_group", "region"]:
            raise ParseError(1, f"unrecognized profile header {cols!r}")
        out: dict[str, UserProfile] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n\r")
            if not line:
                continue
            parts = line.split(delim)
            if len(parts) != 4:
                raise ParseError(lineno, f"expected 4 fields, got {len(parts)}")
            uid = parts[0].strip()
            if uid in out:
                raise ParseError(lineno, f"duplicate profile for user {uid!r}")
            out[uid] = UserProfile(
                user_id=uid,
                gender=_normalize_label(parts[1], {"female": "female", "f": "female",
                                                  "male": "male", "m": "male"}),
                age_group=_normalize_label(parts[2], {g: g for g in AGE_GROUPS}),
                region=_normalize_label(parts[3], {r.lower(): r for r in REGIONS}),
            )
        return out
    finally:
        fh.close()


def _normalize_label(raw: str, table: Mapping[str, str]) -> str:
    return table.get(raw.strip().lower(), "unknown")


@dataclass(frozen=True)
class CleaningConfig:
    """Row-level cleaning thresholds.

    ``max_calories`` drops implausible entries, ``description_denylist``
    drops bulk/diagnostic entries by case-insensitive substring match,
    ``meal_allowlist`` restricts to meals the predictive pipeline uses,
    and the two minimum-degree fields parameterize the p-core filter.
    """

    max_calories: float = 3000.0
    drop_negative_portion: bool = True
    description_denylist: tuple[str, ...] = ("quick add calories",)
    meal_allowlist: frozenset[str] = PREDICTION_MEALS
    item_min_users: int = 6
    user_min_items: int = 20

    def __post_init__(self):
        if self.max_calories <= 0:
            raise ValueError("max_calories must be positive")
        if self.item_min_users < 1 or self.user_min_items < 1:
            raise ValueError("degree thresholds must be >= 1")
        for m in self.meal_allowlist:
            if m not in MEALS:
                raise ValueError(f"unknown meal in allowlist: {m!r}")


@dataclass
class CleaningReport:
    """Per-rule removal counts from one :func:`clean` pass."""

    n_input: int = 0
    n_negative_portion: int = 0
    n_over_calories: int = 0
    n_denylisted: int = 0
    n_meal_excluded: int = 0
    n_kept: int = 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.__dict__)


def clean(log: EventLog, cfg: CleaningConfig | None = None) -> tuple[EventLog, CleaningReport]:
    """Apply row-level cleaning rules in a fixed order.

    Order per event: negative portion, calorie ceiling, description
    denylist, meal allowlist.  Each dropped event is attributed to the
    first rule that rejects it.  Events with missing calories or portion
    pass those checks.
    """
    cfg = cfg or CleaningConfig()
    deny = tuple(s.lower() for s in cfg.description_denylist)
    report = CleaningReport(n_input=len(log))
    kept = []
    for e in log.events:
        if cfg.drop_negative_portion and e.portion is not None and e.portion < 0:
            report.n_negative_portion += 1
            continue
        if e.calories is not None and e.calories > cfg.max_calories:
            report.n_over_calories += 1
            continue
        if e.description is not None:
            d = e.description.lower()
            if any(s in d for s in deny):
                report.n_denylisted += 1
                continue
        if e.meal not in cfg.meal_allowlist:
            report.n_meal_excluded += 1
            continue
        kept.append(e)
    report.n_kept = len(kept)
    return EventLog(kept), report


def p_core_filter(log: EventLog, item_min_users: int = 6,
                  user_min_items: int = 20) -> EventLog:
    """Iteratively prune sparse items then sparse users to a fixpoint.

    Each pass first drops items consumed by fewer than ``item_min_users``
    distinct users, then drops users with fewer than ``user_min_items``
    distinct remaining items; passes repeat until nothing changes.  The
    result is a maximal sublog in which every surviving item and user
    meets its threshold.  Running the filter on its own output is a
    no-op.
    """
    if item_min_users < 1 or user_min_items < 1:
        raise ValueError("degree thresholds must be >= 1")
    events = list(log.events)
    while True:
        item_users: dict[str, set[str]] = defaultdict(set)
        for e in events:
            item_users[e.item_id].add(e.user_id)
        good_items = {i for i, us in item_users.items() if len(us) >= item_min_users}
        after_items = [e for e in events if e.item_id in good_items]

        user_items: dict[str, set[str]] = defaultdict(set)
        for e in after_items:
            user_items[e.user_id].add(e.item_id)
        good_users = {u for u, its in user_items.items() if len(its) >= user_min_items}
        after_users = [e for e in after_items if e.user_id in good_users]

        if len(after_users) == len(events):
            return EventLog(after_users)
        events = after_users
