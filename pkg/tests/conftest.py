"""Shared builders for the hand-sized logs the tests lean on."""

import datetime as dt

import pytest

from reconsume.ingest import ConsumptionEvent, EventLog

# day 0 of most fixtures; a Monday, so weekday math is easy to eyeball
MONDAY = dt.date(2014, 10, 13)


def build_log(day_items, meal="lunch", user="u1", epoch=MONDAY):
    """EventLog from {day position (1-based): iterable of items}.

    One event per (day, item); empty iterables leave calendar gaps.
    """
    events = []
    for t in sorted(day_items):
        for item in sorted(day_items[t]):
            events.append(ConsumptionEvent(
                user_id=user, day_index=t - 1,
                calendar_date=epoch + dt.timedelta(days=t - 1),
                meal=meal, item_id=item))
    return EventLog(events)


def merge_logs(*logs):
    events = []
    for lg in logs:
        events.extend(lg.events)
    return EventLog(events)


@pytest.fixture
def toy_log():
    # three days: {a,b}, {a,c}, {b,c}
    return build_log({1: {"a", "b"}, 2: {"a", "c"}, 3: {"b", "c"}})
