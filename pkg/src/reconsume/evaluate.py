"""Sliding-window next-day evaluation protocol.

The log is cut into overlapping sessions, one per candidate test day:
a 9-day session uses days [t-8, t-2] for training counts, day t-1 as
the held-out day that fits each user's mixing weight, and day t as the
test day.  Sessions advance one day at a time, so a 154-day log yields
146 of them.  Users are scored in a session only when they appear in
both the training span and the held-out day; test items never seen in
training are removed before scoring.

Metric records carry user and session identity plus profile context, so
population numbers (two-stage: users within a session, then across
sessions) and grouped comparisons both come from the same rows.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from datetime import timedelta
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import metrics as _metrics
from . import models, stats
from .ingest import EventLog, UserProfile
from .repeats import WEEKDAYS

KNOWN_METHODS = ("global", "personal", "mixture", "mixture_tw")
KNOWN_METRICS = ("recall", "precision", "ndcg")
KNOWN_SCOPES = ("all", "novel_only")


@dataclass(frozen=True)
class SessionSplit:
    """One evaluation session: train span, held-out day, test day."""

    session_id: int
    train_start: int
    validation_day: int
    test_day: int
    train_universe: frozenset[str]
    eligible_users: frozenset[str]

    @property
    def train_days(self) -> range:
        """Training day indices, half-open before the held-out day."""
        return range(self.train_start, self.validation_day)

    @property
    def train_end(self) -> int:
        return self.validation_day - 1


def make_sessions(log: EventLog, window: int = 9) -> list[SessionSplit]:
    """Cut a log into 1-day-stepped sessions of the given window length.

    Eligibility intersects training-span users with held-out-day users.
    Sessions whose held-out or test day is empty still exist (they just
    score nobody).  A log spanning fewer days than the window is an
    error.
    """
    if window < 3:
        raise ValueError("window must cover train, validation and test days")
    rng = log.day_range
    if rng is None or rng[1] - rng[0] + 1 < window:
        raise ValueError(f"log spans fewer than window={window} days")
    lo, hi = rng
    sessions = []
    for sid, test_day in enumerate(range(lo + window - 1, hi + 1), start=1):
        train_start = test_day - window + 1
        validation_day = test_day - 1
        train_users: set[str] = set()
        universe: set[str] = set()
        for d in range(train_start, validation_day):
            for e in log.by_day.get(d, ()):
                train_users.add(e.user_id)
                universe.add(e.item_id)
        val_users = {e.user_id for e in log.by_day.get(validation_day, ())}
        sessions.append(SessionSplit(
            session_id=sid, train_start=train_start,
            validation_day=validation_day, test_day=test_day,
            train_universe=frozenset(universe),
            eligible_users=frozenset(train_users & val_users),
        ))
    return sessions


def session_test_sets(session: SessionSplit, log: EventLog) -> dict[str, Counter]:
    """Test-day multisets for eligible users, training-universe items only.

    A user whose whole test day falls outside the universe drops out of
    the result; they stay eligible but produce no metric rows.
    """
    out: dict[str, Counter] = defaultdict(Counter)
    for e in log.by_day.get(session.test_day, ()):
        if e.user_id in session.eligible_users and e.item_id in session.train_universe:
            out[e.user_id][e.item_id] += 1
    return dict(out)


def filter_unseen(session: SessionSplit, log: EventLog) -> SessionSplit:
    """Narrow eligibility to users present in both train span and held-out day.

    Idempotent; sessions built by :func:`make_sessions` already satisfy
    it.  Out-of-universe test items vanish separately, when the test
    sets are materialized.  A session can come back with nobody
    eligible; the driver skips it.
    """
    train_users: set[str] = set()
    for d in session.train_days:
        for e in log.by_day.get(d, ()):
            train_users.add(e.user_id)
    val_users = {e.user_id for e in log.by_day.get(session.validation_day, ())}
    eligible = frozenset(session.eligible_users & train_users & val_users)
    if eligible == session.eligible_users:
        return session
    return replace(session, eligible_users=eligible)


def check_session(session: SessionSplit, log: EventLog) -> None:
    """Raise if a session violates its structural invariants."""
    if session.validation_day != session.test_day - 1:
        raise ValueError("held-out day must immediately precede the test day")
    if session.train_start >= session.validation_day:
        raise ValueError("empty training span")
    universe = set()
    train_users = set()
    for d in session.train_days:
        for e in log.by_day.get(d, ()):
            universe.add(e.item_id)
            train_users.add(e.user_id)
    if universe != set(session.train_universe):
        raise ValueError("train universe does not match the log")
    val_users = {e.user_id for e in log.by_day.get(session.validation_day, ())}
    if not session.eligible_users <= (train_users & val_users):
        raise ValueError("eligible user outside train or held-out day")
    for user, counter in session_test_sets(session, log).items():
        if user not in session.eligible_users:
            raise ValueError("test set contains an ineligible user")
        if any(it not in session.train_universe for it in counter):
            raise ValueError("test set contains an unseen item")


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything the protocol driver needs beyond the log itself."""

    window: int = 9
    top_n: int = 5
    novel_top_n: int = 3
    methods: tuple[str, ...] = KNOWN_METHODS
    metrics: tuple[str, ...] = KNOWN_METRICS
    scopes: tuple[str, ...] = KNOWN_SCOPES
    lambda_grid: tuple[float, ...] = models.DEFAULT_LAMBDA_GRID
    objective: str = "ndcg"
    objective_n: int = 5
    normalization: str = "l1_per_user"
    init_pi: float = 0.5
    em_tol: float = 1e-6
    em_max_iter: int = 100
    pi_include_train: bool = False
    gain: str = "linear"

    def __post_init__(self):
        for m in self.methods:
            if m not in KNOWN_METHODS:
                raise ValueError(f"unknown method {m!r}")
        for m in self.metrics:
            if m not in KNOWN_METRICS:
                raise ValueError(f"unknown metric {m!r}")
        for s in self.scopes:
            if s not in KNOWN_SCOPES:
                raise ValueError(f"unknown scope {s!r}")
        if self.window < 3:
            raise ValueError("window must cover train, validation and test days")
        if self.top_n < 1 or self.novel_top_n < 1:
            raise ValueError("list lengths must be >= 1")


@dataclass(frozen=True)
class MetricRecord:
    """One metric value for one user in one session."""

    session_id: int
    user_id: str
    metric: str
    n: int
    scope: str
    value: float
    meal_scope: str = "all"
    gender: str = "unknown"
    age_group: str = "unknown"
    region: str = "unknown"
    weekday: str = ""

    @property
    def weekday_or_weekend(self) -> str:
        return "weekend" if self.weekday in ("saturday", "sunday") else "weekday"


@dataclass(frozen=True)
class SessionInfo:
    """Per-session fit diagnostics."""

    session_id: int
    test_day: int
    n_eligible: int
    n_scored: int
    lambda_star: float | None = None
    mean_pi: float | None = None
    mean_pi_tw: float | None = None


@dataclass(frozen=True)
class ProtocolResult:
    records: dict[str, list[MetricRecord]]
    sessions: list[SessionInfo]
    meal_scope: str = "all"


_METRIC_FNS = {
    "recall": _metrics.recall_at_n,
    "precision": _metrics.precision_at_n,
    "ndcg": _metrics.ndcg_at_n,
}


def _heldout_sets(session: SessionSplit, log: EventLog,
                  include_train: bool) -> dict[str, Counter]:
    out: dict[str, Counter] = defaultdict(Counter)
    for e in log.by_day.get(session.validation_day, ()):
        if e.user_id in session.eligible_users:
            out[e.user_id][e.item_id] += 1
    if include_train:
        for d in session.train_days:
            for e in log.by_day.get(d, ()):
                if e.user_id in out:
                    out[e.user_id][e.item_id] += 1
    return dict(out)


def _score_value(metric: str, test_counts, ranked, n: int, gain: str) -> float:
    if metric == "ndcg":
        return _metrics.ndcg_at_n(test_counts, ranked, n, gain)
    return _METRIC_FNS[metric](test_counts, ranked, n)


def evaluate_session(log: EventLog, session: SessionSplit,
                     config: ProtocolConfig,
                     profiles: Mapping[str, UserProfile] | None = None,
                     meal_scope: str = "all",
                     ) -> tuple[dict[str, list[MetricRecord]], SessionInfo]:
    """Score every method on one session's eligible users."""
    profiles = profiles or {}
    records: dict[str, list[MetricRecord]] = {m: [] for m in config.methods}
    session = filter_unseen(session, log)
    test_sets = session_test_sets(session, log)
    info_base = SessionInfo(session.session_id, session.test_day,
                            n_eligible=len(session.eligible_users),
                            n_scored=len(test_sets))
    if not test_sets:
        return records, info_base

    train_events = tuple(e for d in session.train_days
                         for e in log.by_day.get(d, ()))
    counts = models.build_counts(train_events, lam=1.0,
                                 normalization=config.normalization,
                                 t_anchor=session.train_end)
    heldout = _heldout_sets(session, log, config.pi_include_train)

    need_em = "mixture" in config.methods or "mixture_tw" in config.methods
    params = None
    if need_em:
        params = models.em_fit(counts, heldout, init_pi=config.init_pi,
                               tol=config.em_tol, max_iter=config.em_max_iter)
    lambda_star = None
    counts_tw, params_tw = counts, params
    if "mixture_tw" in config.methods:
        lambda_star, _ = models.tune_lambda(
            train_events, heldout, grid=config.lambda_grid,
            objective=config.objective, objective_n=config.objective_n,
            t_anchor=session.train_end, normalization=config.normalization,
            init_pi=config.init_pi, tol=config.em_tol,
            max_iter=config.em_max_iter, gain=config.gain)
        counts_tw = models.build_counts(train_events, lam=lambda_star,
                                        normalization=config.normalization,
                                        t_anchor=session.train_end)
        params_tw = models.em_fit(counts_tw, heldout, init_pi=config.init_pi,
                                  tol=config.em_tol, max_iter=config.em_max_iter)

    gscores = models.global_score(counts) if "global" in config.methods else None
    weekday = _weekday_of(log, session.test_day)
    scored_users = sorted(test_sets)

    for user in scored_users:
        prof = profiles.get(user) or UserProfile(user)
        test_counts = test_sets[user]
        item_codes, _ = counts.row(user)
        history = frozenset(counts.items[c] for c in item_codes)
        for method in config.methods:
            if method == "global":
                scores = gscores
                items = counts.items
            elif method == "personal":
                scores = models.personal_score(counts, user)
                items = counts.items
            elif method == "mixture":
                scores = models.mixture_score(counts, params, user)
                items = counts.items
            else:
                scores = models.mixture_score(counts_tw, params_tw, user)
                items = counts_tw.items
            order = models.rank_items(scores, items)
            ranked = tuple(items[i] for i in order)
            ctx = dict(session_id=session.session_id, user_id=user,
                       meal_scope=meal_scope, gender=prof.gender,
                       age_group=prof.age_group, region=prof.region,
                       weekday=weekday)
            if "all" in config.scopes:
                for metric in config.metrics:
                    records[method].append(MetricRecord(
                        metric=metric, n=config.top_n, scope="all",
                        value=_score_value(metric, test_counts, ranked,
                                           config.top_n, config.gain), **ctx))
            if "novel_only" in config.scopes:
                novel_ranked, novel_test = _metrics.novel_only_view(
                    ranked, history, test_counts, config.novel_top_n)
                if novel_test:
                    for metric in config.metrics:
                        records[method].append(MetricRecord(
                            metric=metric, n=config.novel_top_n,
                            scope="novel_only",
                            value=_score_value(metric, novel_test, novel_ranked,
                                               config.novel_top_n, config.gain),
                            **ctx))

    def _mean_pi(p):
        if p is None:
            return None
        vals = [p.pi[u] for u in scored_users if u in p.pi]
        return sum(vals) / len(vals) if vals else None

    info = replace(info_base, lambda_star=lambda_star,
                   mean_pi=_mean_pi(params), mean_pi_tw=_mean_pi(params_tw))
    return records, info


def _weekday_of(log: EventLog, day_index: int) -> str:
    epoch = log.epoch_date
    if epoch is None:
        return ""
    return WEEKDAYS[(epoch + timedelta(days=day_index)).weekday()]


_WORKER: dict = {}


def _init_worker(log, config, profiles, meal_scope):
    _WORKER["args"] = (log, config, profiles, meal_scope)


def _eval_one(session):
    log, config, profiles, meal_scope = _WORKER["args"]
    return evaluate_session(log, session, config, profiles, meal_scope)


def run_protocol(log: EventLog,
                 profiles: Mapping[str, UserProfile] | None = None,
                 config: ProtocolConfig | None = None,
                 meal: str | None = None,
                 jobs: int = 1) -> ProtocolResult:
    """Run every session of the sliding-window protocol.

    Pass ``meal`` to evaluate within a single meal stream (the log is
    restricted before sessions are cut, so eligibility and universes are
    meal-local).  ``jobs > 1`` forks worker processes; results are
    merged in session order either way, so output is identical.
    """
    config = config or ProtocolConfig()
    meal_scope = meal or "all"
    eval_log = log.restrict_meal(meal) if meal else log
    sessions = make_sessions(eval_log, config.window)
    merged: dict[str, list[MetricRecord]] = {m: [] for m in config.methods}
    infos: list[SessionInfo] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(eval_log, config, profiles,
                                           meal_scope)) as pool:
            results = list(pool.map(_eval_one, sessions, chunksize=4))
    else:
        results = [evaluate_session(eval_log, s, config, profiles, meal_scope)
                   for s in sessions]
    for recs, info in results:
        for method, rows in recs.items():
            merged[method].extend(rows)
        infos.append(info)
    return ProtocolResult(records=merged, sessions=infos, meal_scope=meal_scope)


@dataclass(frozen=True)
class Summary:
    """Two-stage aggregate: mean of per-session user means."""

    mean: float
    sd: float
    n_sessions: int
    n_values: int


def _two_stage(rows: Sequence[MetricRecord]) -> Summary:
    by_session: dict[int, list[float]] = defaultdict(list)
    for r in rows:
        by_session[r.session_id].append(r.value)
    session_means = np.array([np.mean(v) for _, v in sorted(by_session.items())])
    return Summary(mean=float(session_means.mean()),
                   sd=float(session_means.std(ddof=0)),
                   n_sessions=len(session_means), n_values=len(rows))


def aggregate_report(records: Iterable[MetricRecord]) -> dict[tuple[str, int, str], Summary]:
    """Population summaries keyed by (metric, n, scope).

    User values are averaged within each session first, then across
    sessions; the spread is the population SD of the session means.
    """
    keyed: dict[tuple[str, int, str], list[MetricRecord]] = defaultdict(list)
    for r in records:
        keyed[r.metric, r.n, r.scope].append(r)
    return {k: _two_stage(rows) for k, rows in sorted(keyed.items())}


GROUPABLE = ("gender", "age_group", "region", "weekday", "weekday_or_weekend",
             "meal_scope")


@dataclass(frozen=True)
class GroupComparison:
    """Per-group summaries plus a rank test over pooled user values."""

    groups: dict[str, Summary]
    test: stats.TestResult | None


def grouped_report(records: Iterable[MetricRecord], group_by: str,
                   adjustment: str = "none",
                   ) -> dict[tuple[str, int, str], GroupComparison]:
    """Group summaries and Kruskal-Wallis / Dunn tests per metric key.

    Records labeled ``unknown`` on the grouping attribute are excluded.
    The omnibus and pairwise tests pool every user-session value in a
    group; they are skipped (None) when fewer than two groups have data.
    """
    if group_by not in GROUPABLE:
        raise ValueError(f"cannot group by {group_by!r}")
    keyed: dict[tuple[str, int, str], dict[str, list[MetricRecord]]] = \
        defaultdict(lambda: defaultdict(list))
    for r in records:
        label = getattr(r, group_by)
        if label in ("unknown", ""):
            continue
        keyed[r.metric, r.n, r.scope][label].append(r)
    out = {}
    for key, groups in sorted(keyed.items()):
        summaries = {g: _two_stage(rows) for g, rows in sorted(groups.items())}
        test = None
        if len(groups) >= 2 and sum(len(v) for v in groups.values()) >= 3:
            pooled = {g: [r.value for r in rows] for g, rows in sorted(groups.items())}
            test = stats.compare_groups(pooled, adjustment=adjustment)
        out[key] = GroupComparison(groups=summaries, test=test)
    return out
