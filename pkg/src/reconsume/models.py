"""Exploration-exploitation mixture models over consumption counts.

A user's next-day consumption is scored as a two-component multinomial
mixture: an individual component (the user's own consumption history,
normalized) and a population component (add-one smoothed global
frequencies).  The per-user mixing weight pi is fit by EM on held-out
events.  Counts may be exponentially time-decayed, which turns the base
model into its time-weighted variant; decay 1 recovers plain counts.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .ingest import ConsumptionEvent, EventLog

EM_EPS = 1e-6


@dataclass(frozen=True)
class CountStats:
    """User-item consumption weights in compressed sparse rows.

    Rows are users (sorted by id), columns items (sorted by id).  With
    decay rate ``lam`` and anchor day ``t_anchor``, an event on day t
    contributes lam ** (t_anchor - t).  ``user_totals`` / ``item_totals``
    / ``grand_total`` hold the corresponding marginal sums.
    """

    users: tuple[str, ...]
    items: tuple[str, ...]
    indptr: np.ndarray
    item_codes: np.ndarray
    weights: np.ndarray
    user_totals: np.ndarray
    item_totals: np.ndarray
    grand_total: float
    lam: float
    t_anchor: int
    normalization: str

    def __post_init__(self):
        object.__setattr__(self, "_user_code",
                           {u: i for i, u in enumerate(self.users)})
        object.__setattr__(self, "_item_code",
                           {x: i for i, x in enumerate(self.items)})

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def n_items(self) -> int:
        return len(self.items)

    def user_code(self, user: str) -> int:
        try:
            return self._user_code[user]
        except KeyError:
            raise KeyError(f"unknown user {user!r}") from None

    def item_code(self, item: str) -> int:
        try:
            return self._item_code[item]
        except KeyError:
            raise KeyError(f"unknown item {item!r}") from None

    def row(self, user: str) -> tuple[np.ndarray, np.ndarray]:
        """(item codes, weights) for one user's row."""
        u = self.user_code(user)
        sl = slice(self.indptr[u], self.indptr[u + 1])
        return self.item_codes[sl], self.weights[sl]


def build_counts(source: EventLog | Iterable[ConsumptionEvent],
                 day_range: tuple[int, int] | None = None,
                 lam: float = 1.0,
                 normalization: str = "raw",
                 t_anchor: int | None = None) -> CountStats:
    """Accumulate (optionally decayed) event counts into a CountStats.

    ``day_range`` filters events to an inclusive day-index interval and
    defaults to the span present.  The decay anchor defaults to the last
    day of the range, so the most recent events carry weight 1.  With
    ``normalization='l1_per_user'`` each user's row is scaled to sum to
    one after decay, and the marginals are recomputed from the scaled
    rows (every user total becomes exactly 1).
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError("decay rate lam must be in (0, 1]")
    if normalization not in ("raw", "l1_per_user"):
        raise ValueError(f"unknown normalization {normalization!r}")
    events = source.events if isinstance(source, EventLog) else tuple(source)
    if day_range is not None:
        lo, hi = day_range
        events = tuple(e for e in events if lo <= e.day_index <= hi)
    if not events:
        raise ValueError("no events in range")
    days = np.array([e.day_index for e in events], dtype=np.int64)
    anchor = int(days.max()) if t_anchor is None else t_anchor

    users = tuple(sorted({e.user_id for e in events}))
    items = tuple(sorted({e.item_id for e in events}))
    ucode = {u: i for i, u in enumerate(users)}
    icode = {x: i for i, x in enumerate(items)}
    u_arr = np.array([ucode[e.user_id] for e in events], dtype=np.int64)
    i_arr = np.array([icode[e.item_id] for e in events], dtype=np.int64)
    if lam == 1.0:
        w_arr = np.ones(len(events), dtype=np.float64)
    else:
        w_arr = lam ** (anchor - days).astype(np.float64)

    flat = u_arr * len(items) + i_arr
    uniq, inverse = np.unique(flat, return_inverse=True)
    weights = np.bincount(inverse, weights=w_arr, minlength=len(uniq))
    row_of = uniq // len(items)
    col_of = uniq % len(items)
    indptr = np.zeros(len(users) + 1, dtype=np.int64)
    np.cumsum(np.bincount(row_of, minlength=len(users)), out=indptr[1:])

    if normalization == "l1_per_user":
        totals = np.add.reduceat(weights, indptr[:-1])
        weights = weights / np.repeat(totals, np.diff(indptr))
        user_totals = np.ones(len(users), dtype=np.float64)
    else:
        user_totals = np.add.reduceat(weights, indptr[:-1])
    item_totals = np.bincount(col_of, weights=weights, minlength=len(items))
    return CountStats(
        users=users, items=items, indptr=indptr, item_codes=col_of,
        weights=weights, user_totals=user_totals, item_totals=item_totals,
        grand_total=float(item_totals.sum()), lam=lam, t_anchor=anchor,
        normalization=normalization,
    )


def theta_individual(counts: CountStats, user: str) -> np.ndarray:
    """User's own consumption distribution over the item universe.

    A user with zero total (cannot arise from build_counts, but possible
    on degenerate inputs) falls back to the uniform distribution.
    """
    u = counts.user_code(user)
    theta = np.zeros(counts.n_items, dtype=np.float64)
    sl = slice(counts.indptr[u], counts.indptr[u + 1])
    total = counts.user_totals[u]
    if total <= 0.0:
        theta[:] = 1.0 / counts.n_items
        return theta
    theta[counts.item_codes[sl]] = counts.weights[sl] / total
    return theta


def theta_population(counts: CountStats) -> np.ndarray:
    """Add-one smoothed population distribution over the item universe."""
    if counts.n_items == 0:
        raise ValueError("empty item universe")
    return (counts.item_totals + 1.0) / (counts.grand_total + counts.n_items)


def personal_score(counts: CountStats, user: str) -> np.ndarray:
    """Raw per-item weights of one user (most-consumed-first baseline)."""
    u = counts.user_code(user)
    out = np.zeros(counts.n_items, dtype=np.float64)
    sl = slice(counts.indptr[u], counts.indptr[u + 1])
    out[counts.item_codes[sl]] = counts.weights[sl]
    return out


def global_score(counts: CountStats) -> np.ndarray:
    """Total per-item weights across users (most-popular-first baseline)."""
    return counts.item_totals.copy()


@dataclass(frozen=True)
class MixtureParams:
    """Fitted per-user mixture weights plus the decay they were fit under."""

    pi: Mapping[str, float]
    em_iterations: Mapping[str, int]
    converged: Mapping[str, bool]
    lam: float = 1.0
    ll_trace: Mapping[str, np.ndarray] | None = None


def mixture_score(counts: CountStats, params: MixtureParams, user: str) -> np.ndarray:
    """pi * individual + (1 - pi) * population, over the item universe."""
    try:
        pi = params.pi[user]
    except KeyError:
        raise KeyError(f"no fitted weight for user {user!r}") from None
    return pi * theta_individual(counts, user) + (1.0 - pi) * theta_population(counts)


def em_fit(counts: CountStats, heldout: Mapping[str, Mapping[str, int]],
           init_pi: float = 0.5, tol: float = 1e-6, max_iter: int = 100,
           keep_trace: bool = False) -> MixtureParams:
    """Fit each user's mixing weight on held-out consumption counts.

    ``heldout`` maps user -> item -> multiplicity.  Held-out items
    outside the count universe are dropped; a user left with nothing
    (or absent from the counts) keeps ``init_pi`` with zero iterations
    and ``converged`` False.  Weights are clamped to
    [EM_EPS, 1 - EM_EPS]; each update can only improve the user's
    held-out log-likelihood, so the per-iteration trace (kept when
    ``keep_trace``) is non-decreasing.
    """
    if not 0.0 < init_pi < 1.0:
        raise ValueError("init_pi must be inside (0, 1)")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    theta_pop = theta_population(counts)
    fit_users = []
    skip_users = []
    ptr = [0]
    ti_flat: list[np.ndarray] = []
    tp_flat: list[np.ndarray] = []
    w_flat: list[np.ndarray] = []
    for user in sorted(heldout):
        obs = heldout[user]
        known = {it: c for it, c in obs.items() if it in counts._item_code}
        if not known or user not in counts._user_code:
            skip_users.append(user)
            continue
        codes = np.array(sorted(counts.item_code(it) for it in known), dtype=np.int64)
        w = np.array([known[counts.items[c]] for c in codes], dtype=np.float64)
        theta_ind = theta_individual(counts, user)
        fit_users.append(user)
        ti_flat.append(theta_ind[codes])
        tp_flat.append(theta_pop[codes])
        w_flat.append(w)
        ptr.append(ptr[-1] + len(codes))

    pi: dict[str, float] = {}
    iters: dict[str, int] = {}
    conv: dict[str, bool] = {}
    traces: dict[str, np.ndarray] = {}
    if fit_users:
        ptr_arr = np.array(ptr, dtype=np.int64)
        p, it, cv, ll = kernels.em_fit_batch(
            ptr_arr, np.concatenate(ti_flat), np.concatenate(tp_flat),
            np.concatenate(w_flat), float(init_pi), float(tol), int(max_iter),
            EM_EPS)
        for idx, user in enumerate(fit_users):
            pi[user] = float(p[idx])
            iters[user] = int(it[idx])
            conv[user] = bool(cv[idx])
            if keep_trace:
                row = ll[idx]
                traces[user] = row[~np.isnan(row)]
    clamped_init = min(max(init_pi, EM_EPS), 1.0 - EM_EPS)
    for user in skip_users:
        pi[user] = clamped_init
        iters[user] = 0
        conv[user] = False
    return MixtureParams(pi=pi, em_iterations=iters, converged=conv,
                         lam=counts.lam, ll_trace=traces if keep_trace else None)


@dataclass(frozen=True)
class ScoredList:
    """Top-N recommendation list for one user."""

    user: str | None
    ranked_items: tuple[tuple[str, float], ...]

    @property
    def n(self) -> int:
        return len(self.ranked_items)

    @property
    def item_ids(self) -> tuple[str, ...]:
        return tuple(item for item, _ in self.ranked_items)


def rank_items(scores: np.ndarray, items: Sequence[str]) -> tuple[int, ...]:
    """Full ordering by score descending, item id ascending on ties.

    ``items`` must be sorted ascending (as CountStats stores them), so
    positional codes double as the tiebreak key.
    """
    if len(scores) != len(items):
        raise ValueError("scores and items disagree in length")
    order = np.lexsort((np.arange(len(items)), -scores))
    return tuple(int(i) for i in order)


def top_n(scores: np.ndarray, items: Sequence[str], n: int,
          user: str | None = None) -> ScoredList:
    """Best n items by score, deterministic under ties."""
    if n < 1:
        raise ValueError("n must be >= 1")
    order = rank_items(scores, items)[:n]
    return ScoredList(user, tuple((items[i], float(scores[i])) for i in order))


DEFAULT_LAMBDA_GRID = tuple(round(0.05 * i, 2) for i in range(1, 21))


def tune_lambda(train: EventLog | Iterable[ConsumptionEvent],
                heldout: Mapping[str, Mapping[str, int]],
                grid: Sequence[float] = DEFAULT_LAMBDA_GRID,
                objective: str = "ndcg", objective_n: int = 5,
                day_range: tuple[int, int] | None = None,
                t_anchor: int | None = None,
                normalization: str = "raw",
                init_pi: float = 0.5, tol: float = 1e-6, max_iter: int = 100,
                gain: str = "linear",
                ) -> tuple[float, tuple[tuple[float, float], ...]]:
    """Pick the decay rate maximizing a held-out ranking objective.

    For each candidate decay the counts are rebuilt, weights refit, and
    the objective (mean metric over users with usable held-out items)
    evaluated at ``objective_n``.  Returns the winning decay and the
    full (decay, objective) trace; exact ties go to the larger decay,
    so a flat objective degrades to plain undecayed counts.
    """
    from . import metrics as _metrics

    metric_fn = {"ndcg": _metrics.ndcg_at_n, "recall": _metrics.recall_at_n,
                 "precision": _metrics.precision_at_n}.get(objective)
    if metric_fn is None:
        raise ValueError(f"unknown objective {objective!r}")
    if not grid:
        raise ValueError("empty decay grid")
    trace = []
    best_lam, best_val = None, -math.inf
    for lam in sorted(grid):
        counts = build_counts(train, day_range=day_range, lam=lam,
                              normalization=normalization, t_anchor=t_anchor)
        params = em_fit(counts, heldout, init_pi=init_pi, tol=tol,
                        max_iter=max_iter)
        vals = []
        for user in sorted(heldout):
            known = {it: c for it, c in heldout[user].items()
                     if it in counts._item_code}
            if not known or user not in counts._user_code:
                continue
            ranked = top_n(mixture_score(counts, params, user), counts.items,
                           objective_n).item_ids
            if objective == "ndcg":
                vals.append(metric_fn(known, ranked, objective_n, gain))
            else:
                vals.append(metric_fn(known, ranked, objective_n))
        val = sum(vals) / len(vals) if vals else 0.0
        trace.append((lam, val))
        if best_lam is None or val >= best_val:
            best_lam, best_val = lam, val
    return best_lam, tuple(trace)


def dump_model(target, params: MixtureParams, counts: CountStats | None = None) -> None:
    """Write fitted parameters as plain text.

    Header lines are ``key = value`` (decay rate, count summaries when
    available); after a ``[users]`` marker each line is
    ``user<TAB>pi<TAB>iterations<TAB>converged``.
    """
    own = not hasattr(target, "write")
    fh = open(os.fspath(target), "w", encoding="utf-8") if own else target
    try:
        fh.write("format = reconsume-model-v1\n")
        fh.write(f"lambda = {params.lam:.10g}\n")
        fh.write(f"n_fitted_users = {len(params.pi)}\n")
        if counts is not None:
            fh.write(f"t_anchor = {counts.t_anchor}\n")
            fh.write(f"normalization = {counts.normalization}\n")
            fh.write(f"n_users = {counts.n_users}\n")
            fh.write(f"n_items = {counts.n_items}\n")
            fh.write(f"grand_total = {counts.grand_total:.10g}\n")
        fh.write("[users]\n")
        for user in sorted(params.pi):
            fh.write(f"{user}\t{params.pi[user]:.10g}"
                     f"\t{params.em_iterations.get(user, 0)}"
                     f"\t{int(params.converged.get(user, False))}\n")
    finally:
        if own:
            fh.close()


def load_model(source) -> tuple[MixtureParams, dict[str, str]]:
    """Read back a dump_model file: (params, header metadata)."""
    own = not hasattr(source, "read")
    fh = open(os.fspath(source), "r", encoding="utf-8") if own else source
    try:
        meta: dict[str, str] = {}
        pi: dict[str, float] = {}
        iters: dict[str, int] = {}
        conv: dict[str, bool] = {}
        in_users = False
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line == "[users]":
                in_users = True
                continue
            if in_users:
                user, p, it, cv = line.split("\t")
                pi[user] = float(p)
                iters[user] = int(it)
                conv[user] = cv == "1"
            else:
                key, _, value = line.partition(" = ")
                meta[key] = value
        if meta.get("format") != "reconsume-model-v1":
            raise ValueError("not a recognized model file")
        lam = float(meta.get("lambda", "1"))
        return MixtureParams(pi=pi, em_iterations=iters, converged=conv,
                             lam=lam), meta
    finally:
        if own:
            fh.close()
