"""Synthetic diary generator with known ground truth.

Each simulated user mixes two draws: with probability pi an item from a
small personal pool (uniform), otherwise an item from a shared
popularity distribution proportional to rank ** -exponent.  Items per
day are 1 + Poisson(mean - 1) so no day is empty, and each event gets a
uniformly random main meal.  Per-user generators are spawned from one
seed sequence, so output is deterministic for a given config and
independent of user count ordering effects.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from datetime import date, timedelta
from typing import Mapping, Sequence

import numpy as np

from .ingest import ConsumptionEvent, EventLog

_MEAL_CHOICES = ("breakfast", "lunch", "dinner", "snack")


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for one synthetic population.

    ``pi`` may be a single float (shared by everyone), a (lo, hi) pair
    (drawn uniformly per user), or a per-user sequence.  With
    ``disjoint_pools`` personal pools are sampled without replacement
    across users, so no item sits in two pools; ``pool_rank_floor``
    keeps the first ranks (the most popular items) out of every pool.
    """

    n_users: int = 100
    n_items: int = 500
    n_days: int = 30
    pi: float | tuple[float, float] | Sequence[float] = 0.7
    pool_size: int = 5
    popularity_exponent: float = 1.0
    items_per_day: float = 5.0
    seed: int = 0
    disjoint_pools: bool = False
    pool_rank_floor: int = 0
    start_date: date = date(2014, 10, 12)

    def __post_init__(self):
        if self.n_users < 1 or self.n_items < 2 or self.n_days < 1:
            raise ValueError("need at least 1 user, 2 items, 1 day")
        if not 1 <= self.pool_size <= self.n_items - self.pool_rank_floor:
            raise ValueError("pool_size outside the eligible item range")
        if self.disjoint_pools and \
                self.n_users * self.pool_size > self.n_items - self.pool_rank_floor:
            raise ValueError("not enough eligible items for disjoint pools")
        if self.items_per_day < 1.0:
            raise ValueError("items_per_day must be >= 1")
        if self.popularity_exponent < 0.0:
            raise ValueError("popularity_exponent must be >= 0")


@dataclass(frozen=True)
class GroundTruth:
    """The latent quantities behind one generated log."""

    pi: Mapping[str, float]
    pools: Mapping[str, tuple[str, ...]]
    items: tuple[str, ...]
    population_probs: np.ndarray


def _resolve_pi(cfg: SynthConfig, rng: np.random.Generator) -> np.ndarray:
    if isinstance(cfg.pi, (int, float)):
        arr = np.full(cfg.n_users, float(cfg.pi))
    elif isinstance(cfg.pi, tuple) and len(cfg.pi) == 2 and \
            all(isinstance(x, (int, float)) for x in cfg.pi):
        arr = rng.uniform(cfg.pi[0], cfg.pi[1], size=cfg.n_users)
    else:
        arr = np.asarray(list(cfg.pi), dtype=np.float64)
        if arr.shape != (cfg.n_users,):
            raise ValueError("per-user pi sequence has the wrong length")
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise ValueError("pi values must lie in [0, 1]")
    return arr


def generate(cfg: SynthConfig) -> tuple[EventLog, GroundTruth]:
    """Generate a log and the ground truth that produced it."""
    width_u = len(str(cfg.n_users))
    width_i = len(str(cfg.n_items))
    user_ids = tuple(f"u{i + 1:0{width_u}d}" for i in range(cfg.n_users))
    item_ids = tuple(f"i{i + 1:0{width_i}d}" for i in range(cfg.n_items))

    ranks = np.arange(1, cfg.n_items + 1, dtype=np.float64)
    pop = ranks ** -cfg.popularity_exponent
    pop /= pop.sum()

    root = np.random.SeedSequence(cfg.seed)
    global_rng = np.random.default_rng(root.spawn(1)[0])
    user_seeds = root.spawn(cfg.n_users + 1)[1:]

    pi_arr = _resolve_pi(cfg, global_rng)
    eligible = np.arange(cfg.pool_rank_floor, cfg.n_items)
    pool_codes: dict[str, np.ndarray] = {}
    if cfg.disjoint_pools:
        perm = global_rng.permutation(eligible)
        for u, uid in enumerate(user_ids):
            pool_codes[uid] = np.sort(perm[u * cfg.pool_size:(u + 1) * cfg.pool_size])
    else:
        for uid in user_ids:
            pool_codes[uid] = np.sort(global_rng.choice(
                eligible, size=cfg.pool_size, replace=False))
    pools = {uid: tuple(item_ids[c] for c in codes)
             for uid, codes in pool_codes.items()}

    pop_cum = np.cumsum(pop)
    events: list[ConsumptionEvent] = []
    for u, uid in enumerate(user_ids):
        rng = np.random.default_rng(user_seeds[u])
        my_pool = pool_codes[uid]
        p = pi_arr[u]
        for day in range(cfg.n_days):
            cal = cfg.start_date + timedelta(days=day)
            n_draws = 1 + int(rng.poisson(cfg.items_per_day - 1.0))
            from_pool = rng.random(n_draws) < p
            codes = np.empty(n_draws, dtype=np.int64)
            n_pool = int(from_pool.sum())
            codes[from_pool] = my_pool[rng.integers(0, len(my_pool), size=n_pool)]
            u01 = rng.random(n_draws - n_pool)
            codes[~from_pool] = np.minimum(
                np.searchsorted(pop_cum, u01, side="right"), cfg.n_items - 1)
            meals = rng.integers(0, 4, size=n_draws)
            for code, m in zip(codes, meals):
                events.append(ConsumptionEvent(
                    user_id=uid, day_index=day, calendar_date=cal,
                    meal=_MEAL_CHOICES[m], item_id=item_ids[code]))
    truth = GroundTruth(pi={uid: float(pi_arr[u]) for u, uid in enumerate(user_ids)},
                        pools=pools, items=item_ids, population_probs=pop)
    return EventLog(events), truth


def write_ground_truth(truth: GroundTruth, target) -> None:
    """Write per-user latent parameters: ``user_id,pi,pool`` (pool pipe-joined)."""
    own = not hasattr(target, "write")
    fh = open(os.fspath(target), "w", encoding="utf-8") if own else target
    try:
        fh.write("user_id,pi,pool\n")
        for uid in sorted(truth.pi):
            fh.write(f"{uid},{truth.pi[uid]:.10g},{'|'.join(truth.pools[uid])}\n")
    finally:
        if own:
            fh.close()
