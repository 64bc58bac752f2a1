"""Compare the jitted and pure-numpy kernels on realistic workloads.

Run as a script:

    python3 benchmarks/bench_kernels.py [--users N] [--days N] [--repeat N]

Each kernel is warmed up once first, so jit compilation never lands in a
timed region.  Reported numbers are the best of ``--repeat`` runs over
the whole user population.
"""

import argparse
import time

import numpy as np

from reconsume.kernels import _numpy

try:
    from reconsume.kernels import _numba
except ImportError:
    _numba = None


def packed_population(rng, n_users, n_days, n_codes, mean_items):
    """Per-user (day_ptr, codes) pairs shaped like a dense diary."""
    out = []
    for _ in range(n_users):
        ptr = [0]
        codes: list[int] = []
        for _ in range(n_days):
            size = 1 + rng.poisson(mean_items - 1)
            day = np.unique(rng.integers(0, n_codes, size=size))
            codes.extend(int(c) for c in day)
            ptr.append(len(codes))
        out.append((np.array(ptr, dtype=np.int64),
                    np.array(codes, dtype=np.int64)))
    return out


def em_batch_instance(rng, n_users, mean_obs):
    ptr = [0]
    for _ in range(n_users):
        ptr.append(ptr[-1] + 1 + int(rng.poisson(mean_obs - 1)))
    total = ptr[-1]
    return (np.array(ptr, dtype=np.int64),
            rng.random(total),
            rng.random(total) * 0.2 + 1e-4,
            rng.integers(1, 4, size=total).astype(np.float64))


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--users", type=int, default=2000)
    ap.add_argument("--days", type=int, default=150)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if _numba is None:
        print("numba is not importable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    n_codes = 800
    population = packed_population(rng, args.users, args.days, n_codes, 4.0)
    pairs = [(population[i], population[(i + 1) % len(population)])
             for i in range(0, len(population), 2)]
    em_args = em_batch_instance(rng, args.users, 12.0)

    workloads = {
        "day_repeat_fractions": lambda impl: [
            impl.day_repeat_fractions(ptr, codes, n_codes, 7, True)
            for ptr, codes in population],
        "across_repeat_fractions": lambda impl: [
            impl.across_repeat_fractions(pa, ca, pb, cb, n_codes, 7, True)
            for (pa, ca), (pb, cb) in pairs],
        "em_fit_batch": lambda impl: impl.em_fit_batch(
            *em_args, 0.5, 1e-6, 100, 1e-6),
    }

    print(f"{args.users} users x {args.days} days, best of {args.repeat}")
    print(f"{'kernel':<26} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for name, run in workloads.items():
        run(_numba)  # warmup: jit compile outside the timed region
        t_np = best_of(args.repeat, lambda: run(_numpy))
        t_nb = best_of(args.repeat, lambda: run(_numba))
        print(f"{name:<26} {t_np * 1e3:>8.1f}ms {t_nb * 1e3:>8.1f}ms "
              f"{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
