"""Command line front end.

Subcommands: ``ingest`` (parse, clean, filter, re-emit), ``analyze``
(repeat-consumption report), ``evaluate`` (sliding-window protocol),
``synth`` (generate a synthetic log), ``selftest`` (run the built-in
oracle checks).  Every flag can also be given in a flat ``key = value``
config file via ``--config``; explicit flags win.

Exit codes: 0 on success, 1 on usage or input errors, 2 when an
internal consistency check fails.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from collections import Counter
from datetime import datetime, timedelta, timezone
from pathlib import Path

from . import __version__, evaluate, ingest, kernels, metrics, models, oracles, repeats, stats, synth

log = logging.getLogger("reconsume")


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


def load_config(path) -> dict[str, str]:
    """Flat key = value file; '#' starts a comment; blank lines ignored."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            out[key.strip()] = value.strip()
    return out


class Options:
    """Merged view over CLI flags and a config file (flags win)."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.cfg = load_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None, cast=str):
        flag_val = getattr(self.args, key.replace("-", "_"), None)
        if flag_val is not None:
            return flag_val
        if key in self.cfg:
            raw = self.cfg[key]
            if cast is bool:
                return raw.strip().lower() in ("1", "true", "yes")
            return cast(raw)
        return default


def _header(fh, command: str, pairs: dict) -> None:
    stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    fh.write(f"# generated: {stamp}\n")
    fh.write(f"# tool: reconsume {__version__} ({command})\n")
    for k in sorted(pairs):
        fh.write(f"# {k} = {_fmt(pairs[k])}\n")


def _outdir(opts: Options) -> Path:
    out = opts.get("out")
    if not out:
        raise ValueError("--out is required")
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _load_events(opts: Options) -> ingest.EventLog:
    path = opts.get("events")
    if not path:
        raise ValueError("--events is required")
    log.info("reading events from %s", path)
    evlog = ingest.parse_events(path)
    log.info("parsed %d events, %d users, %d items", len(evlog),
             len(evlog.users), len(evlog.item_universe))
    return evlog


def _load_profiles(opts: Options) -> dict[str, ingest.UserProfile]:
    path = opts.get("profiles")
    if not path:
        return {}
    profiles = ingest.parse_profiles(path)
    log.info("parsed %d profiles", len(profiles))
    return profiles


def _cleaning_config(opts: Options) -> ingest.CleaningConfig:
    kwargs = {}
    for key, cast in (("max_calories", float), ("item_min_users", int),
                      ("user_min_items", int)):
        val = opts.get(key, cast=cast)
        if val is not None:
            kwargs[key] = val
    deny = opts.get("description_denylist")
    if deny is not None:
        kwargs["description_denylist"] = tuple(s.strip() for s in deny.split("|") if s.strip())
    return ingest.CleaningConfig(**kwargs)


def cmd_ingest(args: argparse.Namespace) -> int:
    opts = Options(args)
    outdir = _outdir(opts)
    raw = _load_events(opts)
    ccfg = _cleaning_config(opts)
    cleaned, report = ingest.clean(raw, ccfg)
    cored = ingest.p_core_filter(cleaned, ccfg.item_min_users, ccfg.user_min_items)
    out_events = outdir / "events_clean.csv"
    ingest.write_events(cored, out_events)
    with open(outdir / "ingest_report.txt", "w", encoding="utf-8") as fh:
        _header(fh, "ingest", {"events": opts.get("events"),
                               "max_calories": ccfg.max_calories,
                               "item_min_users": ccfg.item_min_users,
                               "user_min_items": ccfg.user_min_items})
        for key, val in report.as_dict().items():
            fh.write(f"{key} = {val}\n")
        fh.write(f"n_after_core = {len(cored)}\n")
        fh.write(f"n_users_after_core = {len(cored.users)}\n")
        fh.write(f"n_items_after_core = {len(cored.item_universe)}\n")
    log.info("kept %d of %d events; wrote %s", len(cored), len(raw), out_events)
    return 0


def _window_spec(opts: Options) -> repeats.WindowSpec:
    return repeats.WindowSpec(k=opts.get("k", 7, int),
                              direction=opts.get("direction", "forward"))


def cmd_analyze(args: argparse.Namespace) -> int:
    opts = Options(args)
    outdir = _outdir(opts)
    evlog = _load_events(opts)
    profiles = _load_profiles(opts)
    spec = _window_spec(opts)
    meal = opts.get("meal")
    group_by = opts.get("group_by")
    scopes: list[str | None] = [meal] if meal else [None] + [
        m for m in ("breakfast", "lunch", "dinner", "snack")
        if any(e.meal == m for e in evlog.events)]

    header_pairs = {"events": opts.get("events"), "k": spec.k,
                    "direction": spec.direction, "meal": meal or "all"}
    per_scope: dict[str, dict[str, float]] = {}
    for scope in scopes:
        label = scope or "all"
        log.info("computing repeat fractions, scope=%s", label)
        per_scope[label] = repeats.population_user_fractions(evlog, spec, meal=scope)

    with open(outdir / "user_fractions.csv", "w", encoding="utf-8") as fh:
        _header(fh, "analyze", header_pairs)
        fh.write("user_id,meal_scope,fraction\n")
        for label, fractions in per_scope.items():
            for user in sorted(fractions):
                fh.write(f"{user},{label},{_fmt(fractions[user])}\n")

    base = per_scope[meal or "all"]
    if base:
        cdf = repeats.empirical_cdf(base.values())
        with open(outdir / "ecdf.csv", "w", encoding="utf-8") as fh:
            _header(fh, "analyze", header_pairs)
            fh.write("fraction,cumulative_share\n")
            for v, c in cdf:
                fh.write(f"{_fmt(v)},{_fmt(c)}\n")

    daily = repeats.population_daily_series(evlog, spec, meal=meal)
    epoch = evlog.epoch_date
    calendar = repeats.calendar_weekdays(epoch, daily) if epoch else {}
    with open(outdir / "daily.csv", "w", encoding="utf-8") as fh:
        _header(fh, "analyze", header_pairs)
        fh.write("day_index,date,weekday,fraction\n")
        for d in sorted(daily):
            fh.write(f"{d},{(epoch + timedelta(days=d)).isoformat()},"
                     f"{calendar[d]},{_fmt(daily[d])}\n")

    with open(outdir / "analyze_summary.txt", "w", encoding="utf-8") as fh:
        _header(fh, "analyze", header_pairs)
        for label, fractions in per_scope.items():
            if fractions:
                fh.write(f"population_fraction {label} = "
                         f"{_fmt(repeats.population_fraction(fractions.values()))}"
                         f" (n_users = {len(fractions)})\n")
        if not meal:
            matrix = repeats.across_meal_matrix(evlog, spec)
            for (m_a, m_b), v in sorted(matrix.items()):
                fh.write(f"across_fraction {m_a}->{m_b} = {_fmt(v)}\n")
        if calendar:
            two_way = repeats.weekday_weekend_partition(daily, calendar)
            for name, vs in sorted(two_way.items()):
                fh.write(f"daily_mean {name} = {_fmt(sum(vs) / len(vs))}"
                         f" (n_days = {len(vs)})\n")
            seven = repeats.weekday_partition(daily, calendar)
            for name in repeats.WEEKDAYS:
                if name in seven:
                    vs = seven[name]
                    fh.write(f"daily_mean {name} = {_fmt(sum(vs) / len(vs))}"
                             f" (n_days = {len(vs)})\n")
        if group_by and profiles and base:
            groups = repeats.group_fractions(base, profiles, group_by)
            for g, gf in groups.items():
                fh.write(f"group_fraction {group_by}={g} = {_fmt(gf.mean)}"
                         f" (n_users = {len(gf.values)})\n")
            samples = {g: gf.values for g, gf in groups.items() if gf.values}
            if len(samples) >= 2 and sum(map(len, samples.values())) >= 3:
                res = stats.compare_groups(samples)
                fh.write(f"kruskal_wallis H = {_fmt(res.statistic)} "
                         f"p = {_fmt(res.p_value)}\n")
                for (a, b), (z, p) in (res.pairwise or {}).items():
                    fh.write(f"dunn {a} vs {b}: z = {_fmt(z)} p = {_fmt(p)}\n")
    log.info("analysis written to %s", outdir)
    return 0


def _protocol_config(opts: Options) -> evaluate.ProtocolConfig:
    kwargs = {}
    methods = opts.get("methods")
    if methods:
        kwargs["methods"] = tuple(m.strip() for m in methods.split(",") if m.strip())
    grid = opts.get("lambda_grid")
    if grid:
        kwargs["lambda_grid"] = tuple(float(x) for x in grid.split(","))
    top_n = opts.get("top_n", cast=int)
    if top_n is not None:
        kwargs["top_n"] = top_n
    for key, cast in (("window", int), ("novel_top_n", int), ("objective", str),
                      ("objective_n", int), ("normalization", str),
                      ("init_pi", float), ("em_tol", float),
                      ("em_max_iter", int), ("gain", str)):
        val = opts.get(key, cast=cast)
        if val is not None:
            kwargs[key] = val
    include_train = opts.get("pi_include_train", cast=bool)
    if include_train is not None:
        kwargs["pi_include_train"] = include_train
    return evaluate.ProtocolConfig(**kwargs)


_RECORD_COLUMNS = ("session_id", "user_id", "metric", "N", "scope", "meal_scope",
                   "gender", "age_group", "region", "weekday", "value")


def _write_records(path: Path, rows, command: str, pairs: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        _header(fh, command, pairs)
        fh.write(",".join(_RECORD_COLUMNS) + "\n")
        for r in rows:
            fh.write(f"{r.session_id},{r.user_id},{r.metric},{r.n},{r.scope},"
                     f"{r.meal_scope},{r.gender},{r.age_group},{r.region},"
                     f"{r.weekday},{_fmt(r.value)}\n")


def cmd_evaluate(args: argparse.Namespace) -> int:
    opts = Options(args)
    outdir = _outdir(opts)
    evlog = _load_events(opts)
    profiles = _load_profiles(opts)
    pcfg = _protocol_config(opts)
    meal = opts.get("meal")
    group_by = opts.get("group_by")
    jobs = opts.get("jobs", 1, int)
    log.info("running protocol: window=%d methods=%s jobs=%d",
             pcfg.window, ",".join(pcfg.methods), jobs)
    result = evaluate.run_protocol(evlog, profiles or None, pcfg,
                                   meal=meal, jobs=jobs)
    pairs = {"events": opts.get("events"), "window": pcfg.window,
             "top_n": pcfg.top_n, "meal": meal or "all",
             "methods": ",".join(pcfg.methods),
             "normalization": pcfg.normalization,
             "backend": kernels.active_backend()}
    for method, rows in result.records.items():
        _write_records(outdir / f"records_{method}.csv", rows, "evaluate", pairs)

    with open(outdir / "summary.txt", "w", encoding="utf-8") as fh:
        _header(fh, "evaluate", pairs)
        fh.write(f"n_sessions = {len(result.sessions)}\n")
        for method, rows in result.records.items():
            for (metric, n, scope), s in evaluate.aggregate_report(rows).items():
                fh.write(f"{method} {metric}@{n} [{scope}]: mean = {_fmt(s.mean)}"
                         f" sd = {_fmt(s.sd)} sessions = {s.n_sessions}\n")
        lam_vals = [s.lambda_star for s in result.sessions if s.lambda_star is not None]
        if lam_vals:
            fh.write(f"mean_lambda_star = {_fmt(sum(lam_vals) / len(lam_vals))}\n")
        pi_vals = [s.mean_pi for s in result.sessions if s.mean_pi is not None]
        if pi_vals:
            fh.write(f"mean_pi = {_fmt(sum(pi_vals) / len(pi_vals))}\n")
        if group_by:
            for method, rows in result.records.items():
                grouped = evaluate.grouped_report(rows, group_by)
                for (metric, n, scope), cmp_ in grouped.items():
                    for g, s in cmp_.groups.items():
                        fh.write(f"{method} {metric}@{n} [{scope}] {group_by}={g}:"
                                 f" mean = {_fmt(s.mean)} sd = {_fmt(s.sd)}\n")
                    if cmp_.test is not None:
                        fh.write(f"{method} {metric}@{n} [{scope}] kruskal_wallis:"
                                 f" H = {_fmt(cmp_.test.statistic)}"
                                 f" p = {_fmt(cmp_.test.p_value)}\n")

    _dump_final_model(outdir, evlog, pcfg, meal)
    log.info("evaluation written to %s", outdir)
    return 0


def _dump_final_model(outdir: Path, evlog: ingest.EventLog,
                      pcfg: evaluate.ProtocolConfig, meal: str | None) -> None:
    """Fit the last session once more and persist its parameters."""
    eval_log = evlog.restrict_meal(meal) if meal else evlog
    sessions = evaluate.make_sessions(eval_log, pcfg.window)
    last = sessions[-1]
    train_events = tuple(e for d in last.train_days
                         for e in eval_log.by_day.get(d, ()))
    heldout = evaluate._heldout_sets(last, eval_log, pcfg.pi_include_train)
    if not heldout:
        return
    lam = 1.0
    if "mixture_tw" in pcfg.methods:
        lam, _ = models.tune_lambda(
            train_events, heldout, grid=pcfg.lambda_grid,
            objective=pcfg.objective, objective_n=pcfg.objective_n,
            t_anchor=last.train_end, normalization=pcfg.normalization,
            init_pi=pcfg.init_pi, tol=pcfg.em_tol, max_iter=pcfg.em_max_iter,
            gain=pcfg.gain)
    counts = models.build_counts(train_events, lam=lam,
                                 normalization=pcfg.normalization,
                                 t_anchor=last.train_end)
    params = models.em_fit(counts, heldout, init_pi=pcfg.init_pi,
                           tol=pcfg.em_tol, max_iter=pcfg.em_max_iter)
    models.dump_model(outdir / "model_final.txt", params, counts)


def cmd_synth(args: argparse.Namespace) -> int:
    opts = Options(args)
    outdir = _outdir(opts)
    kwargs = {}
    for key, cast in (("n_users", int), ("n_items", int), ("n_days", int),
                      ("pool_size", int), ("popularity_exponent", float),
                      ("items_per_day", float), ("pool_rank_floor", int)):
        val = opts.get(key, cast=cast)
        if val is not None:
            kwargs[key] = val
    seed = opts.get("seed", cast=int)
    if seed is not None:
        kwargs["seed"] = seed
    pi_raw = opts.get("pi")
    if pi_raw is not None:
        parts = [float(x) for x in str(pi_raw).split(",")]
        kwargs["pi"] = parts[0] if len(parts) == 1 else (parts[0], parts[1])
    disjoint = opts.get("disjoint_pools", cast=bool)
    if disjoint is not None:
        kwargs["disjoint_pools"] = disjoint
    cfg = synth.SynthConfig(**kwargs)
    log.info("generating %d users x %d days", cfg.n_users, cfg.n_days)
    evlog, truth = synth.generate(cfg)
    ingest.write_events(evlog, outdir / "events.csv")
    synth.write_ground_truth(truth, outdir / "truth.csv")
    log.info("wrote %d events to %s", len(evlog), outdir / "events.csv")
    return 0


def cmd_selftest(args: argparse.Namespace) -> int:
    import numpy as np

    failures = []

    def suite(name, fn):
        try:
            detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            failures.append(name)
            print(f"selftest: {name} ... FAIL ({exc})")
            return
        print(f"selftest: {name} ... ok{f' ({detail})' if detail else ''}")

    def metrics_suite():
        rng = np.random.default_rng(7)
        items = [f"x{i:02d}" for i in range(30)]
        for _ in range(300):
            ranked = list(rng.permutation(items))
            chosen = rng.choice(items, size=rng.integers(1, 6), replace=False)
            test = {it: int(rng.integers(1, 4)) for it in chosen}
            n = int(rng.integers(1, 8))
            if abs(metrics.recall_at_n(test, ranked, n) - oracles.recall(test, ranked, n)) > 1e-12:
                raise AssertionError("recall mismatch")
            if abs(metrics.precision_at_n(test, ranked, n) - oracles.precision(test, ranked, n)) > 1e-12:
                raise AssertionError("precision mismatch")
            if abs(metrics.ndcg_at_n(test, ranked, n) - oracles.ndcg(test, ranked, n)) > 1e-12:
                raise AssertionError("ndcg mismatch")
        return "300 instances"

    def repeats_suite():
        rng = np.random.default_rng(11)
        universe = [f"f{i}" for i in range(12)]
        for trial in range(200):
            n_days = int(rng.integers(7, 20))
            days = tuple(frozenset(rng.choice(universe,
                                              size=rng.integers(0, 5),
                                              replace=False))
                         for _ in range(n_days))
            seq = repeats.ConsumptionSequence("u", days)
            for direction in ("forward", "backward"):
                spec = repeats.WindowSpec(k=int(rng.integers(2, 8)),
                                          direction=direction)
                if spec.k > n_days:
                    continue
                for t in spec.anchors(n_days):
                    got = repeats.day_repeat_fraction(seq, t, spec)
                    want = oracles.day_repeat_fraction(days, t, spec.k, direction)
                    if (got is None) != (want is None):
                        raise AssertionError(f"trial {trial}: emptiness mismatch")
                    if got is not None and abs(got - want) > 1e-12:
                        raise AssertionError(f"trial {trial}: fraction mismatch")
        return "200 sequences"

    def em_suite():
        cfg = synth.SynthConfig(n_users=100, n_items=2000, n_days=40,
                                pi=(0.2, 0.8), pool_size=3,
                                popularity_exponent=0.0, items_per_day=8.0,
                                seed=5)
        evlog, truth = synth.generate(cfg)
        counts = models.build_counts(evlog, day_range=(0, 14))
        held: dict[str, Counter] = {}
        for user in evlog.users:
            c = Counter()
            for e in evlog.by_user[user]:
                if e.day_index >= 15:
                    c[e.item_id] += 1
            held[user] = c
        params = models.em_fit(counts, held, keep_trace=True)
        errs = [abs(params.pi[u] - truth.pi[u]) for u in truth.pi if u in params.pi]
        mae = sum(errs) / len(errs)
        for user, trace in (params.ll_trace or {}).items():
            if np.any(np.diff(trace) < -1e-9):
                raise AssertionError(f"log-likelihood decreased for {user}")
        if mae > 0.05:
            raise AssertionError(f"MAE {mae:.4f} > 0.05")
        return f"MAE {mae:.4f}"

    def stats_suite():
        fixtures = [
            {"a": [1.1, 2.5, 3.2, 4.8, 5.0], "b": [2.2, 3.9, 4.1, 6.3, 7.7]},
            {"a": [1, 1, 2, 3, 5, 8], "b": [2, 3, 3, 4, 6, 9]},
            {"a": [3.0, 1.2, 4.4, 2.2, 5.9], "b": [2.8, 3.3, 1.9, 4.0, 5.1],
             "c": [6.1, 4.9, 5.5, 7.2, 3.8]},
        ]
        worst = 0.0
        for groups in fixtures:
            res = stats.kruskal_wallis(groups)
            p_perm = oracles.kruskal_permutation_p(groups, n_samples=100000,
                                                   mid=True)
            worst = max(worst, abs(res.p_value - p_perm))
        if worst > 0.02:
            raise AssertionError(f"chi-square vs permutation gap {worst:.4f}")
        for x in (0.5, 1.0, 2.7, 3.841, 7.9):
            for dof in (1, 2, 5):
                got = stats.chi_square_sf(x, dof)
                want = oracles.chi_square_sf_quadrature(x, dof)
                if abs(got - want) > 1e-8:
                    raise AssertionError(f"tail mismatch at ({x}, {dof})")
        return f"max permutation gap {worst:.4f}"

    def kernel_suite():
        from .kernels import _numpy as knumpy
        backend = kernels.active_backend()
        rng = np.random.default_rng(3)
        ptr = [0]
        codes = []
        for _ in range(25):
            day = sorted(rng.choice(20, size=rng.integers(0, 6), replace=False))
            codes.extend(day)
            ptr.append(len(codes))
        ptr_arr = np.asarray(ptr, dtype=np.int64)
        codes_arr = np.asarray(codes, dtype=np.int64)
        ours = kernels.day_repeat_fractions(ptr_arr, codes_arr, 20, 7, True)
        ref = knumpy.day_repeat_fractions(ptr_arr, codes_arr, 20, 7, True)
        if not np.array_equal(np.isnan(ours), np.isnan(ref)) or \
                np.nanmax(np.abs(np.nan_to_num(ours - ref))) > 1e-12:
            raise AssertionError("backend mismatch")
        return f"active backend {backend}"

    suite("ranking metrics vs oracle", metrics_suite)
    suite("repeat fractions vs oracle", repeats_suite)
    suite("em recovery on synthetic truth", em_suite)
    suite("rank tests vs permutation", stats_suite)
    suite("kernel backends agree", kernel_suite)
    if failures:
        print(f"selftest: {len(failures)} suite(s) failed")
        return 2
    print("selftest: all suites passed")
    return 0


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits 1 on usage errors (2 is reserved)."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="reconsume",
        description="Repeat-consumption analytics and next-day prediction")
    parser.add_argument("--version", action="version",
                        version=f"reconsume {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--events", help="event file (csv or tsv)")
        p.add_argument("--profiles", help="user profile file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--config", help="key = value config file")

    p_ingest = sub.add_parser("ingest", help="parse, clean and filter a log")
    common(p_ingest)
    p_ingest.set_defaults(func=cmd_ingest)

    p_analyze = sub.add_parser("analyze", help="repeat-consumption report")
    common(p_analyze)
    p_analyze.add_argument("--k", type=int, help="window length in days")
    p_analyze.add_argument("--direction", choices=("forward", "backward"))
    p_analyze.add_argument("--meal", choices=ingest.MEALS)
    p_analyze.add_argument("--group-by", choices=("gender", "age_group", "region"))
    p_analyze.set_defaults(func=cmd_analyze)

    p_eval = sub.add_parser("evaluate", help="sliding-window protocol")
    common(p_eval)
    p_eval.add_argument("--methods", help="comma list: global,personal,mixture,mixture_tw")
    p_eval.add_argument("--lambda-grid", help="comma list of decay rates")
    p_eval.add_argument("--top-n", type=int, help="recommendation list length")
    p_eval.add_argument("--meal", choices=ingest.MEALS)
    p_eval.add_argument("--group-by", choices=evaluate.GROUPABLE)
    p_eval.add_argument("--jobs", type=int, help="worker processes")
    p_eval.set_defaults(func=cmd_evaluate)

    p_synth = sub.add_parser("synth", help="generate a synthetic log")
    common(p_synth)
    p_synth.add_argument("--seed", type=int, help="generator seed")
    p_synth.set_defaults(func=cmd_synth)

    p_self = sub.add_parser("selftest", help="run built-in oracle checks")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=os.environ.get("RECONSUME_LOG", "INFO").upper(),
        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ingest.ParseError as exc:
        log.error("input error: %s", exc)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return 1
    except AssertionError as exc:
        # a broken internal invariant, not a user mistake
        log.error("internal check failed: %s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
