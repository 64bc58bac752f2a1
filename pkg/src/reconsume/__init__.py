"""Repeat-consumption analytics and next-day consumption prediction.

The package covers the full pipeline for timestamped user-item event
logs: parsing and cleaning (:mod:`~reconsume.ingest`), repeat-fraction
measurement over sliding day windows (:mod:`~reconsume.repeats`),
exploration-exploitation mixture models with optional time decay
(:mod:`~reconsume.models`), a sliding-window next-day evaluation
protocol (:mod:`~reconsume.evaluate`), rank-based group comparisons
(:mod:`~reconsume.stats`), and a synthetic generator with known ground
truth (:mod:`~reconsume.synth`).  ``reconsume.kernels`` selects between
a numba-jitted and a pure-numpy implementation of the hot loops.
"""

from .ingest import (
    CleaningConfig,
    CleaningReport,
    ConsumptionEvent,
    EventLog,
    ParseError,
    UserProfile,
    clean,
    p_core_filter,
    parse_events,
    parse_profiles,
    write_events,
)
from .metrics import ndcg_at_n, novel_only_view, precision_at_n, recall_at_n
from .models import (
    CountStats,
    MixtureParams,
    ScoredList,
    build_counts,
    em_fit,
    mixture_score,
    theta_individual,
    theta_population,
    top_n,
    tune_lambda,
)
from .repeats import (
    ConsumptionSequence,
    RepeatStats,
    WindowSpec,
    across_meal_fraction,
    compute_repeat_stats,
    day_repeat_fraction,
    empirical_cdf,
    sequence_from_log,
    user_repeat_fraction,
)
from .evaluate import (
    MetricRecord,
    ProtocolConfig,
    ProtocolResult,
    SessionSplit,
    aggregate_report,
    grouped_report,
    make_sessions,
    run_protocol,
)
from .stats import GroupedSamples, TestResult, dunn_pairwise, kruskal_wallis
from .synth import GroundTruth, SynthConfig, generate

__version__ = "0.1.0"
