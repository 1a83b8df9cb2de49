"""Meta-evaluation harness for factual-consistency metrics.

Generates diagnostic summaries with controlled injected factual errors,
scores them with pluggable metrics, and checks the five conditions a
trustworthy metric should satisfy: boundedness, sensitivity to error
count, robustness across error types, generality across domains, and
agreement with human judgments.
"""

from .corpus import (
    Corpus,
    Document,
    HumanAnnotationRecord,
    SummaryRecord,
    corpus_checksum,
    load_corpus,
    save_corpus,
)
from .errors import (
    AdapterError,
    ConfigError,
    CorpusError,
    FactGaugeError,
    LexiconError,
    MetricError,
    PerturbError,
    ReportError,
    StatsError,
    UndefinedCorrelationError,
)
from .perturb import (
    AppliedError,
    DiagnosticDataset,
    DiagnosticInstance,
    INJECTABLE_ERRORS,
    SUBSETS,
    apply_error,
    diagnostic_stats,
    generate_diagnostic,
    load_diagnostic,
    replay,
    save_diagnostic,
)
from .taggers import LexiconSet, annotate, load_lexicons
from .metrics import (
    MetricDescriptor,
    MetricScore,
    RougeScore,
    ScoreError,
    ScoreRequest,
    ScoreTable,
    build_requests,
    load_scores,
    rouge_l,
    rouge_n,
    save_scores,
    score_dataset,
)
from .stats import (
    AdjacentTest,
    BoundednessResult,
    ConditionReport,
    INSENSITIVITY_THRESHOLD,
    LevelSeries,
    adjacent_level_test,
    build_condition_report,
    check_boundedness,
    commonsense_correlation,
    generality_matrix,
    level_means,
    p_value_pearson,
    pearson,
    robustness_pairs,
    sensitivity,
)
from .report import (
    CellRow,
    DistributionSlice,
    Provenance,
    ReportBundle,
    build_bundle,
    emit_distributions,
    load_bundle,
    render,
    stars,
)

__all__ = [
    "AdapterError",
    "AdjacentTest",
    "AppliedError",
    "BoundednessResult",
    "CellRow",
    "ConditionReport",
    "ConfigError",
    "Corpus",
    "CorpusError",
    "DiagnosticDataset",
    "DiagnosticInstance",
    "DistributionSlice",
    "Document",
    "FactGaugeError",
    "HumanAnnotationRecord",
    "INJECTABLE_ERRORS",
    "INSENSITIVITY_THRESHOLD",
    "LevelSeries",
    "LexiconError",
    "LexiconSet",
    "MetricDescriptor",
    "MetricError",
    "MetricScore",
    "PerturbError",
    "Provenance",
    "ReportBundle",
    "ReportError",
    "RougeScore",
    "SUBSETS",
    "ScoreError",
    "ScoreRequest",
    "ScoreTable",
    "StatsError",
    "SummaryRecord",
    "UndefinedCorrelationError",
    "adjacent_level_test",
    "annotate",
    "apply_error",
    "build_bundle",
    "build_condition_report",
    "build_requests",
    "check_boundedness",
    "commonsense_correlation",
    "corpus_checksum",
    "diagnostic_stats",
    "emit_distributions",
    "generality_matrix",
    "generate_diagnostic",
    "level_means",
    "load_bundle",
    "load_corpus",
    "load_diagnostic",
    "load_lexicons",
    "load_scores",
    "p_value_pearson",
    "pearson",
    "render",
    "replay",
    "robustness_pairs",
    "rouge_l",
    "rouge_n",
    "save_corpus",
    "save_diagnostic",
    "save_scores",
    "score_dataset",
    "sensitivity",
    "stars",
]
