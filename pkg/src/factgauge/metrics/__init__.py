"""Metric abstraction: native lexical overlap plus external adapters."""

from .external import (
    DEFAULT_TIMEOUT_MS,
    PROTOCOL_VERSION,
    TIMEOUT_ENV_VAR,
    AdapterClient,
    MetricDescriptor,
    MetricScore,
    ScoreError,
    adapter_timeout_ms,
    score_external,
)
from .kernels import HAVE_NUMBA, kernel_in_use, lcs_length
from .rouge import RougeScore, rouge_l, rouge_n
from .scoring import (
    ScoreRequest,
    ScoreTable,
    build_generated_requests,
    build_requests,
    load_scores,
    native_metric,
    random_baseline_request_id,
    reference_request_id,
    register_metric,
    registered_metrics,
    save_scores,
    score_dataset,
)

__all__ = [
    "AdapterClient",
    "DEFAULT_TIMEOUT_MS",
    "HAVE_NUMBA",
    "MetricDescriptor",
    "MetricScore",
    "PROTOCOL_VERSION",
    "RougeScore",
    "ScoreError",
    "ScoreRequest",
    "ScoreTable",
    "TIMEOUT_ENV_VAR",
    "adapter_timeout_ms",
    "build_generated_requests",
    "build_requests",
    "kernel_in_use",
    "lcs_length",
    "load_scores",
    "native_metric",
    "random_baseline_request_id",
    "reference_request_id",
    "register_metric",
    "registered_metrics",
    "rouge_l",
    "rouge_n",
    "save_scores",
    "score_dataset",
]
