"""Reference adapters for the external-metric scoring protocol.

One session per process; an engine that wants parallelism spawns several
adapter processes. The lexical adapter is dependency free; the model-based
ones import their packages only when loaded.
"""

from .batch import BatchStats, batch_score_file
from .errors import AdapterError, ProtocolError
from .lexical import LexicalOverlap, tokenize, unigram_overlap
from .neural import (
    ClozeConfidence,
    EmbeddingSimilarity,
    QaFactuality,
    Scorer,
    available_metrics,
    resolve_scorer,
)
from .protocol import PROTOCOL_VERSION, AdapterSession, serve

__all__ = [
    "AdapterError",
    "AdapterSession",
    "BatchStats",
    "ClozeConfidence",
    "EmbeddingSimilarity",
    "LexicalOverlap",
    "PROTOCOL_VERSION",
    "ProtocolError",
    "QaFactuality",
    "Scorer",
    "available_metrics",
    "batch_score_file",
    "resolve_scorer",
    "serve",
    "tokenize",
    "unigram_overlap",
]
