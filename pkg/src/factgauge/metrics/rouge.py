"""Lexical-overlap scores computed against the source document.

Tokenization: lowercase, runs of word characters (``\\w+``). No stemming,
no stopword removal. External adapters that want comparable numbers must
match this rule; it is part of the documented scoring interface.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..errors import MetricError
from ..textutil import metric_tokens
from .kernels import lcs_length


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float
    # degenerate: an input too short for the requested n-gram order;
    # zeros by definition rather than by measurement
    degenerate: bool = False


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def rouge_n(n: int, source: str, candidate: str) -> RougeScore:
    """Clipped n-gram overlap between source document and candidate."""
    if n not in (1, 2):
        raise MetricError(f"unsupported n-gram order {n}")
    src = metric_tokens(source)
    cand = metric_tokens(candidate)
    if len(src) < n or len(cand) < n:
        return RougeScore(0.0, 0.0, 0.0, degenerate=True)
    src_grams = Counter(tuple(src[i : i + n]) for i in range(len(src) - n + 1))
    cand_grams = Counter(tuple(cand[i : i + n]) for i in range(len(cand) - n + 1))
    overlap = sum(min(count, src_grams[gram]) for gram, count in cand_grams.items())
    precision = overlap / sum(cand_grams.values())
    recall = overlap / sum(src_grams.values())
    return RougeScore(precision, recall, _f1(precision, recall))


def rouge_l(source: str, candidate: str) -> RougeScore:
    """Longest-common-subsequence overlap over token sequences."""
    src = metric_tokens(source)
    cand = metric_tokens(candidate)
    if not src or not cand:
        return RougeScore(0.0, 0.0, 0.0, degenerate=True)
    vocab: dict[str, int] = {}
    for tok in src:
        vocab.setdefault(tok, len(vocab))
    for tok in cand:
        vocab.setdefault(tok, len(vocab))
    a = np.fromiter((vocab[t] for t in src), dtype=np.int32, count=len(src))
    b = np.fromiter((vocab[t] for t in cand), dtype=np.int32, count=len(cand))
    lcs = lcs_length(a, b)
    precision = lcs / len(cand)
    recall = lcs / len(src)
    return RougeScore(precision, recall, _f1(precision, recall))
