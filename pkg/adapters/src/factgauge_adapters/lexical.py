"""Dependency-free lexical scorer for protocol conformance testing.

The score is the clipped unigram overlap between summary and source,
normalized by the source token count. Under the engine's documented
tokenizer this equals its native ROUGE-1 recall, which gives the protocol
tests a cross-implementation oracle that needs no model downloads.
"""

from __future__ import annotations

import re
from collections import Counter
from typing import Mapping

# the documented scoring tokenizer: lowercase, maximal runs of word
# characters, everything else a separator; must not drift from the engine
_WORD_RE = re.compile(r"\w+")


def tokenize(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def unigram_overlap(source: str, summary: str) -> float:
    """Clipped unigram overlap relative to the source token count."""
    src = tokenize(source)
    cand = tokenize(summary)
    if not src or not cand:
        return 0.0
    src_counts = Counter(src)
    overlap = sum(min(count, src_counts[tok]) for tok, count in Counter(cand).items())
    return overlap / len(src)


class LexicalOverlap:
    """Scorer wrapper around unigram_overlap; load() is a no-op."""

    name = "lexical-overlap"

    def __init__(self, model_config: Mapping | None = None):
        # config accepted for interface symmetry; nothing to configure
        self._config = dict(model_config or {})

    def load(self) -> None:
        return None

    def score(self, source: str, summary: str) -> float:
        return unigram_overlap(source, summary)
