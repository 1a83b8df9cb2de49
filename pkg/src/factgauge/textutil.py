"""Tokenization helpers shared by annotation, perturbation, and metrics.

Two tokenizers live here on purpose and must not be merged:

* ``metric_tokens`` is the documented scoring tokenizer (lowercase, maximal
  runs of word characters, everything else a separator). External adapters
  that want to reproduce native scores must match it exactly.
* ``word_spans`` keeps original case and codepoint offsets for annotation
  and span surgery.
"""

from __future__ import annotations

import re
import string

_WORD_RE = re.compile(r"\w+", re.UNICODE)

# Sentence terminators used for the "sentence-initial token" heuristic.
# Colon and newline count as boundaries so dialogue speaker tags
# ("Name: Utterance") start a fresh sentence.
_SENTENCE_END = frozenset(".!?:\n")

_STRIP_CHARS = string.punctuation + "‘’“”–—…"


def metric_tokens(text: str) -> list[str]:
    """Lowercase tokens for scoring: maximal runs of word characters."""
    return _WORD_RE.findall(text.lower())


def word_spans(text: str) -> list[tuple[int, int, str]]:
    """(start, end, token) triples with codepoint offsets, case preserved."""
    return [(m.start(), m.end(), m.group()) for m in _WORD_RE.finditer(text)]


def sentence_initial_flags(text: str, spans: list[tuple[int, int, str]]) -> list[bool]:
    """Mark tokens that open a sentence.

    A token is sentence-initial when it is the first token or the gap since
    the previous token contains a sentence terminator.
    """
    flags: list[bool] = []
    prev_end = None
    for start, end, _ in spans:
        if prev_end is None:
            flags.append(True)
        else:
            gap = text[prev_end:start]
            flags.append(any(ch in _SENTENCE_END for ch in gap))
        prev_end = end
    return flags


def count_words(text: str) -> int:
    """Whitespace-delimited tokens that survive trimming punctuation."""
    count = 0
    for chunk in text.split():
        if chunk.strip(_STRIP_CHARS):
            count += 1
    return count


def match_case(original: str, replacement: str, sentence_initial: bool = False) -> str:
    """Carry the original token's casing over to its replacement.

    The first-person pronoun is a special case: "I" is uppercase in any
    position and says nothing about sentence position, while a replacement
    that *is* "i" must always render uppercase.
    """
    if replacement.lower() == "i":
        return "I"
    if original.isupper() and len(original) > 1:
        return replacement.upper()
    first_upper = original[:1].isupper() and original.lower() != "i"
    if sentence_initial or first_upper:
        return replacement[:1].upper() + replacement[1:]
    return replacement.lower()
