"""Lightweight linguistic resources for the perturbation engine.

Everything here is a deterministic heuristic fallback: records that arrive
pre-annotated always win. The goal is self-contained reproducibility, not
tagging accuracy.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import Annotations
from .errors import LexiconError
from .rng import choice
from .textutil import sentence_initial_flags, word_spans

HAVE_AUX = frozenset({"has", "have", "had", "having"})
MODALS = frozenset({"will", "would", "can", "could", "may", "might", "must", "shall", "should"})
BE_FORMS = frozenset({"is", "are", "was", "were", "am", "be", "been", "being"})
DO_FORMS = frozenset({"do", "does", "did"})
AUX_ALL = HAVE_AUX | MODALS | BE_FORMS | DO_FORMS

SUBJECT_PRONOUNS = frozenset({"i", "he", "she", "it", "we", "they", "you", "who"})

TENSE_TAGS = (
    "present-simple-3rd",
    "present-simple",
    "past",
    "gerund/progressive",
    "infinitive-after-modal",
    "participle-after-have",
)

# Closed-class words never proposed as verbs by the heuristics.
_STOPWORDS = frozenset(
    """a an the to of in on at by for with from as and or but nor not no so if
    that this these those there here then than when where while who whom whose
    which what why how all any some more most much many few both each every
    other another own same such only just even still yet again ever never
    always often about against into through over under between after before
    up down out off above below near since until because although though
    during across within without toward towards upon per via
    one two three four five six seven eight nine ten first second third last
    next new own also very too quite rather almost around
    mr mrs ms dr st""".split()
)

# -ing words that are overwhelmingly nouns in news text; excluded from the
# suffix verb rule.
_ING_NOUNS = frozenset(
    """morning evening thing something nothing anything everything during
    king ring spring string wing sibling ceiling darling sterling wedding
    meeting building feeling funding housing clothing cycling hiring
    shipping waiting spending training processing""".split()
)


@dataclass(frozen=True)
class LexiconSet:
    """Immutable bundle of pronoun groups, antonym map, and gazetteer.

    Pronoun groups are case-slot aligned: every group lists its surfaces in
    the order (subject, object, dependent possessive, independent
    possessive), repeating a surface where English reuses the form (e.g.
    "his" fills both possessive slots). Swaps map by slot, so the
    grammatically corresponding member is substituted; a slot missing from a
    shorter custom group makes that group ineligible as a swap target.
    """

    pronoun_sets: tuple[tuple[str, ...], ...]
    antonym_map: Mapping[str, tuple[str, ...]]
    entity_gazetteer: Mapping[str, str] | None = None
    _surfaces: frozenset[str] = field(init=False, repr=False, compare=False, default=frozenset())

    def __post_init__(self):
        seen: dict[str, int] = {}
        for gi, group in enumerate(self.pronoun_sets):
            for surface in group:
                if surface in seen and seen[surface] != gi:
                    raise LexiconError(f"pronoun surface {surface!r} appears in two groups")
                seen[surface] = gi
        object.__setattr__(self, "_surfaces", frozenset(seen))
        for word, opts in self.antonym_map.items():
            for other in opts:
                if word not in self.antonym_map.get(other, ()):
                    raise LexiconError(
                        f"antonym map is not symmetric: {other!r} lacks {word!r}"
                    )

    def pronoun_surfaces(self) -> frozenset[str]:
        return self._surfaces

    def pronoun_slot(self, surface: str) -> tuple[int, int] | None:
        """(group index, slot index) for a surface; first slot on ambiguity."""
        low = surface.lower()
        for gi, group in enumerate(self.pronoun_sets):
            for si, member in enumerate(group):
                if member == low:
                    return gi, si
        return None


def _data_path(name: str) -> Path:
    return Path(resources.files("factgauge") / "data" / name)


def load_pronoun_groups(path: str | Path) -> tuple[tuple[str, ...], ...]:
    """One group per line, whitespace-separated slot members, '#' comments."""
    groups: list[tuple[str, ...]] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        members = tuple(w.lower() for w in line.split())
        if len(members) < 2:
            raise LexiconError(f"pronoun group needs at least 2 members: {raw!r}")
        groups.append(members)
    if not groups:
        raise LexiconError("pronoun file contains no groups")
    return tuple(groups)


def load_antonym_dump(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Parse an adjective data file in the lexical database's dump format.

    Each data line is ``offset lex_filenum ss_type w_cnt word lex_id ...
    p_cnt ptr ...  | gloss``; antonymy is the ``!`` pointer between word
    positions of two synsets. The relation is symmetrized on load.
    """
    synset_words: dict[str, list[str]] = {}
    pointers: list[tuple[str, int, str, int]] = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not raw.strip() or raw.startswith("  "):
            continue
        data, _, _gloss = raw.partition(" | ")
        fields = data.split()
        try:
            offset, ss_type = fields[0], fields[2]
            if ss_type not in ("a", "s"):
                continue
            w_cnt = int(fields[3], 16)
            words = [
                fields[4 + 2 * i].replace("_", " ").lower() for i in range(w_cnt)
            ]
            pos = 4 + 2 * w_cnt
            p_cnt = int(fields[pos])
            pos += 1
            for _ in range(p_cnt):
                sym, tgt_off, _tgt_pos, st = fields[pos : pos + 4]
                pos += 4
                if sym == "!":
                    pointers.append((offset, int(st[:2], 16), tgt_off, int(st[2:], 16)))
        except (IndexError, ValueError) as exc:
            raise LexiconError(f"antonym dump line {lineno}: malformed entry ({exc})") from None
        synset_words[offset] = words
    amap: dict[str, set[str]] = {}
    for src_off, si, tgt_off, ti in pointers:
        if tgt_off not in synset_words:
            raise LexiconError(f"antonym pointer targets unknown synset {tgt_off}")
        src_words = synset_words[src_off]
        tgt_words = synset_words[tgt_off]
        a = src_words[si - 1] if si else src_words[0]
        b = tgt_words[ti - 1] if ti else tgt_words[0]
        if a != b:
            amap.setdefault(a, set()).add(b)
            amap.setdefault(b, set()).add(a)
    return {w: tuple(sorted(s)) for w, s in sorted(amap.items())}


def load_gazetteer(path: str | Path) -> dict[str, str]:
    """Tab-separated surface-form, label-type, one per line."""
    table: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise LexiconError(f"gazetteer line {lineno}: expected 'surface<TAB>label'")
        table[parts[0]] = parts[1]
    return table


def load_lexicons(
    antonyms: str | Path | None = None,
    pronouns: str | Path | None = None,
    gazetteer: str | Path | None = None,
) -> LexiconSet:
    """Assemble a LexiconSet, falling back to the bundled resources."""
    pron = load_pronoun_groups(pronouns if pronouns is not None else _data_path("pronoun_sets.txt"))
    anto = load_antonym_dump(antonyms if antonyms is not None else _data_path("antonyms.adj"))
    gaz = load_gazetteer(gazetteer if gazetteer is not None else _data_path("gazetteer.tsv"))
    return LexiconSet(pronoun_sets=pron, antonym_map=anto, entity_gazetteer=gaz)


@functools.lru_cache(maxsize=1)
def bundled_pronoun_surfaces() -> frozenset[str]:
    """Flat surface set of the bundled pronoun groups (used by corpus stats)."""
    groups = load_pronoun_groups(_data_path("pronoun_sets.txt"))
    return frozenset(w for group in groups for w in group)


def detect_tense(verb_span: tuple[int, int], text: str) -> str:
    """Tense tag for the verb token at verb_span.

    Decided from at most 3 tokens to the left (nearest first) and the
    token's suffix; unknown patterns default to present-simple.
    """
    start, end = verb_span
    spans = word_spans(text)
    idx = next((i for i, (s, e, _) in enumerate(spans) if s == start and e == end), None)
    if idx is None:
        raise ValueError(f"span {verb_span} is not a token of the text")
    token = spans[idx][2].lower()
    window = [spans[i][2].lower() for i in range(max(0, idx - 3), idx)]
    for left in reversed(window):
        if left in HAVE_AUX:
            return "participle-after-have"
        if left in MODALS:
            return "infinitive-after-modal"
    if token.endswith("ing") and len(token) > 4:
        return "gerund/progressive"
    if token.endswith("ed") and len(token) > 3:
        return "past"
    if token.endswith("s") and not token.endswith("ss") and len(token) > 2:
        return "present-simple-3rd"
    return "present-simple"


def _claim(claimed: list[tuple[int, int]], start: int, end: int) -> bool:
    for s, e in claimed:
        if start < e and s < end:
            return False
    claimed.append((start, end))
    return True


def annotate(text: str, lexicons: LexiconSet) -> Annotations:
    """Heuristic annotation: gazetteer + capitalization entities, lexicon
    pronouns, suffix/auxiliary verbs with tenses, antonym-map adjectives."""
    if not text:
        raise ValueError("cannot annotate empty text")
    spans = word_spans(text)
    initial = sentence_initial_flags(text, spans)
    pronouns = lexicons.pronoun_surfaces()
    gazetteer = lexicons.entity_gazetteer or {}

    entity_spans: list[tuple[int, int, str]] = []
    claimed: list[tuple[int, int]] = []
    claimed_tokens = [False] * len(spans)

    # Gazetteer pass: at each position try surfaces longest-first.
    by_len: dict[int, dict[tuple[str, ...], str]] = {}
    for surface, label in gazetteer.items():
        parts = tuple(surface.split())
        by_len.setdefault(len(parts), {})[parts] = label
    lengths = sorted(by_len, reverse=True)
    i = 0
    while i < len(spans):
        if claimed_tokens[i]:
            i += 1
            continue
        hit = None
        for n in lengths:
            if i + n > len(spans):
                continue
            window = tuple(spans[j][2] for j in range(i, i + n))
            label = by_len[n].get(window)
            if label is not None and not any(claimed_tokens[i : i + n]):
                hit = (n, label)
                break
        if hit is not None:
            n, label = hit
            start, end = spans[i][0], spans[i + n - 1][1]
            if _claim(claimed, start, end):
                entity_spans.append((start, end, label))
                for j in range(i, i + n):
                    claimed_tokens[j] = True
                i += n
                continue
        i += 1

    # Capitalized-run pass; runs broken by claims, non-space gaps, lowercase.
    def eligible(k: int) -> bool:
        tok = spans[k][2]
        return (
            not claimed_tokens[k]
            and tok[:1].isupper()
            and not tok.isdigit()
            and tok.lower() not in pronouns
        )

    i = 0
    while i < len(spans):
        if not eligible(i):
            i += 1
            continue
        j = i
        while (
            j + 1 < len(spans)
            and eligible(j + 1)
            and text[spans[j][1] : spans[j + 1][0]].isspace()
        ):
            j += 1
        run_len = j - i + 1
        # A lone sentence-opening capital is ambiguous; skip it.
        if run_len > 1 or not initial[i]:
            start, end = spans[i][0], spans[j][1]
            if _claim(claimed, start, end):
                entity_spans.append((start, end, "MISC"))
                for k in range(i, j + 1):
                    claimed_tokens[k] = True
        i = j + 1

    entity_spans.sort()

    def in_entity(k: int) -> bool:
        s, e = spans[k][0], spans[k][1]
        return any(s < ee and ss < e for ss, ee, _ in entity_spans)

    pronoun_spans = tuple(
        (s, e)
        for k, (s, e, tok) in enumerate(spans)
        if tok.lower() in pronouns and not in_entity(k)
    )

    verb_idx: list[int] = []
    for k, (s, e, tok) in enumerate(spans):
        low = tok.lower()
        if in_entity(k) or low in pronouns or not low.isalpha():
            continue
        if low in BE_FORMS - {"be", "been", "being"}:
            verb_idx.append(k)
            continue
        if low in _STOPWORDS or low in AUX_ALL or low in lexicons.antonym_map or len(low) < 2:
            continue
        prev = spans[k - 1][2].lower() if k > 0 else ""
        prev2 = spans[k - 2][2].lower() if k > 1 else ""
        # Be-forms do not trigger the next word: "is ready" is copula plus
        # adjective, while "is running"/"is moved" get caught by suffix.
        trigger_aux = HAVE_AUX | MODALS | DO_FORMS
        if prev in trigger_aux or (prev == "not" and prev2 in trigger_aux):
            verb_idx.append(k)
        elif prev in SUBJECT_PRONOUNS:
            verb_idx.append(k)
        elif low.endswith("ing") and len(low) > 4 and low not in _ING_NOUNS:
            verb_idx.append(k)
        elif low.endswith("ed") and len(low) > 3:
            verb_idx.append(k)

    verb_tokens = tuple(
        (spans[k][0], spans[k][1], detect_tense((spans[k][0], spans[k][1]), text))
        for k in verb_idx
    )
    adjective_tokens = tuple(
        (s, e)
        for k, (s, e, tok) in enumerate(spans)
        if tok.lower() in lexicons.antonym_map and not in_entity(k)
    )
    return Annotations(
        entity_spans=tuple(entity_spans),
        pronoun_spans=pronoun_spans,
        verb_tokens=verb_tokens,
        adjective_tokens=adjective_tokens,
    )


def antonym(word: str, lexicons: LexiconSet, rng: np.random.Generator) -> str | None:
    """One antonym drawn from rng, or None when the map has no entry."""
    options = lexicons.antonym_map.get(word.lower())
    if not options:
        return None
    return str(choice(rng, sorted(options)))
