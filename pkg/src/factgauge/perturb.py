"""Controlled factual-error injection over reference summaries.

Five injectable error types: intrinsic-entity, extrinsic-entity, pronoun,
negation, sentiment. Instances are generated per (document, run, level,
subset) from an rng stream keyed by exactly that tuple, so output is
byte-identical no matter how generation is scheduled.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Corpus, Document, SummaryRecord, corpus_checksum
from .errors import CorpusError, PerturbError
from .rng import choice, keyed_rng
from .taggers import (
    BE_FORMS,
    DO_FORMS,
    HAVE_AUX,
    MODALS,
    LexiconSet,
    antonym,
)
from .textutil import match_case, word_spans

INJECTABLE_ERRORS = ("intrinsic-entity", "extrinsic-entity", "pronoun", "negation", "sentiment")
ANNOTATION_ONLY_ERRORS = ("false-quote", "other")

SUBSETS: dict[str, tuple[str, ...]] = {
    "entity": ("intrinsic-entity", "extrinsic-entity", "pronoun"),
    "non-entity": ("negation", "sentiment"),
}

DIAGNOSTIC_SCHEMA = "factgauge/diagnostic/1"

_VOWELS = "aeiou"

# Verbs whose final unstressed syllable takes a plain -ed (no e-restoration,
# no consonant doubling). Shared by both inflection directions so the
# negation round-trip stays exact.
_PLAIN_ED = frozenset(
    """open happen visit listen offer enter deliver consider suffer gather
    remember answer order cover differ number honor weather bother wonder
    monitor limit edit audit exit benefit profit credit budget target market
    interpret develop""".split()
)


def _is_cvc(word: str) -> bool:
    return (
        len(word) >= 3
        and word[-1] not in _VOWELS
        and word[-1] not in "wxy"
        and word[-2] in _VOWELS
        and word[-3] not in _VOWELS
    )


def base_from_past(word: str) -> str:
    """Rule-based de-inflection of a regular past form."""
    if word.endswith("ied") and len(word) > 4:
        return word[:-3] + "y"
    if word.endswith("ied") or word.endswith("eed"):
        return word[:-1]
    if word.endswith("ed") and len(word) > 3:
        stem = word[:-2]
        if stem in _PLAIN_ED:
            return stem
        if (
            len(stem) >= 3
            and stem[-1] == stem[-2]
            and stem[-1] not in _VOWELS
            and stem[-1] not in "lsz"
        ):
            return stem[:-1]
        if stem[-1] in "cuv" or (stem[-1] in "gsz" and len(stem) >= 2 and stem[-2] in _VOWELS):
            return stem + "e"
        if _is_cvc(stem):
            return stem + "e"
        return stem
    return word


def past_from_base(base: str) -> str:
    if base in _PLAIN_ED:
        return base + "ed"
    if base.endswith("e"):
        return base + "d"
    if base.endswith("y") and len(base) >= 2 and base[-2] not in _VOWELS:
        return base[:-1] + "ied"
    if _is_cvc(base):
        return base + base[-1] + "ed"
    return base + "ed"


def base_from_3rd(word: str) -> str:
    if word.endswith("ies") and len(word) > 4:
        return word[:-3] + "y"
    # "-ses" is ambiguous (passes vs opposes); only a double-s stem marks
    # an es-addition, single-s stems are "-se" verbs that just added "s".
    if word.endswith("es") and word[:-2].endswith(("ss", "x", "z", "ch", "sh", "o")):
        return word[:-2]
    if word.endswith("s") and not word.endswith("ss"):
        return word[:-1]
    return word


def third_from_base(base: str) -> str:
    if base.endswith("y") and len(base) >= 2 and base[-2] not in _VOWELS:
        return base[:-1] + "ies"
    if base.endswith(("s", "x", "z", "ch", "sh", "o")):
        return base + "es"
    return base + "s"


@dataclass(frozen=True)
class AppliedError:
    error_type: str
    original_span: tuple[int, int]
    original_text: str
    replacement_text: str

    def __post_init__(self):
        if self.replacement_text == self.original_text:
            raise PerturbError("applied error must change the text")

    def to_json(self) -> dict:
        return {
            "error_type": self.error_type,
            "original_span": list(self.original_span),
            "original_text": self.original_text,
            "replacement_text": self.replacement_text,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "AppliedError":
        return cls(
            error_type=obj["error_type"],
            original_span=(int(obj["original_span"][0]), int(obj["original_span"][1])),
            original_text=obj["original_text"],
            replacement_text=obj["replacement_text"],
        )


@dataclass(frozen=True)
class EntityDictionary:
    scope: str
    entries: Mapping[str, frozenset[str]]

    def surfaces(self, label: str) -> frozenset[str]:
        return self.entries.get(label, frozenset())


def build_entity_dictionary(scope: str, docs: Sequence[Document]) -> EntityDictionary:
    if scope not in ("single-document", "corpus-wide"):
        raise PerturbError(f"unknown dictionary scope {scope!r}")
    if scope == "single-document" and len(docs) != 1:
        raise PerturbError("single-document scope takes exactly one document")
    entries: dict[str, set[str]] = {}
    for doc in docs:
        if doc.annotations is None:
            raise PerturbError(f"document {doc.id!r} is not annotated")
        for start, end, label in doc.annotations.entity_spans:
            entries.setdefault(label, set()).add(doc.text[start:end])
    return EntityDictionary(scope=scope, entries={k: frozenset(v) for k, v in entries.items()})


@dataclass(frozen=True)
class PerturbContext:
    source: Document
    doc_dict: EntityDictionary
    corpus_dict: EntityDictionary
    lexicons: LexiconSet


@dataclass
class _State:
    """Working copy of a summary: text plus live (shifting) annotation spans."""

    text: str
    entities: list[tuple[int, int, str]]
    pronouns: list[tuple[int, int]]
    verbs: list[tuple[int, int, str]]
    adjectives: list[tuple[int, int]]
    edited: list[tuple[int, int]]

    @classmethod
    def from_record(cls, record: SummaryRecord) -> "_State":
        if record.annotations is None:
            raise PerturbError(f"summary for {record.doc_id!r} is not annotated")
        ann = record.annotations
        return cls(
            text=record.text,
            entities=sorted(ann.entity_spans),
            pronouns=sorted(ann.pronoun_spans),
            verbs=sorted(ann.verb_tokens),
            adjectives=sorted(ann.adjective_tokens),
            edited=[],
        )

    def overlaps_edit(self, start: int, end: int) -> bool:
        return any(start < e and s < end for s, e in self.edited)

    def apply(self, start: int, end: int, replacement: str) -> None:
        delta = len(replacement) - (end - start)

        def shift(spans):
            out = []
            for span in spans:
                s, e = span[0], span[1]
                if e <= start:
                    out.append(span)
                elif s >= end:
                    out.append((s + delta, e + delta, *span[2:]))
                # spans overlapping the edit are dropped; the caller re-adds
                # the transformed target where it remains meaningful
            return out

        self.entities = shift(self.entities)
        self.pronouns = shift(self.pronouns)
        self.verbs = shift(self.verbs)
        self.adjectives = shift(self.adjectives)
        self.edited = shift(self.edited)
        self.edited.append((start, start + len(replacement)))
        self.edited.sort()
        self.text = self.text[:start] + replacement + self.text[end:]


def _sentence_initial_at(text: str, start: int) -> bool:
    for ch in reversed(text[:start]):
        if ch == "\n":
            return True
        if ch.isspace() or ch in "\"'()[]‘’“”":
            continue
        return ch in ".!?:"
    return True


# --- per-type planners: return (start, end, replacement, new_target_span) ---


def _plan_entity_swap(state, target, pool, rng):
    start, end, label = target
    original = state.text[start:end]
    options = sorted(pool - {original})
    if not options:
        return None
    replacement = str(choice(rng, options))
    return start, end, replacement, (start, start + len(replacement), label)


def _plan_intrinsic(state, target, ctx, rng):
    return _plan_entity_swap(state, target, ctx.doc_dict.surfaces(target[2]), rng)


def _plan_extrinsic(state, target, ctx, rng):
    # Replacement must come from the corpus-wide dictionary and must not
    # appear anywhere in the source document (checked as a raw substring,
    # the conservative reading).
    pool = {
        s for s in ctx.corpus_dict.surfaces(target[2]) if s not in ctx.source.text
    }
    return _plan_entity_swap(state, target, pool, rng)


def _plan_pronoun(state, target, ctx, rng):
    start, end = target
    original = state.text[start:end]
    located = ctx.lexicons.pronoun_slot(original)
    if located is None:
        return None
    group_idx, slot = located
    groups = ctx.lexicons.pronoun_sets
    eligible = [gi for gi in range(len(groups)) if gi != group_idx and len(groups[gi]) > slot]
    if not eligible:
        return None
    chosen = groups[int(choice(rng, eligible))][slot]
    replacement = match_case(original, chosen, _sentence_initial_at(state.text, start))
    if replacement == original:
        return None
    return start, end, replacement, (start, start + len(replacement))


def _plan_negation(state, target, ctx, rng):
    start, end, tense = target
    text = state.text
    tokens = word_spans(text)
    idx = next((i for i, (s, e, _) in enumerate(tokens) if s == start and e == end), None)
    if idx is None:
        return None
    tok = text[start:end]
    low = tok.lower()
    prev1 = tokens[idx - 1] if idx >= 1 else None
    prev2 = tokens[idx - 2] if idx >= 2 else None

    def cased(region_start: int, replacement: str) -> str:
        if text[region_start].isupper() and replacement[:1].islower():
            return replacement[0].upper() + replacement[1:]
        return replacement

    # Removal: the clause is already negated.
    if prev1 is not None and prev1[2].lower() == "not":
        aux = prev2[2].lower() if prev2 is not None else None
        if aux == "do":
            s0 = prev2[0]
            return s0, end, cased(s0, low), (None, tense)
        if aux == "does":
            s0 = prev2[0]
            return s0, end, cased(s0, third_from_base(low)), (None, tense)
        if aux == "did":
            s0 = prev2[0]
            return s0, end, cased(s0, past_from_base(low)), (None, tense)
        s0 = prev1[0]
        return s0, end, cased(s0, tok), (None, tense)

    # The verb itself is an auxiliary/be/modal form: negate right after it.
    if low in (BE_FORMS | MODALS | HAVE_AUX | DO_FORMS):
        nxt = tokens[idx + 1] if idx + 1 < len(tokens) else None
        if nxt is not None and nxt[2].lower() == "not":
            return start, nxt[1], tok, (None, tense)
        return start, end, tok + " not", (None, tense)

    verb_part = tok[0].lower() + tok[1:] if tok[:1].isupper() and not tok.isupper() else tok
    if tense in ("participle-after-have", "infinitive-after-modal", "gerund/progressive"):
        replacement = cased(start, "not " + verb_part)
    elif tense == "present-simple-3rd":
        base = base_from_3rd(low)
        if third_from_base(base) != low:
            return None
        replacement = cased(start, "does not " + base)
    elif tense == "past":
        base = base_from_past(low)
        if past_from_base(base) != low:
            return None
        replacement = cased(start, "did not " + base)
    else:
        replacement = cased(start, "do not " + verb_part)
    return start, end, replacement, (None, tense)


def _plan_sentiment(state, target, ctx, rng):
    start, end = target
    original = state.text[start:end]
    swap = antonym(original, ctx.lexicons, rng)
    if swap is None or swap == original.lower():
        return None
    replacement = match_case(original, swap, _sentence_initial_at(state.text, start))
    return start, end, replacement, (start, start + len(replacement))


def _candidates(state: _State, error_type: str) -> list:
    if error_type in ("intrinsic-entity", "extrinsic-entity"):
        spans = state.entities
    elif error_type == "pronoun":
        spans = state.pronouns
    elif error_type == "negation":
        spans = state.verbs
    elif error_type == "sentiment":
        spans = state.adjectives
    else:
        raise PerturbError(f"error type {error_type!r} is not injectable")
    return [span for span in spans if not state.overlaps_edit(span[0], span[1])]


_PLANNERS = {
    "intrinsic-entity": _plan_intrinsic,
    "extrinsic-entity": _plan_extrinsic,
    "pronoun": _plan_pronoun,
    "negation": _plan_negation,
    "sentiment": _plan_sentiment,
}


def _apply_to_state(state: _State, error_type: str, ctx: PerturbContext, rng) -> AppliedError | None:
    """Attempt one error; on an infeasible target, resample the target once."""
    planner = _PLANNERS[error_type]
    candidates = _candidates(state, error_type)
    if not candidates:
        return None
    target = choice(rng, candidates)
    plan = planner(state, target, ctx, rng)
    if plan is not None and state.overlaps_edit(plan[0], plan[1]):
        plan = None
    if plan is None:
        remaining = [c for c in candidates if c != target]
        if not remaining:
            return None
        target = choice(rng, remaining)
        plan = planner(state, target, ctx, rng)
        if plan is not None and state.overlaps_edit(plan[0], plan[1]):
            plan = None
        if plan is None:
            return None
    start, end, replacement, new_span = plan
    original = state.text[start:end]
    if replacement == original:
        return None
    applied = AppliedError(
        error_type=error_type,
        original_span=(start, end),
        original_text=original,
        replacement_text=replacement,
    )
    state.apply(start, end, replacement)
    if error_type in ("intrinsic-entity", "extrinsic-entity"):
        state.entities.append(new_span)
        state.entities.sort()
    elif error_type == "pronoun":
        state.pronouns.append(new_span)
        state.pronouns.sort()
    elif error_type == "sentiment":
        state.adjectives.append(new_span)
        state.adjectives.sort()
    elif error_type == "negation":
        # Track the verb at its new position so later inspection still sees
        # it; its region is marked edited, so it cannot be targeted again in
        # this instance. The verb is the replacement word that is not an
        # inserted particle (falling back to the first word when the verb is
        # itself a do-form).
        words = word_spans(replacement)
        content = [w for w in words if w[2].lower() not in ("not", "do", "does", "did")]
        w = content[0] if content else words[0]
        state.verbs.append((start + w[0], start + w[1], new_span[1]))
        state.verbs.sort()
    return applied


def apply_error(
    summary: SummaryRecord,
    error_type: str,
    context: PerturbContext,
    rng,
) -> tuple[AppliedError, str] | None:
    """Inject one error into an annotated summary.

    Returns (AppliedError, edited text), or None when no eligible target
    exists; ineligibility is not an error.
    """
    if error_type not in INJECTABLE_ERRORS:
        raise PerturbError(f"error type {error_type!r} is not injectable")
    state = _State.from_record(summary)
    applied = _apply_to_state(state, error_type, context, rng)
    if applied is None:
        return None
    return applied, state.text


@dataclass(frozen=True)
class DiagnosticInstance:
    doc_id: str
    run: int
    nominal_level: int
    subset: str
    transformed_text: str
    applied: tuple[AppliedError, ...]

    @property
    def instance_id(self) -> str:
        return f"{self.doc_id}:{self.run}:{self.nominal_level}:{self.subset}"

    def to_json(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "run": self.run,
            "nominal_level": self.nominal_level,
            "subset": self.subset,
            "transformed_text": self.transformed_text,
            "applied": [a.to_json() for a in self.applied],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "DiagnosticInstance":
        return cls(
            doc_id=obj["doc_id"],
            run=int(obj["run"]),
            nominal_level=int(obj["nominal_level"]),
            subset=obj["subset"],
            transformed_text=obj["transformed_text"],
            applied=tuple(AppliedError.from_json(a) for a in obj["applied"]),
        )


@dataclass(frozen=True)
class DiagnosticDataset:
    instances: tuple[DiagnosticInstance, ...]
    seed: int
    levels: int
    runs: int
    corpus_checksum: str
    domains: tuple[tuple[str, str], ...]

    def domain_of(self, doc_id: str) -> str:
        return dict(self.domains)[doc_id]


def replay(reference_text: str, applied: Sequence[AppliedError]) -> str:
    """Re-apply recorded errors in order; asserts provenance integrity."""
    text = reference_text
    for err in applied:
        start, end = err.original_span
        if text[start:end] != err.original_text:
            raise PerturbError(
                f"replay mismatch at span ({start},{end}): "
                f"expected {err.original_text!r}, found {text[start:end]!r}"
            )
        text = text[:start] + err.replacement_text + text[end:]
    return text


def generate_diagnostic(
    corpus: Corpus,
    levels: int,
    runs: int,
    seed: int,
    lexicons: LexiconSet,
    workers: int = 1,
) -> DiagnosticDataset:
    """One instance per (document, run, level, subset).

    Level-i instances draw i error types uniformly with replacement from the
    subset's types and attempt each; failures cap |applied| below i. Every
    instance owns an rng stream keyed by (doc_id, run, level, subset), so
    output does not depend on worker count or scheduling.
    """
    if levels < 1 or runs < 1:
        raise PerturbError("levels and runs must both be >= 1")
    corpus.require_annotations()
    doc_ids = corpus.ids()
    all_docs = [corpus.documents[i] for i in doc_ids]
    corpus_dict = build_entity_dictionary("corpus-wide", all_docs)
    checksum = corpus_checksum(corpus)

    def build_for_doc(doc_id: str) -> list[DiagnosticInstance]:
        doc = corpus.documents[doc_id]
        ref = corpus.references[doc_id]
        ctx = PerturbContext(
            source=doc,
            doc_dict=build_entity_dictionary("single-document", [doc]),
            corpus_dict=corpus_dict,
            lexicons=lexicons,
        )
        out: list[DiagnosticInstance] = []
        for run in range(runs):
            for level in range(1, levels + 1):
                for subset, types in SUBSETS.items():
                    rng = keyed_rng(seed, "perturb", doc_id, run, level, subset)
                    state = _State.from_record(ref)
                    applied: list[AppliedError] = []
                    for _ in range(level):
                        etype = str(choice(rng, list(types)))
                        result = _apply_to_state(state, etype, ctx, rng)
                        if result is not None:
                            applied.append(result)
                    out.append(
                        DiagnosticInstance(
                            doc_id=doc_id,
                            run=run,
                            nominal_level=level,
                            subset=subset,
                            transformed_text=state.text,
                            applied=tuple(applied),
                        )
                    )
        return out

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_doc = list(pool.map(build_for_doc, doc_ids))
    else:
        per_doc = [build_for_doc(doc_id) for doc_id in doc_ids]
    instances = tuple(inst for chunk in per_doc for inst in chunk)
    domains = tuple((doc_id, corpus.documents[doc_id].domain) for doc_id in doc_ids)
    return DiagnosticDataset(
        instances=instances,
        seed=seed,
        levels=levels,
        runs=runs,
        corpus_checksum=checksum,
        domains=domains,
    )


def save_diagnostic(dataset: DiagnosticDataset, path: str | Path) -> None:
    header = {
        "schema": DIAGNOSTIC_SCHEMA,
        "seed": dataset.seed,
        "levels": dataset.levels,
        "runs": dataset.runs,
        "corpus_sha256": dataset.corpus_checksum,
        "domains": {k: v for k, v in dataset.domains},
    }
    lines = [json.dumps(header, ensure_ascii=False, sort_keys=True)]
    lines.extend(json.dumps(inst.to_json(), ensure_ascii=False) for inst in dataset.instances)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_diagnostic(path: str | Path) -> DiagnosticDataset:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        first = handle.readline().strip()
        try:
            header = json.loads(first) if first else {}
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON ({exc.msg})", 1) from None
        if not isinstance(header, dict) or header.get("schema") != DIAGNOSTIC_SCHEMA:
            raise CorpusError(f"first line must carry schema {DIAGNOSTIC_SCHEMA!r}", 1)
        instances = []
        for lineno, raw in enumerate(handle, start=2):
            raw = raw.strip()
            if not raw:
                continue
            try:
                instances.append(DiagnosticInstance.from_json(json.loads(raw)))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CorpusError(f"malformed instance ({exc})", lineno) from None
    try:
        return DiagnosticDataset(
            instances=tuple(instances),
            seed=int(header["seed"]),
            levels=int(header["levels"]),
            runs=int(header["runs"]),
            corpus_checksum=header["corpus_sha256"],
            domains=tuple(sorted(header["domains"].items())),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CorpusError(f"malformed header ({exc})", 1) from None


@dataclass(frozen=True)
class DiagStatsRow:
    domain: str
    subset: str
    mean_applied: tuple[tuple[int, float], ...]
    pct_transformed: tuple[tuple[int, float], ...]
    pct_transformed_overall: float


def diagnostic_stats(dataset: DiagnosticDataset) -> tuple[DiagStatsRow, ...]:
    """Per (domain, subset) plus an "all"-domains aggregate per subset:
    mean |applied| and % transformed by level."""
    if not dataset.instances:
        raise PerturbError("empty dataset")
    domain_of = dict(dataset.domains)
    groups: dict[tuple[str, str], list[DiagnosticInstance]] = {}
    for inst in dataset.instances:
        groups.setdefault((domain_of[inst.doc_id], inst.subset), []).append(inst)
        groups.setdefault(("all", inst.subset), []).append(inst)
    rows = []
    for (domain, subset), insts in sorted(groups.items()):
        levels = sorted({i.nominal_level for i in insts})
        mean_applied = []
        pct = []
        for level in levels:
            at = [i for i in insts if i.nominal_level == level]
            mean_applied.append((level, sum(len(i.applied) for i in at) / len(at)))
            pct.append((level, 100.0 * sum(1 for i in at if i.applied) / len(at)))
        overall = 100.0 * sum(1 for i in insts if i.applied) / len(insts)
        rows.append(
            DiagStatsRow(
                domain=domain,
                subset=subset,
                mean_applied=tuple(mean_applied),
                pct_transformed=tuple(pct),
                pct_transformed_overall=overall,
            )
        )
    return tuple(rows)
