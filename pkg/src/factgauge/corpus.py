"""Corpus ingestion, descriptive statistics, and evaluation-set sampling.

File format (newline-delimited JSON, UTF-8):

* header line: ``{"schema": "factgauge/corpus/1"}``
* document line: ``{"id", "source_text", "reference_summary", "domain",
  "annotations"?}`` where annotations holds ``{"source": ..., "summary": ...}``
  span blocks.
* generated-summary line (optional, for human-judgment studies):
  ``{"id", "doc_id", "summary_text", "kind"?, "annotations"?}``. Its doc_id
  must resolve to a document in the same file.

All spans are unicode-codepoint offsets into their text.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import CorpusError
from .rng import keyed_rng
from .textutil import count_words, metric_tokens

CORPUS_SCHEMA = "factgauge/corpus/1"
HUMAN_SCHEMA = "factgauge/human-annotations/1"

DOMAINS = ("short-news", "long-news", "dialogue", "other")

SUMMARY_KINDS = ("reference", "generated", "transformed", "random-baseline")

# Error types allowed in human-annotation records: the five injectable ones
# plus the two annotation-only kinds.
HUMAN_ERROR_TYPES = (
    "intrinsic-entity",
    "extrinsic-entity",
    "pronoun",
    "negation",
    "sentiment",
    "false-quote",
    "other",
)

JUDGED_FACTUAL = ("yes", "no", "not-sure")


@dataclass(frozen=True)
class Annotations:
    """Span annotations over one text; offsets are unicode codepoints."""

    entity_spans: tuple[tuple[int, int, str], ...] = ()
    pronoun_spans: tuple[tuple[int, int], ...] = ()
    verb_tokens: tuple[tuple[int, int, str], ...] = ()
    adjective_tokens: tuple[tuple[int, int], ...] = ()

    def validate(self, text: str, where: str, line: int | None = None) -> None:
        n = len(text)
        for name, spans in (
            ("entity_spans", self.entity_spans),
            ("pronoun_spans", self.pronoun_spans),
            ("verb_tokens", self.verb_tokens),
            ("adjective_tokens", self.adjective_tokens),
        ):
            for span in spans:
                start, end = span[0], span[1]
                if not (0 <= start < end <= n):
                    raise CorpusError(
                        f"{where}: {name} span ({start},{end}) outside text bounds 0..{n}",
                        line,
                    )
        ents = sorted((s, e) for s, e, _ in self.entity_spans)
        for (s1, e1), (s2, e2) in zip(ents, ents[1:]):
            if s2 < e1:
                raise CorpusError(
                    f"{where}: entity spans ({s1},{e1}) and ({s2},{e2}) overlap", line
                )

    def to_json(self) -> dict:
        return {
            "entity_spans": [list(s) for s in self.entity_spans],
            "pronoun_spans": [list(s) for s in self.pronoun_spans],
            "verb_tokens": [list(s) for s in self.verb_tokens],
            "adjective_tokens": [list(s) for s in self.adjective_tokens],
        }

    @classmethod
    def from_json(cls, obj: Mapping, where: str, line: int | None = None) -> "Annotations":
        if not isinstance(obj, Mapping):
            raise CorpusError(f"{where}: annotations must be an object", line)
        try:
            return cls(
                entity_spans=tuple(
                    (int(s), int(e), str(lab)) for s, e, lab in obj.get("entity_spans", ())
                ),
                pronoun_spans=tuple(
                    (int(s), int(e)) for s, e in obj.get("pronoun_spans", ())
                ),
                verb_tokens=tuple(
                    (int(s), int(e), str(t)) for s, e, t in obj.get("verb_tokens", ())
                ),
                adjective_tokens=tuple(
                    (int(s), int(e)) for s, e in obj.get("adjective_tokens", ())
                ),
            )
        except (TypeError, ValueError) as exc:
            raise CorpusError(f"{where}: malformed annotations ({exc})", line) from None


@dataclass(frozen=True)
class Document:
    id: str
    text: str
    domain: str
    annotations: Annotations | None = None


@dataclass(frozen=True)
class SummaryRecord:
    doc_id: str
    text: str
    kind: str = "reference"
    annotations: Annotations | None = None


@dataclass(frozen=True)
class HumanAnnotationRecord:
    summary_id: str
    doc_id: str
    error_counts: tuple[tuple[str, int], ...]
    total_level: int
    judged_factual: str

    def counts(self) -> dict[str, int]:
        return dict(self.error_counts)

    def level_excluding(self, excluded: Iterable[str]) -> int:
        banned = set(excluded)
        return sum(c for t, c in self.error_counts if t not in banned)


@dataclass
class Corpus:
    """Documents plus their reference summaries; immutable after load."""

    documents: dict[str, Document] = field(default_factory=dict)
    references: dict[str, SummaryRecord] = field(default_factory=dict)
    generated: dict[str, SummaryRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.documents)

    def ids(self) -> list[str]:
        return sorted(self.documents)

    def require_annotations(self) -> None:
        for doc_id in self.ids():
            if self.documents[doc_id].annotations is None:
                raise CorpusError(f"document {doc_id!r} is missing annotations")
            if self.references[doc_id].annotations is None:
                raise CorpusError(f"reference summary for {doc_id!r} is missing annotations")


def _parse_document_line(obj: Mapping, line: int, expect_annotations: bool):
    for key in ("id", "source_text", "reference_summary", "domain"):
        if key not in obj:
            raise CorpusError(f"document record missing field {key!r}", line)
    doc_id = obj["id"]
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusError("document id must be a nonempty string", line)
    domain = obj["domain"]
    if domain not in DOMAINS:
        raise CorpusError(f"unknown domain {domain!r} (expected one of {DOMAINS})", line)
    ann = obj.get("annotations")
    doc_ann = summ_ann = None
    if ann is not None:
        doc_ann = Annotations.from_json(ann.get("source", {}), f"doc {doc_id}", line)
        summ_ann = Annotations.from_json(ann.get("summary", {}), f"summary {doc_id}", line)
    elif expect_annotations:
        raise CorpusError(f"document {doc_id!r} has no annotations but they are required", line)
    doc = Document(id=doc_id, text=str(obj["source_text"]), domain=domain, annotations=doc_ann)
    ref = SummaryRecord(
        doc_id=doc_id, text=str(obj["reference_summary"]), kind="reference", annotations=summ_ann
    )
    if doc_ann is not None:
        doc_ann.validate(doc.text, f"doc {doc_id}", line)
    if summ_ann is not None:
        summ_ann.validate(ref.text, f"summary {doc_id}", line)
    return doc, ref


def _parse_summary_line(obj: Mapping, line: int):
    for key in ("id", "doc_id", "summary_text"):
        if key not in obj:
            raise CorpusError(f"summary record missing field {key!r}", line)
    kind = obj.get("kind", "generated")
    if kind not in SUMMARY_KINDS:
        raise CorpusError(f"unknown summary kind {kind!r}", line)
    ann = obj.get("annotations")
    parsed = None
    if ann is not None:
        parsed = Annotations.from_json(ann, f"summary {obj['id']}", line)
    rec = SummaryRecord(doc_id=str(obj["doc_id"]), text=str(obj["summary_text"]), kind=kind,
                        annotations=parsed)
    if parsed is not None:
        parsed.validate(rec.text, f"summary {obj['id']}", line)
    return str(obj["id"]), rec


def load_corpus(path: str | Path, expect_annotations: bool = False) -> Corpus:
    """Read a corpus file; see the module docstring for the format."""
    path = Path(path)
    corpus = Corpus()
    with path.open("r", encoding="utf-8") as handle:
        header_seen = False
        any_record = False
        for lineno, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON ({exc.msg})", lineno) from None
            if not header_seen:
                if not isinstance(obj, dict) or obj.get("schema") != CORPUS_SCHEMA:
                    raise CorpusError(
                        f"first line must be the header {{\"schema\": \"{CORPUS_SCHEMA}\"}}", lineno
                    )
                header_seen = True
                continue
            if not isinstance(obj, dict):
                raise CorpusError("record must be a JSON object", lineno)
            any_record = True
            if "doc_id" in obj:
                summary_id, rec = _parse_summary_line(obj, lineno)
                if summary_id in corpus.generated:
                    raise CorpusError(f"duplicate summary id {summary_id!r}", lineno)
                corpus.generated[summary_id] = rec
            else:
                doc, ref = _parse_document_line(obj, lineno, expect_annotations)
                if doc.id in corpus.documents:
                    raise CorpusError(f"duplicate document id {doc.id!r}", lineno)
                corpus.documents[doc.id] = doc
                corpus.references[doc.id] = ref
    if not header_seen or not any_record:
        raise CorpusError("no records")
    for summary_id, rec in corpus.generated.items():
        if rec.doc_id not in corpus.documents:
            raise CorpusError(
                f"summary {summary_id!r} references unknown doc_id {rec.doc_id!r}"
            )
    return corpus


def _canonical_record(doc: Document, ref: SummaryRecord) -> dict:
    record: dict = {
        "id": doc.id,
        "source_text": doc.text,
        "reference_summary": ref.text,
        "domain": doc.domain,
    }
    if doc.annotations is not None or ref.annotations is not None:
        record["annotations"] = {
            "source": (doc.annotations or Annotations()).to_json(),
            "summary": (ref.annotations or Annotations()).to_json(),
        }
    return record


def corpus_lines(corpus: Corpus) -> list[str]:
    """Canonical serialization: header, documents by id, summaries by id."""
    lines = [json.dumps({"schema": CORPUS_SCHEMA}, ensure_ascii=False)]
    for doc_id in corpus.ids():
        record = _canonical_record(corpus.documents[doc_id], corpus.references[doc_id])
        lines.append(json.dumps(record, ensure_ascii=False))
    for summary_id in sorted(corpus.generated):
        rec = corpus.generated[summary_id]
        obj: dict = {"id": summary_id, "doc_id": rec.doc_id, "summary_text": rec.text,
                     "kind": rec.kind}
        if rec.annotations is not None:
            obj["annotations"] = rec.annotations.to_json()
        lines.append(json.dumps(obj, ensure_ascii=False))
    return lines


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    Path(path).write_text("\n".join(corpus_lines(corpus)) + "\n", encoding="utf-8")


def corpus_checksum(corpus: Corpus) -> str:
    """SHA-256 over the canonical serialization; pinned in dataset headers."""
    h = hashlib.sha256()
    for line in corpus_lines(corpus):
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


@dataclass(frozen=True)
class SideStats:
    words: float
    entities: float
    pronoun_words: float
    verbs: float
    adjectives: float


@dataclass(frozen=True)
class CorpusStats:
    n_documents: int
    summary: SideStats
    source: SideStats

    def to_json(self) -> dict:
        return {
            "n_documents": self.n_documents,
            "summary": vars(self.summary),
            "source": vars(self.source),
        }


def side_counts(text: str, annotations: Annotations, pronoun_surfaces: frozenset[str]) -> dict:
    """Raw counts for one text; pronouns counted from the fixed lexicon,
    entities/verbs/adjectives from the annotations."""
    tokens = metric_tokens(text)
    return {
        "words": count_words(text),
        "entities": len(annotations.entity_spans),
        "pronoun_words": sum(1 for t in tokens if t in pronoun_surfaces),
        "verbs": len(annotations.verb_tokens),
        "adjectives": len(annotations.adjective_tokens),
    }


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Average word/entity/pronoun/verb/adjective counts for summaries and sources."""
    if not corpus.documents:
        raise CorpusError("empty corpus")
    corpus.require_annotations()
    from .taggers import bundled_pronoun_surfaces

    surfaces = bundled_pronoun_surfaces()
    sides = {"summary": [], "source": []}
    for doc_id in corpus.ids():
        doc = corpus.documents[doc_id]
        ref = corpus.references[doc_id]
        sides["source"].append(side_counts(doc.text, doc.annotations, surfaces))
        sides["summary"].append(side_counts(ref.text, ref.annotations, surfaces))

    def avg(rows: list[dict]) -> SideStats:
        n = len(rows)
        return SideStats(**{k: sum(r[k] for r in rows) / n for k in rows[0]})

    return CorpusStats(
        n_documents=len(corpus.documents),
        summary=avg(sides["summary"]),
        source=avg(sides["source"]),
    )


def sample_eval_set(corpus: Corpus, n: int, seed: int) -> Corpus:
    """Uniform sample of n document/reference pairs without replacement.

    Ids are sorted before drawing, so the selection depends only on corpus
    content and seed, never on record order.
    """
    ids = corpus.ids()
    if n > len(ids):
        raise CorpusError(f"sample size {n} exceeds corpus size {len(ids)}")
    rng = keyed_rng(seed, "sample-eval-set")
    chosen = sorted(rng.choice(len(ids), size=n, replace=False).tolist())
    keep = [ids[i] for i in chosen]
    sampled = Corpus(
        documents={i: corpus.documents[i] for i in keep},
        references={i: corpus.references[i] for i in keep},
        generated={
            sid: rec for sid, rec in corpus.generated.items() if rec.doc_id in set(keep)
        },
    )
    return sampled


def load_human_annotations(path: str | Path) -> list[HumanAnnotationRecord]:
    """Read a human-annotation file (header + one record per line)."""
    path = Path(path)
    records: list[HumanAnnotationRecord] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as handle:
        header_seen = False
        for lineno, raw in enumerate(handle, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"invalid JSON ({exc.msg})", lineno) from None
            if not header_seen:
                if not isinstance(obj, dict) or obj.get("schema") != HUMAN_SCHEMA:
                    raise CorpusError(
                        f"first line must be the header {{\"schema\": \"{HUMAN_SCHEMA}\"}}", lineno
                    )
                header_seen = True
                continue
            for key in ("summary_id", "doc_id", "error_counts", "total_level", "judged_factual"):
                if key not in obj:
                    raise CorpusError(f"annotation record missing field {key!r}", lineno)
            counts = obj["error_counts"]
            if not isinstance(counts, Mapping):
                raise CorpusError("error_counts must be an object", lineno)
            for etype, count in counts.items():
                if etype not in HUMAN_ERROR_TYPES:
                    raise CorpusError(f"unknown error type {etype!r}", lineno)
                if not isinstance(count, int) or count < 0:
                    raise CorpusError(f"error count for {etype!r} must be a non-negative int",
                                      lineno)
            total = obj["total_level"]
            if total != sum(counts.values()):
                raise CorpusError(
                    f"total_level {total} does not equal the sum of error_counts "
                    f"{sum(counts.values())}",
                    lineno,
                )
            judged = obj["judged_factual"]
            if judged not in JUDGED_FACTUAL:
                raise CorpusError(f"judged_factual must be one of {JUDGED_FACTUAL}", lineno)
            if judged == "yes" and total != 0:
                raise CorpusError("judged_factual=yes requires total_level=0", lineno)
            if obj["summary_id"] in seen:
                raise CorpusError(f"duplicate summary_id {obj['summary_id']!r}", lineno)
            seen.add(obj["summary_id"])
            records.append(
                HumanAnnotationRecord(
                    summary_id=str(obj["summary_id"]),
                    doc_id=str(obj["doc_id"]),
                    error_counts=tuple(sorted((str(t), int(c)) for t, c in counts.items())),
                    total_level=int(total),
                    judged_factual=str(judged),
                )
            )
    if not records:
        raise CorpusError("no records")
    return records
