"""Dataset-scale scoring: requests, the native-metric registry, tables.

Every scorable text becomes one ScoreRequest. Besides the transformed
instances, each document contributes its reference summary (the upper
bound, level 0) and a randomly paired summary from another document (the
lower bound); the pairing is keyed by the dataset seed so the whole table
is reproducible.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

from ..corpus import Corpus
from ..errors import CorpusError, MetricError
from ..perturb import DiagnosticDataset
from ..rng import choice, keyed_rng
from .external import MetricDescriptor, MetricScore, ScoreError, score_external
from .rouge import rouge_l, rouge_n

SCORES_SCHEMA = "factgauge/scores/1"

REFERENCE_SUFFIX = "ref"
RANDOM_SUFFIX = "rand"


@dataclass(frozen=True)
class ScoreRequest:
    instance_id: str
    source: str
    candidate: str
    doc_id: str
    kind: str  # one of corpus.SUMMARY_KINDS
    applied: int = 0
    level: int | None = None
    subset: str | None = None


NativeMetric = Callable[[ScoreRequest], float]

_REGISTRY: dict[str, NativeMetric] = {}


def register_metric(name: str, fn: NativeMetric, overwrite: bool = False) -> None:
    if not overwrite and name in _REGISTRY:
        raise MetricError(f"metric {name!r} already registered")
    _REGISTRY[name] = fn


def native_metric(name: str) -> NativeMetric:
    try:
        return _REGISTRY[name]
    except KeyError:
        raise MetricError(f"unknown native metric {name!r}") from None


def registered_metrics() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


register_metric("rouge-1", lambda req: rouge_n(1, req.source, req.candidate).f1)
register_metric("rouge-2", lambda req: rouge_n(2, req.source, req.candidate).f1)
register_metric("rouge-l", lambda req: rouge_l(req.source, req.candidate).f1)


def reference_request_id(doc_id: str) -> str:
    return f"{doc_id}:{REFERENCE_SUFFIX}"


def random_baseline_request_id(doc_id: str) -> str:
    return f"{doc_id}:{RANDOM_SUFFIX}"


def build_requests(corpus: Corpus, dataset: DiagnosticDataset) -> list[ScoreRequest]:
    """All requests for one diagnostic run, in canonical order.

    Order: per sorted document its reference then its random pairing, then
    every transformed instance in dataset order.
    """
    requests: list[ScoreRequest] = []
    doc_ids = corpus.ids()
    if len(doc_ids) < 2:
        raise MetricError("need at least 2 documents to pair random baselines")
    for doc_id in doc_ids:
        doc = corpus.documents[doc_id]
        requests.append(
            ScoreRequest(
                instance_id=reference_request_id(doc_id),
                source=doc.text,
                candidate=corpus.references[doc_id].text,
                doc_id=doc_id,
                kind="reference",
            )
        )
        rng = keyed_rng(dataset.seed, "lower-bound", doc_id)
        other = [d for d in doc_ids if d != doc_id]
        paired = str(choice(rng, other))
        requests.append(
            ScoreRequest(
                instance_id=random_baseline_request_id(doc_id),
                source=doc.text,
                candidate=corpus.references[paired].text,
                doc_id=doc_id,
                kind="random-baseline",
            )
        )
    for inst in dataset.instances:
        requests.append(
            ScoreRequest(
                instance_id=inst.instance_id,
                source=corpus.documents[inst.doc_id].text,
                candidate=inst.transformed_text,
                doc_id=inst.doc_id,
                kind="transformed",
                applied=len(inst.applied),
                level=inst.nominal_level,
                subset=inst.subset,
            )
        )
    return requests


def build_generated_requests(corpus: Corpus) -> list[ScoreRequest]:
    """Requests for human-annotated generated summaries, by summary id."""
    requests = []
    for summary_id in sorted(corpus.generated):
        rec = corpus.generated[summary_id]
        requests.append(
            ScoreRequest(
                instance_id=summary_id,
                source=corpus.documents[rec.doc_id].text,
                candidate=rec.text,
                doc_id=rec.doc_id,
                kind=rec.kind,
            )
        )
    return requests


@dataclass
class ScoreTable:
    scores: dict[tuple[str, str], float] = field(default_factory=dict)
    errors: tuple[ScoreError, ...] = ()

    def value(self, metric: str, instance_id: str) -> float:
        try:
            return self.scores[(metric, instance_id)]
        except KeyError:
            raise MetricError(f"missing score for {metric!r}/{instance_id!r}") from None

    def has(self, metric: str, instance_id: str) -> bool:
        return (metric, instance_id) in self.scores

    def metrics(self) -> tuple[str, ...]:
        return tuple(sorted({m for m, _ in self.scores}))

    def __len__(self) -> int:
        return len(self.scores)


def score_dataset(
    descriptors: Sequence[MetricDescriptor],
    requests: Sequence[ScoreRequest],
    workers: int = 1,
    timeout_ms: int | None = None,
) -> ScoreTable:
    """Full (metric x request) table; values independent of worker count.

    Native metrics fan out over a thread pool. Each external metric's
    requests are split into contiguous chunks, one adapter process per
    chunk; results are keyed by id, so scheduling cannot reorder them.
    Per-instance adapter failures land in table.errors; systemic failures
    (launch, handshake) raise.
    """
    if workers < 1:
        raise MetricError("workers must be >= 1")
    names = [d.name for d in descriptors]
    if len(set(names)) != len(names):
        raise MetricError("metric names must be unique within a run")
    table = ScoreTable()
    errors: list[ScoreError] = []

    for descriptor in descriptors:
        if descriptor.kind != "native":
            continue
        fn = native_metric(descriptor.name)

        def run(req: ScoreRequest, fn=fn, name=descriptor.name):
            try:
                return MetricScore(name, req.instance_id, float(fn(req)))
            except MetricError as exc:
                return ScoreError(name, req.instance_id, str(exc))

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, requests))
        else:
            results = [run(r) for r in requests]
        for res in results:
            if isinstance(res, MetricScore):
                table.scores[(res.metric, res.instance_id)] = res.value
            else:
                errors.append(res)

    for descriptor in descriptors:
        if descriptor.kind != "external":
            continue
        batch = [(r.instance_id, r.source, r.candidate) for r in requests]
        chunks = _split(batch, workers)
        if len(chunks) > 1:
            with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
                parts = list(
                    pool.map(lambda c: score_external(descriptor, c, timeout_ms), chunks)
                )
        else:
            parts = [score_external(descriptor, batch, timeout_ms)]
        for part_scores, part_errors in parts:
            for score in part_scores:
                table.scores[(score.metric, score.instance_id)] = score.value
            errors.extend(part_errors)

    table.errors = tuple(errors)
    return table


def _split(items: list, parts: int) -> list[list]:
    parts = max(1, min(parts, len(items)))
    size, extra = divmod(len(items), parts)
    out, start = [], 0
    for i in range(parts):
        end = start + size + (1 if i < extra else 0)
        out.append(items[start:end])
        start = end
    return [c for c in out if c]


def save_scores(table: ScoreTable, path: str | Path) -> None:
    lines = [json.dumps({"schema": SCORES_SCHEMA}, ensure_ascii=False)]
    for (metric, instance_id), value in sorted(table.scores.items()):
        lines.append(
            json.dumps(
                {"metric": metric, "instance_id": instance_id, "value": value},
                ensure_ascii=False,
            )
        )
    for err in table.errors:
        lines.append(
            json.dumps(
                {"metric": err.metric, "instance_id": err.instance_id, "error": err.message},
                ensure_ascii=False,
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_scores(path: str | Path) -> ScoreTable:
    path = Path(path)
    table = ScoreTable()
    errors = []
    with path.open("r", encoding="utf-8") as handle:
        first = handle.readline().strip()
        try:
            header = json.loads(first) if first else {}
        except json.JSONDecodeError as exc:
            raise CorpusError(f"invalid JSON ({exc.msg})", 1) from None
        if not isinstance(header, dict) or header.get("schema") != SCORES_SCHEMA:
            raise CorpusError(f"first line must carry schema {SCORES_SCHEMA!r}", 1)
        for lineno, raw in enumerate(handle, start=2):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
                metric, instance_id = obj["metric"], obj["instance_id"]
                if "error" in obj:
                    errors.append(ScoreError(metric, instance_id, obj["error"]))
                else:
                    table.scores[(metric, instance_id)] = float(obj["value"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise CorpusError(f"malformed score line ({exc})", lineno) from None
    table.errors = tuple(errors)
    return table
