"""Bridges to model-based factuality metrics.

Each wrapper defers its third-party import to load(), so listing metrics,
running the lexical adapter, or importing this package never pulls in
torch-sized dependencies. The wrapped packages are treated as the systems
under test; nothing here reimplements them.
"""

from __future__ import annotations

from typing import Callable, Mapping, Protocol

from .errors import AdapterError
from .lexical import LexicalOverlap


class Scorer(Protocol):
    name: str

    def load(self) -> None: ...

    def score(self, source: str, summary: str) -> float: ...


def _missing(package: str, metric: str, exc: ImportError) -> AdapterError:
    return AdapterError(
        f"metric {metric!r} needs the {package!r} package (pip install {package}): {exc}"
    )


class EmbeddingSimilarity:
    """Contextual-embedding similarity between summary and source (bert-score)."""

    name = "bertscore"

    def __init__(self, model_config: Mapping | None = None):
        self._config = dict(model_config or {})
        self._scorer = None

    def load(self) -> None:
        try:
            from bert_score import BERTScorer
        except ImportError as exc:
            raise _missing("bert-score", self.name, exc) from None
        self._scorer = BERTScorer(
            lang=self._config.get("lang", "en"),
            model_type=self._config.get("model"),
            rescale_with_baseline=bool(self._config.get("rescale", False)),
        )

    def score(self, source: str, summary: str) -> float:
        assert self._scorer is not None, "load() before score()"
        _, _, f1 = self._scorer.score([summary], [source])
        return float(f1[0])


class QaFactuality:
    """Question-generation/answering factuality (summaqa).

    The evaluator reports both an answerability confidence and an answer
    F1; `field` selects which one this metric name exposes.
    """

    def __init__(self, field: str, model_config: Mapping | None = None):
        if field not in ("avg_prob", "avg_fscore"):
            raise AdapterError(f"unknown qa output field {field!r}")
        self.name = "summaqa-confidence" if field == "avg_prob" else "summaqa-f1"
        self._field = field
        self._config = dict(model_config or {})
        self._generator = None
        self._metric = None

    def load(self) -> None:
        try:
            from summaqa import QA_Metric, QG_masked
        except ImportError as exc:
            raise _missing("summaqa", self.name, exc) from None
        self._generator = QG_masked()
        self._metric = QA_Metric()

    def score(self, source: str, summary: str) -> float:
        assert self._metric is not None, "load() before score()"
        questions, answers = self._generator.get_questions_and_answers(source)
        out = self._metric.compute(questions, answers, summary)
        return float(out[self._field])


class ClozeConfidence:
    """Masked-token fill improvement from reading the summary (blanc)."""

    name = "blanc-help"

    def __init__(self, model_config: Mapping | None = None):
        self._config = dict(model_config or {})
        self._model = None

    def load(self) -> None:
        try:
            from blanc import BlancHelp
        except ImportError as exc:
            raise _missing("blanc", self.name, exc) from None
        kwargs = {}
        if "device" in self._config:
            kwargs["device"] = self._config["device"]
        if "model" in self._config:
            kwargs["model_name"] = self._config["model"]
        self._model = BlancHelp(**kwargs)

    def score(self, source: str, summary: str) -> float:
        assert self._model is not None, "load() before score()"
        return float(self._model.eval_once(source, summary))


_FACTORIES: dict[str, Callable[[Mapping | None], Scorer]] = {
    "lexical-overlap": LexicalOverlap,
    "bertscore": EmbeddingSimilarity,
    "summaqa-confidence": lambda cfg: QaFactuality("avg_prob", cfg),
    "summaqa-f1": lambda cfg: QaFactuality("avg_fscore", cfg),
    "blanc-help": ClozeConfidence,
}


def available_metrics() -> tuple[str, ...]:
    return tuple(sorted(_FACTORIES))


def resolve_scorer(name: str, model_config: Mapping | None = None) -> Scorer:
    """Construct (but do not load) the scorer registered under name."""
    try:
        factory = _FACTORIES[name]
    except KeyError:
        known = ", ".join(available_metrics())
        raise AdapterError(f"unknown metric {name!r} (available: {known})") from None
    return factory(model_config)
