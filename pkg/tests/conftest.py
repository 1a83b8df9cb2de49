"""Shared fixtures: bundled toy corpus, lexicons, one cached diagnostic run."""

from __future__ import annotations

import pathlib
from importlib import resources

import pytest

from factgauge.corpus import load_corpus
from factgauge.metrics.external import MetricDescriptor
from factgauge.metrics.scoring import build_requests, score_dataset
from factgauge.perturb import generate_diagnostic
from factgauge.taggers import load_lexicons


@pytest.fixture(scope="session")
def toy_corpus_path() -> pathlib.Path:
    return pathlib.Path(str(resources.files("factgauge") / "data" / "toy_corpus.jsonl"))


@pytest.fixture(scope="session")
def toy_corpus(toy_corpus_path):
    return load_corpus(toy_corpus_path, expect_annotations=True)


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicons()


@pytest.fixture(scope="session")
def diagnostic(toy_corpus, lexicons):
    return generate_diagnostic(toy_corpus, levels=3, runs=5, seed=42, lexicons=lexicons)


@pytest.fixture(scope="session")
def diagnostic_r25(toy_corpus, lexicons):
    # shape checks on % transformed need more runs per cell than the small
    # fixture provides; levels draw independently, so small R can dip
    return generate_diagnostic(toy_corpus, levels=3, runs=25, seed=42, lexicons=lexicons, workers=4)


@pytest.fixture(scope="session")
def rouge_table(toy_corpus, diagnostic):
    requests = build_requests(toy_corpus, diagnostic)
    descriptors = [MetricDescriptor(name=n) for n in ("rouge-1", "rouge-2", "rouge-l")]
    return score_dataset(descriptors, requests, workers=4)
