"""Command-line pipeline: perturb -> stats -> score -> meta -> report.

Every stage reads the previous stage's files from the output directory and
writes its own, so stages are rerunnable and individually replaceable.
Exit codes: 0 success, 1 stage failure, 2 config validation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .corpus import load_corpus
from .errors import ConfigError, FactGaugeError, MetricError
from .taggers import load_lexicons
from .perturb import (
    SUBSETS,
    diagnostic_stats,
    generate_diagnostic,
    load_diagnostic,
    save_diagnostic,
)
from .metrics.external import MetricDescriptor
from .metrics.scoring import build_requests, load_scores, save_scores, score_dataset
from .stats import ALL_DOMAINS, ALL_SUBSETS, CORRELATION_MODES, build_condition_report
from .report import build_bundle, distribution_lines, load_bundle, render

STAGES = ("perturb", "stats", "score", "meta", "report")

DIAGNOSTIC_FILE = "diagnostic.jsonl"
STATS_FILE = "diagnostic_stats.csv"
SCORES_FILE = "scores.jsonl"
BUNDLE_FILE = "bundle.jsonl"
REPORT_MD = "report.md"
REPORT_CSV = "report.csv"
DISTRIBUTIONS_FILE = "distributions.jsonl"


@dataclass(frozen=True)
class RunConfig:
    corpus: Path
    output_dir: Path
    metrics: tuple[MetricDescriptor, ...]
    levels: int = 3
    runs: int = 5
    seed: int = 0
    pronouns: Path | None = None
    antonyms: Path | None = None
    gazetteer: Path | None = None
    include_level_zero: bool = False
    correlation_mode: str = "level-mean"
    workers: int = 1

    def validate(self) -> None:
        for name, value in (("levels", self.levels), ("runs", self.runs), ("workers", self.workers)):
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
        if not self.corpus.exists():
            raise ConfigError(f"corpus path does not exist: {self.corpus}")
        for label, path in (
            ("pronouns", self.pronouns),
            ("antonyms", self.antonyms),
            ("gazetteer", self.gazetteer),
        ):
            if path is not None and not path.exists():
                raise ConfigError(f"{label} lexicon path does not exist: {path}")
        if self.correlation_mode not in CORRELATION_MODES:
            raise ConfigError(
                f"correlation_mode must be one of {CORRELATION_MODES}, got {self.correlation_mode!r}"
            )
        if not self.metrics:
            raise ConfigError("metric manifest is empty")
        names = [d.name for d in self.metrics]
        if len(names) != len(set(names)):
            raise ConfigError("duplicate metric names in manifest")


def _parse_metric(entry, index: int) -> MetricDescriptor:
    if not isinstance(entry, dict):
        raise ConfigError(f"metrics[{index}] must be an object")
    try:
        return MetricDescriptor(
            name=entry.get("name", ""),
            kind=entry.get("kind", "native"),
            command=tuple(entry.get("command", ())),
        )
    except MetricError as exc:
        raise ConfigError(f"metrics[{index}]: {exc}") from exc


def load_config(path: str | Path, overrides: argparse.Namespace | None = None) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    known = {
        "corpus", "output_dir", "metrics", "levels", "runs", "seed",
        "lexicons", "include_level_zero", "correlation_mode", "workers",
    }
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("corpus", "output_dir", "metrics"):
        if key not in raw:
            raise ConfigError(f"config missing required key {key!r}")

    lexicons = raw.get("lexicons", {})
    if not isinstance(lexicons, dict):
        raise ConfigError("lexicons must be an object")
    base = path.parent

    def resolve(p):
        return (base / p).resolve() if p is not None else None

    cfg = RunConfig(
        corpus=resolve(raw["corpus"]),
        output_dir=resolve(raw["output_dir"]),
        metrics=tuple(_parse_metric(m, i) for i, m in enumerate(raw["metrics"])),
        levels=raw.get("levels", 3),
        runs=raw.get("runs", 5),
        seed=raw.get("seed", 0),
        pronouns=resolve(lexicons.get("pronouns")),
        antonyms=resolve(lexicons.get("antonyms")),
        gazetteer=resolve(lexicons.get("gazetteer")),
        include_level_zero=bool(raw.get("include_level_zero", False)),
        correlation_mode=raw.get("correlation_mode", "level-mean"),
        workers=raw.get("workers", 1),
    )
    if overrides is not None:
        updates = {}
        if overrides.seed is not None:
            updates["seed"] = overrides.seed
        if overrides.workers is not None:
            updates["workers"] = overrides.workers
        if overrides.include_level_zero:
            updates["include_level_zero"] = True
        if overrides.correlation_mode is not None:
            updates["correlation_mode"] = overrides.correlation_mode
        if updates:
            cfg = replace(cfg, **updates)
    cfg.validate()
    return cfg


def _lexicons(cfg: RunConfig):
    return load_lexicons(
        antonyms=cfg.antonyms, pronouns=cfg.pronouns, gazetteer=cfg.gazetteer
    )


def stage_perturb(cfg: RunConfig) -> None:
    corpus = load_corpus(cfg.corpus)
    dataset = generate_diagnostic(
        corpus, cfg.levels, cfg.runs, cfg.seed, _lexicons(cfg), workers=cfg.workers
    )
    save_diagnostic(dataset, cfg.output_dir / DIAGNOSTIC_FILE)


def stage_stats(cfg: RunConfig) -> None:
    dataset = load_diagnostic(cfg.output_dir / DIAGNOSTIC_FILE)
    rows = diagnostic_stats(dataset)
    with open(cfg.output_dir / STATS_FILE, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["domain", "subset", "level", "mean_applied", "pct_transformed"])
        for row in rows:
            applied = dict(row.mean_applied)
            transformed = dict(row.pct_transformed)
            for level in sorted(applied):
                writer.writerow(
                    [row.domain, row.subset, level,
                     f"{applied[level]:.4f}", f"{transformed[level]:.2f}"]
                )
            writer.writerow(
                [row.domain, row.subset, "overall", "", f"{row.pct_transformed_overall:.2f}"]
            )


def stage_score(cfg: RunConfig) -> None:
    corpus = load_corpus(cfg.corpus)
    dataset = load_diagnostic(cfg.output_dir / DIAGNOSTIC_FILE)
    requests = build_requests(corpus, dataset)
    table = score_dataset(list(cfg.metrics), requests, workers=cfg.workers)
    save_scores(table, cfg.output_dir / SCORES_FILE)
    if table.errors:
        print(f"score: {len(table.errors)} request(s) failed (recorded in {SCORES_FILE})",
              file=sys.stderr)


def stage_meta(cfg: RunConfig) -> None:
    dataset = load_diagnostic(cfg.output_dir / DIAGNOSTIC_FILE)
    table = load_scores(cfg.output_dir / SCORES_FILE)
    domains = sorted({domain for _, domain in dataset.domains}) + [ALL_DOMAINS]
    subsets = list(SUBSETS) + [ALL_SUBSETS]
    reports = [
        build_condition_report(
            table,
            dataset,
            descriptor.name,
            domain=domain,
            subset=subset,
            include_level_zero=cfg.include_level_zero,
            correlation_mode=cfg.correlation_mode,
        )
        for descriptor in cfg.metrics
        for domain in domains
        for subset in subsets
    ]
    bundle = build_bundle(
        reports, dataset, table, include_level_zero=cfg.include_level_zero
    )
    (cfg.output_dir / BUNDLE_FILE).write_bytes(render(bundle, "structured"))


def stage_report(cfg: RunConfig) -> None:
    bundle = load_bundle(cfg.output_dir / BUNDLE_FILE)
    (cfg.output_dir / REPORT_CSV).write_bytes(render(bundle, "delimited-table"))
    (cfg.output_dir / REPORT_MD).write_bytes(render(bundle, "markdown"))
    lines = distribution_lines(bundle.distributions)
    (cfg.output_dir / DISTRIBUTIONS_FILE).write_text(
        "".join(line + "\n" for line in lines), encoding="utf-8"
    )


_STAGE_FUNCS = {
    "perturb": stage_perturb,
    "stats": stage_stats,
    "score": stage_score,
    "meta": stage_meta,
    "report": stage_report,
}


def run_subcommand(name: str, cfg: RunConfig) -> int:
    stages = STAGES if name == "all" else (name,)
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    for stage in stages:
        try:
            _STAGE_FUNCS[stage](cfg)
        except (FactGaugeError, OSError) as exc:
            print(f"stage {stage} failed: {exc}", file=sys.stderr)
            return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="factgauge",
        description="Meta-evaluate factual-consistency metrics on diagnostic summaries.",
    )
    parser.add_argument("command", choices=STAGES + ("all",))
    parser.add_argument("--config", required=True, help="path to a JSON run config")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("--workers", type=int, default=None, help="override the worker count")
    parser.add_argument(
        "--include-level-zero",
        action="store_true",
        help="include the untransformed level 0 in fit windows",
    )
    parser.add_argument(
        "--correlation-mode", choices=CORRELATION_MODES, default=None
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, overrides=args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return run_subcommand(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
