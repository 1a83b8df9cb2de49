"""Render meta-evaluation results as tables and distribution files.

Three formats: delimited-table (comma-separated, one row per cell),
markdown (metrics as columns, the table row order Upper Bound, Level 1..L,
Lower Bound, Sensitivity, Correlation, p-value), and structured (one JSON
object per line, full precision). Values for unit-interval metrics are
rendered x100 to two decimals; structured output keeps raw floats.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError, version as pkg_version

from .errors import ReportError
from .perturb import DiagnosticDataset
from .stats import ConditionReport
from .metrics.scoring import ScoreTable

RENDER_FORMATS = ("delimited-table", "markdown", "structured")

STAR_STRONG = 0.01
STAR_WEAK = 0.05


def stars(p: float | None) -> str:
    """Significance marker: ** iff p <= 0.01, * iff 0.01 < p <= 0.05."""
    if p is None:
        return ""
    if p <= STAR_STRONG:
        return "**"
    if p <= STAR_WEAK:
        return "*"
    return ""


def _tool_version() -> str:
    try:
        return pkg_version("factgauge")
    except PackageNotFoundError:
        return "0.0.0"


@dataclass(frozen=True)
class CellRow:
    metric: str
    domain: str
    subset: str
    upper_bound: float
    level_means: tuple[tuple[int, float], ...]
    lower_bound: float
    sensitivity: float
    correlation_r: float | None
    p_value: float | None
    stars: str
    flags: tuple[str, ...]

    def to_json(self) -> str:
        payload = {
            "kind": "row",
            "metric": self.metric,
            "domain": self.domain,
            "subset": self.subset,
            "upper_bound": self.upper_bound,
            "level_means": [[lvl, mean] for lvl, mean in self.level_means],
            "lower_bound": self.lower_bound,
            "sensitivity": self.sensitivity,
            "correlation_r": self.correlation_r,
            "p_value": self.p_value,
            "stars": self.stars,
            "flags": list(self.flags),
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)


@dataclass(frozen=True)
class DistributionSlice:
    metric: str
    level: int
    scores: tuple[float, ...]

    def to_json(self) -> str:
        payload = {
            "kind": "distribution",
            "metric": self.metric,
            "level": self.level,
            "scores": list(self.scores),
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)


@dataclass(frozen=True)
class Provenance:
    seed: int
    levels: int
    runs: int
    corpus_checksum: str
    version: str

    def to_json(self) -> str:
        payload = {
            "kind": "provenance",
            "seed": self.seed,
            "levels": self.levels,
            "runs": self.runs,
            "corpus_checksum": self.corpus_checksum,
            "version": self.version,
        }
        return json.dumps(payload, sort_keys=True, ensure_ascii=False)


@dataclass(frozen=True)
class ReportBundle:
    rows: tuple[CellRow, ...]
    distributions: tuple[DistributionSlice, ...]
    provenance: Provenance


def _comparative_flags(reports: list[ConditionReport]) -> dict[int, list[str]]:
    """best/worst sensitivity per (domain, subset) group, by report index.

    best goes to the steepest slope among direction-valid cells; worst to
    the flattest slope overall. Groups of one get neither.
    """
    groups: dict[tuple[str, str], list[int]] = {}
    for idx, rep in enumerate(reports):
        groups.setdefault((rep.domain, rep.subset), []).append(idx)
    extra: dict[int, list[str]] = {idx: [] for idx in range(len(reports))}
    for members in groups.values():
        if len(members) < 2:
            continue
        valid = [
            i
            for i in members
            if reports[i].correlation_r is not None
            and not reports[i].invalid_direction
            and not reports[i].insensitive
        ]
        if valid:
            top = max(reports[i].sensitivity for i in valid)
            for i in valid:
                if reports[i].sensitivity == top:
                    extra[i].append("best")
        bottom = min(reports[i].sensitivity for i in members)
        for i in members:
            if reports[i].sensitivity == bottom:
                extra[i].append("worst")
    return extra


def build_bundle(
    reports: list[ConditionReport],
    dataset: DiagnosticDataset,
    table: ScoreTable | None = None,
    include_level_zero: bool = False,
) -> ReportBundle:
    """Assemble rows straight from ConditionReports; nothing is recomputed."""
    comparative = _comparative_flags(reports)
    rows = []
    for idx, rep in enumerate(reports):
        rows.append(
            CellRow(
                metric=rep.metric,
                domain=rep.domain,
                subset=rep.subset,
                upper_bound=rep.series.upper_bound,
                level_means=rep.series.level_means,
                lower_bound=rep.series.lower_bound,
                sensitivity=rep.sensitivity_with_zero if include_level_zero else rep.sensitivity,
                correlation_r=rep.correlation_r,
                p_value=rep.p_value,
                stars=stars(rep.p_value),
                flags=tuple(list(rep.flags) + comparative[idx]),
            )
        )
    distributions: tuple[DistributionSlice, ...] = ()
    if table is not None:
        metrics = sorted({rep.metric for rep in reports})
        distributions = emit_distributions(table, dataset, metrics)
    provenance = Provenance(
        seed=dataset.seed,
        levels=dataset.levels,
        runs=dataset.runs,
        corpus_checksum=dataset.corpus_checksum,
        version=_tool_version(),
    )
    return ReportBundle(tuple(rows), distributions, provenance)


def emit_distributions(
    table: ScoreTable,
    dataset: DiagnosticDataset,
    metrics: list[str] | None = None,
) -> tuple[DistributionSlice, ...]:
    """Raw per-instance scores grouped by (metric, level); no binning."""
    names = sorted(metrics) if metrics is not None else sorted(table.metrics())
    slices = []
    for metric in names:
        by_level: dict[int, list[float]] = {}
        for inst in dataset.instances:
            by_level.setdefault(inst.nominal_level, []).append(
                table.value(metric, inst.instance_id)
            )
        for level in sorted(by_level):
            slices.append(DistributionSlice(metric, level, tuple(by_level[level])))
    return tuple(slices)


def _unit_interval(row: CellRow) -> bool:
    values = [row.upper_bound, row.lower_bound] + [m for _, m in row.level_means]
    return all(0.0 <= v <= 1.0 for v in values)


def _scale_of(row: CellRow) -> float:
    # Unit-interval metrics are displayed x100 to match the usual table
    # scale; anything else is already in display units.
    return 100.0 if _unit_interval(row) else 1.0


def _fmt(value: float | None, scale: float = 1.0) -> str:
    if value is None:
        return "-"
    return f"{value * scale:.2f}"


def _render_delimited(bundle: ReportBundle) -> str:
    levels = sorted({lvl for row in bundle.rows for lvl, _ in row.level_means if lvl > 0})
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = (
        ["metric", "domain", "subset", "upper_bound"]
        + [f"level_{lvl}" for lvl in levels]
        + ["lower_bound", "sensitivity", "correlation_r", "p_value", "stars", "flags"]
    )
    writer.writerow(header)
    for row in bundle.rows:
        scale = _scale_of(row)
        means = dict(row.level_means)
        record = [row.metric, row.domain, row.subset, _fmt(row.upper_bound, scale)]
        record += [_fmt(means.get(lvl), scale) if lvl in means else "" for lvl in levels]
        record += [
            _fmt(row.lower_bound, scale),
            _fmt(row.sensitivity, scale),
            _fmt(row.correlation_r),
            _fmt(row.p_value),
            row.stars,
            ";".join(row.flags),
        ]
        writer.writerow(record)
    return out.getvalue()


def _render_markdown(bundle: ReportBundle) -> str:
    """One table per (domain, subset); metrics as columns, the fixed row
    order Upper Bound, Level 1..L, Lower Bound, Sensitivity, Correlation,
    p-value."""
    groups: dict[tuple[str, str], list[CellRow]] = {}
    for row in bundle.rows:
        groups.setdefault((row.domain, row.subset), []).append(row)
    lines = []
    for (domain, subset), rows in sorted(groups.items()):
        rows = sorted(rows, key=lambda r: r.metric)
        levels = sorted({lvl for row in rows for lvl, _ in row.level_means if lvl > 0})
        lines.append(f"### {domain} / {subset}")
        lines.append("")
        heads = []
        for row in rows:
            head = row.metric
            if row.flags:
                head += " (" + ", ".join(row.flags) + ")"
            heads.append(head)
        lines.append("| " + " | ".join([""] + heads) + " |")
        lines.append("|" + "---|" * (len(rows) + 1))

        def table_line(label: str, cells: list[str]) -> str:
            return "| " + " | ".join([label] + cells) + " |"

        lines.append(
            table_line("Upper Bound", [_fmt(r.upper_bound, _scale_of(r)) for r in rows])
        )
        for lvl in levels:
            cells = []
            for r in rows:
                means = dict(r.level_means)
                cells.append(_fmt(means.get(lvl), _scale_of(r)) if lvl in means else "-")
            lines.append(table_line(f"Level {lvl}", cells))
        lines.append(
            table_line("Lower Bound", [_fmt(r.lower_bound, _scale_of(r)) for r in rows])
        )
        lines.append(
            table_line("Sensitivity", [_fmt(r.sensitivity, _scale_of(r)) for r in rows])
        )
        lines.append(table_line("Correlation", [_fmt(r.correlation_r) for r in rows]))
        lines.append(
            table_line("p-value", [_fmt(r.p_value) + r.stars for r in rows])
        )
        lines.append("")
    return "\n".join(lines)


def _render_structured(bundle: ReportBundle) -> str:
    lines = [bundle.provenance.to_json()]
    lines += [row.to_json() for row in bundle.rows]
    lines += [sl.to_json() for sl in bundle.distributions]
    return "\n".join(lines) + "\n"


def render(bundle: ReportBundle, format: str) -> bytes:
    """Deterministic byte output; equal bundles render byte-identically."""
    if format == "delimited-table":
        text = _render_delimited(bundle)
    elif format == "markdown":
        text = _render_markdown(bundle)
    elif format == "structured":
        text = _render_structured(bundle)
    else:
        raise ReportError(f"unknown render format {format!r}")
    return text.encode("utf-8")


def distribution_lines(slices: tuple[DistributionSlice, ...]) -> list[str]:
    return [sl.to_json() for sl in slices]


def load_bundle(path) -> ReportBundle:
    """Parse a structured render back into a ReportBundle (exact floats)."""
    provenance: Provenance | None = None
    rows: list[CellRow] = []
    slices: list[DistributionSlice] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ReportError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            kind = obj.get("kind")
            if kind == "provenance":
                provenance = Provenance(
                    seed=obj["seed"],
                    levels=obj["levels"],
                    runs=obj["runs"],
                    corpus_checksum=obj["corpus_checksum"],
                    version=obj["version"],
                )
            elif kind == "row":
                rows.append(
                    CellRow(
                        metric=obj["metric"],
                        domain=obj["domain"],
                        subset=obj["subset"],
                        upper_bound=obj["upper_bound"],
                        level_means=tuple(
                            (int(lvl), float(mean)) for lvl, mean in obj["level_means"]
                        ),
                        lower_bound=obj["lower_bound"],
                        sensitivity=obj["sensitivity"],
                        correlation_r=obj["correlation_r"],
                        p_value=obj["p_value"],
                        stars=obj["stars"],
                        flags=tuple(obj["flags"]),
                    )
                )
            elif kind == "distribution":
                slices.append(
                    DistributionSlice(obj["metric"], obj["level"], tuple(obj["scores"]))
                )
            else:
                raise ReportError(f"{path}:{lineno}: unknown record kind {kind!r}")
    if provenance is None:
        raise ReportError(f"{path}: missing provenance record")
    return ReportBundle(tuple(rows), tuple(slices), provenance)
