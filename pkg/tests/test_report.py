"""Rendering: tables, markdown, structured bundles, distributions."""

from __future__ import annotations

import numpy as np
import pytest

from factgauge.errors import ReportError
from factgauge.metrics.scoring import (
    ScoreTable,
    random_baseline_request_id,
    reference_request_id,
)
from factgauge.report import (
    CellRow,
    Provenance,
    ReportBundle,
    build_bundle,
    emit_distributions,
    load_bundle,
    render,
    stars,
)
from factgauge.stats import build_condition_report


def synth_table(dataset, metric, score_of, ref=1.0, rand=0.0):
    table = ScoreTable()
    for doc_id, _ in dataset.domains:
        table.scores[(metric, reference_request_id(doc_id))] = ref
        table.scores[(metric, random_baseline_request_id(doc_id))] = rand
    for inst in dataset.instances:
        table.scores[(metric, inst.instance_id)] = score_of(len(inst.applied))
    return table


def one_report(diagnostic, metric="synt", slope=0.01, **kwargs):
    table = synth_table(diagnostic, metric, lambda a: 1.0 - slope * a)
    return build_condition_report(
        table, diagnostic, metric, correlation_mode="per-summary", **kwargs
    )


def test_stars_thresholds():
    assert stars(0.009) == "**"
    assert stars(0.01) == "**"
    assert stars(0.010001) == "*"
    assert stars(0.05) == "*"
    assert stars(0.051) == ""
    assert stars(None) == ""


def test_markdown_one_cell_layout(diagnostic):
    bundle = build_bundle([one_report(diagnostic)], diagnostic)
    text = render(bundle, "markdown").decode("utf-8")
    lines = text.splitlines()
    assert lines[0] == "### all / all"
    assert lines[2].startswith("| ")  # header: blank label column + metric
    assert "synt" in lines[2]
    assert lines[3] == "|---|---|"
    body = lines[4:12]
    labels = [line.split("|")[1].strip() for line in body]
    assert labels == [
        "Upper Bound",
        "Level 1",
        "Level 2",
        "Level 3",
        "Lower Bound",
        "Sensitivity",
        "Correlation",
        "p-value",
    ]
    assert len(lines) == 12
    assert text.endswith("\n")
    # unit-interval scores render x100
    upper_cell = body[0].split("|")[2].strip()
    assert upper_cell == "100.00"
    p_cell = body[-1].split("|")[2].strip()
    assert p_cell.endswith("**")


def test_markdown_flags_in_header(diagnostic):
    table = synth_table(diagnostic, "drifty", lambda a: 0.5 + 0.01 * a)
    report = build_condition_report(
        table, diagnostic, "drifty", correlation_mode="per-summary"
    )
    bundle = build_bundle([report], diagnostic)
    header = render(bundle, "markdown").decode("utf-8").splitlines()[2]
    assert "drifty (invalid-direction" in header


def test_delimited_layout_and_scaling(diagnostic):
    bundle = build_bundle([one_report(diagnostic)], diagnostic)
    text = render(bundle, "delimited-table").decode("utf-8")
    lines = text.splitlines()
    assert lines[0] == (
        "metric,domain,subset,upper_bound,level_1,level_2,level_3,"
        "lower_bound,sensitivity,correlation_r,p_value,stars,flags"
    )
    cells = lines[1].split(",")
    assert cells[:4] == ["synt", "all", "all", "100.00"]
    assert cells[9] == "-1.00"  # correlation never rescaled
    assert cells[11] == "**"


def test_non_unit_rows_render_raw():
    row = CellRow(
        metric="blanc-help",
        domain="xsum",
        subset="entity",
        upper_bound=10.61,
        level_means=((0, 10.61), (1, 5.73), (2, 5.46), (3, 5.30)),
        lower_bound=2.02,
        sensitivity=0.215,
        correlation_r=-0.99,
        p_value=0.09,
        stars="",
        flags=(),
    )
    bundle = ReportBundle((row,), (), Provenance(0, 3, 5, "c", "1.0"))
    text = render(bundle, "delimited-table").decode("utf-8")
    cells = text.splitlines()[1].split(",")
    assert cells[3] == "10.61"
    assert cells[8] == "0.21"  # sensitivity stays on the table scale too
    md = render(bundle, "markdown").decode("utf-8")
    assert "| Upper Bound | 10.61 |" in md


def test_none_values_render_dash(diagnostic):
    table = synth_table(diagnostic, "flat", lambda a: 0.5)
    report = build_condition_report(table, diagnostic, "flat")
    bundle = build_bundle([report], diagnostic)
    cells = render(bundle, "delimited-table").decode("utf-8").splitlines()[1].split(",")
    assert cells[9] == "-" and cells[10] == "-"
    assert "undefined-correlation" in cells[12]


def test_empty_bundle_renders_header_only(diagnostic):
    bundle = build_bundle([], diagnostic)
    assert bundle.rows == ()
    text = render(bundle, "delimited-table").decode("utf-8")
    assert len(text.splitlines()) == 1
    assert render(bundle, "markdown") == b""
    structured = render(bundle, "structured").decode("utf-8")
    assert structured.count("\n") == 1
    assert '"kind": "provenance"' in structured


def test_render_deterministic(diagnostic):
    reports = [one_report(diagnostic)]
    first = build_bundle(reports, diagnostic)
    second = build_bundle([one_report(diagnostic)], diagnostic)
    for fmt in ("delimited-table", "markdown", "structured"):
        assert render(first, fmt) == render(second, fmt)


def test_structured_round_trip(tmp_path, diagnostic, rouge_table):
    report = build_condition_report(rouge_table, diagnostic, "rouge-l")
    bundle = build_bundle([report], diagnostic, table=rouge_table)
    path = tmp_path / "bundle.jsonl"
    path.write_bytes(render(bundle, "structured"))
    loaded = load_bundle(path)
    assert loaded == bundle
    assert loaded.provenance.seed == diagnostic.seed
    assert loaded.provenance.corpus_checksum == diagnostic.corpus_checksum


def test_unknown_format_rejected(diagnostic):
    bundle = build_bundle([], diagnostic)
    with pytest.raises(ReportError, match="unknown render format"):
        render(bundle, "pdf")


def test_load_bundle_error_paths(tmp_path):
    path = tmp_path / "bundle.jsonl"
    prov = Provenance(0, 3, 5, "c", "1.0").to_json()
    path.write_text(prov + "\nnot json\n", encoding="utf-8")
    with pytest.raises(ReportError, match=":2: bad JSON"):
        load_bundle(path)
    path.write_text(prov + '\n{"kind": "surprise"}\n', encoding="utf-8")
    with pytest.raises(ReportError, match="unknown record kind"):
        load_bundle(path)
    path.write_text('{"kind": "distribution", "metric": "m", "level": 1, "scores": []}\n')
    with pytest.raises(ReportError, match="missing provenance"):
        load_bundle(path)


def test_distributions_partition_instance_scores(diagnostic, rouge_table):
    slices = emit_distributions(rouge_table, diagnostic, ["rouge-l"])
    assert [s.level for s in slices] == [1, 2, 3]
    per_doc_per_level = diagnostic.runs * 2  # both subsets
    n_docs = len({d for d, _ in diagnostic.domains})
    combined = []
    for sl in slices:
        assert len(sl.scores) == per_doc_per_level * n_docs
        combined.extend(sl.scores)
    everything = sorted(
        rouge_table.value("rouge-l", inst.instance_id) for inst in diagnostic.instances
    )
    assert sorted(combined) == everything
    # balanced design: the flat slice mean equals the doc-averaged level mean
    report = build_condition_report(rouge_table, diagnostic, "rouge-l")
    level_1 = dict(report.series.level_means)[1]
    assert float(np.mean(slices[0].scores)) == pytest.approx(level_1, abs=1e-12)


def test_distributions_default_to_table_metrics(diagnostic, rouge_table):
    slices = emit_distributions(rouge_table, diagnostic)
    assert {s.metric for s in slices} == {"rouge-1", "rouge-2", "rouge-l"}
    assert len(slices) == 9


def test_comparative_flags(diagnostic):
    steep = one_report(diagnostic, metric="steep", slope=0.05)
    shallow = one_report(diagnostic, metric="shallow", slope=0.001)
    upward = build_condition_report(
        synth_table(diagnostic, "upward", lambda a: 0.5 + 0.01 * a),
        diagnostic,
        "upward",
        correlation_mode="per-summary",
    )
    flat = build_condition_report(
        synth_table(diagnostic, "flat", lambda a: 0.5), diagnostic, "flat"
    )
    lone = build_condition_report(
        synth_table(diagnostic, "steep", lambda a: 1.0 - 0.05 * a),
        diagnostic,
        "steep",
        domain="dialogue",
        correlation_mode="per-summary",
    )
    bundle = build_bundle([steep, shallow, upward, flat, lone], diagnostic)
    flags = {(row.metric, row.domain): row.flags for row in bundle.rows}
    assert "best" in flags[("steep", "all")]
    assert "worst" not in flags[("steep", "all")]
    # the insensitive metric has the flattest slope; exactness is fine here
    assert "worst" in flags[("flat", "all")]
    assert "best" not in flags[("flat", "all")]
    # direction-invalid rows never take best even when steepest
    assert "best" not in flags[("upward", "all")]
    assert flags[("shallow", "all")] == ()
    # a group of one gets no comparative flags
    assert flags[("steep", "dialogue")] == ()


def test_bundle_uses_zero_window_sensitivity_on_request(diagnostic):
    report = one_report(diagnostic, include_level_zero=True)
    with_zero = build_bundle([report], diagnostic, include_level_zero=True)
    without = build_bundle([report], diagnostic)
    assert with_zero.rows[0].sensitivity == report.sensitivity_with_zero
    assert without.rows[0].sensitivity == report.sensitivity
