"""End-to-end pipeline runs through the command-line entry point."""

from __future__ import annotations

import csv
import json
import shutil
import subprocess
import sys

import pytest

from factgauge.cli import (
    BUNDLE_FILE,
    DIAGNOSTIC_FILE,
    DISTRIBUTIONS_FILE,
    REPORT_CSV,
    REPORT_MD,
    SCORES_FILE,
    STATS_FILE,
    load_config,
    main,
)
from factgauge.report import load_bundle

ALL_FILES = (
    DIAGNOSTIC_FILE,
    STATS_FILE,
    SCORES_FILE,
    BUNDLE_FILE,
    REPORT_CSV,
    REPORT_MD,
    DISTRIBUTIONS_FILE,
)


def write_config(tmp_path, corpus_path, name="run.json", **overrides):
    cfg = {
        "corpus": str(corpus_path),
        "output_dir": "out",
        "metrics": [{"name": "rouge-1"}],
        "levels": 2,
        "runs": 2,
        "seed": 7,
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return path


def test_all_produces_every_artifact(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["all", "--config", str(config)]) == 0
    out = tmp_path / "out"
    for name in ALL_FILES:
        assert (out / name).is_file(), name
    bundle = load_bundle(out / BUNDLE_FILE)
    assert bundle.provenance.seed == 7
    # 1 metric x (4 domains + all) x (2 subsets + all)
    assert len(bundle.rows) == 15
    assert (out / REPORT_CSV).read_bytes().startswith(b"metric,domain,subset")


def test_stats_file_shape(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["perturb", "--config", str(config)]) == 0
    assert main(["stats", "--config", str(config)]) == 0
    with open(tmp_path / "out" / STATS_FILE, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["domain", "subset", "level", "mean_applied", "pct_transformed"]
    overall = [r for r in rows[1:] if r[2] == "overall"]
    # 4 domains + the aggregate, 2 subsets each
    assert len(overall) == 10
    body = [r for r in rows[1:] if r[2] != "overall"]
    assert all(len(r[3].split(".")[1]) == 4 for r in body)


def test_perturb_is_idempotent(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["perturb", "--config", str(config)]) == 0
    first = (tmp_path / "out" / DIAGNOSTIC_FILE).read_bytes()
    assert main(["perturb", "--config", str(config)]) == 0
    assert (tmp_path / "out" / DIAGNOSTIC_FILE).read_bytes() == first


def test_full_rerun_is_byte_identical(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["all", "--config", str(config)]) == 0
    snapshots = {n: (tmp_path / "out" / n).read_bytes() for n in ALL_FILES}
    assert main(["all", "--config", str(config)]) == 0
    for name in ALL_FILES:
        assert (tmp_path / "out" / name).read_bytes() == snapshots[name], name


def test_stage_failure_exits_one(tmp_path, toy_corpus_path, capsys):
    config = write_config(tmp_path, toy_corpus_path)
    rc = main(["score", "--config", str(config)])
    assert rc == 1
    assert "stage score failed:" in capsys.readouterr().err


def test_config_errors_exit_two(tmp_path, toy_corpus_path, capsys):
    cases = [
        {"corpus": None},  # removed below
        {"surprise": 1},
        {"levels": 0},
        {"metrics": []},
        {"metrics": [{"name": "rouge-1"}, {"name": "rouge-1"}]},
        {"metrics": ["rouge-1"]},
        {"correlation_mode": "rank"},
    ]
    for i, extra in enumerate(cases):
        config = write_config(tmp_path, toy_corpus_path, name=f"bad{i}.json", **extra)
        if extra.get("corpus", "") is None:
            raw = json.loads(config.read_text(encoding="utf-8"))
            del raw["corpus"]
            config.write_text(json.dumps(raw), encoding="utf-8")
        rc = main(["all", "--config", str(config)])
        err = capsys.readouterr().err
        assert rc == 2, extra
        assert err.startswith("config error:"), extra
    assert not (tmp_path / "out").exists()


def test_config_error_on_missing_corpus_file(tmp_path, capsys):
    config = write_config(tmp_path, tmp_path / "nowhere.jsonl")
    assert main(["all", "--config", str(config)]) == 2
    assert "does not exist" in capsys.readouterr().err


def test_config_must_be_json_object(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text("[1, 2]", encoding="utf-8")
    assert main(["all", "--config", str(config)]) == 2
    config.write_text("{broken", encoding="utf-8")
    assert main(["all", "--config", str(config)]) == 2
    capsys.readouterr()


def test_paths_resolve_relative_to_config(tmp_path, toy_corpus_path):
    nested = tmp_path / "cfg"
    nested.mkdir()
    shutil.copy(toy_corpus_path, nested / "corpus.jsonl")
    config = write_config(
        nested, "corpus.jsonl", output_dir="../results"
    )
    cfg = load_config(config)
    assert cfg.corpus == (nested / "corpus.jsonl").resolve()
    assert cfg.output_dir == (tmp_path / "results").resolve()
    assert main(["perturb", "--config", str(config)]) == 0
    assert (tmp_path / "results" / DIAGNOSTIC_FILE).is_file()


def test_seed_override_changes_output(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["perturb", "--config", str(config)]) == 0
    baseline = (tmp_path / "out" / DIAGNOSTIC_FILE).read_bytes()
    assert main(["perturb", "--config", str(config), "--seed", "99"]) == 0
    reseeded = (tmp_path / "out" / DIAGNOSTIC_FILE).read_bytes()
    assert reseeded != baseline
    assert json.loads(reseeded.split(b"\n")[0])["seed"] == 99


def test_worker_override_keeps_output(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["perturb", "--config", str(config)]) == 0
    serial = (tmp_path / "out" / DIAGNOSTIC_FILE).read_bytes()
    assert main(["perturb", "--config", str(config), "--workers", "4"]) == 0
    assert (tmp_path / "out" / DIAGNOSTIC_FILE).read_bytes() == serial


def test_correlation_mode_override(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["all", "--config", str(config)]) == 0
    level_mode = load_bundle(tmp_path / "out" / BUNDLE_FILE)
    assert (
        main(["all", "--config", str(config), "--correlation-mode", "per-summary"]) == 0
    )
    summary_mode = load_bundle(tmp_path / "out" / BUNDLE_FILE)
    pick = lambda b: {(r.metric, r.domain, r.subset): r.correlation_r for r in b.rows}
    assert pick(level_mode) != pick(summary_mode)


def test_include_level_zero_override(tmp_path, toy_corpus_path):
    config = write_config(tmp_path, toy_corpus_path)
    assert main(["all", "--config", str(config)]) == 0
    default = load_bundle(tmp_path / "out" / BUNDLE_FILE)
    assert main(["all", "--config", str(config), "--include-level-zero"]) == 0
    widened = load_bundle(tmp_path / "out" / BUNDLE_FILE)
    changed = [
        (a.metric, a.domain, a.subset)
        for a, b in zip(default.rows, widened.rows)
        if a.sensitivity != b.sensitivity
    ]
    assert changed


def test_console_script_usage_error():
    proc = subprocess.run(
        [sys.executable, "-m", "factgauge.cli", "dance", "--config", "x"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "invalid choice" in proc.stderr


def test_external_metric_config_round_trip(tmp_path, toy_corpus_path):
    config = write_config(
        tmp_path,
        toy_corpus_path,
        metrics=[{"name": "echo", "kind": "external", "command": ["cat"]}],
    )
    cfg = load_config(config)
    assert cfg.metrics[0].kind == "external"
    assert cfg.metrics[0].command == ("cat",)
    bad = write_config(
        tmp_path, toy_corpus_path, name="bad.json",
        metrics=[{"name": "echo", "kind": "external"}],
    )
    with pytest.raises(Exception, match="metrics\\[0\\]"):
        load_config(bad)
