"""Command line entry points: serve a protocol session or score a file."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Mapping, Sequence

from .batch import batch_score_file
from .errors import AdapterError
from .neural import available_metrics, resolve_scorer
from .protocol import serve


def _load_model_config(path: str | None) -> Mapping | None:
    if path is None:
        return None
    try:
        config = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise AdapterError(f"model config {path}: bad JSON: {exc}") from None
    if not isinstance(config, dict):
        raise AdapterError(f"model config {path}: expected a JSON object")
    return config


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="factgauge-adapter",
        description="reference metric adapters for the line-delimited scoring protocol",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve_p = sub.add_parser("serve", help="speak the scoring protocol on stdin/stdout")
    serve_p.add_argument("--metric", required=True, help="registered metric name")
    serve_p.add_argument("--model-config", default=None, help="JSON file of model settings")

    batch_p = sub.add_parser("batch", help="score a request file offline, resumably")
    batch_p.add_argument("--metric", required=True, help="registered metric name")
    batch_p.add_argument("--model-config", default=None, help="JSON file of model settings")
    batch_p.add_argument("--input", required=True, help="score-request file, one JSON per line")
    batch_p.add_argument("--output", required=True, help="result file; existing ids are skipped")
    batch_p.add_argument("--batch-size", type=int, default=16, help="records per flush")

    sub.add_parser("list", help="print available metric names")

    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            for name in available_metrics():
                print(name)
            return 0
        config = _load_model_config(args.model_config)
        if args.command == "serve":
            return serve(args.metric, config)
        scorer = resolve_scorer(args.metric, config)
        stats = batch_score_file(args.input, args.output, scorer, batch_size=args.batch_size)
        print(
            f"computed {stats.computed}, errors {stats.errors}, "
            f"skipped {stats.skipped}, dropped {stats.dropped}",
            file=sys.stderr,
        )
        return 0
    except (AdapterError, OSError) as exc:
        print(f"factgauge-adapter: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
