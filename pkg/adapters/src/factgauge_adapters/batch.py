"""Offline scoring of request files, resumable after interruption.

Input and output reuse the wire-protocol message schema, one JSON object
per line: requests are {"type":"score","id","source","summary"} and the
output holds {"type":"result","id","value"} or {"type":"error","id",
"message"} records. A rerun skips every id already present in the output,
so a killed batch continues where it stopped. A truncated trailing line
(the only corruption an append-and-flush writer can leave) is dropped and
recomputed; corruption anywhere else raises.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import AdapterError, ProtocolError
from .neural import Scorer


@dataclass(frozen=True)
class BatchStats:
    computed: int
    errors: int
    skipped: int
    dropped: int


def _read_requests(path: Path) -> list[tuple[str, str, str]]:
    requests: list[tuple[str, str, str]] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ProtocolError(f"{path}:{lineno}: bad JSON: {exc}") from None
            if not isinstance(msg, dict) or msg.get("type") != "score":
                raise ProtocolError(f"{path}:{lineno}: expected a score message")
            instance_id = msg.get("id")
            if not isinstance(instance_id, str) or not instance_id:
                raise ProtocolError(f"{path}:{lineno}: score message needs a nonempty string id")
            if any(not isinstance(msg.get(k), str) for k in ("source", "summary")):
                raise ProtocolError(f"{path}:{lineno}: score message needs string source/summary")
            if instance_id in seen:
                raise ProtocolError(f"{path}:{lineno}: duplicate request id {instance_id!r}")
            seen.add(instance_id)
            requests.append((instance_id, msg["source"], msg["summary"]))
    return requests


def _record_problem(line: str) -> str | None:
    try:
        msg = json.loads(line)
    except json.JSONDecodeError:
        return "bad JSON"
    if not isinstance(msg, dict):
        return "not an object"
    if msg.get("type") not in ("result", "error"):
        return f"unexpected record type {msg.get('type')!r}"
    instance_id = msg.get("id")
    if not isinstance(instance_id, str) or not instance_id:
        return "record needs a nonempty string id"
    if msg["type"] == "result":
        value = msg.get("value")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            return f"non-numeric value {value!r}"
        if not math.isfinite(float(value)):
            return f"non-finite value {value!r}"
    elif not isinstance(msg.get("message"), str):
        return "error record needs a string message"
    return None


def _scan_output(path: Path) -> tuple[list[str], set[str], int]:
    """(kept lines, ids present, dropped trailing lines) of prior output."""
    if not path.exists():
        return [], set(), 0
    text = path.read_text(encoding="utf-8")
    if not text:
        return [], set(), 0
    lines = text.split("\n")
    terminated = lines[-1] == ""
    if terminated:
        lines.pop()
    kept: list[str] = []
    ids: set[str] = set()
    last = len(lines) - 1
    for index, line in enumerate(lines):
        trailing = index == last
        problem = _record_problem(line)
        if problem is None and (terminated or not trailing):
            instance_id = json.loads(line)["id"]
            if instance_id in ids:
                raise ProtocolError(f"{path}:{index + 1}: duplicate record id {instance_id!r}")
            ids.add(instance_id)
            kept.append(line)
            continue
        if not trailing:
            raise ProtocolError(f"{path}:{index + 1}: {problem}")
        # trailing-line check: an interrupted write leaves at most one
        # incomplete record, at the end; drop it and recompute that id
        return kept, ids, 1
    return kept, ids, 0


def batch_score_file(
    input_path: str | Path,
    output_path: str | Path,
    scorer: Scorer,
    batch_size: int = 16,
) -> BatchStats:
    """Score every request not yet answered in output_path.

    Results append in input order and flush every batch_size records, so
    the final file content is independent of batch_size and an interrupted
    run loses at most the unflushed tail. Previously recorded errors count
    as answered; delete the output to rescore them.
    """
    if batch_size < 1:
        raise AdapterError(f"batch size must be positive, got {batch_size}")
    input_path = Path(input_path)
    output_path = Path(output_path)
    requests = _read_requests(input_path)
    kept, done, dropped = _scan_output(output_path)
    if dropped:
        output_path.write_text("".join(line + "\n" for line in kept), encoding="utf-8")

    scorer.load()
    computed = errored = skipped = 0
    pending: list[str] = []
    with open(output_path, "a", encoding="utf-8") as out:
        for instance_id, source, summary in requests:
            if instance_id in done:
                skipped += 1
                continue
            done.add(instance_id)
            try:
                value = float(scorer.score(source, summary))
                if not math.isfinite(value):
                    raise AdapterError(f"non-finite score {value!r}")
                record: dict = {"type": "result", "id": instance_id, "value": value}
                computed += 1
            except Exception as exc:
                record = {"type": "error", "id": instance_id, "message": str(exc)}
                errored += 1
            pending.append(json.dumps(record, ensure_ascii=False) + "\n")
            if len(pending) >= batch_size:
                out.write("".join(pending))
                out.flush()
                pending.clear()
        if pending:
            out.write("".join(pending))
            out.flush()
    return BatchStats(computed=computed, errors=errored, skipped=skipped, dropped=dropped)
