"""Bridge to external metric processes over a line-delimited protocol.

All messages are single-line UTF-8 JSON objects. Handshake: the engine
sends {"type":"hello","protocol":1}; the adapter answers {"type":"ready",
"name":<metric>,"protocol":1}. Each {"type":"score","id",...,"source",...,
"summary",...} gets one {"type":"result","id","value"} or {"type":"error",
"id","message"} back. {"type":"bye"} ends the session.
"""

from __future__ import annotations

import json
import math
import os
import select
import subprocess
import time
from dataclasses import dataclass, field
from typing import Sequence

from ..errors import AdapterError, MetricError

PROTOCOL_VERSION = 1
DEFAULT_TIMEOUT_MS = 60000
TIMEOUT_ENV_VAR = "FACTGAUGE_ADAPTER_TIMEOUT_MS"

METRIC_KINDS = ("native", "external")
METRIC_DIRECTION = "higher-is-more-factual"


def adapter_timeout_ms() -> int:
    raw = os.environ.get(TIMEOUT_ENV_VAR)
    if raw is None:
        return DEFAULT_TIMEOUT_MS
    try:
        value = int(raw)
    except ValueError:
        raise AdapterError(f"{TIMEOUT_ENV_VAR} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise AdapterError(f"{TIMEOUT_ENV_VAR} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class MetricDescriptor:
    name: str
    kind: str = "native"
    direction: str = METRIC_DIRECTION
    command: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise MetricError(f"unknown metric kind {self.kind!r}")
        if not self.name:
            raise MetricError("metric name must be nonempty")
        if self.kind == "external" and not self.command:
            raise MetricError(f"external metric {self.name!r} needs a command")


@dataclass(frozen=True)
class MetricScore:
    metric: str
    instance_id: str
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise MetricError(
                f"non-finite score {self.value!r} for {self.metric!r}/{self.instance_id!r}"
            )


@dataclass(frozen=True)
class ScoreError:
    metric: str
    instance_id: str
    message: str


class AdapterClient:
    """One adapter process; requests are serialized on its stream.

    Replies are matched by id, so a late reply to a timed-out request is
    discarded instead of desynchronizing the session.
    """

    def __init__(self, descriptor: MetricDescriptor, timeout_ms: int | None = None):
        if descriptor.kind != "external":
            raise AdapterError(f"metric {descriptor.name!r} is not external")
        self.descriptor = descriptor
        self.timeout_s = (timeout_ms if timeout_ms is not None else adapter_timeout_ms()) / 1000.0
        try:
            self._proc = subprocess.Popen(
                list(descriptor.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise AdapterError(f"cannot launch adapter {descriptor.name!r}: {exc}") from None
        self._buffer = b""
        self._handshake()

    def __enter__(self) -> "AdapterClient":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()

    def _send(self, obj: dict) -> None:
        if self._proc.stdin is None or self._proc.poll() is not None:
            raise AdapterError(f"adapter {self.descriptor.name!r} exited prematurely")
        line = json.dumps(obj, ensure_ascii=False) + "\n"
        try:
            self._proc.stdin.write(line.encode("utf-8"))
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise AdapterError(f"adapter {self.descriptor.name!r} pipe closed: {exc}") from None

    def _read_line(self, deadline: float) -> bytes | None:
        """One raw line before the deadline, or None on timeout/EOF."""
        stdout = self._proc.stdout
        assert stdout is not None
        while True:
            newline = self._buffer.find(b"\n")
            if newline >= 0:
                line, self._buffer = self._buffer[:newline], self._buffer[newline + 1 :]
                return line
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            ready, _, _ = select.select([stdout], [], [], remaining)
            if not ready:
                return None
            chunk = os.read(stdout.fileno(), 65536)
            if not chunk:
                return None
            self._buffer += chunk

    def _read_message(self, deadline: float) -> dict | None:
        """Next parseable JSON object line; malformed lines are skipped."""
        while True:
            raw = self._read_line(deadline)
            if raw is None:
                return None
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError):
                continue
            if isinstance(obj, dict):
                return obj

    def _deadline(self) -> float:
        return time.monotonic() + self.timeout_s

    def _handshake(self) -> None:
        self._send({"type": "hello", "protocol": PROTOCOL_VERSION})
        reply = self._read_message(self._deadline())
        if reply is None:
            self.close()
            raise AdapterError(f"adapter {self.descriptor.name!r}: no handshake reply")
        if reply.get("type") != "ready" or reply.get("protocol") != PROTOCOL_VERSION:
            self.close()
            raise AdapterError(
                f"adapter {self.descriptor.name!r}: bad handshake {reply!r} "
                f"(expected ready/protocol {PROTOCOL_VERSION})"
            )

    def score_one(self, instance_id: str, source: str, summary: str) -> tuple[str, object]:
        """("ok", value) or ("error", message); never raises per-instance."""
        try:
            self._send(
                {"type": "score", "id": instance_id, "source": source, "summary": summary}
            )
        except AdapterError as exc:
            return "error", str(exc)
        deadline = self._deadline()
        while True:
            reply = self._read_message(deadline)
            if reply is None:
                return "error", f"timeout after {self.timeout_s:.1f}s"
            if reply.get("id") != instance_id:
                continue  # stale reply to an abandoned request
            if reply.get("type") == "error":
                return "error", str(reply.get("message", "adapter error"))
            if reply.get("type") != "result":
                return "error", f"unexpected message type {reply.get('type')!r}"
            value = reply.get("value")
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                return "error", f"non-numeric value {value!r}"
            if not math.isfinite(float(value)):
                return "error", f"non-finite value {value!r}"
            return "ok", float(value)

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._send({"type": "bye"})
            except AdapterError:
                pass
            try:
                self._proc.wait(timeout=2.0)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()
        for stream in (self._proc.stdin, self._proc.stdout):
            if stream is not None:
                stream.close()


def score_external(
    descriptor: MetricDescriptor,
    batch: Sequence[tuple[str, str, str]],
    timeout_ms: int | None = None,
) -> tuple[list[MetricScore], list[ScoreError]]:
    """Score (instance_id, source, candidate) triples through one adapter.

    Successful scores come back in input order; failures become ScoreError
    entries without aborting the rest of the batch. An empty batch never
    launches the process.
    """
    if not batch:
        return [], []
    scores: list[MetricScore] = []
    errors: list[ScoreError] = []
    with AdapterClient(descriptor, timeout_ms=timeout_ms) as client:
        for instance_id, source, candidate in batch:
            status, payload = client.score_one(instance_id, source, candidate)
            if status == "ok":
                scores.append(MetricScore(descriptor.name, instance_id, float(payload)))
            else:
                errors.append(ScoreError(descriptor.name, instance_id, str(payload)))
    return scores, errors
