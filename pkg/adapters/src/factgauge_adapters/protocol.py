"""Adapter side of the line-delimited scoring protocol.

All messages are single-line UTF-8 JSON objects. The engine opens with
{"type":"hello","protocol":1}; the adapter answers {"type":"ready","name":
<metric>,"protocol":1}. Each {"type":"score","id",...,"source",...,
"summary",...} gets exactly one {"type":"result","id","value"} or
{"type":"error","id","message"} back, in request order. {"type":"bye"}
ends the session; so does EOF.

Malformed input never kills the stream: the adapter emits an id-less
error line (which engines discard, since they match replies by id) and
keeps reading.
"""

from __future__ import annotations

import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import IO, Mapping

from .errors import ProtocolError
from .neural import Scorer, resolve_scorer

PROTOCOL_VERSION = 1

DEBUG_ENV_VAR = "FACTGAUGE_ADAPTER_DEBUG"


@dataclass
class AdapterSession:
    """Bookkeeping for one protocol session.

    Guards the reply invariants: a reply id must have been requested, and
    no id is answered twice.
    """

    metric: str
    protocol: int = PROTOCOL_VERSION
    requested: set[str] = field(default_factory=set)
    answered: set[str] = field(default_factory=set)

    def note_request(self, instance_id: str) -> bool:
        """Record a request id; False if the id was already used."""
        if instance_id in self.requested:
            return False
        self.requested.add(instance_id)
        return True

    def claim_reply(self, instance_id: str) -> None:
        if instance_id not in self.requested:
            raise ProtocolError(f"reply for unrequested id {instance_id!r}")
        if instance_id in self.answered:
            raise ProtocolError(f"duplicate reply for id {instance_id!r}")
        self.answered.add(instance_id)


def _debug(message: str) -> None:
    if os.environ.get(DEBUG_ENV_VAR):
        print(f"[factgauge-adapter] {message}", file=sys.stderr, flush=True)


def _emit(stream: IO[str], obj: dict) -> None:
    stream.write(json.dumps(obj, ensure_ascii=False) + "\n")
    stream.flush()


def _emit_error(stream: IO[str], message: str, instance_id: str | None = None) -> None:
    # id-less errors are deliberately unaddressed: engines match replies
    # by id and skip these, so a malformed line cannot desynchronize
    payload: dict = {"type": "error", "message": message}
    if instance_id is not None:
        payload["id"] = instance_id
    _emit(stream, payload)


def serve(
    metric: str,
    model_config: Mapping | None = None,
    stdin: IO[str] | None = None,
    stdout: IO[str] | None = None,
    scorer: Scorer | None = None,
) -> int:
    """Run one protocol session over the given streams; returns exit status.

    The scorer's resources are resolved before the handshake, so a missing
    model package fails the launch instead of the first request.
    """
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    if scorer is None:
        scorer = resolve_scorer(metric, model_config)
    scorer.load()
    session = AdapterSession(metric=scorer.name)
    ready = False
    _debug(f"serving {scorer.name}")

    for raw in stdin:
        line = raw.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
        except json.JSONDecodeError:
            _emit_error(stdout, "unparseable line")
            continue
        if not isinstance(msg, dict):
            _emit_error(stdout, "message is not an object")
            continue
        kind = msg.get("type")

        if kind == "hello":
            if ready:
                _emit_error(stdout, "session already started")
                continue
            if msg.get("protocol") != session.protocol:
                _emit_error(
                    stdout,
                    f"unsupported protocol {msg.get('protocol')!r} "
                    f"(this adapter speaks {session.protocol})",
                )
                continue
            ready = True
            _emit(
                stdout,
                {"type": "ready", "name": session.metric, "protocol": session.protocol},
            )
            continue

        if kind == "bye":
            _debug("bye")
            return 0

        if kind == "score":
            if not ready:
                _emit_error(stdout, "not ready: expected hello first")
                continue
            instance_id = msg.get("id")
            if not isinstance(instance_id, str) or not instance_id:
                _emit_error(stdout, "score message needs a nonempty string id")
                continue
            if not session.note_request(instance_id):
                # a second reply under the same id would break id matching
                _emit_error(stdout, f"duplicate request id {instance_id!r}")
                continue
            # exactly one reply for this id follows, whatever the path
            session.claim_reply(instance_id)
            bad_field = next(
                (k for k in ("source", "summary") if not isinstance(msg.get(k), str)), None
            )
            if bad_field is not None:
                _emit_error(stdout, f"score message needs a string {bad_field!r}", instance_id)
                continue
            try:
                value = float(scorer.score(msg["source"], msg["summary"]))
            except Exception as exc:  # one bad request must not end the session
                _emit_error(stdout, f"scoring failed: {exc}", instance_id)
                continue
            if not math.isfinite(value):
                _emit_error(stdout, f"non-finite score {value!r}", instance_id)
                continue
            _emit(stdout, {"type": "result", "id": instance_id, "value": value})
            continue

        _emit_error(stdout, f"unexpected message type {kind!r}")

    _debug("eof")
    return 0
