import io
import json
import random
import subprocess
import sys

import pytest

from factgauge_adapters.protocol import serve

# deliberately hostile to naive tokenizers: mixed case, punctuation glued
# to words, unicode, digits, underscores, and heavy repetition for clipping
_VOCAB = (
    "the", "The", "CAT", "cat", "sat,", "mat!", "on", "council's",
    "naïve", "Δx", "re_run", "42", "—oddly—", "dog", "dog.", "(paren)",
    "it's", "semi;colon", "END?",
)


@pytest.fixture
def pair_factory():
    def make_pairs(count: int, seed: int = 7) -> list[tuple[str, str]]:
        rng = random.Random(seed)
        pairs = []
        for _ in range(count):
            source = " ".join(rng.choices(_VOCAB, k=rng.randint(3, 40)))
            summary = " ".join(rng.choices(_VOCAB, k=rng.randint(1, 25)))
            pairs.append((source, summary))
        return pairs

    return make_pairs


@pytest.fixture
def run_serve():
    """Drive serve() in process over string buffers.

    Accepts dicts (serialized) or raw strings; returns the parsed reply
    lines and the exit status.
    """

    def run(messages, metric: str = "lexical-overlap", scorer=None):
        script = "".join(
            (m if isinstance(m, str) else json.dumps(m)) + "\n" for m in messages
        )
        out = io.StringIO()
        status = serve(metric, stdin=io.StringIO(script), stdout=out, scorer=scorer)
        replies = [json.loads(line) for line in out.getvalue().splitlines()]
        return replies, status

    return run


@pytest.fixture
def adapter_argv():
    def argv(*extra: str) -> list[str]:
        return [sys.executable, "-m", "factgauge_adapters.cli", *extra]

    return argv


@pytest.fixture
def run_cli(adapter_argv):
    def run(*extra: str, stdin_text: str = "") -> subprocess.CompletedProcess:
        return subprocess.run(
            adapter_argv(*extra),
            input=stdin_text,
            capture_output=True,
            text=True,
            timeout=60,
        )

    return run
