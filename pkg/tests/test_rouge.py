"""Lexical-overlap scores and the LCS kernels behind rouge-l."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from factgauge.errors import MetricError
from factgauge.metrics.kernels import (
    HAVE_NUMBA,
    kernel_in_use,
    lcs_length,
    lcs_length_numba,
    lcs_length_numpy,
)
from factgauge.metrics.rouge import rouge_l, rouge_n

SOURCE = "the cat sat on the mat"
CANDIDATE = "the cat sat"


def test_hand_derived_case():
    r1 = rouge_n(1, SOURCE, CANDIDATE)
    assert r1.precision == pytest.approx(1.0)
    assert r1.recall == pytest.approx(0.5)
    assert r1.f1 == pytest.approx(0.6667, abs=1e-4)
    r2 = rouge_n(2, SOURCE, CANDIDATE)
    assert r2.precision == pytest.approx(1.0)
    assert r2.recall == pytest.approx(0.4)
    assert r2.f1 == pytest.approx(0.5714, abs=1e-4)
    rl = rouge_l(SOURCE, CANDIDATE)
    assert rl.precision == pytest.approx(1.0)
    assert rl.recall == pytest.approx(0.5)
    assert rl.f1 == pytest.approx(0.6667, abs=1e-4)


def test_identity_scores_one():
    for score in (rouge_n(1, SOURCE, SOURCE), rouge_n(2, SOURCE, SOURCE), rouge_l(SOURCE, SOURCE)):
        assert score.precision == 1.0
        assert score.recall == 1.0
        assert score.f1 == 1.0
        assert not score.degenerate


def test_disjoint_scores_zero():
    other = "dogs bark loudly outside"
    for score in (rouge_n(1, SOURCE, other), rouge_n(2, SOURCE, other), rouge_l(SOURCE, other)):
        assert score.f1 == 0.0
        assert not score.degenerate


def test_tokenization_is_case_and_punct_insensitive():
    assert rouge_n(1, "The CAT, sat!", "the cat sat").f1 == 1.0


def test_degenerate_inputs_flagged():
    assert rouge_n(2, "word", SOURCE).degenerate
    assert rouge_n(1, "", SOURCE).degenerate
    assert rouge_l("", SOURCE).degenerate
    assert rouge_l(SOURCE, "").degenerate
    # punctuation-only strings tokenize to nothing
    assert rouge_l("?!...", SOURCE).degenerate


def test_unsupported_ngram_order():
    with pytest.raises(MetricError):
        rouge_n(3, SOURCE, CANDIDATE)


WORDS = ("alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta")


def test_f1_symmetry_on_random_pairs():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a = " ".join(rng.choice(WORDS, size=rng.integers(1, 12)))
        b = " ".join(rng.choice(WORDS, size=rng.integers(1, 12)))
        for fn in (lambda x, y: rouge_n(1, x, y), lambda x, y: rouge_n(2, x, y), rouge_l):
            assert fn(a, b).f1 == pytest.approx(fn(b, a).f1, abs=1e-12)


def test_kernels_agree_on_random_arrays():
    rng = np.random.default_rng(11)
    for _ in range(200):
        a = rng.integers(0, 9, size=rng.integers(0, 40)).astype(np.int32)
        b = rng.integers(0, 9, size=rng.integers(0, 40)).astype(np.int32)
        assert lcs_length_numpy(a, b) == int(lcs_length_numba(a, b))


def test_lcs_of_reversed_distinct_sequence_is_one():
    # distinct values in opposite orders share no 2-element subsequence
    a = np.arange(50, dtype=np.int32)
    assert lcs_length(a, a[::-1].copy()) == 1


def test_lcs_empty_input():
    empty = np.empty(0, dtype=np.int32)
    a = np.arange(5, dtype=np.int32)
    assert lcs_length(empty, a) == 0
    assert lcs_length(a, empty) == 0


@given(
    st.lists(st.integers(0, 5), max_size=25),
    st.lists(st.integers(0, 5), max_size=25),
)
def test_lcs_bounds_and_self(a, b):
    x = np.asarray(a, dtype=np.int32)
    y = np.asarray(b, dtype=np.int32)
    length = lcs_length_numpy(x, y)
    assert 0 <= length <= min(len(a), len(b))
    assert lcs_length_numpy(x, x) == len(a)
    assert lcs_length_numpy(y, x) == length


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_numba_kernel_selected_by_default():
    assert "FACTGAUGE_NO_NUMBA" not in os.environ
    assert kernel_in_use() == "numba"


def test_env_flag_forces_numpy_kernel():
    code = (
        "from factgauge.metrics.kernels import kernel_in_use\n"
        "from factgauge.metrics.rouge import rouge_l\n"
        "assert kernel_in_use() == 'numpy'\n"
        "print('%%.10f' %% rouge_l(%r, %r).f1)\n" % (SOURCE, CANDIDATE)
    )
    env = dict(os.environ, FACTGAUGE_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == f"{rouge_l(SOURCE, CANDIDATE).f1:.10f}"
