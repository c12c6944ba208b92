import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import gleu_corpus_oracle, gleu_oracle
from indic_gec.metrics.gleu import gleu_corpus, gleu_sentence, sentence_stats


def test_perfect_hypothesis_scores_one():
    r = gleu_sentence("a b c d e".split(), "a b x d e".split(), "a b x d e".split())
    assert r.score == 1.0 and r.brevity_penalty == 1.0


def test_copying_the_source_is_penalized():
    # hand count: p1 = 1/3, p2 = 1/3 (smoothed 0/2), p3 = 1/2 (smoothed 0/1), order 4 unrealizable
    src, ref = "a b c".split(), "a b d".split()
    r = gleu_sentence(src, src, ref)
    assert r.score == pytest.approx((1 / 3 * 1 / 3 * 1 / 2) ** (1 / 3), abs=1e-12)
    assert r.per_n_precision[:3] == pytest.approx((1 / 3, 1 / 3, 1 / 2))


def test_brevity_penalty():
    r = gleu_sentence(["x"], ["a"], ["a", "b"])
    assert r.brevity_penalty == pytest.approx(math.exp(-1))
    assert r.score == pytest.approx(math.exp(-1), abs=1e-12)


def test_empty_hypothesis_scores_zero():
    r = gleu_sentence(["a"], [], ["a"])
    assert r.score == 0.0 and r.brevity_penalty == 0.0


def test_empty_reference_rejected():
    with pytest.raises(ValueError):
        gleu_sentence(["a"], ["a"], [])
    with pytest.raises(ValueError):
        gleu_corpus([])


def test_corpus_sums_counts_not_scores():
    a = (["a", "b"], ["a", "b"], ["a", "b"])
    b = (["c"], ["d"], ["e"])
    total = sentence_stats(*a) + sentence_stats(*b)
    assert total.numerators[0] == 2 + 1 and total.denominators[0] == 2 + 2
    mean = (gleu_sentence(*a).score + gleu_sentence(*b).score) / 2
    assert gleu_corpus([a, b]).score != pytest.approx(mean)


def test_random_triples_match_oracle():
    rng = random.Random(11)
    for _ in range(100):
        seq = lambda: [rng.choice("abcdef") for _ in range(rng.randint(1, 10))]  # noqa: E731
        triple = (seq(), seq(), seq())
        assert gleu_sentence(*triple).score == pytest.approx(gleu_oracle(*triple), abs=1e-9)


_seq = st.lists(st.sampled_from("abcd"), min_size=1, max_size=10)


@given(st.lists(st.tuples(_seq, _seq, _seq), min_size=1, max_size=5))
def test_corpus_in_unit_interval_and_matches_oracle(triples):
    s = gleu_corpus(triples).score
    assert 0.0 <= s <= 1.0
    assert s == pytest.approx(gleu_corpus_oracle(triples), abs=1e-9)


@given(_seq, _seq, st.integers(1, 6))
def test_repeated_sentence_equals_sentence_score(src, hyp, k):
    ref = list(reversed(src))
    assert gleu_corpus([(src, hyp, ref)] * k).score == pytest.approx(gleu_sentence(src, hyp, ref).score, abs=1e-12)


def test_frozen_oracle_values():
    # values computed once with tests/oracles.py and frozen here
    s = "the cat sat".split()
    assert gleu_sentence(s, s, "the cat sits".split()).score == pytest.approx(0.38157141418444396, abs=1e-12)
    items = [
        ("the cat sat on mat".split(), "the cat sat on the mat".split(), "the cat sat on the mat".split()),
        ("he go to school".split(), "he go to school".split(), "he goes to school".split()),
    ]
    # summed counts: 8/10, 6/9, 5/7, 4/5 with no brevity penalty
    assert gleu_corpus(items).score == pytest.approx(0.7430023199653439, abs=1e-12)
    assert gleu_corpus(items).per_n_precision == pytest.approx((8 / 10, 6 / 9, 5 / 7, 4 / 5))
