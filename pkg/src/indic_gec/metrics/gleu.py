"""Source-penalized GLEU for grammatical error correction, orders 1 to 4.

For each order n the hypothesis n-grams that match the reference are
credited, and n-grams the hypothesis shares with the source beyond what
the reference licenses are debited. Counts are summed over sentences
before ratios are taken, BLEU-style.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..tokenization import ngrams

VARIANT = "gleu-source-penalized/single-ref/corpus-sums/add-one-per-sentence"
MAX_ORDER = 4


@dataclass(frozen=True)
class GleuResult:
    score: float
    per_n_precision: tuple[float, ...]
    brevity_penalty: float


@dataclass(frozen=True)
class GleuStats:
    """Smoothed per-order counts for one or more sentences; addable."""

    numerators: tuple[int, ...]
    denominators: tuple[int, ...]
    hyp_len: int
    ref_len: int

    def __add__(self, other: GleuStats) -> GleuStats:
        return GleuStats(
            tuple(a + b for a, b in zip(self.numerators, other.numerators)),
            tuple(a + b for a, b in zip(self.denominators, other.denominators)),
            self.hyp_len + other.hyp_len,
            self.ref_len + other.ref_len,
        )


def sentence_stats(source, hypothesis, reference) -> GleuStats:
    src, hyp, ref = tuple(source), tuple(hypothesis), tuple(reference)
    nums, dens = [], []
    for n in range(1, MAX_ORDER + 1):
        h, r, s = ngrams(hyp, n), ngrams(ref, n), ngrams(src, n)
        matched = 0
        penalty = 0
        for g, ch in h.items():
            hr = min(ch, r.get(g, 0))
            matched += hr
            penalty += max(0, min(ch, s.get(g, 0)) - hr)
        num = max(0, matched - penalty)
        den = max(0, len(hyp) - n + 1)
        # add-one smoothing keeps short sentences away from log(0)
        if den > 0 and num == 0:
            num, den = 1, den + 1
        nums.append(num)
        dens.append(den)
    return GleuStats(tuple(nums), tuple(dens), len(hyp), len(ref))


def score_stats(stats: GleuStats) -> GleuResult:
    if stats.hyp_len == 0:
        return GleuResult(0.0, (0.0,) * MAX_ORDER, 0.0)
    precisions = tuple(nm / dn if dn else 0.0 for nm, dn in zip(stats.numerators, stats.denominators))
    # orders longer than the hypothesis are not realizable and drop out of the mean
    logs = [math.log(p) for p, dn in zip(precisions, stats.denominators) if dn > 0]
    if stats.hyp_len >= stats.ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - stats.ref_len / stats.hyp_len)
    return GleuResult(bp * math.exp(sum(logs) / len(logs)), precisions, bp)


def gleu_sentence(source, hypothesis, reference) -> GleuResult:
    if len(reference) == 0:
        raise ValueError("reference must be nonempty")
    return score_stats(sentence_stats(source, hypothesis, reference))


def gleu_corpus(items) -> GleuResult:
    """Corpus GLEU over ``(source, hypothesis, reference)`` token triples."""
    items = list(items)
    if not items:
        raise ValueError("gleu_corpus needs at least one item")
    total = None
    for src, hyp, ref in items:
        if len(ref) == 0:
            raise ValueError("reference must be nonempty")
        st = sentence_stats(src, hyp, ref)
        total = st if total is None else total + st
    return score_stats(total)
