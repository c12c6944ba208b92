"""Greedy cosine matching between hypothesis and reference token embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SNAP = 8 * np.finfo(np.float64).eps


@dataclass(frozen=True)
class BertScoreResult:
    precision: float
    recall: float
    f1: float


def _unit_rows(m, label):
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] == 0:
        raise ValueError(f"{label} embeddings must be a nonempty 2-D matrix, got shape {m.shape}")
    norms = np.linalg.norm(m, axis=1)
    if np.any(norms == 0):
        raise ValueError(f"{label} embeddings contain a zero-norm row")
    return m / norms[:, None]


def _weighted_mean(values, weights):
    if weights is None:
        return float(values.mean())
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != values.shape:
        raise ValueError(f"expected {values.shape[0]} weights, got {w.shape}")
    return float((values * w).sum() / w.sum())


def bertscore(hyp_embeddings, ref_embeddings, hyp_weights=None, ref_weights=None) -> BertScoreResult:
    """Precision matches each hypothesis row to its best reference row; recall the reverse.

    Optional idf-style weights apply per row of the respective side. No
    baseline rescaling is performed.
    """
    h = _unit_rows(hyp_embeddings, "hypothesis")
    r = _unit_rows(ref_embeddings, "reference")
    if h.shape[1] != r.shape[1]:
        raise ValueError(f"embedding dimensions differ: {h.shape[1]} vs {r.shape[1]}")
    sim = np.clip(h @ r.T, -1.0, 1.0)
    # rounding can leave self-similarity a few ulps short of 1
    sim[np.abs(sim - 1.0) <= _SNAP] = 1.0
    precision = _weighted_mean(sim.max(axis=1), hyp_weights)
    recall = _weighted_mean(sim.max(axis=0), ref_weights)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return BertScoreResult(precision, recall, f1)
