import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import bertscore_oracle
from indic_gec.metrics.bertscore import bertscore
from indic_gec.metrics.embeddings import EmbeddingUnavailable, HashingEmbedder, make_embedder, sentence_bertscore


def test_identical_rows_score_exactly_one():
    m = np.random.default_rng(0).normal(size=(7, 16))
    r = bertscore(m, m)
    assert (r.precision, r.recall, r.f1) == (1.0, 1.0, 1.0)


def test_orthogonal_scores_zero():
    r = bertscore([[1.0, 0.0]], [[0.0, 1.0]])
    assert (r.precision, r.recall, r.f1) == (0.0, 0.0, 0.0)


def test_partial_cover():
    r = bertscore([[1.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]])
    assert r.precision == 1.0 and r.recall == 0.5
    assert r.f1 == pytest.approx(2 / 3)


def test_weights_apply_per_side():
    r = bertscore([[1.0, 0.0]], [[1.0, 0.0], [0.0, 1.0]], ref_weights=[3.0, 1.0])
    assert r.recall == pytest.approx(0.75)
    with pytest.raises(ValueError):
        bertscore([[1.0, 0.0]], [[1.0, 0.0]], hyp_weights=[1.0, 2.0])


def test_bad_inputs():
    with pytest.raises(ValueError, match="zero-norm"):
        bertscore([[0.0, 0.0]], [[1.0, 0.0]])
    with pytest.raises(ValueError, match="dimensions"):
        bertscore([[1.0, 0.0]], [[1.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        bertscore(np.zeros((0, 2)), [[1.0, 0.0]])


_rows = st.integers(1, 6).flatmap(
    lambda n: arrays(np.float64, (n, 4), elements=st.floats(-3, 3, allow_nan=False, allow_subnormal=False))
).filter(lambda m: bool(np.all(np.linalg.norm(m, axis=1) > 1e-3)))


@given(_rows, _rows)
def test_duality_and_oracle(h, r):
    ab, ba = bertscore(h, r), bertscore(r, h)
    assert abs(ab.precision - ba.recall) <= 1e-12 and abs(ab.recall - ba.precision) <= 1e-12
    p, rec, f = bertscore_oracle(h.tolist(), r.tolist())
    assert (ab.precision, ab.recall) == pytest.approx((p, rec), abs=1e-9)
    assert ab.f1 <= 1.0


def test_hashing_embedder_is_deterministic():
    e = HashingEmbedder(dim=32)
    a = e.embed("नमस्ते दुनिया")
    assert a.shape == (2, 32)
    assert np.array_equal(a, HashingEmbedder(dim=32).embed("नमस्ते दुनिया"))
    assert sentence_bertscore(e, "a cat sat", "a cat sat").f1 == 1.0
    assert make_embedder({"kind": "hashing", "dim": 8}).dim == 8
    with pytest.raises(EmbeddingUnavailable):
        make_embedder({"kind": "nope"})
