"""Token-embedding providers for BERTScore.

The metric only needs a matrix of token vectors per sentence, so any model
can be plugged in. ``hashing`` is a deterministic character n-gram embedder
for offline runs and tests; it is not a semantic model and its scores are
not comparable to published BERTScore values.
"""

from __future__ import annotations

import hashlib

import numpy as np

from ..tokenization import word_tokenize
from .bertscore import BertScoreResult, bertscore


class EmbeddingUnavailable(RuntimeError):
    pass


class HashingEmbedder:
    def __init__(self, dim: int = 256, n: int = 3):
        self.dim = dim
        self.n = n
        self.name = f"hashing(dim={dim},n={n})"

    def _vector(self, token: str) -> np.ndarray:
        v = np.zeros(self.dim)
        padded = f"<{token}>"
        grams = [padded[i:i + self.n] for i in range(max(1, len(padded) - self.n + 1))]
        for g in grams:
            h = hashlib.blake2b(g.encode("utf-8"), digest_size=8).digest()
            idx = int.from_bytes(h[:4], "little") % self.dim
            v[idx] += 1.0 if h[4] & 1 else -1.0
        if not v.any():
            v[0] = 1.0
        return v

    def embed(self, text: str) -> np.ndarray:
        toks = word_tokenize(text).tokens or (text,)
        return np.stack([self._vector(t) for t in toks])


class TransformerEmbedder:
    """Contextual embeddings from a Hugging Face encoder, special tokens dropped."""

    def __init__(self, model_name: str, layer: int | None = None, device: str = "cpu"):
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise EmbeddingUnavailable(f"transformers/torch not importable: {exc}") from exc
        try:
            self._tok = AutoTokenizer.from_pretrained(model_name)
            self._model = AutoModel.from_pretrained(model_name).to(device).eval()
        except Exception as exc:  # hub/network/file errors all mean the same thing here
            raise EmbeddingUnavailable(f"cannot load {model_name!r}: {exc}") from exc
        self._torch = torch
        self._device = device
        self.layer = layer
        self.name = f"transformers:{model_name}" + (f"@layer{layer}" if layer is not None else "")

    def embed(self, text: str) -> np.ndarray:
        enc = self._tok(text, return_tensors="pt", return_special_tokens_mask=True, truncation=True)
        special = enc.pop("special_tokens_mask")[0].bool()
        with self._torch.no_grad():
            out = self._model(**{k: v.to(self._device) for k, v in enc.items()}, output_hidden_states=True)
        hidden = out.hidden_states[self.layer] if self.layer is not None else out.last_hidden_state
        return hidden[0][~special].cpu().numpy()


def make_embedder(cfg: dict | None):
    cfg = dict(cfg or {"kind": "hashing"})
    kind = cfg.pop("kind", "hashing")
    if kind == "hashing":
        return HashingEmbedder(**cfg)
    if kind == "transformers":
        return TransformerEmbedder(**cfg)
    raise EmbeddingUnavailable(f"unknown embedding provider kind {kind!r}")


def sentence_bertscore(embedder, hypothesis: str, reference: str) -> BertScoreResult:
    return bertscore(embedder.embed(hypothesis), embedder.embed(reference))
