"""Byte-level BPE encoding and tokenizer fertility.

A :class:`TokenizerSpec` is an ordered merge list over byte strings plus a
vocabulary. Encoding pre-tokenizes on whitespace (leading whitespace stays
attached to the following chunk), then repeatedly applies the lowest-ranked
applicable merge to every non-overlapping occurrence, left to right.
"""

from __future__ import annotations

import base64
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import regex

from .corpus import Corpus, Language
from .tokenization import Origin, TokenSequence, word_count

_PRETOKEN = regex.compile(r"\s*\S+|\s+")


class TokenizerKind(str, enum.Enum):
    BYTE_BPE = "ByteBpe"
    WORD_PER_TOKEN = "WordPerToken"


class TokenizerSpecError(ValueError):
    pass


class Side(str, enum.Enum):
    SOURCE = "source"
    REFERENCE = "reference"


@dataclass(frozen=True, eq=False)
class TokenizerSpec:
    name: str
    kind: TokenizerKind
    vocab: dict[bytes, int] = field(default_factory=dict)
    merges: tuple[tuple[bytes, bytes], ...] = ()
    special_tokens: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "kind", TokenizerKind(self.kind))
        object.__setattr__(self, "merges", tuple((bytes(a), bytes(b)) for a, b in self.merges))
        object.__setattr__(self, "special_tokens", frozenset(self.special_tokens))
        ranks = {}
        for i, pair in enumerate(self.merges):
            if pair in ranks:
                raise TokenizerSpecError(f"duplicate merge rule {pair!r} at positions {ranks[pair]} and {i}")
            if pair[0] + pair[1] not in self.vocab:
                raise TokenizerSpecError(f"merge {i} produces {pair[0] + pair[1]!r}, which is not in the vocab")
            ranks[pair] = i
        object.__setattr__(self, "_ranks", ranks)
        object.__setattr__(self, "_chunk_cache", {})
        specials = sorted(self.special_tokens, key=len, reverse=True)
        splitter = regex.compile("(" + "|".join(regex.escape(s) for s in specials) + ")") if specials else None
        object.__setattr__(self, "_special_re", splitter)


@dataclass(frozen=True)
class FertilityReport:
    language: Language
    tokenizer_name: str
    n_words: int
    n_subword_tokens: int
    fertility: float


def word_per_token_spec(name: str = "word-per-token") -> TokenizerSpec:
    return TokenizerSpec(name, TokenizerKind.WORD_PER_TOKEN)


def byte_level_spec(name: str, merges=(), extra_vocab=(), special_tokens=()) -> TokenizerSpec:
    """Spec whose vocab holds all 256 single bytes, every merge product and ``extra_vocab``."""
    vocab: dict[bytes, int] = {bytes([b]): b for b in range(256)}
    for a, b in merges:
        vocab.setdefault(a + b, len(vocab))
    for tok in list(extra_vocab) + [s.encode("utf-8") for s in special_tokens]:
        vocab.setdefault(tok, len(vocab))
    return TokenizerSpec(name, TokenizerKind.BYTE_BPE, vocab, tuple(merges), frozenset(special_tokens))


def _b64(b: bytes) -> str:
    return base64.b64encode(b).decode("ascii")


def dump_spec(spec: TokenizerSpec, path) -> None:
    doc = {
        "name": spec.name,
        "kind": spec.kind.value,
        "vocab": {_b64(k): v for k, v in spec.vocab.items()},
        "merges": [[_b64(a), _b64(b)] for a, b in spec.merges],
        "special_tokens": sorted(spec.special_tokens),
    }
    Path(path).write_text(json.dumps(doc, ensure_ascii=False, indent=1), encoding="utf-8")


def load_spec(path) -> TokenizerSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return TokenizerSpec(
            name=doc["name"],
            kind=TokenizerKind(doc["kind"]),
            vocab={base64.b64decode(k): int(v) for k, v in doc.get("vocab", {}).items()},
            merges=tuple((base64.b64decode(a), base64.b64decode(b)) for a, b in doc.get("merges", [])),
            special_tokens=frozenset(doc.get("special_tokens", [])),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise TokenizerSpecError(f"{path}: {exc}") from exc


def _merge_chunk(spec: TokenizerSpec, chunk: bytes) -> list[bytes]:
    cached = spec._chunk_cache.get(chunk)
    if cached is not None:
        return cached
    ranks = spec._ranks
    parts = [chunk[i:i + 1] for i in range(len(chunk))]
    while len(parts) > 1:
        best = None
        for i in range(len(parts) - 1):
            r = ranks.get((parts[i], parts[i + 1]))
            if r is not None and (best is None or r < best):
                best = r
        if best is None:
            break
        left, right = spec.merges[best]
        merged = []
        i = 0
        while i < len(parts):
            if i + 1 < len(parts) and parts[i] == left and parts[i + 1] == right:
                merged.append(left + right)
                i += 2
            else:
                merged.append(parts[i])
                i += 1
        parts = merged
    spec._chunk_cache[chunk] = parts
    return parts


def _display(piece: bytes) -> str:
    return piece.decode("utf-8", errors="backslashreplace")


def bpe_encode(spec: TokenizerSpec, text: str) -> TokenSequence:
    if spec.kind is not TokenizerKind.BYTE_BPE:
        raise TokenizerSpecError(f"{spec.name}: bpe_encode needs a ByteBpe spec, got {spec.kind.value}")
    segments = spec._special_re.split(text) if spec._special_re else [text]
    pieces: list[bytes] = []
    for seg in segments:
        if not seg:
            continue
        if seg in spec.special_tokens:
            pieces.append(seg.encode("utf-8"))
            continue
        for chunk in _PRETOKEN.findall(seg):
            pieces.extend(_merge_chunk(spec, chunk.encode("utf-8")))
    ids = []
    for p in pieces:
        try:
            ids.append(spec.vocab[p])
        except KeyError:
            raise TokenizerSpecError(f"{spec.name}: byte sequence {p!r} is not in the vocab") from None
    return TokenSequence([_display(p) for p in pieces], Origin.SUBWORD, tuple(pieces), tuple(ids))


def count_tokens(spec: TokenizerSpec, text: str, language: Language | None = None) -> int:
    if spec.kind is TokenizerKind.WORD_PER_TOKEN:
        return word_count(text, language)
    return len(bpe_encode(spec, text))


def fertility(spec: TokenizerSpec, corpus: Corpus, side: Side | str = Side.SOURCE) -> FertilityReport:
    """Subword tokens per word over one side of a corpus.

    Words are :func:`word_tokenize` tokens that are not pure punctuation;
    tokens are counted over the full sentence text.
    """
    side = Side(side)
    if not corpus.pairs:
        raise ValueError("fertility needs a nonempty corpus")
    n_words = n_tokens = 0
    for p in corpus.pairs:
        text = p.source if side is Side.SOURCE else p.reference
        n_words += word_count(text, corpus.language)
        n_tokens += count_tokens(spec, text, corpus.language)
    if n_words == 0:
        raise ValueError(f"{corpus.language.code}: corpus has no words on the {side.value} side")
    return FertilityReport(corpus.language, spec.name, n_words, n_tokens, n_tokens / n_words)


# Converters from publicly distributed tokenizer files.


def _merges_from_ranks(ranks: dict[bytes, int]) -> list[tuple[bytes, bytes]]:
    # a rank-ordered vocab implies a merge for every split of a token into two lower-ranked tokens
    found = []
    for tok, rank in ranks.items():
        if len(tok) < 2:
            continue
        for i in range(1, len(tok)):
            left, right = tok[:i], tok[i:]
            lr, rr = ranks.get(left), ranks.get(right)
            if lr is not None and rr is not None and lr < rank and rr < rank:
                found.append((rank, max(lr, rr), left, right))
    found.sort()
    return [(a, b) for _, _, a, b in found]


def spec_from_tiktoken(path, name: str | None = None) -> TokenizerSpec:
    """Build a spec from a ``.tiktoken`` ranks file (one ``<base64 token> <rank>`` per line)."""
    ranks = {}
    for line in Path(path).read_text(encoding="ascii").splitlines():
        if line.strip():
            tok, rank = line.split()
            ranks[base64.b64decode(tok)] = int(rank)
    return TokenizerSpec(name or Path(path).stem, TokenizerKind.BYTE_BPE, ranks, tuple(_merges_from_ranks(ranks)))


def _bytes_to_unicode() -> dict[int, str]:
    bs = list(range(ord("!"), ord("~") + 1)) + list(range(ord("¡"), ord("¬") + 1)) + list(range(ord("®"), ord("ÿ") + 1))
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, map(chr, cs)))


def spec_from_hf_tokenizer_json(path, name: str | None = None) -> TokenizerSpec:
    """Build a spec from a byte-level BPE ``tokenizer.json`` as shipped on model hubs."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    model = doc.get("model", {})
    if model.get("type") != "BPE":
        raise TokenizerSpecError(f"{path}: only BPE models can be converted, got {model.get('type')!r}")
    decode = {c: b for b, c in _bytes_to_unicode().items()}

    def to_bytes(s: str) -> bytes:
        try:
            return bytes(decode[c] for c in s)
        except KeyError:
            raise TokenizerSpecError(f"{path}: token {s!r} is not byte-level encoded") from None

    vocab = {}
    for tok, idx in model["vocab"].items():
        try:
            vocab[to_bytes(tok)] = int(idx)
        except TokenizerSpecError:
            continue
    merges = []
    for m in model.get("merges", []):
        a, b = m.split(" ", 1) if isinstance(m, str) else m
        merges.append((to_bytes(a), to_bytes(b)))
    specials = [t["content"] for t in doc.get("added_tokens", []) if t.get("special")]
    for s in specials:
        vocab.setdefault(s.encode("utf-8"), len(vocab))
    return TokenizerSpec(name or Path(path).parent.name or "hf-bpe", TokenizerKind.BYTE_BPE, vocab, tuple(merges), frozenset(specials))
