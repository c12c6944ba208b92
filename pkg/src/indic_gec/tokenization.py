"""Script-aware word tokenization, grapheme segmentation and n-gram counting."""

from __future__ import annotations

import enum
import unicodedata
from collections import Counter
from dataclasses import dataclass

import regex

from .corpus import Language

_GRAPHEME = regex.compile(r"\X")
DANDA = "।"
DOUBLE_DANDA = "॥"


class Origin(str, enum.Enum):
    WORD = "word"
    SUBWORD = "subword"
    GRAPHEME = "grapheme"


@dataclass(frozen=True)
class TokenSequence:
    """Ordered tokens plus where they came from.

    Subword sequences also carry the raw byte pieces and vocabulary ids,
    since byte-level pieces need not be valid UTF-8 on their own.
    """

    tokens: tuple[str, ...]
    origin: Origin
    pieces: tuple[bytes, ...] | None = None
    ids: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if any(t == "" for t in self.tokens):
            raise ValueError("token sequences may not contain empty tokens")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]


def graphemes(text: str) -> TokenSequence:
    return TokenSequence(_GRAPHEME.findall(text), Origin.GRAPHEME)


def is_punctuation(token: str) -> bool:
    """True when every codepoint is punctuation (category P*, danda or double danda)."""
    return bool(token) and all(
        ch in (DANDA, DOUBLE_DANDA) or unicodedata.category(ch).startswith("P") for ch in token
    )


def _is_punct_grapheme(g: str) -> bool:
    ch = g[0]
    return ch in (DANDA, DOUBLE_DANDA) or unicodedata.category(ch).startswith("P")


def word_tokenize(text: str, language: Language | None = None) -> TokenSequence:
    """Whitespace split, then peel leading and trailing punctuation off each chunk.

    Each detached punctuation grapheme becomes its own token; punctuation
    inside a chunk ("a.b.c") stays attached. ``language`` is accepted for
    API symmetry; the rules are script-independent.
    """
    out: list[str] = []
    for chunk in text.split():
        gs = _GRAPHEME.findall(chunk)
        lo, hi = 0, len(gs)
        while lo < hi and _is_punct_grapheme(gs[lo]):
            lo += 1
        while hi > lo and _is_punct_grapheme(gs[hi - 1]):
            hi -= 1
        out.extend(gs[:lo])
        if lo < hi:
            out.append("".join(gs[lo:hi]))
        out.extend(gs[hi:])
    return TokenSequence(out, Origin.WORD)


def word_count(text: str, language: Language | None = None) -> int:
    """Number of word tokens, punctuation-only tokens excluded."""
    return sum(1 for t in word_tokenize(text, language) if not is_punctuation(t))


def ngrams(tokens, n: int) -> Counter:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    toks = tuple(tokens)
    return Counter(toks[i:i + n] for i in range(len(toks) - n + 1))
