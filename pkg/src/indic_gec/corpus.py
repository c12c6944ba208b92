"""Loading, validation and summary statistics for parallel GEC corpora."""

from __future__ import annotations

import csv
import enum
import io
import re
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path


class CorpusFormatError(ValueError):
    """Raised when a corpus file cannot be parsed into sentence pairs."""


class Script(str, enum.Enum):
    DEVANAGARI = "Devanagari"
    EASTERN_NAGARI = "EasternNagari"
    TAMIL = "Tamil"
    TELUGU = "Telugu"
    MALAYALAM = "Malayalam"
    OTHER = "Other"


class Split(str, enum.Enum):
    TRAIN = "train"
    DEV = "dev"
    TEST = "test"


class FileFormat(str, enum.Enum):
    TSV = "tsv"
    CSV = "csv"


_CODE_RE = re.compile(r"^[a-z][a-z0-9_-]*$")


@dataclass(frozen=True)
class Language:
    code: str
    display_name: str
    script: Script = Script.OTHER

    def __post_init__(self):
        if not _CODE_RE.match(self.code):
            raise ValueError(f"language code must be lowercase ASCII, got {self.code!r}")
        object.__setattr__(self, "script", Script(self.script))


LANGUAGES = {
    lang.code: lang
    for lang in (
        Language("tam", "Tamil", Script.TAMIL),
        Language("mal", "Malayalam", Script.MALAYALAM),
        Language("hi", "Hindi", Script.DEVANAGARI),
        Language("bn", "Bengali", Script.EASTERN_NAGARI),
        Language("tel", "Telugu", Script.TELUGU),
    )
}


def get_language(code: str) -> Language:
    try:
        return LANGUAGES[code]
    except KeyError:
        raise KeyError(f"unknown language code {code!r}; known: {sorted(LANGUAGES)}") from None


@dataclass(frozen=True)
class SentencePair:
    id: str
    source: str
    reference: str
    language: Language

    def __post_init__(self):
        if not self.source.strip():
            raise ValueError(f"{self.id}: empty source")
        if not self.reference.strip():
            raise ValueError(f"{self.id}: empty reference")

    @property
    def is_identity(self) -> bool:
        return self.source.strip() == self.reference.strip()


@dataclass(frozen=True)
class Corpus:
    language: Language
    split: Split
    pairs: tuple[SentencePair, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "split", Split(self.split))
        object.__setattr__(self, "pairs", tuple(self.pairs))
        seen = set()
        for p in self.pairs:
            if p.id in seen:
                raise ValueError(f"duplicate pair id {p.id!r}")
            seen.add(p.id)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def by_id(self) -> dict[str, SentencePair]:
        return {p.id: p for p in self.pairs}


@dataclass(frozen=True)
class CorpusStats:
    n_pairs: int
    n_identity: int
    mean_source_codepoints: float
    mean_source_words: float


def _read_utf8(path: Path) -> str:
    data = Path(path).read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusFormatError(f"{path}: not valid UTF-8 at byte offset {exc.start}") from None
    # a leading BOM is an encoding artifact, not text
    return text[1:] if text.startswith("﻿") else text


def _split_lines(text: str) -> list[str]:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return [ln[:-1] if ln.endswith("\r") else ln for ln in lines]


def _make_pair(pair_id, source, reference, language, where, nfc):
    if nfc:
        source = unicodedata.normalize("NFC", source)
        reference = unicodedata.normalize("NFC", reference)
    if not source.strip():
        raise CorpusFormatError(f"{where}: empty source")
    if not reference.strip():
        raise CorpusFormatError(f"{where}: empty reference")
    return SentencePair(pair_id, source, reference, language)


def load_two_column(
    path,
    language: Language,
    split: Split | str,
    format: FileFormat | str = FileFormat.TSV,
    *,
    has_header: bool = False,
    nfc: bool = False,
) -> Corpus:
    """Read a two-column (source, reference) file.

    Pair ids are ``<split>-<row>`` with 1-based data-row numbering. Text is
    kept exactly as read unless ``nfc`` is set.
    """
    split = Split(split)
    fmt = FileFormat(format)
    path = Path(path)
    text = _read_utf8(path)

    if fmt is FileFormat.TSV:
        rows = [ln.split("\t") for ln in _split_lines(text)]
    else:
        rows = list(csv.reader(io.StringIO(text, newline="")))
        while rows and rows[-1] == []:
            rows.pop()
    if has_header and rows:
        rows = rows[1:]
    if not rows:
        raise CorpusFormatError(f"{path}: empty file")

    pairs = []
    for i, row in enumerate(rows, start=1):
        if len(row) != 2:
            raise CorpusFormatError(f"{path}: row {i}: expected 2 fields, got {len(row)}")
        pairs.append(_make_pair(f"{split.value}-{i}", row[0], row[1], language, f"{path}: row {i}", nfc))
    return Corpus(language, split, pairs)


def load_src_tgt(src_path, tgt_path, language: Language, split: Split | str, *, nfc: bool = False) -> Corpus:
    """Pair line i of a ``.src`` file with line i of the matching ``.tgt`` file."""
    split = Split(split)
    src = _split_lines(_read_utf8(src_path))
    tgt = _split_lines(_read_utf8(tgt_path))
    if len(src) != len(tgt):
        raise CorpusFormatError(f"line count mismatch {len(src)} vs {len(tgt)}")
    if not src:
        raise CorpusFormatError(f"{src_path}: empty file")
    pairs = []
    for i, (s, t) in enumerate(zip(src, tgt), start=1):
        if not s.strip():
            raise CorpusFormatError(f"empty source at line {i}")
        if not t.strip():
            raise CorpusFormatError(f"empty reference at line {i}")
        pairs.append(_make_pair(f"{split.value}-{i}", s, t, language, f"line {i}", nfc))
    return Corpus(language, split, pairs)


def write_two_column(corpus: Corpus, path, format: FileFormat | str = FileFormat.TSV) -> None:
    fmt = FileFormat(format)
    path = Path(path)
    if fmt is FileFormat.TSV:
        lines = []
        for p in corpus.pairs:
            for part in (p.source, p.reference):
                if "\t" in part or "\n" in part or "\r" in part:
                    raise ValueError(f"{p.id}: tab or newline cannot be written to TSV")
            lines.append(f"{p.source}\t{p.reference}\n")
        path.write_text("".join(lines), encoding="utf-8", newline="")
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            for p in corpus.pairs:
                writer.writerow([p.source, p.reference])


def stats(corpus: Corpus) -> CorpusStats:
    if not corpus.pairs:
        raise ValueError("cannot compute statistics of an empty corpus")
    n = len(corpus.pairs)
    return CorpusStats(
        n_pairs=n,
        n_identity=sum(p.is_identity for p in corpus.pairs),
        mean_source_codepoints=sum(len(p.source) for p in corpus.pairs) / n,
        mean_source_words=sum(len(p.source.split()) for p in corpus.pairs) / n,
    )


def identity_subset(corpus: Corpus) -> Corpus:
    """Pairs whose reference equals the source, i.e. no correction is needed."""
    return Corpus(corpus.language, corpus.split, [p for p in corpus.pairs if p.is_identity])
