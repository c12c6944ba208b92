import os
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from indic_gec.corpus import (
    Corpus,
    CorpusFormatError,
    Language,
    SentencePair,
    Split,
    get_language,
    identity_subset,
    load_src_tgt,
    load_two_column,
    stats,
    write_two_column,
)


def _write(tmp_path, name, text):
    p = tmp_path / name
    p.write_bytes(text.encode("utf-8") if isinstance(text, str) else text)
    return p


def test_three_row_tsv(tmp_path, hindi):
    p = _write(tmp_path, "t.tsv", "a b\ta c\nx\tx\nमैं\tमैं\n")
    c = load_two_column(p, hindi, "test")
    assert [q.id for q in c.pairs] == ["test-1", "test-2", "test-3"]
    assert c.pairs[2].source == "मैं"


def test_wrong_field_count_names_row(tmp_path, hindi):
    p = _write(tmp_path, "t.tsv", "a\tb\na\tb\tc\n")
    with pytest.raises(CorpusFormatError, match="row 2: expected 2 fields"):
        load_two_column(p, hindi, "test")


def test_empty_file(tmp_path, hindi):
    with pytest.raises(CorpusFormatError, match="empty file"):
        load_two_column(_write(tmp_path, "e.tsv", ""), hindi, "test")


def test_undecodable_bytes(tmp_path, hindi):
    with pytest.raises(CorpusFormatError, match="UTF-8"):
        load_two_column(_write(tmp_path, "b.tsv", b"ok\t\xff\xfe\n"), hindi, "test")


def test_empty_reference_is_an_error(tmp_path, hindi):
    with pytest.raises(CorpusFormatError, match="empty reference"):
        load_two_column(_write(tmp_path, "t.tsv", "abc\t  \n"), hindi, "dev")


def test_header_flag_and_csv_quoting(tmp_path, hindi):
    p = _write(tmp_path, "t.csv", 'input,output\n"a, b","a, b."\nx,y\n')
    c = load_two_column(p, hindi, "train", "csv", has_header=True)
    assert [(q.source, q.reference) for q in c.pairs] == [("a, b", "a, b."), ("x", "y")]
    assert c.pairs[0].id == "train-1"


def test_crlf_and_text_kept_verbatim(tmp_path, hindi):
    # decomposed and composed forms must both survive untouched
    decomposed = "क़"
    p = _write(tmp_path, "t.tsv", f" {decomposed} \tक़\r\n")
    c = load_two_column(p, hindi, "test")
    assert c.pairs[0].source == f" {decomposed} "
    assert c.pairs[0].reference == "क़"
    nfc = load_two_column(p, hindi, "test", nfc=True)
    assert nfc.pairs[0].source == " क़ "


def test_src_tgt(tmp_path, hindi):
    src = _write(tmp_path, "a.src", "".join(f"s{i}\n" for i in range(5)))
    tgt = _write(tmp_path, "a.tgt", "".join(f"t{i}\n" for i in range(5)))
    c = load_src_tgt(src, tgt, hindi, "train")
    assert len(c) == 5 and c.pairs[4].source == "s4" and c.pairs[4].reference == "t4"


def test_src_tgt_mismatch(tmp_path, hindi):
    src = _write(tmp_path, "a.src", "a\nb\nc\nd\ne\n")
    tgt = _write(tmp_path, "a.tgt", "a\nb\nc\nd\n")
    with pytest.raises(CorpusFormatError, match="line count mismatch 5 vs 4"):
        load_src_tgt(src, tgt, hindi, "test")


def test_src_tgt_empty_line(tmp_path, hindi):
    src = _write(tmp_path, "a.src", "a\nb\n\nd\ne\n")
    tgt = _write(tmp_path, "a.tgt", "a\nb\nc\nd\ne\n")
    with pytest.raises(CorpusFormatError, match="empty source at line 3"):
        load_src_tgt(src, tgt, hindi, "test")


def _corpus(lang, pairs):
    return Corpus(lang, Split.TEST, [SentencePair(f"test-{i}", s, r, lang) for i, (s, r) in enumerate(pairs, 1)])


def test_stats_and_identity(hindi):
    c = _corpus(hindi, [("a b", "a c"), ("x", " x "), ("p", "q"), ("m n", "m")])
    st = stats(c)
    assert (st.n_pairs, st.n_identity) == (4, 1)
    assert st.mean_source_words == pytest.approx(6 / 4)
    assert st.mean_source_codepoints == pytest.approx(8 / 4)
    all_same = _corpus(hindi, [("a", "a"), ("b", "b")])
    assert stats(all_same).n_identity == 2
    with pytest.raises(ValueError):
        stats(_corpus(hindi, []))


def test_identity_subset_order(hindi):
    pairs = [(f"s{i}", f"s{i}" if i in (2, 5, 9) else f"t{i}") for i in range(10)]
    sub = identity_subset(_corpus(hindi, pairs))
    assert [p.source for p in sub.pairs] == ["s2", "s5", "s9"]
    assert len(identity_subset(_corpus(hindi, [("a", "b")]))) == 0
    whole = _corpus(hindi, [("a", "a"), ("b", "b")])
    assert identity_subset(whole).pairs == whole.pairs


def test_language_code_rules():
    with pytest.raises(ValueError):
        Language("Hi", "Hindi")
    with pytest.raises(ValueError):
        Language("", "x")
    assert get_language("tam").display_name == "Tamil"


def test_duplicate_ids_rejected(hindi):
    p = SentencePair("x", "a", "b", hindi)
    with pytest.raises(ValueError, match="duplicate"):
        Corpus(hindi, Split.TEST, [p, p])


_text = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")), min_size=1).filter(
    lambda s: s.strip() and "\t" not in s and "\x85" not in s
)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(_text, _text), min_size=1, max_size=8), st.sampled_from(["tsv", "csv"]))
def test_round_trip_and_verbatim(tmp_path_factory, rows, fmt):
    lang = Language("xx", "X")
    d = tmp_path_factory.mktemp("rt")
    c = Corpus(lang, Split.TRAIN, [SentencePair(f"train-{i}", s, r, lang) for i, (s, r) in enumerate(rows, 1)])
    write_two_column(c, d / f"c.{fmt}", fmt)
    again = load_two_column(d / f"c.{fmt}", lang, "train", fmt)
    assert again == c
    assert stats(again).n_identity == len(identity_subset(again))
    if fmt == "tsv":
        raw = (d / "c.tsv").read_text(encoding="utf-8").split("\n")[:-1]
        for line, p in zip(raw, again.pairs):
            assert p.source + p.reference == line.replace("\t", "")


@pytest.mark.skipif(not os.environ.get("INDIC_GEC_DATA"), reason="shared-task data not available (INDIC_GEC_DATA)")
def test_shared_task_hindi_counts(hindi):
    root = Path(os.environ["INDIC_GEC_DATA"]) / "hi"
    counts = {s: len(load_two_column(root / f"{s}.tsv", hindi, s, has_header=True)) for s in ("train", "dev", "test")}
    assert counts == {"train": 599, "dev": 107, "test": 236}
