from __future__ import annotations

import random

import pytest

from alignqa.corpus import (
    ContextPolicy,
    Corpus,
    SentencePair,
    WordAlignment,
    expand_context,
    parse_alignments,
    parse_bitext,
    serialize_alignments,
)
from alignqa.errors import DataError, LineCountMismatch, UnknownPair

from conftest import make_pair


def test_parse_bitext_minimal(tmp_path):
    src = tmp_path / "s.txt"
    tgt = tmp_path / "t.txt"
    src.write_text("Hello world\n", encoding="utf-8")
    tgt.write_text("Bonjour monde\n", encoding="utf-8")
    pairs = parse_bitext(src, tgt, lang_pair=("en", "fr"))
    assert len(pairs) == 1
    assert pairs[0].src_tokens == ("Hello", "world")
    assert pairs[0].tgt_tokens == ("Bonjour", "monde")
    assert pairs[0].id == "s:0"
    assert pairs[0].paragraph_index == 0


def test_parse_bitext_line_count_mismatch(tmp_path):
    src = tmp_path / "s.txt"
    tgt = tmp_path / "t.txt"
    src.write_text("a\nb\nc\n", encoding="utf-8")
    tgt.write_text("x\ny\n", encoding="utf-8")
    with pytest.raises(LineCountMismatch):
        parse_bitext(src, tgt)


def test_parse_bitext_paragraph_blocks(tmp_path):
    src = tmp_path / "s.txt"
    tgt = tmp_path / "t.txt"
    src.write_text("a a\nb b\n\nc c\n", encoding="utf-8")
    tgt.write_text("A A\nB B\n\nC C\n", encoding="utf-8")
    pairs = parse_bitext(src, tgt)
    assert [p.paragraph_index for p in pairs] == [0, 0, 1]
    assert [p.id for p in pairs] == ["s:0", "s:1", "s:3"]


def test_parse_bitext_rejects_whitespace_only_line(tmp_path):
    src = tmp_path / "s.txt"
    tgt = tmp_path / "t.txt"
    src.write_text("a\n   \nb\n", encoding="utf-8")
    tgt.write_text("x\ny y\nz\n", encoding="utf-8")
    report: list[dict] = []
    pairs = parse_bitext(src, tgt, report=report)
    assert [p.id for p in pairs] == ["s:0", "s:2"]
    assert report == [{"stage": "ingest", "reason": "empty_sentence", "line": 1}]


def test_parse_bitext_meta_file(tmp_path):
    src = tmp_path / "s.txt"
    tgt = tmp_path / "t.txt"
    meta = tmp_path / "m.tsv"
    src.write_text("a\nb\n", encoding="utf-8")
    tgt.write_text("x\ny\n", encoding="utf-8")
    meta.write_text("0\tdocA\t0\n1\tdocB\t2\n", encoding="utf-8")
    pairs = parse_bitext(src, tgt, meta_file=meta)
    assert pairs[0].doc_id == "docA" and pairs[0].paragraph_index == 0
    assert pairs[1].doc_id == "docB" and pairs[1].paragraph_index == 2
    assert pairs[1].id == "docB:1"


def test_parse_alignments_basic(tmp_path):
    pairs = [make_pair("d0:0", "a b", "x y"), make_pair("d0:1", "c d", "z w")]
    f = tmp_path / "a.align"
    f.write_text("0-0 1-1\n\n", encoding="utf-8")
    alignments = parse_alignments(f, pairs)
    assert alignments[0].links == frozenset({(0, 0), (1, 1)})
    assert alignments[1].links == frozenset()


def test_parse_alignments_dedup_and_errors(tmp_path):
    pairs = [make_pair("d0:0", "a b", "x y")]
    f = tmp_path / "a.align"
    f.write_text("0-0 0-0 1-0 5-0 x-y\n", encoding="utf-8")
    report: list[dict] = []
    alignments = parse_alignments(f, pairs, report=report)
    assert alignments[0].links == frozenset({(0, 0), (1, 0)})
    reasons = sorted(r["reason"] for r in report)
    assert reasons == ["index_out_of_range", "malformed_link"]
    assert all(r["pair_id"] == "d0:0" for r in report)


def test_parse_alignments_line_count(tmp_path):
    pairs = [make_pair("d0:0", "a", "x")]
    f = tmp_path / "a.align"
    f.write_text("0-0\n0-0\n", encoding="utf-8")
    with pytest.raises(LineCountMismatch):
        parse_alignments(f, pairs)


def test_alignment_roundtrip(tmp_path):
    rng = random.Random(7)
    pairs = []
    for k in range(20):
        n_src = rng.randint(1, 8)
        n_tgt = rng.randint(1, 8)
        pairs.append(
            make_pair(f"d0:{k}", " ".join(["w"] * n_src), " ".join(["v"] * n_tgt))
        )
    alignments = [
        WordAlignment(
            p.id,
            frozenset(
                (rng.randrange(len(p.src_tokens)), rng.randrange(len(p.tgt_tokens)))
                for _ in range(rng.randint(0, 10))
            ),
        )
        for p in pairs
    ]
    f = tmp_path / "roundtrip.align"
    f.write_text(serialize_alignments(alignments), encoding="utf-8")
    parsed = parse_alignments(f, pairs)
    assert [a.links for a in parsed] == [a.links for a in alignments]


def test_corpus_duplicate_id_rejected():
    with pytest.raises(DataError):
        Corpus([make_pair("x", "a", "b"), make_pair("x", "c", "d")])


def test_expand_context_sentence_identity():
    pair = make_pair("d0:0", "a b c", "x y")
    corpus = Corpus([pair])
    window = expand_context("d0:0", corpus, ContextPolicy("sentence"))
    assert window.pair_ids == ("d0:0",)
    assert window.src_text == "a b c"
    assert window.tgt_text == "x y"
    assert window.src_token_offset == 0 and window.tgt_token_offset == 0


def test_expand_context_paragraph_offsets():
    pairs = [
        make_pair("d0:0", "one two three", "x", paragraph_index=0),
        make_pair("d0:1", "four five", "y", paragraph_index=0),
        make_pair("d0:2", "six", "z", paragraph_index=0),
    ]
    corpus = Corpus(pairs)
    window = expand_context("d0:1", corpus, ContextPolicy("paragraph"))
    assert len(window.pair_ids) == 3
    assert window.focus_index == 1
    assert window.src_token_offset == 3
    assert window.src_text == "one two three four five six"


def test_expand_context_window_truncates_at_doc_start():
    pairs = [
        make_pair("d0:0", "a", "x"),
        make_pair("d0:1", "b", "y"),
        make_pair("d0:2", "c", "z"),
    ]
    corpus = Corpus(pairs)
    window = expand_context("d0:0", corpus, ContextPolicy("window", n=1))
    assert window.pair_ids == ("d0:0", "d0:1")
    assert window.focus_index == 0


def test_expand_context_window_truncates_at_doc_end():
    pairs = [
        make_pair("d0:0", "a", "x"),
        make_pair("d0:1", "b", "y"),
        make_pair("d0:2", "c", "z"),
    ]
    corpus = Corpus(pairs)
    window = expand_context("d0:2", corpus, ContextPolicy("window", n=2))
    assert window.pair_ids == ("d0:0", "d0:1", "d0:2")
    assert window.focus_index == 2
    assert window.src_token_offset == 2


def test_save_load_corpus_roundtrip(tmp_path):
    from alignqa.corpus import load_corpus, save_corpus

    pairs = [
        make_pair("d0:0", "a b", "x y", lang_pair=("en", "zh")),
        make_pair("d0:1", "c", "z w", lang_pair=("en", "zh")),
    ]
    alignments = [
        WordAlignment("d0:0", frozenset({(0, 1), (1, 0)}), "human"),
        WordAlignment("d0:1", frozenset(), "human"),
    ]
    path = tmp_path / "corpus.json"
    save_corpus(path, pairs, alignments, "cid", ("en", "zh"), "human")
    corpus, loaded, meta = load_corpus(path)
    assert list(corpus) == pairs
    assert loaded["d0:0"].links == frozenset({(0, 1), (1, 0)})
    assert loaded["d0:1"].links == frozenset()
    assert meta == {"corpus_id": "cid", "lang_pair": ("en", "zh"), "alignment_origin": "human"}


def test_expand_context_unknown_pair():
    corpus = Corpus([make_pair("d0:0", "a", "x")])
    with pytest.raises(UnknownPair):
        expand_context("nope", corpus, ContextPolicy("sentence"))


def test_context_window_lossless_join():
    rng = random.Random(13)
    pairs = []
    for k in range(10):
        src = " ".join(f"w{rng.randrange(100)}" for _ in range(rng.randint(1, 6)))
        tgt = " ".join(f"v{rng.randrange(100)}" for _ in range(rng.randint(1, 6)))
        pairs.append(make_pair(f"d0:{k}", src, tgt, paragraph_index=k // 3))
    corpus = Corpus(pairs)
    for pair in pairs:
        for policy in (ContextPolicy("sentence"), ContextPolicy("paragraph"), ContextPolicy("window", 2)):
            window = expand_context(pair.id, corpus, policy)
            joined = [t for pid in window.pair_ids for t in corpus.get(pid).src_tokens]
            assert window.src_text.split(" ") == joined
            focus = corpus.get(window.pair_ids[window.focus_index])
            offset = window.src_token_offset
            assert window.src_text.split(" ")[offset : offset + len(focus.src_tokens)] == list(
                focus.src_tokens
            )


def test_sentence_pair_validation():
    with pytest.raises(DataError):
        SentencePair("p", "d", 0, (), ("x",))
    with pytest.raises(DataError):
        SentencePair("p", "d", 0, ("a b",), ("x",))
