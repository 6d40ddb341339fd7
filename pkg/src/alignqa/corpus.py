"""Parallel corpus ingestion and context expansion.

Bitexts arrive pre-tokenized, one sentence per line, parallel by line
number. Whitespace tokenization defines the token indexing that word
alignments refer to; context text is always tokens joined by single
spaces, so character offsets are deterministic and reversible.

Paragraph structure comes from an optional metadata file
(``line<TAB>doc_id<TAB>paragraph_index``, 0-based line numbers) or, when
absent, from blank-line-separated blocks that must match across the two
sides of the bitext.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from . import artifacts
from .errors import DataError, LineCountMismatch, UnknownPair

_LINK_RE = re.compile(r"^(\d+)-(\d+)$")

CONTEXT_MODES = ("sentence", "paragraph", "window")
ALIGNMENT_ORIGINS = ("human", "automatic")


@dataclass(frozen=True)
class SentencePair:
    """One tokenized bitext sentence pair with document/paragraph position."""

    id: str
    doc_id: str
    paragraph_index: int
    src_tokens: tuple[str, ...]
    tgt_tokens: tuple[str, ...]
    lang_pair: tuple[str, str] = ("en", "xx")

    def __post_init__(self) -> None:
        if not self.src_tokens or not self.tgt_tokens:
            raise DataError(f"pair {self.id}: empty token list")
        for tok in (*self.src_tokens, *self.tgt_tokens):
            if not tok or any(ch.isspace() for ch in tok):
                raise DataError(f"pair {self.id}: bad token {tok!r}")
        if self.paragraph_index < 0:
            raise DataError(f"pair {self.id}: negative paragraph_index")

    @property
    def src_text(self) -> str:
        return " ".join(self.src_tokens)

    @property
    def tgt_text(self) -> str:
        return " ".join(self.tgt_tokens)


@dataclass(frozen=True)
class WordAlignment:
    """Token-index links between the two sides of one sentence pair.

    ``links`` is a set of (source index, target index) pairs; it may be
    empty when the alignment is under-specified.
    """

    pair_id: str
    links: frozenset[tuple[int, int]]
    origin: str = "automatic"

    def __post_init__(self) -> None:
        if self.origin not in ALIGNMENT_ORIGINS:
            raise DataError(f"alignment {self.pair_id}: origin {self.origin!r}")


@dataclass(frozen=True)
class ContextPolicy:
    """How to widen a sentence into its QA context.

    ``n`` is the window radius in sentences and is ignored unless
    mode is "window".
    """

    mode: str = "sentence"
    n: int = 0

    def __post_init__(self) -> None:
        if self.mode not in CONTEXT_MODES:
            raise DataError(f"unknown context mode {self.mode!r}")
        if self.n < 0:
            raise DataError("window radius must be >= 0")


@dataclass(frozen=True)
class ContextWindow:
    """A run of sentences around a focus sentence, with token offsets.

    ``src_token_offset``/``tgt_token_offset`` give the index of the focus
    sentence's first token within the space-joined context, so focus token
    k sits at context token offset + k.
    """

    pair_ids: tuple[str, ...]
    focus_index: int
    src_text: str
    tgt_text: str
    src_token_offset: int
    tgt_token_offset: int

    def tokens(self, side: str) -> list[str]:
        text = self.src_text if side == "src" else self.tgt_text
        return text.split(" ")


class Corpus:
    """Immutable indexed view over sentence pairs; safe to share across workers."""

    def __init__(self, pairs: Iterable[SentencePair]):
        self._pairs: tuple[SentencePair, ...] = tuple(pairs)
        self._by_id: dict[str, SentencePair] = {}
        self._docs: dict[str, list[SentencePair]] = {}
        self._doc_pos: dict[str, int] = {}
        self._paragraphs: dict[tuple[str, int], list[SentencePair]] = {}
        for pair in self._pairs:
            if pair.id in self._by_id:
                raise DataError(f"duplicate pair id {pair.id}")
            self._by_id[pair.id] = pair
            doc = self._docs.setdefault(pair.doc_id, [])
            self._doc_pos[pair.id] = len(doc)
            doc.append(pair)
            self._paragraphs.setdefault((pair.doc_id, pair.paragraph_index), []).append(pair)

    def __len__(self) -> int:
        return len(self._pairs)

    def __iter__(self) -> Iterator[SentencePair]:
        return iter(self._pairs)

    def get(self, pair_id: str) -> SentencePair:
        try:
            return self._by_id[pair_id]
        except KeyError:
            raise UnknownPair(f"unknown pair id {pair_id!r}") from None

    def doc_pairs(self, doc_id: str) -> list[SentencePair]:
        return list(self._docs.get(doc_id, []))

    def paragraph_pairs(self, doc_id: str, paragraph_index: int) -> list[SentencePair]:
        return list(self._paragraphs.get((doc_id, paragraph_index), []))

    def position_in_doc(self, pair_id: str) -> int:
        self.get(pair_id)
        return self._doc_pos[pair_id]


def _read_lines(path: Path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def parse_bitext(
    src_file: Path,
    tgt_file: Path,
    meta_file: Path | None = None,
    doc_id: str | None = None,
    lang_pair: tuple[str, str] = ("en", "xx"),
    report: list[dict] | None = None,
) -> list[SentencePair]:
    """Parse a line-parallel bitext into sentence pairs.

    Line numbers are 0-based over the raw files. A blank line on both
    sides marks a paragraph break; a line that is blank or whitespace-only
    on exactly one side (or whitespace-only on both) is rejected with an
    ``empty_sentence`` record in ``report``.
    """
    src_lines = _read_lines(Path(src_file))
    tgt_lines = _read_lines(Path(tgt_file))
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(
            f"{src_file} has {len(src_lines)} lines but {tgt_file} has {len(tgt_lines)}"
        )

    meta: dict[int, tuple[str, int]] | None = None
    if meta_file is not None:
        meta = {}
        for lineno, line in enumerate(_read_lines(Path(meta_file)), start=1):
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise DataError(f"{meta_file}: line {lineno}: expected 3 tab-separated fields")
            meta[int(cols[0])] = (cols[1], int(cols[2]))

    default_doc = doc_id if doc_id is not None else Path(src_file).stem
    pairs: list[SentencePair] = []
    paragraph = 0
    pending_break = False
    for idx, (src, tgt) in enumerate(zip(src_lines, tgt_lines)):
        if src == "" and tgt == "":
            pending_break = bool(pairs)
            continue
        src_tokens = src.split()
        tgt_tokens = tgt.split()
        if not src_tokens or not tgt_tokens:
            if report is not None:
                report.append(
                    {"stage": "ingest", "reason": "empty_sentence", "line": idx}
                )
            continue
        if pending_break:
            paragraph += 1
            pending_break = False
        if meta is not None:
            if idx not in meta:
                raise DataError(f"{meta_file}: no entry for line {idx}")
            line_doc, line_paragraph = meta[idx]
        else:
            line_doc, line_paragraph = default_doc, paragraph
        pairs.append(
            SentencePair(
                id=f"{line_doc}:{idx}",
                doc_id=line_doc,
                paragraph_index=line_paragraph,
                src_tokens=tuple(src_tokens),
                tgt_tokens=tuple(tgt_tokens),
                lang_pair=lang_pair,
            )
        )
    return pairs


def parse_alignments(
    file: Path,
    corpus: Sequence[SentencePair],
    origin: str = "automatic",
    report: list[dict] | None = None,
) -> list[WordAlignment]:
    """Parse Pharaoh-style ``i-j`` alignment lines, one per sentence pair.

    Malformed tokens and out-of-range links are rejected per link and
    recorded in ``report``; duplicate links collapse to set semantics.
    """
    lines = _read_lines(Path(file))
    if len(lines) != len(corpus):
        raise LineCountMismatch(
            f"{file} has {len(lines)} lines for {len(corpus)} sentence pairs"
        )
    alignments: list[WordAlignment] = []
    for pair, line in zip(corpus, lines):
        links: set[tuple[int, int]] = set()
        for token in line.split():
            match = _LINK_RE.match(token)
            if not match:
                if report is not None:
                    report.append(
                        {
                            "stage": "ingest",
                            "reason": "malformed_link",
                            "pair_id": pair.id,
                            "token": token,
                        }
                    )
                continue
            i, j = int(match.group(1)), int(match.group(2))
            if i >= len(pair.src_tokens) or j >= len(pair.tgt_tokens):
                if report is not None:
                    report.append(
                        {
                            "stage": "ingest",
                            "reason": "index_out_of_range",
                            "pair_id": pair.id,
                            "link": [i, j],
                        }
                    )
                continue
            links.add((i, j))
        alignments.append(WordAlignment(pair_id=pair.id, links=frozenset(links), origin=origin))
    return alignments


def serialize_alignments(alignments: Iterable[WordAlignment]) -> str:
    lines = []
    for wa in alignments:
        lines.append(" ".join(f"{i}-{j}" for i, j in sorted(wa.links)))
    return "\n".join(lines) + "\n"


def expand_context(pair_id: str, corpus: Corpus, policy: ContextPolicy) -> ContextWindow:
    """Widen a sentence pair into its context window under the given policy."""
    focus = corpus.get(pair_id)
    if policy.mode == "sentence":
        members = [focus]
    elif policy.mode == "paragraph":
        members = corpus.paragraph_pairs(focus.doc_id, focus.paragraph_index)
    else:
        doc = corpus.doc_pairs(focus.doc_id)
        pos = corpus.position_in_doc(pair_id)
        members = doc[max(0, pos - policy.n) : pos + policy.n + 1]
    focus_index = next(i for i, m in enumerate(members) if m.id == focus.id)
    src_offset = sum(len(m.src_tokens) for m in members[:focus_index])
    tgt_offset = sum(len(m.tgt_tokens) for m in members[:focus_index])
    return ContextWindow(
        pair_ids=tuple(m.id for m in members),
        focus_index=focus_index,
        src_text=" ".join(m.src_text for m in members),
        tgt_text=" ".join(m.tgt_text for m in members),
        src_token_offset=src_offset,
        tgt_token_offset=tgt_offset,
    )


def save_corpus(
    path: Path,
    pairs: Sequence[SentencePair],
    alignments: Sequence[WordAlignment],
    corpus_id: str,
    lang_pair: tuple[str, str],
    alignment_origin: str,
) -> None:
    obj = {
        "corpus_id": corpus_id,
        "lang_pair": list(lang_pair),
        "alignment_origin": alignment_origin,
        "pairs": [
            {
                "id": p.id,
                "doc_id": p.doc_id,
                "paragraph_index": p.paragraph_index,
                "src_tokens": list(p.src_tokens),
                "tgt_tokens": list(p.tgt_tokens),
            }
            for p in pairs
        ],
        "alignments": {wa.pair_id: sorted(list(link) for link in wa.links) for wa in alignments},
    }
    artifacts.write_json(Path(path), obj)


def load_corpus(path: Path) -> tuple[Corpus, dict[str, WordAlignment], dict]:
    """Load a corpus artifact; returns (corpus, alignments by pair id, metadata)."""
    obj = artifacts.read_json(Path(path))
    lang_pair = tuple(obj["lang_pair"])
    pairs = [
        SentencePair(
            id=p["id"],
            doc_id=p["doc_id"],
            paragraph_index=p["paragraph_index"],
            src_tokens=tuple(p["src_tokens"]),
            tgt_tokens=tuple(p["tgt_tokens"]),
            lang_pair=lang_pair,
        )
        for p in obj["pairs"]
    ]
    origin = obj.get("alignment_origin", "automatic")
    alignments = {
        pair_id: WordAlignment(
            pair_id=pair_id,
            links=frozenset((i, j) for i, j in links),
            origin=origin,
        )
        for pair_id, links in obj.get("alignments", {}).items()
    }
    meta = {"corpus_id": obj["corpus_id"], "lang_pair": lang_pair, "alignment_origin": origin}
    return Corpus(pairs), alignments, meta
