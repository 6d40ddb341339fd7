"""Translate token spans across a sentence pair through its word alignment.

An aligned source span projects to the min-to-max hull of the target
indices its links hit: extractive QA needs a contiguous span, and the
hull is the minimal contiguous cover. Tokens inside the hull with no link
back to the source span are "gaps"; by default only fully blank
projections are discarded, since word aligners tend to miss links rather
than invent them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .candidates import QACandidate
from .corpus import ContextWindow, SentencePair, WordAlignment
from .errors import SpanOutOfWindow

BLANK_PROJECTION = "blank_projection"
GAPPY_PROJECTION = "gappy_projection"


@dataclass(frozen=True)
class ProjectedSpan:
    """The target-side image of a source token span."""

    tgt_span: tuple[int, int]
    aligned_tgt_indices: frozenset[int]

    @property
    def gap_count(self) -> int:
        start, end = self.tgt_span
        return (end - start) - len(self.aligned_tgt_indices)


@dataclass(frozen=True)
class ProjectedAnswer:
    answer_l: str
    span: ProjectedSpan
    char_start_in_context: int


@dataclass(frozen=True)
class Discard:
    """A candidate dropped during projection, with its audit reason."""

    reason: str
    detail: str = ""


def project_span(src_span: tuple[int, int], wa: WordAlignment) -> ProjectedSpan | None:
    """Project a source token span; None when no link touches the span."""
    start, end = src_span
    hit = {j for i, j in wa.links if start <= i < end}
    if not hit:
        return None
    return ProjectedSpan(
        tgt_span=(min(hit), max(hit) + 1),
        aligned_tgt_indices=frozenset(hit),
    )


def char_offset(window: ContextWindow, side: str, token_span: tuple[int, int]) -> int:
    """Character index of a token span's first token in the joined context.

    Exact by construction: context[offset : offset + len(joined)] equals
    the span's tokens joined by single spaces.
    """
    tokens = window.tokens(side)
    start, end = token_span
    if not (0 <= start < end <= len(tokens)):
        raise SpanOutOfWindow(f"span {token_span} outside {len(tokens)}-token window")
    return sum(len(t) + 1 for t in tokens[:start])


def project_answer(
    candidate: QACandidate,
    pair: SentencePair,
    wa: WordAlignment,
    window: ContextWindow,
    max_gap_ratio: float = 1.0,
) -> ProjectedAnswer | Discard:
    """Project a located answer span to the target side of its pair.

    Discards when the alignment leaves the projection blank, or when the
    share of unaligned tokens inside the hull exceeds ``max_gap_ratio``.
    """
    projected = project_span(candidate.answer_span, wa)
    if projected is None:
        return Discard(BLANK_PROJECTION, detail=candidate.id)
    start, end = projected.tgt_span
    length = end - start
    if length > 0 and projected.gap_count / length > max_gap_ratio:
        return Discard(
            GAPPY_PROJECTION,
            detail=f"{candidate.id}: {projected.gap_count}/{length} gaps",
        )
    answer_l = " ".join(pair.tgt_tokens[start:end])
    context_span = (window.tgt_token_offset + start, window.tgt_token_offset + end)
    return ProjectedAnswer(
        answer_l=answer_l,
        span=projected,
        char_start_in_context=char_offset(window, "tgt", context_span),
    )
