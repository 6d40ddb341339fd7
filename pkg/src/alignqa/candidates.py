"""Stage 1: locate generated answers in their source sentences, then filter.

Raw question/answer generations become :class:`QACandidate` records with a
token span for the answer, and pass through an ordered list of heuristic
quality filters. Filtering is deterministic: the first matching rule wins,
and the duplicate rule depends only on corpus order (first seen is kept).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .backends import Backend, run_requests
from .corpus import Corpus, SentencePair
from .errors import UnlocatableAnswer

# Rejection rules in the order they are applied.
FILTER_RULES = (
    "duplicate",
    "what_is_the_answer",
    "answer_has_question_mark",
    "short_sentence",
    "punctuation_only_answer",
)
#: Extra rejection reason used when an answer cannot be located at all.
UNLOCATABLE = "unlocatable_answer"


@dataclass(frozen=True)
class QACandidate:
    """An English question/answer generated from one sentence.

    ``answer_span`` is a half-open token interval over the sentence's
    source tokens.
    """

    id: str
    pair_id: str
    question_en: str
    answer_en: str
    answer_span: tuple[int, int]
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        question = self.question_en.strip()
        if not question or not question.endswith("?"):
            raise ValueError(f"candidate {self.id}: question must end with '?'")
        start, end = self.answer_span
        if not (0 <= start < end):
            raise ValueError(f"candidate {self.id}: bad answer span {self.answer_span}")


@dataclass
class FilterReport:
    kept: list[QACandidate]
    rejected: list[tuple[QACandidate, str]]

    def to_audit_records(self) -> list[dict]:
        return [
            {
                "stage": "filter",
                "reason": reason,
                "candidate_id": cand.id,
                "pair_id": cand.pair_id,
                "question_en": cand.question_en,
                "answer_en": cand.answer_en,
            }
            for cand, reason in self.rejected
        ]


def _normalize_ws(text: str) -> str:
    return " ".join(text.split())


def _is_punct_token(token: str) -> bool:
    return bool(token) and all(unicodedata.category(ch).startswith("P") for ch in token)


def _punct_and_space_only(text: str) -> bool:
    stripped = [ch for ch in text if not ch.isspace()]
    return bool(stripped) and all(unicodedata.category(ch).startswith("P") for ch in stripped)


def locate_answer(
    pair: SentencePair, answer: str, char_start: int | None = None
) -> tuple[int, int]:
    """Map an answer string to a token span over the pair's source tokens.

    With ``char_start``, the character range over the space-joined sentence
    is mapped to the minimal covering token span. Otherwise the answer's
    whitespace-tokenized form is searched for on whole-token boundaries and
    the first occurrence wins.
    """
    if not answer:
        raise UnlocatableAnswer(f"pair {pair.id}: empty answer")
    tokens = pair.src_tokens
    if char_start is not None:
        text = pair.src_text
        char_end = char_start + len(answer)
        if char_start < 0 or char_end > len(text) or text[char_start:char_end] != answer:
            raise UnlocatableAnswer(
                f"pair {pair.id}: answer {answer!r} not at offset {char_start}"
            )
        span_start = span_end = None
        cursor = 0
        for i, token in enumerate(tokens):
            tok_start, tok_end = cursor, cursor + len(token)
            if tok_end > char_start and tok_start < char_end:
                if span_start is None:
                    span_start = i
                span_end = i + 1
            cursor = tok_end + 1
        if span_start is None or span_end is None:
            raise UnlocatableAnswer(f"pair {pair.id}: answer covers no token")
        return (span_start, span_end)

    answer_tokens = answer.split()
    if not answer_tokens:
        raise UnlocatableAnswer(f"pair {pair.id}: answer is whitespace only")
    for i in range(len(tokens) - len(answer_tokens) + 1):
        if list(tokens[i : i + len(answer_tokens)]) == answer_tokens:
            return (i, i + len(answer_tokens))
    raise UnlocatableAnswer(f"pair {pair.id}: answer {answer!r} not found on token boundaries")


def _first_rejection(
    candidate: QACandidate, pair: SentencePair, enabled: frozenset[str]
) -> str | None:
    question = candidate.question_en.strip()
    if "what_is_the_answer" in enabled and question.lower().startswith("what is the answer"):
        return "what_is_the_answer"
    if "answer_has_question_mark" in enabled and (
        "?" in candidate.answer_en or "？" in candidate.answer_en
    ):
        return "answer_has_question_mark"
    if "short_sentence" in enabled:
        content = sum(1 for t in pair.src_tokens if not _is_punct_token(t))
        if content < 5:
            return "short_sentence"
    if "punctuation_only_answer" in enabled and _punct_and_space_only(candidate.answer_en):
        return "punctuation_only_answer"
    return None


def apply_filters(
    candidates: Sequence[QACandidate],
    corpus: Corpus,
    enabled: Iterable[str] | None = None,
) -> FilterReport:
    """Partition candidates into kept and rejected-with-reason.

    Rules run in :data:`FILTER_RULES` order and the first match wins. The
    duplicate key is the (sentence text, question, answer) triple after
    collapsing whitespace runs, checked against earlier *kept* candidates.
    """
    active = frozenset(FILTER_RULES if enabled is None else enabled)
    kept: list[QACandidate] = []
    rejected: list[tuple[QACandidate, str]] = []
    seen: set[tuple[str, str, str]] = set()
    for candidate in candidates:
        pair = corpus.get(candidate.pair_id)
        key = (
            _normalize_ws(pair.src_text),
            _normalize_ws(candidate.question_en),
            _normalize_ws(candidate.answer_en),
        )
        if "duplicate" in active and key in seen:
            rejected.append((candidate, "duplicate"))
            continue
        reason = _first_rejection(candidate, pair, active)
        if reason is not None:
            rejected.append((candidate, reason))
            continue
        seen.add(key)
        kept.append(candidate)
    return FilterReport(kept=kept, rejected=rejected)


def generate_candidates(
    corpus: Corpus,
    qg_backend: Backend,
    jobs: int = 4,
    enabled_filters: Iterable[str] | None = None,
    report: list[dict] | None = None,
) -> list[QACandidate]:
    """Run question generation over the corpus, locate answers, and filter.

    Unlocatable or malformed generations are recorded in ``report`` and
    dropped; the rest flow through :func:`apply_filters`, whose rejections
    are appended to the same report.
    """
    pairs = list(corpus)
    requests = [{"sentence": p.src_text} for p in pairs]
    responses = run_requests(qg_backend, requests, jobs=jobs)

    located: list[QACandidate] = []
    for pair, response in zip(pairs, responses):
        for k, raw in enumerate(response["candidates"]):
            candidate_id = f"{pair.id}#q{k}"
            try:
                span = locate_answer(pair, raw["answer"], raw.get("answer_char_start"))
                located.append(
                    QACandidate(
                        id=candidate_id,
                        pair_id=pair.id,
                        question_en=raw["question"],
                        answer_en=raw["answer"],
                        answer_span=span,
                        provenance={"qg_backend": qg_backend.spec},
                    )
                )
            except UnlocatableAnswer:
                if report is not None:
                    report.append(
                        {
                            "stage": "filter",
                            "reason": UNLOCATABLE,
                            "candidate_id": candidate_id,
                            "pair_id": pair.id,
                            "question_en": raw["question"],
                            "answer_en": raw["answer"],
                        }
                    )
            except ValueError as exc:
                if report is not None:
                    report.append(
                        {
                            "stage": "filter",
                            "reason": "invalid_candidate",
                            "candidate_id": candidate_id,
                            "pair_id": pair.id,
                            "detail": str(exc),
                        }
                    )

    filtered = apply_filters(located, corpus, enabled=enabled_filters)
    if report is not None:
        report.extend(filtered.to_audit_records())
    return filtered.kept
