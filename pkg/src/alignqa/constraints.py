"""Induce lexical constraints for question translation.

Noun phrases extracted from the English sentence are kept only when they
also appear, on whole-token boundaries and case-sensitively, in the
generated question; each survivor is projected to the target side through
the word alignment, yielding source-phrase to target-phrase constraints
for the MT backend. A seeded random-span sampler is provided as a
comparison mode.
"""

from __future__ import annotations

import hashlib
import random
import unicodedata
from dataclasses import dataclass

from .backends import Backend
from .candidates import QACandidate
from .corpus import SentencePair, WordAlignment
from .projection import project_span


@dataclass(frozen=True)
class Constraint:
    src_phrase: str
    tgt_phrase: str
    src_span: tuple[int, int]
    tgt_span: tuple[int, int]


@dataclass(frozen=True)
class ConstraintSet:
    question_id: str
    items: tuple[Constraint, ...] = ()

    def as_backend_constraints(self) -> list[dict]:
        return [{"src": c.src_phrase, "tgt": c.tgt_phrase} for c in self.items]


def tokenize_question(text: str) -> list[str]:
    """Whitespace tokenization with punctuation split into its own tokens."""
    tokens: list[str] = []
    for chunk in text.split():
        run = ""
        run_is_punct = False
        for ch in chunk:
            is_punct = unicodedata.category(ch).startswith("P")
            if run and is_punct != run_is_punct:
                tokens.append(run)
                run = ""
            run += ch
            run_is_punct = is_punct
        if run:
            tokens.append(run)
    return tokens


def extract_np_candidates(pair: SentencePair, chunker_backend: Backend) -> list[tuple[int, int]]:
    """Phrase spans over the source tokens, deduplicated, start-then-longest order."""
    response = chunker_backend.call({"tokens": list(pair.src_tokens)})
    spans = {(p["start"], p["end_exclusive"]) for p in response["phrases"]}
    return sorted(spans, key=lambda s: (s[0], -(s[1] - s[0])))


def sample_random_spans(
    pair: SentencePair, k: int, seed: int, max_len: int = 4
) -> list[tuple[int, int]]:
    """Draw k uniform token spans (length 1..max_len) from the source sentence."""
    n = len(pair.src_tokens)
    all_spans = [
        (start, start + length)
        for start in range(n)
        for length in range(1, min(max_len, n - start) + 1)
    ]
    # Stable per-pair stream regardless of process hash randomization.
    digest = hashlib.sha256(f"{seed}:{pair.id}".encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    k = min(k, len(all_spans))
    picked = rng.sample(all_spans, k)
    return sorted(set(picked), key=lambda s: (s[0], -(s[1] - s[0])))


def _find_subsequence(haystack: list[str], needle: list[str]) -> tuple[int, int] | None:
    if not needle:
        return None
    for i in range(len(haystack) - len(needle) + 1):
        if haystack[i : i + len(needle)] == needle:
            return (i, i + len(needle))
    return None


def _strictly_inside(inner: tuple[int, int], outer: tuple[int, int]) -> bool:
    return (
        inner[0] >= outer[0]
        and inner[1] <= outer[1]
        and (inner[0] > outer[0] or inner[1] < outer[1])
    )


def induce_constraints(
    candidate: QACandidate,
    nps: list[tuple[int, int]],
    pair: SentencePair,
    wa: WordAlignment,
) -> ConstraintSet:
    """Keep phrases that occur in the question and survive projection.

    Longer phrases claim priority: a phrase whose question occurrence lies
    strictly inside an already-kept phrase's occurrence is dropped, as is
    any repeat of an already-kept source phrase. Phrases whose projection
    is blank are dropped silently (the question stays translatable without
    them).
    """
    q_tokens = tokenize_question(candidate.question_en)
    matched: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for span in nps:
        phrase_tokens = tokenize_question(" ".join(pair.src_tokens[span[0] : span[1]]))
        occurrence = _find_subsequence(q_tokens, phrase_tokens)
        if occurrence is not None:
            matched.append((span, occurrence))
    # Longer question occurrences first; stable for equal keys.
    matched.sort(key=lambda m: (-(m[1][1] - m[1][0]), m[1][0]))

    items: list[Constraint] = []
    occupied: list[tuple[int, int]] = []
    seen_phrases: set[str] = set()
    for span, occurrence in matched:
        if any(_strictly_inside(occurrence, held) for held in occupied):
            continue
        src_phrase = " ".join(pair.src_tokens[span[0] : span[1]])
        if src_phrase in seen_phrases:
            continue
        projected = project_span(span, wa)
        if projected is None:
            continue
        t_start, t_end = projected.tgt_span
        items.append(
            Constraint(
                src_phrase=src_phrase,
                tgt_phrase=" ".join(pair.tgt_tokens[t_start:t_end]),
                src_span=span,
                tgt_span=projected.tgt_span,
            )
        )
        occupied.append(occurrence)
        seen_phrases.add(src_phrase)
    return ConstraintSet(question_id=candidate.id, items=tuple(items))
