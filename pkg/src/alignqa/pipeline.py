"""In-memory composition of the full generation pipeline.

The CLI runs the same stages as separate subcommands connected by files;
this module chains them directly for library users and tests: question
generation, answer location and filtering, context expansion, answer
projection, constraint induction, question translation, and entry
assembly.
"""

from __future__ import annotations

from .backends import Backend
from .candidates import generate_candidates
from .constraints import extract_np_candidates, induce_constraints, sample_random_spans
from .corpus import ContextPolicy, Corpus, WordAlignment, expand_context
from .dataset import QAEntry, assemble_entry
from .errors import EmptyTranslation
from .projection import Discard, project_answer
from .translation import BLANK_QUESTION_TRANSLATION, translate_question


def build_entries(
    corpus: Corpus,
    alignments: dict[str, WordAlignment],
    qg_backend: Backend,
    mt_backend: Backend,
    chunker_backend: Backend | None = None,
    context_policy: ContextPolicy = ContextPolicy("sentence"),
    translation_mode: str = "constrained",
    max_gap_ratio: float = 1.0,
    constraint_mode: str = "np",
    random_k: int = 3,
    seed: int = 0,
    jobs: int = 4,
    corpus_id: str = "corpus",
    tgt_lang: str | None = None,
    report: list[dict] | None = None,
) -> list[QAEntry]:
    """Run every stage over a corpus and return the assembled entries.

    Rejections and discards from all stages are appended to ``report``.
    """
    entries: list[QAEntry] = []
    kept = generate_candidates(corpus, qg_backend, jobs=jobs, report=report)
    np_cache: dict[str, list[tuple[int, int]]] = {}
    for candidate in kept:
        pair = corpus.get(candidate.pair_id)
        lang_pair = pair.lang_pair
        wa = alignments.get(
            candidate.pair_id, WordAlignment(candidate.pair_id, frozenset())
        )
        window = expand_context(candidate.pair_id, corpus, context_policy)
        projected = project_answer(candidate, pair, wa, window, max_gap_ratio)
        if isinstance(projected, Discard):
            if report is not None:
                report.append(
                    {
                        "stage": "project",
                        "reason": projected.reason,
                        "candidate_id": candidate.id,
                    }
                )
            continue
        if constraint_mode == "np":
            if candidate.pair_id not in np_cache:
                if chunker_backend is None:
                    raise ValueError("np constraint mode needs a chunker backend")
                np_cache[candidate.pair_id] = extract_np_candidates(pair, chunker_backend)
            spans = np_cache[candidate.pair_id]
        else:
            spans = sample_random_spans(pair, random_k, seed)
        constraint_set = induce_constraints(candidate, spans, pair, wa)
        try:
            translated = translate_question(
                candidate,
                constraint_set,
                translation_mode,
                mt_backend,
                tgt_lang=tgt_lang or lang_pair[1],
            )
        except EmptyTranslation:
            if report is not None:
                report.append(
                    {
                        "stage": "translate",
                        "reason": BLANK_QUESTION_TRANSLATION,
                        "candidate_id": candidate.id,
                    }
                )
            continue
        constraint_records = [
            {
                "src_phrase": item.src_phrase,
                "tgt_phrase": item.tgt_phrase,
                "src_span": list(item.src_span),
                "tgt_span": list(item.tgt_span),
                "satisfied": check.satisfied,
            }
            for item, check in zip(constraint_set.items, translated.constraint_report)
        ]
        entries.append(
            assemble_entry(
                candidate,
                translated,
                projected,
                window,
                lang_pair=lang_pair,
                provenance={
                    "corpus_id": corpus_id,
                    "alignment_origin": wa.origin,
                    "constraints": constraint_records,
                },
            )
        )
    return entries
