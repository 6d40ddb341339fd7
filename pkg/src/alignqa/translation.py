"""Stage 2b: question translation and constraint verification.

Three modes mirror the supported MT setups: "vanilla" (plain NMT),
"constrained" (lexically constrained NMT fed the induced constraints)
and "external" (a black-box service that receives no constraints).
The toolkit verifies constraint satisfaction itself rather than trusting
the backend; unsatisfied constraints are recorded but never cause a
discard — only blank translations do.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import Backend
from .candidates import QACandidate
from .constraints import ConstraintSet
from .errors import EmptyTranslation

TRANSLATION_MODES = ("vanilla", "constrained", "external")
BLANK_QUESTION_TRANSLATION = "blank_question_translation"


@dataclass(frozen=True)
class ConstraintCheck:
    src_phrase: str
    tgt_phrase: str
    satisfied: bool


@dataclass(frozen=True)
class TranslatedQuestion:
    question_l: str
    mode: str
    constraint_report: tuple[ConstraintCheck, ...] = ()


def verify_constraints(question_l: str, constraints: ConstraintSet) -> tuple[ConstraintCheck, ...]:
    """Per-constraint raw substring check (CJK targets have no delimiters)."""
    return tuple(
        ConstraintCheck(
            src_phrase=item.src_phrase,
            tgt_phrase=item.tgt_phrase,
            satisfied=item.tgt_phrase in question_l,
        )
        for item in constraints.items
    )


def translate_question(
    candidate: QACandidate,
    constraints: ConstraintSet,
    mode: str,
    mt_backend: Backend,
    src_lang: str = "en",
    tgt_lang: str = "xx",
) -> TranslatedQuestion:
    """Translate the question through the configured backend and verify.

    Raises :class:`EmptyTranslation` when the backend returns a blank
    string; the caller discards the candidate with reason
    ``blank_question_translation``.
    """
    request = {
        "text": candidate.question_en,
        "mode": mode,
        "constraints": constraints.as_backend_constraints() if mode == "constrained" else [],
        "src_lang": src_lang,
        "tgt_lang": tgt_lang,
    }
    response = mt_backend.call(request)
    question_l = response["translation"]
    if not question_l.strip():
        raise EmptyTranslation(f"backend returned blank translation for {candidate.id}")
    return TranslatedQuestion(
        question_l=question_l,
        mode=mode,
        constraint_report=verify_constraints(question_l, constraints),
    )
