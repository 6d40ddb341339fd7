"""Cross-lingual extractive QA dataset generation from word-aligned bitexts."""

from .corpus import (
    ContextPolicy,
    ContextWindow,
    Corpus,
    SentencePair,
    WordAlignment,
    expand_context,
    parse_alignments,
    parse_bitext,
)
from .candidates import QACandidate, apply_filters, locate_answer
from .constraints import ConstraintSet, induce_constraints
from .dataset import Answer, DirectionalInstance, QAEntry, expand_directions, pivot
from .evaluation import Adjudication, Judgment, token_f1
from .projection import ProjectedAnswer, ProjectedSpan, project_span
from .translation import TranslatedQuestion, translate_question, verify_constraints

__version__ = "0.1.0"

__all__ = [
    "Adjudication",
    "Answer",
    "ConstraintSet",
    "ContextPolicy",
    "ContextWindow",
    "Corpus",
    "DirectionalInstance",
    "Judgment",
    "ProjectedAnswer",
    "ProjectedSpan",
    "QACandidate",
    "QAEntry",
    "SentencePair",
    "TranslatedQuestion",
    "WordAlignment",
    "apply_filters",
    "expand_context",
    "expand_directions",
    "induce_constraints",
    "locate_answer",
    "parse_alignments",
    "parse_bitext",
    "pivot",
    "project_span",
    "token_f1",
    "translate_question",
    "verify_constraints",
]
