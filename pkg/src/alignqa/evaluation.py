"""Scoring and adjudication: token F1 / exact match, majority vote, kappa.

Answer scoring follows multilingual SQuAD-style conventions: lowercase,
strip punctuation, drop language-specific articles, then mixed
segmentation (each Han character is its own token, everything else splits
on whitespace). F1 is the harmonic mean of multiset token overlap
precision/recall, maxed over gold answers and averaged over instances.

Adjudication turns per-annotator yes/no judgments into majority labels
and an accept/reject decision, and measures inter-annotator reliability
with averaged pairwise Cohen's kappa.
"""

from __future__ import annotations

import logging
import unicodedata
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import NoOverlap

logger = logging.getLogger(__name__)

_EN_ARTICLES = frozenset({"a", "an", "the"})
_AR_ARTICLE = "ال"
_KNOWN_LANGS = frozenset({"en", "ar", "zh", "ru"})

#: The four review questions asked per entry: (1) makes sense out of
#: context, (2) relevant/interesting, (3) answer correct, (4) alternate
#: answer means the same thing.
N_JUDGMENT_QUESTIONS = 4

_HAN_RANGES = (
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2EBEF),
)


def _is_han(ch: str) -> bool:
    code = ord(ch)
    return any(lo <= code <= hi for lo, hi in _HAN_RANGES)


def normalize(text: str, lang: str) -> list[str]:
    """Normalize an answer string into comparison tokens.

    Unknown language codes fall back to the English rules minus article
    removal, with a warning.
    """
    if lang not in _KNOWN_LANGS:
        logger.warning("no normalization rules for language %r; using defaults", lang)
    lowered = text.lower()
    no_punct = "".join(
        ch for ch in lowered if not unicodedata.category(ch).startswith("P")
    )
    # Mixed segmentation: Han characters stand alone, the rest splits on
    # whitespace.
    pieces: list[str] = []
    run = ""
    for ch in no_punct:
        if _is_han(ch):
            if run.strip():
                pieces.extend(run.split())
            run = ""
            pieces.append(ch)
        else:
            run += ch
    if run.strip():
        pieces.extend(run.split())

    if lang == "en":
        pieces = [t for t in pieces if t not in _EN_ARTICLES]
    elif lang == "ar":
        stripped = []
        for token in pieces:
            if token.startswith(_AR_ARTICLE):
                token = token[len(_AR_ARTICLE) :]
            if token:
                stripped.append(token)
        pieces = stripped
    return pieces


def _f1_single(pred_tokens: list[str], gold_tokens: list[str]) -> float:
    if not pred_tokens and not gold_tokens:
        return 1.0
    if not pred_tokens or not gold_tokens:
        return 0.0
    overlap = sum((Counter(pred_tokens) & Counter(gold_tokens)).values())
    if overlap == 0:
        return 0.0
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def token_f1(pred: str, golds: Sequence[str], lang: str) -> float:
    """Max-over-golds token overlap F1 in [0, 1]."""
    if not golds:
        raise ValueError("token_f1 needs at least one gold answer")
    pred_tokens = normalize(pred, lang)
    return max(_f1_single(pred_tokens, normalize(g, lang)) for g in golds)


def exact_match(pred: str, golds: Sequence[str], lang: str) -> int:
    if not golds:
        raise ValueError("exact_match needs at least one gold answer")
    pred_tokens = normalize(pred, lang)
    return int(any(pred_tokens == normalize(g, lang) for g in golds))


@dataclass(frozen=True)
class Reference:
    instance_id: str
    answers: tuple[str, ...]
    context_lang: str
    question_lang: str

    @property
    def direction(self) -> str:
        return f"{self.context_lang},{self.question_lang}"


def direction_group(context_lang: str, question_lang: str) -> str:
    """Bucket a direction the way results are usually reported."""
    if context_lang == question_lang:
        return "monolingual"
    if context_lang == "en":
        return "non-en q"
    if question_lang == "en":
        return "en q"
    return "non-en xling"


def references_from_squad(squad: dict) -> list[Reference]:
    """Read references from SQuAD-style JSON whose titles carry the direction."""
    refs = []
    for article in squad["data"]:
        title = article.get("title", "")
        _, _, direction = title.rpartition("/")
        c_lang, _, q_lang = direction.partition(",")
        for paragraph in article["paragraphs"]:
            for qa in paragraph["qas"]:
                refs.append(
                    Reference(
                        instance_id=qa["id"],
                        answers=tuple(a["text"] for a in qa["answers"]),
                        context_lang=c_lang or "en",
                        question_lang=q_lang or "en",
                    )
                )
    return refs


def evaluate(predictions: Mapping[str, str], references: Sequence[Reference]) -> dict:
    """Mean token F1 / EM over instances plus per-direction and group tables.

    Answers live in the context language, so normalization uses each
    reference's context language. Missing predictions score 0 and are
    listed in the report.
    """
    missing: list[str] = []
    per_direction: dict[str, dict[str, float]] = defaultdict(
        lambda: {"f1": 0.0, "em": 0.0, "count": 0.0}
    )
    total_f1 = 0.0
    total_em = 0.0
    for ref in references:
        pred = predictions.get(ref.instance_id)
        if pred is None:
            missing.append(ref.instance_id)
            f1, em = 0.0, 0
        else:
            f1 = token_f1(pred, ref.answers, ref.context_lang)
            em = exact_match(pred, ref.answers, ref.context_lang)
        total_f1 += f1
        total_em += em
        row = per_direction[ref.direction]
        row["f1"] += f1
        row["em"] += em
        row["count"] += 1

    n = len(references)
    direction_table = {}
    group_acc: dict[str, dict[str, float]] = defaultdict(lambda: {"f1": 0.0, "em": 0.0, "count": 0.0})
    for direction, row in sorted(per_direction.items()):
        count = row["count"]
        direction_table[direction] = {
            "mean_f1": row["f1"] / count,
            "mean_em": row["em"] / count,
            "count": int(count),
        }
        c_lang, _, q_lang = direction.partition(",")
        group = group_acc[direction_group(c_lang, q_lang)]
        group["f1"] += row["f1"]
        group["em"] += row["em"]
        group["count"] += count
    group_table = {
        name: {
            "mean_f1": row["f1"] / row["count"],
            "mean_em": row["em"] / row["count"],
            "count": int(row["count"]),
        }
        for name, row in sorted(group_acc.items())
    }
    return {
        "mean_f1": total_f1 / n if n else 0.0,
        "mean_em": total_em / n if n else 0.0,
        "count": n,
        "per_direction": direction_table,
        "per_group": group_table,
        "missing_predictions": missing,
    }


# ---------------------------------------------------------------------------
# Adjudication
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Judgment:
    entry_id: str
    annotator_id: str
    answers: tuple[bool, bool, bool, bool]

    def __post_init__(self) -> None:
        if len(self.answers) != N_JUDGMENT_QUESTIONS:
            raise ValueError("a judgment has exactly 4 yes/no answers")

    def to_json(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "annotator_id": self.annotator_id,
            "answers": list(self.answers),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Judgment":
        answers = obj["answers"]
        if len(answers) != N_JUDGMENT_QUESTIONS or not all(isinstance(a, bool) for a in answers):
            raise ValueError(f"bad answers in judgment: {answers!r}")
        return cls(
            entry_id=obj["entry_id"],
            annotator_id=obj["annotator_id"],
            answers=tuple(answers),
        )


@dataclass(frozen=True)
class Adjudication:
    entry_id: str
    majority: tuple[bool, bool, bool, bool]
    accepted: bool
    n_annotators: int

    def to_json(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "majority": list(self.majority),
            "accepted": self.accepted,
            "n_annotators": self.n_annotators,
        }


def quality_criterion(majority: Sequence[bool]) -> bool:
    """Accept when (sensible OR relevant) AND correct AND equivalent."""
    m1, m2, m3, m4 = majority
    return (m1 or m2) and m3 and m4


def majority_label(judgments: Sequence[Judgment]) -> Adjudication:
    """Per-question majority vote; even-count ties break to no (reject)."""
    if not judgments:
        raise ValueError("majority_label needs at least one judgment")
    entry_id = judgments[0].entry_id
    if any(j.entry_id != entry_id for j in judgments):
        raise ValueError("judgments for different entries")
    majority = tuple(
        sum(j.answers[q] for j in judgments) * 2 > len(judgments)
        for q in range(N_JUDGMENT_QUESTIONS)
    )
    return Adjudication(
        entry_id=entry_id,
        majority=majority,
        accepted=quality_criterion(majority),
        n_annotators=len(judgments),
    )


def adjudicate(judgments: Iterable[Judgment]) -> list[Adjudication]:
    """Majority label per entry, in first-seen entry order."""
    grouped: dict[str, list[Judgment]] = {}
    for judgment in judgments:
        grouped.setdefault(judgment.entry_id, []).append(judgment)
    return [majority_label(group) for group in grouped.values()]


def cohens_kappa(rater_a: Sequence[bool], rater_b: Sequence[bool]) -> float:
    """Cohen's kappa for two boolean raters over the same items.

    With degenerate marginals (chance agreement 1), kappa is 1 for perfect
    observed agreement and 0 otherwise.
    """
    if len(rater_a) != len(rater_b) or not rater_a:
        raise ValueError("raters must share at least one item")
    n = len(rater_a)
    p_o = sum(a == b for a, b in zip(rater_a, rater_b)) / n
    a_yes = sum(rater_a) / n
    b_yes = sum(rater_b) / n
    p_e = a_yes * b_yes + (1 - a_yes) * (1 - b_yes)
    if p_e == 1.0:
        return 1.0 if p_o == 1.0 else 0.0
    return (p_o - p_e) / (1 - p_e)


def averaged_pairwise_kappa(judgments: Sequence[Judgment], question_index: int) -> float:
    """Mean kappa over annotator pairs that co-judged at least one entry."""
    by_annotator: dict[str, dict[str, bool]] = defaultdict(dict)
    for judgment in judgments:
        by_annotator[judgment.annotator_id][judgment.entry_id] = judgment.answers[question_index]
    annotators = sorted(by_annotator)
    kappas = []
    for i, a in enumerate(annotators):
        for b in annotators[i + 1 :]:
            common = sorted(by_annotator[a].keys() & by_annotator[b].keys())
            if not common:
                continue
            kappas.append(
                cohens_kappa(
                    [by_annotator[a][e] for e in common],
                    [by_annotator[b][e] for e in common],
                )
            )
    if not kappas:
        raise NoOverlap("no annotator pair shares a judged entry")
    return sum(kappas) / len(kappas)
