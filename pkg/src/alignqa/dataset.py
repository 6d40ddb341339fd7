"""Assemble, expand, pivot, split, and serialize cross-lingual QA entries.

A :class:`QAEntry` carries parallel contexts, questions, and answers for
one language pair. The first slot of ``lang_pair`` owns the ``*_en``
fields and the second owns the ``*_l`` fields; for English-centric data
the first slot is "en", while pivoted entries put two non-English
languages there. Every entry expands to 4 directional QA instances:
(f,e), (e,f), (f,f), (e,e), where the direction names (context language,
question language) and the answer always lives in the context language.

JSON-lines is the canonical on-disk form; SQuAD v1.1 JSON is derived-only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .candidates import QACandidate
from .corpus import ContextWindow
from .errors import ExtractivityViolation, SchemaViolation
from .projection import ProjectedAnswer, char_offset
from .translation import TranslatedQuestion


@dataclass(frozen=True)
class Answer:
    text: str
    char_start: int


@dataclass(frozen=True)
class QAEntry:
    id: str
    lang_pair: tuple[str, str]
    context_en: str
    context_l: str
    question_en: str
    question_l: str
    answer_en: Answer
    answer_l: Answer
    provenance: dict = field(default_factory=dict, compare=False)

    def validate(self) -> None:
        """Check non-emptiness and that both answers re-extract exactly."""
        for name in ("context_en", "context_l", "question_en", "question_l"):
            if not getattr(self, name).strip():
                raise ExtractivityViolation(f"entry {self.id}: empty {name}")
        for context, answer, name in (
            (self.context_en, self.answer_en, "answer_en"),
            (self.context_l, self.answer_l, "answer_l"),
        ):
            if not answer.text.strip():
                raise ExtractivityViolation(f"entry {self.id}: empty {name}")
            extracted = context[answer.char_start : answer.char_start + len(answer.text)]
            if extracted != answer.text:
                raise ExtractivityViolation(
                    f"entry {self.id}: {name} {answer.text!r} not at offset {answer.char_start}"
                )


@dataclass(frozen=True)
class DirectionalInstance:
    """One QA instance: context/answer in one language, question in another."""

    entry_id: str
    context_lang: str
    question_lang: str
    context: str
    question: str
    answer: Answer

    @property
    def instance_id(self) -> str:
        return f"{self.entry_id}/{self.context_lang},{self.question_lang}"


@dataclass
class DatasetSplit:
    train: list[str] = field(default_factory=list)
    dev: list[str] = field(default_factory=list)
    test: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"train": self.train, "dev": self.dev, "test": self.test}

    @classmethod
    def from_json(cls, obj: dict) -> "DatasetSplit":
        return cls(train=list(obj["train"]), dev=list(obj["dev"]), test=list(obj["test"]))


def assemble_entry(
    candidate: QACandidate,
    translated_q: TranslatedQuestion,
    projected_answer: ProjectedAnswer,
    window: ContextWindow,
    lang_pair: tuple[str, str],
    provenance: dict | None = None,
) -> QAEntry:
    """Build one entry from the stage outputs and re-verify extractivity.

    The English answer text is canonicalized to the focus-sentence tokens
    of its span joined by spaces, which by construction is the exact
    substring of the context at the computed offset.
    """
    src_tokens = window.tokens("src")
    a_start, a_end = candidate.answer_span
    context_span = (window.src_token_offset + a_start, window.src_token_offset + a_end)
    answer_en_start = char_offset(window, "src", context_span)
    answer_en_text = " ".join(src_tokens[context_span[0] : context_span[1]])

    meta = {
        "pair_id": candidate.pair_id,
        "translation_mode": translated_q.mode,
        "constraints": [
            {"src_phrase": c.src_phrase, "tgt_phrase": c.tgt_phrase, "satisfied": c.satisfied}
            for c in translated_q.constraint_report
        ],
        "gap_count": projected_answer.span.gap_count,
        "answer_en_raw": candidate.answer_en,
    }
    meta.update(candidate.provenance)
    if provenance:
        meta.update(provenance)

    entry = QAEntry(
        id=candidate.id,
        lang_pair=lang_pair,
        context_en=window.src_text,
        context_l=window.tgt_text,
        question_en=candidate.question_en,
        question_l=translated_q.question_l,
        answer_en=Answer(text=answer_en_text, char_start=answer_en_start),
        answer_l=Answer(
            text=projected_answer.answer_l,
            char_start=projected_answer.char_start_in_context,
        ),
        provenance=meta,
    )
    entry.validate()
    return entry


def expand_directions(entry: QAEntry) -> list[DirectionalInstance]:
    """The 4 directional instances of an entry: (f,e), (e,f), (f,f), (e,e)."""
    lang_e, lang_f = entry.lang_pair
    e_side = (lang_e, entry.context_en, entry.question_en, entry.answer_en)
    f_side = (lang_f, entry.context_l, entry.question_l, entry.answer_l)
    instances = []
    for (c_lang, context, _, answer), (q_lang, _, question, _) in (
        (f_side, e_side),
        (e_side, f_side),
        (f_side, f_side),
        (e_side, e_side),
    ):
        instances.append(
            DirectionalInstance(
                entry_id=entry.id,
                context_lang=c_lang,
                question_lang=q_lang,
                context=context,
                question=question,
                answer=answer,
            )
        )
    return instances


def pivot(
    left: Sequence[QAEntry],
    right: Sequence[QAEntry],
    report: list[dict] | None = None,
) -> list[QAEntry]:
    """Compose two English-centric datasets into a non-English one.

    Entries match when they come from the same (corpus id, pair id) and
    share the identical English question and answer; each match emits one
    entry whose two sides are the non-English sides of the inputs.
    Unmatched entries are skipped and counted in ``report``.
    """

    def key(entry: QAEntry) -> tuple:
        return (
            entry.provenance.get("corpus_id"),
            entry.provenance.get("pair_id"),
            entry.question_en,
            entry.answer_en.text,
        )

    right_index = {key(e): e for e in right}
    matched_right = set()
    out: list[QAEntry] = []
    for left_entry in left:
        right_entry = right_index.get(key(left_entry))
        if right_entry is None:
            if report is not None:
                report.append(
                    {"stage": "pivot", "reason": "no_match", "entry_id": left_entry.id}
                )
            continue
        matched_right.add(right_entry.id)
        lang_1 = left_entry.lang_pair[1]
        lang_2 = right_entry.lang_pair[1]
        entry = QAEntry(
            id=f"pivot:{left_entry.id}:{lang_1}-{lang_2}",
            lang_pair=(lang_1, lang_2),
            context_en=left_entry.context_l,
            context_l=right_entry.context_l,
            question_en=left_entry.question_l,
            question_l=right_entry.question_l,
            answer_en=left_entry.answer_l,
            answer_l=right_entry.answer_l,
            provenance={
                "pivot": True,
                "corpus_id": left_entry.provenance.get("corpus_id"),
                "pair_id": left_entry.provenance.get("pair_id"),
                "left_entry": left_entry.id,
                "right_entry": right_entry.id,
            },
        )
        entry.validate()
        out.append(entry)
    if report is not None:
        for right_entry in right:
            if right_entry.id not in matched_right:
                report.append(
                    {"stage": "pivot", "reason": "no_match", "entry_id": right_entry.id}
                )
    return out


def split_entries(
    entries: Sequence[QAEntry],
    adjudications: dict[str, bool],
    dev_fraction: float,
    seed: int,
) -> DatasetSplit:
    """Split by human adjudication: accepted entries become dev/test.

    Accepted entry ids are shuffled with the seed and cut at
    ``dev_fraction``; unannotated entries go to train; rejected entries
    are excluded from every split.
    """
    if not (0 < dev_fraction < 1):
        raise ValueError("dev_fraction must be in (0, 1)")
    accepted = [e.id for e in entries if adjudications.get(e.id) is True]
    unannotated = [e.id for e in entries if e.id not in adjudications]
    rng = random.Random(seed)
    rng.shuffle(accepted)
    n_dev = int(len(accepted) * dev_fraction)
    return DatasetSplit(
        train=unannotated,
        dev=accepted[:n_dev],
        test=accepted[n_dev:],
    )


def dataset_stats(entries: Sequence[QAEntry], splits: DatasetSplit | None = None) -> dict:
    """Entry counts per language (the non-English side, or the pair) and split."""

    def lang_key(entry: QAEntry) -> str:
        first, second = entry.lang_pair
        return second if first == "en" else f"{first}-{second}"

    table: dict[str, dict[str, int]] = {}
    membership: dict[str, str] = {}
    if splits is not None:
        for name in ("train", "dev", "test"):
            for entry_id in getattr(splits, name):
                membership[entry_id] = name
    for entry in entries:
        row = table.setdefault(lang_key(entry), {"train": 0, "dev": 0, "test": 0, "total": 0})
        row["total"] += 1
        if splits is not None:
            split_name = membership.get(entry.id)
            if split_name is not None:
                row[split_name] += 1
    return table


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def entry_to_json(entry: QAEntry) -> dict:
    return {
        "id": entry.id,
        "lang_pair": list(entry.lang_pair),
        "context_en": entry.context_en,
        "context_l": entry.context_l,
        "question_en": entry.question_en,
        "question_l": entry.question_l,
        "answer_en": {"text": entry.answer_en.text, "char_start": entry.answer_en.char_start},
        "answer_l": {"text": entry.answer_l.text, "char_start": entry.answer_l.char_start},
        "provenance": entry.provenance,
    }


_REQUIRED_ENTRY_FIELDS = (
    "id",
    "lang_pair",
    "context_en",
    "context_l",
    "question_en",
    "question_l",
    "answer_en",
    "answer_l",
)


def entry_from_json(obj: dict, lineno: int | None = None) -> QAEntry:
    where = f"line {lineno}: " if lineno is not None else ""
    if not isinstance(obj, dict):
        raise SchemaViolation(f"{where}entry must be a JSON object")
    for name in _REQUIRED_ENTRY_FIELDS:
        if name not in obj:
            raise SchemaViolation(f"{where}entry missing field {name!r}")
    try:
        entry = QAEntry(
            id=obj["id"],
            lang_pair=(obj["lang_pair"][0], obj["lang_pair"][1]),
            context_en=obj["context_en"],
            context_l=obj["context_l"],
            question_en=obj["question_en"],
            question_l=obj["question_l"],
            answer_en=Answer(obj["answer_en"]["text"], obj["answer_en"]["char_start"]),
            answer_l=Answer(obj["answer_l"]["text"], obj["answer_l"]["char_start"]),
            provenance=obj.get("provenance", {}),
        )
    except (TypeError, KeyError, IndexError) as exc:
        raise SchemaViolation(f"{where}malformed entry: {exc}") from exc
    entry.validate()
    return entry


def instance_to_json(instance: DirectionalInstance) -> dict:
    return {
        "instance_id": instance.instance_id,
        "entry_id": instance.entry_id,
        "context_lang": instance.context_lang,
        "question_lang": instance.question_lang,
        "context": instance.context,
        "question": instance.question,
        "answer": {"text": instance.answer.text, "char_start": instance.answer.char_start},
    }


def instances_to_squad(instances: Iterable[DirectionalInstance]) -> dict:
    """SQuAD v1.1 layout; title is "<entry_id>/<direction>" per instance."""
    data = []
    for instance in instances:
        data.append(
            {
                "title": instance.instance_id,
                "paragraphs": [
                    {
                        "context": instance.context,
                        "qas": [
                            {
                                "id": instance.instance_id,
                                "question": instance.question,
                                "answers": [
                                    {
                                        "text": instance.answer.text,
                                        "answer_start": instance.answer.char_start,
                                    }
                                ],
                            }
                        ],
                    }
                ],
            }
        )
    return {"version": "1.1", "data": data}
