"""Acceptance suite: one test per release criterion.

Run with ``pytest tests/test_acceptance.py -v`` to get one pass/fail line
per criterion. Tolerances are pinned here, not configurable.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from alignqa.annotate_api import AnnotationTask, JudgmentStore, create_app
from alignqa.backends import (
    ARCHAEOPTERYX_EN,
    ARCHAEOPTERYX_QUESTION,
    FIXTURE_MT_DICTIONARIES,
    StubChunker,
    StubMT,
    StubQG,
)
from alignqa.candidates import FILTER_RULES, QACandidate, apply_filters
from alignqa.constraints import Constraint, ConstraintSet
from alignqa.corpus import Corpus, WordAlignment
from alignqa.dataset import (
    Answer,
    QAEntry,
    entry_from_json,
    entry_to_json,
    expand_directions,
    instances_to_squad,
    pivot,
)
from alignqa.evaluation import (
    Judgment,
    adjudicate,
    averaged_pairwise_kappa,
    cohens_kappa,
    exact_match,
    majority_label,
    quality_criterion,
    token_f1,
)
from alignqa.pipeline import build_entries
from alignqa.projection import project_span
from alignqa.translation import verify_constraints

from conftest import ARCH_ZH, ARCH_ZH_LINKS, make_pair
from test_cli import run_pipeline
from test_dataset import build_fixture_entries

TOL = 1e-9


def test_criterion_projection_oracle_randomized():
    """project_span equals brute-force min/max over >=10k random cases, <5s."""
    rng = random.Random(99)
    started = time.monotonic()
    for _ in range(10_000):
        n_src = rng.randint(1, 10)
        n_tgt = rng.randint(1, 10)
        links = frozenset(
            (rng.randrange(n_src), rng.randrange(n_tgt))
            for _ in range(rng.randint(0, 20))
        )
        start = rng.randrange(n_src)
        end = rng.randint(start + 1, n_src)
        hit = [j for i, j in links if start <= i < end]
        got = project_span((start, end), WordAlignment("p", links))
        if not hit:
            assert got is None
        else:
            assert got is not None
            assert got.tgt_span == (min(hit), max(hit) + 1)
            assert got.aligned_tgt_indices == frozenset(hit)
            assert got.gap_count == (max(hit) + 1 - min(hit)) - len(set(hit))
    assert time.monotonic() - started < 5.0


def test_criterion_archaeopteryx_end_to_end():
    """Stub pipeline on the hand-aligned fixture reproduces the exact strings."""
    pair = make_pair("arch:0", ARCHAEOPTERYX_EN, ARCH_ZH)
    corpus = Corpus([pair])
    alignments = {"arch:0": WordAlignment("arch:0", frozenset(ARCH_ZH_LINKS), "human")}
    entries = build_entries(
        corpus,
        alignments,
        StubQG(),
        StubMT(dictionaries=FIXTURE_MT_DICTIONARIES),
        StubChunker(),
        translation_mode="constrained",
        corpus_id="fixture",
    )
    assert len(entries) == 1
    entry = entries[0]
    assert entry.question_en == ARCHAEOPTERYX_QUESTION
    assert entry.answer_en.text == "the state of Bavaria"
    assert entry.answer_l.text == "巴伐利亚"
    constraint_pairs = [
        (c["src_phrase"], c["tgt_phrase"]) for c in entry.provenance["constraints"]
    ]
    assert constraint_pairs == [("archaeopteryx", "始祖鸟")]
    assert "始祖鸟" in entry.question_l


def test_criterion_centrifuge_satisfaction_matrix():
    """Recorded translations reproduce the constraint satisfaction booleans."""
    constraints = ConstraintSet(
        question_id="cent",
        items=(
            Constraint("the scientists", "科学家们", (0, 2), (0, 1)),
            Constraint("high purity silicon", "最高纯度的硅", (7, 10), (5, 6)),
        ),
    )
    lex_cons_output = "科学家们用什么来获得最高纯度的硅？"
    recorded_external_output = "科学家用什么来获得高纯度硅？"
    assert [c.satisfied for c in verify_constraints(lex_cons_output, constraints)] == [
        True,
        True,
    ]
    assert [
        c.satisfied for c in verify_constraints(recorded_external_output, constraints)
    ] == [False, False]


def test_criterion_filter_suite():
    """Each filter rule fires alone on its fixture; ordering, idempotence, partition."""
    corpus = Corpus(
        [
            make_pair("long", "alpha beta gamma delta epsilon zeta", "x"),
            make_pair("short", "Yes .", "x"),
        ]
    )

    def cand(n, pair_id, question, answer):
        return QACandidate(f"c{n}", pair_id, question, answer, (0, 1))

    fixtures = [
        (cand(1, "long", "What is the answer to life ?", "alpha"), "what_is_the_answer"),
        (cand(2, "long", "Why not ?", "alpha ?"), "answer_has_question_mark"),
        (cand(3, "short", "Is this affirmative ?", "Yes"), "short_sentence"),
        (cand(4, "long", "Which symbol ?", "— ,"), "punctuation_only_answer"),
    ]
    for candidate, expected in fixtures:
        report = apply_filters([candidate], corpus)
        assert report.rejected == [(candidate, expected)]

    # Duplicate fires only for a repeat of a kept candidate.
    a = cand(5, "long", "Which letter ?", "alpha")
    b = cand(6, "long", "Which letter ?", "alpha")
    report = apply_filters([a, b], corpus)
    assert report.kept == [a] and report.rejected == [(b, "duplicate")]

    # First-match ordering: an answer that is punctuation-only AND contains a
    # question mark is rejected by the earlier rule.
    both = cand(7, "long", "Q ?", "—!?")
    assert apply_filters([both], corpus).rejected[0][1] == "answer_has_question_mark"

    # Idempotence and partition over randomized inputs.
    rng = random.Random(12)
    questions = ["Which ?", "What is the answer ?", "Q ?"]
    answers = ["alpha", "beta ?", "—", "gamma"]
    pool = [
        cand(100 + i, rng.choice(["long", "short"]), rng.choice(questions), rng.choice(answers))
        for i in range(300)
    ]
    report = apply_filters(pool, corpus)
    assert len(report.kept) + len(report.rejected) == len(pool)
    assert {reason for _, reason in report.rejected} <= set(FILTER_RULES)
    again = apply_filters(report.kept, corpus)
    assert again.kept == report.kept and not again.rejected


def test_criterion_direction_expansion_load():
    """4 instances per entry; 82,047 entries expand to exactly 328,188 in <30s."""
    entries = build_fixture_entries("zh")
    for entry in entries:
        assert len(expand_directions(entry)) == 4

    started = time.monotonic()
    template = entries[0]
    count = 0
    for k in range(82_047):
        entry = QAEntry(
            id=f"load{k}",
            lang_pair=template.lang_pair,
            context_en=template.context_en,
            context_l=template.context_l,
            question_en=template.question_en,
            question_l=template.question_l,
            answer_en=template.answer_en,
            answer_l=template.answer_l,
        )
        count += len(expand_directions(entry))
    assert count == 328_188
    assert time.monotonic() - started < 30.0


def test_criterion_quality_criterion_exhaustive():
    """All 16 majority combinations; 3-way majority matches brute force."""
    for m1, m2, m3, m4 in itertools.product([False, True], repeat=4):
        assert quality_criterion((m1, m2, m3, m4)) == ((m1 or m2) and m3 and m4)

    rng = random.Random(21)
    for _ in range(500):
        judgments = [
            Judgment("e", f"a{k}", tuple(rng.random() < 0.5 for _ in range(4)))
            for k in range(3)
        ]
        adj = majority_label(judgments)
        brute = tuple(
            sum(j.answers[q] for j in judgments) >= 2 for q in range(4)
        )
        assert adj.majority == brute
        assert adj.accepted == ((brute[0] or brute[1]) and brute[2] and brute[3])


def test_criterion_metric_suite():
    """Pinned token-F1/EM values and properties."""
    assert token_f1("the state of Bavaria", ["the state of Bavaria"], "en") == 1.0
    assert token_f1("apple", ["orange"], "en") == 0.0
    assert abs(token_f1("the state", ["the state of Bavaria"], "en") - 0.5) < TOL
    assert abs(token_f1("巴伐利亚", ["在巴伐利亚"], "zh") - 8 / 9) < TOL

    rng = random.Random(31)
    vocabulary = ["alpha", "beta", "gamma", "delta"]
    for _ in range(200):
        pred = " ".join(rng.choices(vocabulary, k=rng.randint(1, 4)))
        golds = [
            " ".join(rng.choices(vocabulary, k=rng.randint(1, 4))) for _ in range(4)
        ]
        scores = [token_f1(pred, golds[: n + 1], "en") for n in range(4)]
        assert all(b >= a - TOL for a, b in zip(scores, scores[1:]))
        if exact_match(pred, golds, "en"):
            assert abs(token_f1(pred, golds, "en") - 1.0) < TOL


def test_criterion_cohens_kappa():
    """Hand-derived kappa fixtures and the averaged-pairwise definition."""
    assert abs(cohens_kappa([True, False, True], [True, False, True]) - 1.0) < TOL
    assert abs(cohens_kappa([True, True, False, False], [True, False, True, False])) < TOL
    assert abs(cohens_kappa([True, True], [True, True]) - 1.0) < TOL
    assert abs(cohens_kappa([True, True], [True, False])) < TOL

    entries = [f"e{k}" for k in range(6)]
    votes = {
        "a": [True, True, False, False, True, False],
        "b": [True, False, True, False, True, True],
        "c": [False, True, True, False, True, False],
    }
    judgments = [
        Judgment(e, annotator, (v, v, v, v))
        for annotator, values in votes.items()
        for e, v in zip(entries, values)
    ]
    expected = (
        cohens_kappa(votes["a"], votes["b"])
        + cohens_kappa(votes["a"], votes["c"])
        + cohens_kappa(votes["b"], votes["c"])
    ) / 3
    assert abs(averaged_pairwise_kappa(judgments, 2) - expected) < TOL


def test_criterion_serialization_and_determinism(tmp_path, monkeypatch):
    """entry_jsonl round-trip; 4 qas per entry in SQuAD; byte-identical reruns."""
    entries = build_fixture_entries("zh")
    for entry in entries:
        assert entry_from_json(json.loads(json.dumps(entry_to_json(entry)))) == entry
    squad = instances_to_squad(
        [inst for entry in entries for inst in expand_directions(entry)]
    )
    qas_per_entry: dict[str, int] = {}
    for item in squad["data"]:
        entry_id = item["title"].rpartition("/")[0]
        for paragraph in item["paragraphs"]:
            qas_per_entry[entry_id] = qas_per_entry.get(entry_id, 0) + len(paragraph["qas"])
    assert set(qas_per_entry.values()) == {4}

    # Two identical stub runs, byte for byte (entries, audits, manifests).
    outputs = {}
    for name in ("one", "two"):
        run_dir = tmp_path / name
        run_dir.mkdir()
        monkeypatch.chdir(run_dir)
        run_pipeline(Path("."))
        outputs[name] = {
            p.name: p.read_bytes() for p in sorted(Path("zh").iterdir()) if p.is_file()
        }
    assert outputs["one"] == outputs["two"]


def test_criterion_pivot_three_way_toy():
    """Pivoting en-ar and en-zh toy data yields all-non-English ar-zh entries."""
    left = build_fixture_entries("ar")
    right = build_fixture_entries("zh")
    report: list[dict] = []
    pivoted = pivot(left, right, report=report)
    assert len(pivoted) == len(left) == len(right)
    assert not report
    for entry in pivoted:
        assert entry.lang_pair == ("ar", "zh")
        entry.validate()
        for text in (
            entry.context_en,
            entry.context_l,
            entry.question_en,
            entry.question_l,
            entry.answer_en.text,
            entry.answer_l.text,
        ):
            assert not any(ch.isascii() and ch.isalpha() for ch in text), text


def test_criterion_annotation_flow_http(tmp_path):
    """[SECONDARY surface, API side] scripted session over a 5-task fixture."""
    tasks = [
        AnnotationTask(f"t{k}", f"context {k}", f"Question {k} ?", f"ans {k}", f"alt {k}")
        for k in range(5)
    ]
    # Designed votes: t0 accept, t1 reject (q3), t2 accept via OR branch,
    # t3 reject (q4), t4 reject (q1 and q2 both no).
    votes = {
        "t0": [(True, True, True, True)] * 3,
        "t1": [(True, True, False, True), (True, True, False, True), (True, True, True, True)],
        "t2": [(False, True, True, True)] * 3,
        "t3": [(True, True, True, False), (True, True, True, False), (True, True, True, True)],
        "t4": [(False, False, True, True)] * 3,
    }
    expected = {"t0": True, "t1": False, "t2": True, "t3": False, "t4": False}

    store = JudgmentStore(tmp_path / "judgments.jsonl")
    client = TestClient(create_app(tasks, store, max_annotators=3))
    for round_index, annotator in enumerate(("ann0", "ann1", "ann2")):
        while True:
            response = client.get("/api/tasks/next", params={"annotator": annotator})
            if response.status_code == 204:
                break
            task = response.json()["task"]
            payload = {
                "entry_id": task["entry_id"],
                "annotator_id": annotator,
                "answers": list(votes[task["entry_id"]][round_index]),
            }
            assert client.post("/api/judgments", json=payload).status_code == 201
        progress = client.get("/api/progress", params={"annotator": annotator}).json()
        assert progress == {"judged": 5, "total": 5}

    # Duplicate submission surfaces the 409 path.
    duplicate = {
        "entry_id": "t0",
        "annotator_id": "ann0",
        "answers": [True, True, True, True],
    }
    assert client.post("/api/judgments", json=duplicate).status_code == 409

    exported = client.get("/api/export").text.splitlines()
    judgments = [Judgment.from_json(json.loads(line)) for line in exported]
    assert len(judgments) == 15
    labels = {a.entry_id: a.accepted for a in adjudicate(judgments)}
    assert labels == expected
