"""Command-line pipeline: ingest, generate, project, constrain, translate,
assemble, expand, pivot, split, stats, export, evaluate, adjudicate, and the
annotation service.

Stages run as separate subcommands connected by JSON/JSONL artifacts; every
output gets a manifest (input hashes, seed, backend ids, config) and an
audit stream of rejected/discarded records, so runs are reproducible and
auditable. Data errors exit 3, backend errors exit 4, usage errors exit 2,
each with a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import annotate_api, artifacts, backends, candidates, constraints, corpus, dataset
from . import evaluation, projection, translation
from .errors import EXIT_OK, SchemaViolation, ToolkitError

DEFAULT_JOBS = 4


def _print_json(obj, fh=None) -> None:
    print(json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2), file=fh or sys.stdout)


# ---------------------------------------------------------------------------
# Intermediate record (de)serialization. Each stage appends fields to the
# running candidate record so later stages do not re-derive earlier work.
# ---------------------------------------------------------------------------


def _candidate_to_json(cand: candidates.QACandidate) -> dict:
    return {
        "id": cand.id,
        "pair_id": cand.pair_id,
        "question_en": cand.question_en,
        "answer_en": cand.answer_en,
        "answer_span": list(cand.answer_span),
        "provenance": cand.provenance,
    }


def _candidate_from_json(obj: dict) -> candidates.QACandidate:
    try:
        return candidates.QACandidate(
            id=obj["id"],
            pair_id=obj["pair_id"],
            question_en=obj["question_en"],
            answer_en=obj["answer_en"],
            answer_span=(obj["answer_span"][0], obj["answer_span"][1]),
            provenance=obj.get("provenance", {}),
        )
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"malformed candidate record: {exc}") from exc


def _window_to_json(window: corpus.ContextWindow) -> dict:
    return {
        "pair_ids": list(window.pair_ids),
        "focus_index": window.focus_index,
        "src_text": window.src_text,
        "tgt_text": window.tgt_text,
        "src_token_offset": window.src_token_offset,
        "tgt_token_offset": window.tgt_token_offset,
    }


def _window_from_json(obj: dict) -> corpus.ContextWindow:
    return corpus.ContextWindow(
        pair_ids=tuple(obj["pair_ids"]),
        focus_index=obj["focus_index"],
        src_text=obj["src_text"],
        tgt_text=obj["tgt_text"],
        src_token_offset=obj["src_token_offset"],
        tgt_token_offset=obj["tgt_token_offset"],
    )


def _load_entries(path: Path) -> list[dataset.QAEntry]:
    entries = []
    for lineno, obj in enumerate(artifacts.read_jsonl(path), start=1):
        entries.append(dataset.entry_from_json(obj, lineno=lineno))
    return entries


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    report: list[dict] = []
    pairs = corpus.parse_bitext(
        args.src,
        args.tgt,
        meta_file=args.meta,
        doc_id=args.doc_id,
        lang_pair=(args.src_lang, args.tgt_lang),
        report=report,
    )
    alignments = corpus.parse_alignments(
        args.align, pairs, origin=args.alignment_origin, report=report
    )
    corpus_id = args.corpus_id or Path(args.src).stem
    corpus.save_corpus(
        args.out, pairs, alignments, corpus_id, (args.src_lang, args.tgt_lang), args.alignment_origin
    )
    artifacts.write_jsonl(artifacts.audit_path(args.out), report)
    inputs = {"src": args.src, "tgt": args.tgt, "align": args.align}
    if args.meta:
        inputs["meta"] = args.meta
    artifacts.write_manifest(
        args.out,
        "ingest",
        inputs,
        config={
            "src_lang": args.src_lang,
            "tgt_lang": args.tgt_lang,
            "corpus_id": corpus_id,
            "alignment_origin": args.alignment_origin,
        },
        counts={"pairs": len(pairs), "rejected_lines": len(report)},
    )
    return EXIT_OK


def cmd_generate(args) -> int:
    corp, _, meta = corpus.load_corpus(args.corpus)
    backend = backends.resolve_backend("qg", args.qg_backend, timeout=args.backend_timeout)
    enabled = None
    if args.disable_filter:
        enabled = [r for r in candidates.FILTER_RULES if r not in set(args.disable_filter)]
    report: list[dict] = []
    try:
        kept = candidates.generate_candidates(
            corp, backend, jobs=args.jobs, enabled_filters=enabled, report=report
        )
    finally:
        backend.close()
    artifacts.write_jsonl(args.out, [_candidate_to_json(c) for c in kept])
    artifacts.write_jsonl(artifacts.audit_path(args.out), report)
    artifacts.write_manifest(
        args.out,
        "generate",
        {"corpus": args.corpus},
        config={
            "jobs": args.jobs,
            "disabled_filters": sorted(args.disable_filter or []),
            "corpus_id": meta["corpus_id"],
        },
        counts={"kept": len(kept), "rejected": len(report)},
        backends={"qg": args.qg_backend},
    )
    return EXIT_OK


def cmd_project(args) -> int:
    corp, alignments, meta = corpus.load_corpus(args.corpus)
    policy = corpus.ContextPolicy(mode=args.context, n=args.window_n)
    report: list[dict] = []
    records = []
    for obj in artifacts.read_jsonl(args.candidates):
        cand = _candidate_from_json(obj)
        pair = corp.get(cand.pair_id)
        wa = alignments.get(
            cand.pair_id,
            corpus.WordAlignment(cand.pair_id, frozenset(), meta["alignment_origin"]),
        )
        window = corpus.expand_context(cand.pair_id, corp, policy)
        result = projection.project_answer(cand, pair, wa, window, args.max_gap_ratio)
        if isinstance(result, projection.Discard):
            report.append(
                {
                    "stage": "project",
                    "reason": result.reason,
                    "candidate_id": cand.id,
                    "detail": result.detail,
                }
            )
            continue
        record = dict(obj)
        record["window"] = _window_to_json(window)
        record["answer_l"] = {
            "text": result.answer_l,
            "char_start": result.char_start_in_context,
            "tgt_span": list(result.span.tgt_span),
            "aligned_tgt_indices": sorted(result.span.aligned_tgt_indices),
        }
        records.append(record)
    artifacts.write_jsonl(args.out, records)
    artifacts.write_jsonl(artifacts.audit_path(args.out), report)
    artifacts.write_manifest(
        args.out,
        "project",
        {"corpus": args.corpus, "candidates": args.candidates},
        config={
            "context": args.context,
            "window_n": args.window_n,
            "max_gap_ratio": args.max_gap_ratio,
        },
        counts={"projected": len(records), "discarded": len(report)},
    )
    return EXIT_OK


def cmd_constraints(args) -> int:
    corp, alignments, meta = corpus.load_corpus(args.corpus)
    chunker = None
    if args.mode == "np":
        chunker = backends.resolve_backend("chunker", args.chunker, timeout=args.backend_timeout)
    records = []
    try:
        np_cache: dict[str, list[tuple[int, int]]] = {}
        for obj in artifacts.read_jsonl(args.projected):
            cand = _candidate_from_json(obj)
            pair = corp.get(cand.pair_id)
            wa = alignments.get(
                cand.pair_id,
                corpus.WordAlignment(cand.pair_id, frozenset(), meta["alignment_origin"]),
            )
            if args.mode == "np":
                if cand.pair_id not in np_cache:
                    np_cache[cand.pair_id] = constraints.extract_np_candidates(pair, chunker)
                spans = np_cache[cand.pair_id]
            else:
                spans = constraints.sample_random_spans(pair, args.k, args.seed)
            cset = constraints.induce_constraints(cand, spans, pair, wa)
            record = dict(obj)
            record["constraints"] = [
                {
                    "src_phrase": c.src_phrase,
                    "tgt_phrase": c.tgt_phrase,
                    "src_span": list(c.src_span),
                    "tgt_span": list(c.tgt_span),
                }
                for c in cset.items
            ]
            records.append(record)
    finally:
        if chunker is not None:
            chunker.close()
    artifacts.write_jsonl(args.out, records)
    artifacts.write_manifest(
        args.out,
        "constraints",
        {"corpus": args.corpus, "projected": args.projected},
        config={"mode": args.mode, "k": args.k},
        counts={
            "records": len(records),
            "with_constraints": sum(1 for r in records if r["constraints"]),
        },
        backends={"chunker": args.chunker} if args.mode == "np" else {},
        seed=args.seed if args.mode == "random" else None,
    )
    return EXIT_OK


def cmd_translate(args) -> int:
    corp_meta = None
    if args.tgt_lang:
        tgt_lang = args.tgt_lang
    elif args.corpus:
        _, _, corp_meta = corpus.load_corpus(args.corpus)
        tgt_lang = corp_meta["lang_pair"][1]
    else:
        raise SchemaViolation("translate needs --tgt-lang or --corpus")
    backend = backends.resolve_backend("mt", args.mt_backend, timeout=args.backend_timeout)
    report: list[dict] = []
    records = []
    rows = list(artifacts.read_jsonl(args.constraints))
    cands = [_candidate_from_json(obj) for obj in rows]
    csets = [
        constraints.ConstraintSet(
            question_id=cand.id,
            items=tuple(
                constraints.Constraint(
                    src_phrase=c["src_phrase"],
                    tgt_phrase=c["tgt_phrase"],
                    src_span=tuple(c["src_span"]),
                    tgt_span=tuple(c["tgt_span"]),
                )
                for c in obj.get("constraints", [])
            ),
        )
        for obj, cand in zip(rows, cands)
    ]
    requests = [
        {
            "text": cand.question_en,
            "mode": args.mode,
            "constraints": cset.as_backend_constraints() if args.mode == "constrained" else [],
            "src_lang": "en",
            "tgt_lang": tgt_lang,
        }
        for cand, cset in zip(cands, csets)
    ]
    try:
        responses = backends.run_requests(backend, requests, jobs=args.jobs)
    finally:
        backend.close()
    for obj, cand, cset, response in zip(rows, cands, csets, responses):
        question_l = response["translation"]
        if not question_l.strip():
            report.append(
                {
                    "stage": "translate",
                    "reason": translation.BLANK_QUESTION_TRANSLATION,
                    "candidate_id": cand.id,
                }
            )
            continue
        record = dict(obj)
        record["question_l"] = question_l
        record["translation_mode"] = args.mode
        record["constraint_report"] = [
            {"src_phrase": c.src_phrase, "tgt_phrase": c.tgt_phrase, "satisfied": c.satisfied}
            for c in translation.verify_constraints(question_l, cset)
        ]
        records.append(record)
    artifacts.write_jsonl(args.out, records)
    artifacts.write_jsonl(artifacts.audit_path(args.out), report)
    inputs = {"constraints": args.constraints}
    if corp_meta is not None:
        inputs["corpus"] = args.corpus
    artifacts.write_manifest(
        args.out,
        "translate",
        inputs,
        config={"mode": args.mode, "tgt_lang": tgt_lang},
        counts={"translated": len(records), "discarded": len(report)},
        backends={"mt": args.mt_backend},
    )
    return EXIT_OK


def cmd_assemble(args) -> int:
    _, _, meta = corpus.load_corpus(args.corpus)
    lang_pair = meta["lang_pair"]
    report: list[dict] = []
    entries = []
    for obj in artifacts.read_jsonl(args.translated):
        cand = _candidate_from_json(obj)
        window = _window_from_json(obj["window"])
        answer_l = obj["answer_l"]
        projected = projection.ProjectedAnswer(
            answer_l=answer_l["text"],
            span=projection.ProjectedSpan(
                tgt_span=(answer_l["tgt_span"][0], answer_l["tgt_span"][1]),
                aligned_tgt_indices=frozenset(answer_l["aligned_tgt_indices"]),
            ),
            char_start_in_context=answer_l["char_start"],
        )
        translated = translation.TranslatedQuestion(
            question_l=obj["question_l"],
            mode=obj["translation_mode"],
            constraint_report=tuple(
                translation.ConstraintCheck(
                    src_phrase=c["src_phrase"],
                    tgt_phrase=c["tgt_phrase"],
                    satisfied=c["satisfied"],
                )
                for c in obj.get("constraint_report", [])
            ),
        )
        satisfied = {
            (c.src_phrase, c.tgt_phrase): c.satisfied for c in translated.constraint_report
        }
        constraint_records = [
            dict(c, satisfied=satisfied.get((c["src_phrase"], c["tgt_phrase"]), False))
            for c in obj.get("constraints", [])
        ]
        try:
            entry = dataset.assemble_entry(
                cand,
                translated,
                projected,
                window,
                lang_pair=lang_pair,
                provenance={
                    "corpus_id": meta["corpus_id"],
                    "alignment_origin": meta["alignment_origin"],
                    "constraints": constraint_records,
                },
            )
        except ToolkitError as exc:
            report.append(
                {
                    "stage": "assemble",
                    "reason": "extractivity_violation",
                    "candidate_id": cand.id,
                    "detail": str(exc),
                }
            )
            continue
        entries.append(entry)
    artifacts.write_jsonl(args.out, [dataset.entry_to_json(e) for e in entries])
    artifacts.write_jsonl(artifacts.audit_path(args.out), report)
    artifacts.write_manifest(
        args.out,
        "assemble",
        {"corpus": args.corpus, "translated": args.translated},
        config={},
        counts={"entries": len(entries), "aborted": len(report)},
    )
    return EXIT_OK


def cmd_expand(args) -> int:
    entries = _load_entries(args.entries)
    instances = [inst for entry in entries for inst in dataset.expand_directions(entry)]
    artifacts.write_jsonl(args.out, [dataset.instance_to_json(i) for i in instances])
    artifacts.write_manifest(
        args.out,
        "expand",
        {"entries": args.entries},
        config={},
        counts={"entries": len(entries), "instances": len(instances)},
    )
    _print_json({"entries": len(entries), "instances": len(instances)})
    return EXIT_OK


def cmd_pivot(args) -> int:
    left = _load_entries(args.left)
    right = _load_entries(args.right)
    report: list[dict] = []
    pivoted = dataset.pivot(left, right, report=report)
    artifacts.write_jsonl(args.out, [dataset.entry_to_json(e) for e in pivoted])
    artifacts.write_jsonl(artifacts.audit_path(args.out), report)
    artifacts.write_manifest(
        args.out,
        "pivot",
        {"left": args.left, "right": args.right},
        config={},
        counts={"pivoted": len(pivoted), "unmatched": len(report)},
    )
    return EXIT_OK


def cmd_split(args) -> int:
    entries = _load_entries(args.entries)
    adjudications: dict[str, bool] = {}
    for obj in artifacts.read_jsonl(args.adjudications):
        adjudications[obj["entry_id"]] = bool(obj["accepted"])
    splits = dataset.split_entries(entries, adjudications, args.dev_fraction, args.seed)
    artifacts.write_json(args.out, splits.to_json())
    artifacts.write_manifest(
        args.out,
        "split",
        {"entries": args.entries, "adjudications": args.adjudications},
        config={"dev_fraction": args.dev_fraction},
        counts={
            "train": len(splits.train),
            "dev": len(splits.dev),
            "test": len(splits.test),
        },
        seed=args.seed,
    )
    return EXIT_OK


def cmd_stats(args) -> int:
    entries = _load_entries(args.entries)
    splits = None
    if args.splits:
        splits = dataset.DatasetSplit.from_json(artifacts.read_json(args.splits))
    _print_json(dataset.dataset_stats(entries, splits))
    return EXIT_OK


def cmd_export(args) -> int:
    entries = _load_entries(args.entries)
    if args.splits:
        splits = dataset.DatasetSplit.from_json(artifacts.read_json(args.splits))
        wanted = set(getattr(splits, args.split))
        entries = [e for e in entries if e.id in wanted]
    if args.format == "entry_jsonl":
        artifacts.write_jsonl(args.out, [dataset.entry_to_json(e) for e in entries])
    else:
        instances = [inst for entry in entries for inst in dataset.expand_directions(entry)]
        artifacts.write_json(args.out, dataset.instances_to_squad(instances))
    inputs = {"entries": args.entries}
    if args.splits:
        inputs["splits"] = args.splits
    artifacts.write_manifest(
        args.out,
        "export",
        inputs,
        config={"format": args.format, "split": args.split if args.splits else None},
        counts={"entries": len(entries)},
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    predictions = artifacts.read_json(args.preds)
    refs = evaluation.references_from_squad(artifacts.read_json(args.refs))
    if args.lang_pair:
        langs = set(args.lang_pair.split("-"))
        refs = [r for r in refs if {r.context_lang, r.question_lang} <= langs]
    result = evaluation.evaluate(predictions, refs)
    if args.out:
        artifacts.write_json(args.out, result)
        artifacts.write_manifest(
            args.out,
            "evaluate",
            {"preds": args.preds, "refs": args.refs},
            config={"lang_pair": args.lang_pair},
            counts={"instances": result["count"], "missing": len(result["missing_predictions"])},
        )
    _print_json(result)
    return EXIT_OK


def cmd_adjudicate(args) -> int:
    judgments = [
        evaluation.Judgment.from_json(obj) for obj in artifacts.read_jsonl(args.judgments)
    ]
    adjudications = evaluation.adjudicate(judgments)
    artifacts.write_jsonl(args.out, [a.to_json() for a in adjudications])
    kappas = {}
    for q in range(evaluation.N_JUDGMENT_QUESTIONS):
        try:
            kappas[f"q{q + 1}"] = evaluation.averaged_pairwise_kappa(judgments, q)
        except evaluation.NoOverlap:
            kappas[f"q{q + 1}"] = None
    summary = {
        "entries": len(adjudications),
        "accepted": sum(1 for a in adjudications if a.accepted),
        "kappa": kappas,
    }
    artifacts.write_manifest(
        args.out,
        "adjudicate",
        {"judgments": args.judgments},
        config={},
        counts={"entries": len(adjudications), "accepted": summary["accepted"]},
    )
    _print_json(summary)
    return EXIT_OK


def cmd_build_tasks(args) -> int:
    entries = _load_entries(args.entries)
    if args.alt_answers:
        alt = {k: str(v) for k, v in artifacts.read_json(args.alt_answers).items()}
    else:
        backend = backends.resolve_backend("mt", args.mt_backend, timeout=args.backend_timeout)
        try:
            alt = {}
            for entry in entries:
                response = backend.call(
                    {
                        "text": entry.answer_l.text,
                        "mode": "vanilla",
                        "constraints": [],
                        "src_lang": entry.lang_pair[1],
                        "tgt_lang": "en",
                    }
                )
                alt[entry.id] = response["translation"]
        finally:
            backend.close()
    sample_size = args.sample_size if args.sample_size is not None else len(entries)
    tasks = annotate_api.build_tasks(entries, sample_size, args.seed, alt)
    artifacts.write_jsonl(args.out, [t.to_json() for t in tasks])
    artifacts.write_manifest(
        args.out,
        "build-tasks",
        {"entries": args.entries},
        config={"sample_size": sample_size},
        counts={"tasks": len(tasks)},
        backends={"mt": args.mt_backend} if not args.alt_answers else {},
        seed=args.seed,
    )
    return EXIT_OK


def cmd_serve_annotate(args) -> int:
    import uvicorn

    tasks = [
        annotate_api.AnnotationTask.from_json(obj) for obj in artifacts.read_jsonl(args.tasks)
    ]
    store = annotate_api.JudgmentStore(Path(args.judgments_file))
    static_dir = Path(args.static) if args.static else None
    app = annotate_api.create_app(
        tasks, store, max_annotators=args.max_annotators, static_dir=static_dir
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alignqa",
        description="Generate cross-lingual extractive QA datasets from word-aligned bitexts.",
    )
    parser.add_argument("--config", type=Path, help="JSON file presetting any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(func=func)
        return p

    p = add("ingest", cmd_ingest, help="parse and validate a word-aligned bitext")
    p.add_argument("--src", type=Path, required=True)
    p.add_argument("--tgt", type=Path, required=True)
    p.add_argument("--meta", type=Path)
    p.add_argument("--align", type=Path, required=True)
    p.add_argument("--src-lang", default="en")
    p.add_argument("--tgt-lang", required=True)
    p.add_argument("--corpus-id")
    p.add_argument("--doc-id")
    p.add_argument("--alignment-origin", choices=corpus.ALIGNMENT_ORIGINS, default="automatic")
    p.add_argument("--out", type=Path, required=True)

    p = add("generate", cmd_generate, help="question generation + answer location + filters")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--qg-backend", required=True)
    p.add_argument("--jobs", type=int, default=DEFAULT_JOBS)
    p.add_argument("--backend-timeout", type=float, default=backends.DEFAULT_TIMEOUT)
    p.add_argument("--disable-filter", action="append", choices=candidates.FILTER_RULES)
    p.add_argument("--out", type=Path, required=True)

    p = add("project", cmd_project, help="project answer spans through word alignments")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--candidates", type=Path, required=True)
    p.add_argument("--context", choices=corpus.CONTEXT_MODES, default="sentence")
    p.add_argument("--window-n", type=int, default=0)
    p.add_argument("--max-gap-ratio", type=float, default=1.0)
    p.add_argument("--out", type=Path, required=True)

    p = add("constraints", cmd_constraints, help="induce lexical constraints for questions")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--projected", type=Path, required=True)
    p.add_argument("--chunker", default="stub:chunker")
    p.add_argument("--mode", choices=("np", "random"), default="np")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend-timeout", type=float, default=backends.DEFAULT_TIMEOUT)
    p.add_argument("--out", type=Path, required=True)

    p = add("translate", cmd_translate, help="translate questions with an MT backend")
    p.add_argument("--corpus", type=Path)
    p.add_argument("--constraints", type=Path, required=True)
    p.add_argument("--mt-backend", required=True)
    p.add_argument("--mode", choices=translation.TRANSLATION_MODES, default="constrained")
    p.add_argument("--tgt-lang")
    p.add_argument("--jobs", type=int, default=DEFAULT_JOBS)
    p.add_argument("--backend-timeout", type=float, default=backends.DEFAULT_TIMEOUT)
    p.add_argument("--out", type=Path, required=True)

    p = add("assemble", cmd_assemble, help="assemble 6-field QA entries")
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--translated", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = add("expand", cmd_expand, help="expand entries to 4 directional instances")
    p.add_argument("--entries", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = add("pivot", cmd_pivot, help="compose two English-centric datasets")
    p.add_argument("--left", type=Path, required=True)
    p.add_argument("--right", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = add("split", cmd_split, help="split entries using adjudications")
    p.add_argument("--entries", type=Path, required=True)
    p.add_argument("--adjudications", type=Path, required=True)
    p.add_argument("--dev-fraction", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = add("stats", cmd_stats, help="per-language per-split entry counts")
    p.add_argument("--entries", type=Path, required=True)
    p.add_argument("--splits", type=Path)

    p = add("export", cmd_export, help="export entries as JSONL or SQuAD JSON")
    p.add_argument("--entries", type=Path, required=True)
    p.add_argument("--format", choices=("entry_jsonl", "squad_json"), default="entry_jsonl")
    p.add_argument("--splits", type=Path)
    p.add_argument("--split", choices=("train", "dev", "test"), default="test")
    p.add_argument("--out", type=Path, required=True)

    p = add("evaluate", cmd_evaluate, help="score predictions against references")
    p.add_argument("--preds", type=Path, required=True)
    p.add_argument("--refs", type=Path, required=True)
    p.add_argument("--lang-pair")
    p.add_argument("--out", type=Path)

    p = add("adjudicate", cmd_adjudicate, help="majority labels, acceptance, kappa")
    p.add_argument("--judgments", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)

    p = add("build-tasks", cmd_build_tasks, help="sample entries into annotation tasks")
    p.add_argument("--entries", type=Path, required=True)
    p.add_argument("--sample-size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alt-answers", type=Path)
    p.add_argument("--mt-backend", default="stub:mt")
    p.add_argument("--backend-timeout", type=float, default=backends.DEFAULT_TIMEOUT)
    p.add_argument("--out", type=Path, required=True)

    p = add("serve-annotate", cmd_serve_annotate, help="run the annotation HTTP service")
    p.add_argument("--tasks", type=Path, required=True)
    p.add_argument("--judgments-file", type=Path, required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8571)
    p.add_argument("--max-annotators", type=int, default=annotate_api.DEFAULT_MAX_ANNOTATORS)
    p.add_argument("--static", type=Path)

    return parser


def _apply_config(argv: list[str]) -> list[str]:
    """Splice config-file presets into argv as flags; explicit flags win."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    presets = artifacts.read_json(Path(argv[at + 1]))
    rest = argv[:at] + argv[at + 2 :]
    sub_at = next((k for k, tok in enumerate(rest) if not tok.startswith("-")), None)
    if sub_at is None:
        return rest
    explicit = set(rest)
    injected: list[str] = []
    for key, value in presets.items():
        flag = "--" + str(key).replace("_", "-")
        if flag in explicit:
            continue
        if isinstance(value, bool):
            if value:
                injected.append(flag)
        elif isinstance(value, list):
            for item in value:
                injected.extend([flag, str(item)])
        else:
            injected.extend([flag, str(value)])
    return rest[: sub_at + 1] + injected + rest[sub_at + 1 :]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except ToolkitError as exc:
        _print_json(exc.to_json(), fh=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
